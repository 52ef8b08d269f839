#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hybisim {

// An explicit finite transition system with state outputs and input-labeled
// transitions.  Outputs and inputs are interned: states carry indices into
// `outputs`, transitions indices into `inputs`.
struct FiniteTransitionSystem {
    std::vector<std::string> outputs;
    std::vector<std::string> inputs;
    std::vector<int> output_of;  // state -> index into outputs

    struct Trans {
        int src;
        int input;
        int dst;
    };
    std::vector<Trans> transitions;

    int state_count() const { return static_cast<int>(output_of.size()); }
    // Per state: (input, dst) pairs in declaration order.
    std::vector<std::vector<std::pair<int, int>>> successor_lists() const;
    std::vector<std::vector<int>> successor_states() const;  // dedup'd dsts
};

// True unless some state has two distinct successor states sharing an output.
bool is_output_deterministic(const FiniteTransitionSystem& fts);

// Output sequences of runs from `state` taking `horizon` steps, keeping the
// shorter sequence of any run that dead-ends first.  Sequences are vectors
// of output codes and include the start state's output.
std::set<std::vector<int>> output_behaviors(const FiniteTransitionSystem& fts,
                                            int state, int horizon);

struct Partition {
    std::vector<int> class_of;              // state -> class id
    std::vector<std::vector<int>> classes;  // class id -> sorted members

    int class_count() const { return static_cast<int>(classes.size()); }
};

// Builds a Partition from per-state keys: classes numbered by first
// appearance in state order.
Partition partition_from_classes(const std::vector<int>& class_of);

// States grouped by equal behavior sets at the given horizon.
Partition partition_by_horizon(const FiniteTransitionSystem& fts, int horizon);

struct MinimizeResult {
    int rounds = 0;  // refinement depth at which the partition stopped changing
    Partition partition;
    std::vector<int> class_counts;  // one entry per computed partition level
    FiniteTransitionSystem quotient;
    std::vector<int> representative;  // class -> least member state
};

// Iterated behavioral refinement: start from the output partition and
// refine by (class, successor output/class pairs) until the class count
// stops changing.  The result partition groups states with equal behavior
// sets at every horizon.  Requires an output-deterministic system
// (EngineError otherwise).
MinimizeResult minimize_by_behavior(const FiniteTransitionSystem& fts);

// Classical partition refinement (splitting on successor classes only,
// inputs and outputs of transitions ignored; initial partition by output).
MinimizeResult classical_minimize(const FiniteTransitionSystem& fts);

struct BisimCheckResult {
    bool ok = true;
    std::string counterexample;  // first violation, empty when ok
};

// Checks that `rel` (pairs of state indices of a and b) is a bisimulation:
// the two systems expose the same output sets, related states agree on
// output, and every transition of one side is matched by a transition of
// the other into a related pair (input labels are not compared).
BisimCheckResult check_bisimulation(const FiniteTransitionSystem& a,
                                    const FiniteTransitionSystem& b,
                                    const std::vector<std::pair<int, int>>& rel);

// Output- and input-label-preserving graph isomorphism (color refinement
// plus backtracking).  Returns the state mapping a -> b when one exists.
std::optional<std::vector<int>> find_isomorphism(const FiniteTransitionSystem& a,
                                                 const FiniteTransitionSystem& b);

}  // namespace hybisim
