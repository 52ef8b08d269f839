#pragma once

#include <set>
#include <string>
#include <vector>

#include "hybisim/mapped_system.hpp"
#include "hybisim/transition_system.hpp"

namespace hybisim {

// A finite sample of the mapped system's state space: every guard surface
// is covered at spacing <= `spacing`, plus every rest point found inside a
// mode invariant.
struct SampleGrid {
    double eta = 0.0;      // requested resolution parameter
    double spacing = 0.0;  // spacing actually used for surface sampling
    std::vector<int> states;             // interned ids, deterministic order
    std::vector<std::string> provenance; // per state: where it came from
};

SampleGrid sample_grid(MappedSystem& m, double eta, double spacing);
inline SampleGrid sample_grid(MappedSystem& m, double eta) {
    return sample_grid(m, eta, eta);
}

enum class RefinementStatus { FixedPoint, Exhausted, Inconclusive };

const char* refinement_status_name(RefinementStatus s);

struct RefinementRound {
    int k;            // horizon of this partition level
    int class_count;  // classes over the grid states
    Partition partition;
};

// Output sequences are coded over `outputs`; behavior sets are sets of
// coded sequences.
using BehaviorSet = std::set<std::vector<int>>;

struct RefinementResult {
    RefinementStatus status = RefinementStatus::Inconclusive;
    int k_star = -1;                     // depth reached when refinement stopped
    std::vector<RefinementRound> trace;  // partitions at horizons 0,1,...
    std::vector<std::string> outputs;    // output code alphabet
    // Per grid state: behavior sets at depth k_star and k_star + 1.
    std::vector<BehaviorSet> h_k;
    std::vector<BehaviorSet> h_k1;
};

// Behavior-based partition refinement over the grid: grow every state's
// bundle of runs one move at a time (runs that dead-end are kept at their
// final length), partition grid states by equal observed-output bundles,
// and stop as soon as one growth round leaves the class count unchanged.
// Runs extend through landing states even when those are off the grid.
RefinementResult run_refinement(MappedSystem& m, const SampleGrid& grid, int k_max);

struct QuotientNode {
    std::string output;
    HybridState representative;
    std::string representative_mode;  // mode name of the representative
    BehaviorSet behavior;             // depth-k_star bundle shared by the class
};

struct QuotientEdge {
    int src;
    std::string input;
    int dst;
};

struct QuotientGraph {
    std::vector<QuotientNode> nodes;
    std::vector<QuotientEdge> edges;  // dedup'd, sorted by (src, input, dst)
    int k = 0;
    double eta = 0.0;
    int grid_size = 0;
    std::string model_digest;
    std::vector<std::string> outputs;
    std::vector<int> node_of_grid_state;  // parallel to SampleGrid::states
};

// Minimum-state quotient read off a finished refinement: one node per
// behavior class, edges recovered from the depth k_star+1 bundles (the move
// with observed output y goes to the class whose bundle equals the y-tails).
QuotientGraph build_quotient(MappedSystem& m, const SampleGrid& grid,
                             const RefinementResult& refinement);

FiniteTransitionSystem quotient_to_fts(const QuotientGraph& q);

// Explicit finite transition system over the closure of the grid under
// successor moves (landing states included).  `closure_ids` receives the
// interned mapped-system id of each FTS state; grid states come first in
// grid order.
FiniteTransitionSystem restriction_system(MappedSystem& m, const SampleGrid& grid,
                                          std::vector<int>* closure_ids = nullptr);

struct SweepRound {
    double eta = 0.0;
    int grid_size = 0;
    RefinementStatus status = RefinementStatus::Inconclusive;
    int k = -1;
    int classes = 0;
    QuotientGraph quotient;
};

struct SweepResult {
    std::vector<SweepRound> rounds;
    bool stable = false;  // final two rounds agree up to isomorphism
};

// Re-runs the whole pipeline at geometrically shrinking resolution
// (eta, eta*factor, ...) and reports whether the quotient has stopped
// changing: the last two rounds must both reach a fixed point, agree on
// class count, and have isomorphic quotients.
SweepResult eta_sweep(const HybridAutomaton& h, double eta0, double factor,
                      int rounds, const FlowConfig& cfg, int k_max);

}  // namespace hybisim
