#pragma once

#include <map>
#include <string>
#include <vector>

#include "hybisim/flow.hpp"
#include "hybisim/model.hpp"
#include "hybisim/vec.hpp"

namespace hybisim {

struct HybridState {
    int mode;
    Vec point;
};

enum class PointClass { GuardPoint, Equilibrium, Blocking };

// The event-level view of a hybrid automaton: states are points where the
// continuous story pauses (guard points, rest points, dead ends), and a
// move jumps along an enabled edge and flows in the target mode until the
// next such point.  States are interned to small dense ids; classification
// and successor computation are memoized.
class MappedSystem {
public:
    MappedSystem(const HybridAutomaton& h, FlowConfig cfg);

    const HybridAutomaton& automaton() const { return h_; }
    const FlowConfig& config() const { return cfg_; }

    int intern(const HybridState& s);
    const HybridState& state(int id) const { return states_[id]; }
    int state_count() const { return static_cast<int>(states_.size()); }

    // Output symbol of the state's mode.
    const std::string& output_of(int id) const;

    // Guard membership takes precedence over the rest-point test, which
    // takes precedence over the dead-end test.  A point that flows strictly
    // inside its mode is not a valid state here (EngineError).
    PointClass classify(int id);

    // Output symbols reachable in one move, sorted.  A guard point offers
    // the outputs of the enabled edges' targets; a rest point offers its own
    // output (it can idle in place); a dead end offers nothing.
    std::vector<std::string> enabled_outputs(int id);

    // States reached by taking the move with observed output `y` (empty, or
    // a single state).  Guard moves resolve the unique enabled edge whose
    // target mode carries output y (two such edges is an EngineError), apply
    // the reset, and flow in the target mode to the next pause point.
    // A move that lands exactly on its source state is dropped.
    std::vector<int> successors(int id, const std::string& y);

    // Input label consumed by the move with output y: the resolved edge's
    // input for a guard point, "*" for a rest point idling in place.
    std::string successor_input(int id, const std::string& y);

    // Registers a rest point so later flows settle onto it; returns the
    // interned id of the registered point (an existing one within
    // `snap_radius` wins).
    int register_equilibrium(int mode, const Vec& p);

    double snap_radius() const { return snap_radius_; }

private:
    const HybridAutomaton& h_;
    FlowConfig cfg_;
    std::vector<HybridState> states_;
    std::map<std::string, int> intern_index_;
    std::map<int, PointClass> class_cache_;
    std::map<std::pair<int, std::string>, std::vector<int>> succ_cache_;
    std::map<std::pair<int, std::string>, std::string> input_cache_;
    std::vector<int> equilibria_;  // interned ids of registered rest points
    double snap_radius_ = 1e-4;

    std::string key_of(const HybridState& s) const;
    // Edges from the state's mode whose guard contains the point.
    std::vector<int> enabled_edges(int id);
    int land(int mode, const Vec& from);
};

// Euclidean distance between states of the same mode, +inf across modes.
double state_distance(const MappedSystem& m, int a, int b);

}  // namespace hybisim
