#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "hybisim/model.hpp"
#include "hybisim/vec.hpp"

namespace hybisim {

struct FlowConfig {
    double step = 1e-3;       // RK4 step size
    double event_tol = 1e-9;  // boundary localization tolerance
    double eq_tol = 1e-6;     // ||f|| threshold for rest points
    double t_max = 50.0;      // integration horizon
    bool record_trajectory = false;
};

enum class FlowKind { Exit, Equilibrium, Timeout, Escaped };

struct FlowResult {
    FlowKind kind;
    Vec point;    // exit point / rest point / last point reached
    double time;  // exit time; detection time otherwise
    // Invariant component that was active at the end, and the rows of that
    // component whose residual sits on the boundary at an Exit.
    std::size_t component = static_cast<std::size_t>(-1);
    std::vector<std::size_t> boundary_rows;
    std::vector<std::pair<double, Vec>> trajectory;  // when recorded
};

Vec eval_field(const HybridAutomaton& h, int mode, const Vec& x);

bool is_equilibrium(const HybridAutomaton& h, int mode, const Vec& x, double eq_tol);

// Integrates the mode's field from `start` until the trajectory leaves the
// mode invariant (Exit, with the boundary point localized to cfg.event_tol),
// settles at a rest point (Equilibrium), or runs out of horizon (Timeout).
// A start on the boundary with the field pointing outward exits at time
// exactly 0.0.  Starting further than 100*event_tol outside the invariant is
// an EngineError; Escaped reports a localization failure.
FlowResult transverse(const HybridAutomaton& h, int mode, const Vec& start,
                      const FlowConfig& cfg);

// Point reached after flowing for time t from `start` in `mode`, or nullopt
// when the trajectory has already left the invariant by then (t past the
// exit time, or past cfg.t_max when there is no exit).
std::optional<Vec> flow_at(const HybridAutomaton& h, int mode, const Vec& start,
                           double t, const FlowConfig& cfg);

}  // namespace hybisim
