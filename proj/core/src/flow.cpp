#include "hybisim/flow.hpp"

#include <algorithm>
#include <cmath>

#include "hybisim/errors.hpp"

namespace hybisim {

Vec eval_field(const HybridAutomaton& h, int mode, const Vec& x) {
    const Mode& m = h.modes[mode];
    Vec f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) f[i] = eval_linked(m.flow[i], x.data());
    return f;
}

bool is_equilibrium(const HybridAutomaton& h, int mode, const Vec& x, double eq_tol) {
    return norm2(eval_field(h, mode, x)) <= eq_tol;
}

namespace {

Vec rk4_step(const HybridAutomaton& h, int mode, const Vec& x, double dt) {
    Vec k1 = eval_field(h, mode, x);
    Vec k2 = eval_field(h, mode, axpy(dt / 2.0, k1, x));
    Vec k3 = eval_field(h, mode, axpy(dt / 2.0, k2, x));
    Vec k4 = eval_field(h, mode, axpy(dt, k3, x));
    Vec out(x);
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

std::vector<std::size_t> boundary_rows_at(const Polytope& inv, std::size_t ci, const Vec& p,
                                          double tol) {
    std::vector<std::size_t> rows;
    const ConvexComponent& comp = inv.component(ci);
    for (std::size_t r = 0; r < comp.rows.size(); ++r) {
        double res = dot(comp.rows[r].a, p) - comp.rows[r].b;
        if (comp.rows[r].rel == Relation::EQ) res = std::fabs(res);
        if (std::fabs(res) <= tol) rows.push_back(r);
    }
    return rows;
}

}  // namespace

FlowResult transverse(const HybridAutomaton& h, int mode, const Vec& start,
                      const FlowConfig& cfg) {
    const Polytope& inv = h.modes[mode].invariant;
    if (inv.component_count() == 0)
        throw EngineError("mode '" + h.modes[mode].name + "' has an empty invariant");

    FlowResult out;
    out.trajectory.clear();

    Vec f0 = eval_field(h, mode, start);
    if (norm2(f0) <= cfg.eq_tol) {
        out.kind = FlowKind::Equilibrium;
        out.point = start;
        out.time = 0.0;
        auto [r0, ci0] = inv.residual(start);
        out.component = ci0;
        return out;
    }

    auto [r0, ci] = inv.residual(start);
    if (r0 > 100.0 * cfg.event_tol)
        throw EngineError("flow start lies outside the mode invariant (residual " +
                          std::to_string(r0) + ")");

    // Boundary start with the field pointing outward: exit at exactly t=0.
    {
        Vec probe = axpy(cfg.step, f0, start);
        double rp = inv.component_residual(ci, probe);
        bool other_contains = false;
        for (std::size_t cj = 0; cj < inv.component_count(); ++cj)
            if (cj != ci && inv.component_contains(cj, probe, cfg.event_tol))
                other_contains = true;
        if (r0 >= -cfg.event_tol && rp > std::max(r0, cfg.event_tol) && !other_contains) {
            out.kind = FlowKind::Exit;
            out.point = start;
            out.time = 0.0;
            out.component = ci;
            out.boundary_rows = boundary_rows_at(inv, ci, start, cfg.event_tol);
            return out;
        }
    }

    Vec x = start;
    double t = 0.0;
    if (cfg.record_trajectory) out.trajectory.emplace_back(t, x);
    int switches = 0;

    while (t < cfg.t_max) {
        Vec f = eval_field(h, mode, x);
        if (norm2(f) <= cfg.eq_tol) {
            out.kind = FlowKind::Equilibrium;
            out.point = x;
            out.time = t;
            out.component = ci;
            return out;
        }

        Vec x2 = rk4_step(h, mode, x, cfg.step);
        double r2 = inv.component_residual(ci, x2);
        if (r2 <= cfg.event_tol) {
            x = std::move(x2);
            t += cfg.step;
            if (cfg.record_trajectory) out.trajectory.emplace_back(t, x);
            continue;
        }

        // The step left the active component: bisect the crossing within it.
        double lo = 0.0, hi = cfg.step;
        Vec xlo = x;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            Vec xm = rk4_step(h, mode, x, mid);
            if (inv.component_residual(ci, xm) <= cfg.event_tol) {
                lo = mid;
                xlo = std::move(xm);
            } else {
                hi = mid;
            }
        }
        Vec x_exit = std::move(xlo);
        double t_exit = t + lo;

        // The union may continue in a sibling component; follow it there.
        Vec fe = eval_field(h, mode, x_exit);
        Vec probe2 = axpy(cfg.step, fe, x_exit);
        std::size_t next_ci = Polytope::npos;
        for (std::size_t cj = 0; cj < inv.component_count(); ++cj) {
            if (cj == ci) continue;
            if (inv.component_contains(cj, x_exit, 10.0 * cfg.event_tol) &&
                inv.component_contains(cj, probe2, cfg.event_tol)) {
                next_ci = cj;
                break;
            }
        }
        if (next_ci != Polytope::npos) {
            if (++switches > 100)
                throw EngineError("component switching did not settle");
            ci = next_ci;
            x = std::move(x_exit);
            t = t_exit;
            if (cfg.record_trajectory) out.trajectory.emplace_back(t, x);
            continue;
        }

        double res_exit = inv.component_residual(ci, x_exit);
        out.kind = res_exit > 10.0 * cfg.event_tol ? FlowKind::Escaped : FlowKind::Exit;
        out.point = std::move(x_exit);
        out.time = t_exit;
        out.component = ci;
        if (out.kind == FlowKind::Exit)
            out.boundary_rows = boundary_rows_at(inv, ci, out.point, cfg.event_tol);
        if (cfg.record_trajectory) out.trajectory.emplace_back(out.time, out.point);
        return out;
    }

    out.kind = FlowKind::Timeout;
    out.point = x;
    out.time = t;
    out.component = ci;
    return out;
}

std::optional<Vec> flow_at(const HybridAutomaton& h, int mode, const Vec& start, double t,
                           const FlowConfig& cfg) {
    if (t < 0.0) return std::nullopt;
    if (t == 0.0) return start;

    FlowResult r = transverse(h, mode, start, cfg);
    if (r.kind == FlowKind::Escaped) return std::nullopt;
    double horizon = r.kind == FlowKind::Exit ? r.time : cfg.t_max;
    if (t > horizon) return std::nullopt;

    Vec x = start;
    double done = 0.0;
    while (done + cfg.step <= t) {
        if (norm2(eval_field(h, mode, x)) <= cfg.eq_tol) return x;
        x = rk4_step(h, mode, x, cfg.step);
        done += cfg.step;
    }
    if (t > done) {
        if (norm2(eval_field(h, mode, x)) <= cfg.eq_tol) return x;
        x = rk4_step(h, mode, x, t - done);
    }
    return x;
}

}  // namespace hybisim
