#include "hybisim/bisim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "hybisim/errors.hpp"
#include "hybisim/serialize.hpp"

namespace hybisim {

const char* refinement_status_name(RefinementStatus s) {
    switch (s) {
        case RefinementStatus::FixedPoint: return "fixed-point";
        case RefinementStatus::Exhausted: return "exhausted";
        case RefinementStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

// Newton iteration for a rest point of the mode's field, seeded at `seed`.
// Jacobian by forward differences.  Returns true on ||f|| <= 1e-13.
bool newton_equilibrium(const HybridAutomaton& h, int mode, Vec x, Vec& out) {
    const std::size_t n = x.size();
    const double fd = 1e-7;
    for (int it = 0; it < 50; ++it) {
        Vec f = eval_field(h, mode, x);
        if (norm2(f) <= 1e-13) {
            out = x;
            return true;
        }
        std::vector<Vec> J(n, Vec(n, 0.0));
        for (std::size_t j = 0; j < n; ++j) {
            Vec xp = x;
            xp[j] += fd;
            Vec fp = eval_field(h, mode, xp);
            for (std::size_t i = 0; i < n; ++i) J[i][j] = (fp[i] - f[i]) / fd;
        }
        Vec delta;
        Vec rhs = f;
        for (double& v : rhs) v = -v;
        if (!solve_linear(J, rhs, delta, 1e-14)) return false;
        for (std::size_t i = 0; i < n; ++i) x[i] += delta[i];
        if (!std::isfinite(norm2(x))) return false;
    }
    if (norm2(eval_field(h, mode, x)) <= 1e-13) {
        out = x;
        return true;
    }
    return false;
}

int probes_per_axis(std::size_t dim) {
    switch (dim) {
        case 1: return 81;
        case 2: return 9;
        case 3: return 5;
        default: return 0;
    }
}

}  // namespace

SampleGrid sample_grid(MappedSystem& m, double eta, double spacing) {
    if (spacing <= 0.0) throw EngineError("grid spacing must be positive");
    const HybridAutomaton& h = m.automaton();
    SampleGrid g;
    g.eta = eta;
    g.spacing = spacing;
    std::set<int> seen;

    auto add = [&](int id, std::string prov) {
        if (seen.insert(id).second) {
            g.states.push_back(id);
            g.provenance.push_back(std::move(prov));
        }
    };

    // Guard surfaces, covered at the requested spacing.
    for (std::size_t ei = 0; ei < h.edges.size(); ++ei) {
        const Edge& e = h.edges[ei];
        for (std::size_t ci = 0; ci < e.guard.component_count(); ++ci) {
            if (e.guard.component_vertices(ci).empty()) continue;
            std::vector<Vec> pts = e.guard.component_lattice(ci, spacing);
            if (pts.empty())
                throw EngineError("guard sampling produced no points for edge " +
                                  std::to_string(ei));
            std::size_t kept = 0;
            for (const Vec& p : pts) {
                int id = m.intern({e.src, p});
                try {
                    m.classify(id);
                } catch (const EngineError&) {
                    continue;  // point not usable as a state; skip it
                }
                ++kept;
                add(id, "edge=" + std::to_string(ei) + " component=" + std::to_string(ci));
            }
            if (kept == 0)
                throw EngineError("no usable sample points on guard of edge " +
                                  std::to_string(ei));
        }
    }

    // Rest points inside each mode invariant, found from a coarse probe
    // lattice over the invariant's bounding box.
    for (std::size_t mi = 0; mi < h.modes.size(); ++mi) {
        const Polytope& inv = h.modes[mi].invariant;
        const std::size_t dim = h.variables.size();
        int per_axis = probes_per_axis(dim);
        if (per_axis == 0) continue;  // no rest-point search beyond 3 dimensions

        Vec lo(dim, 0.0), hi(dim, 0.0);
        bool have_box = false;
        for (std::size_t ci = 0; ci < inv.component_count(); ++ci) {
            for (const Vec& v : inv.component_vertices(ci)) {
                if (!have_box) {
                    lo = hi = v;
                    have_box = true;
                } else {
                    for (std::size_t d = 0; d < dim; ++d) {
                        lo[d] = std::min(lo[d], v[d]);
                        hi[d] = std::max(hi[d], v[d]);
                    }
                }
            }
        }
        if (!have_box) continue;

        std::vector<Vec> found;
        std::vector<int> idx(dim, 0);
        while (true) {
            Vec probe(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                double t = per_axis == 1 ? 0.5
                                         : static_cast<double>(idx[d]) /
                                               static_cast<double>(per_axis - 1);
                probe[d] = lo[d] + t * (hi[d] - lo[d]);
            }
            Vec eq;
            if (newton_equilibrium(h, static_cast<int>(mi), probe, eq) &&
                inv.contains(eq, 1e-9)) {
                bool dup = false;
                for (const Vec& q : found)
                    if (dist2(q, eq) <= 1e-6) dup = true;
                if (!dup) {
                    found.push_back(eq);
                    int id = m.register_equilibrium(static_cast<int>(mi), eq);
                    add(id, "equilibrium mode=" + h.modes[mi].name);
                }
            }
            // Advance the probe lattice odometer.
            std::size_t d = 0;
            while (d < dim && ++idx[d] >= per_axis) {
                idx[d] = 0;
                ++d;
            }
            if (d == dim) break;
        }
    }

    return g;
}

namespace {

Partition partition_from_sets(const std::vector<BehaviorSet>& sets) {
    Partition p;
    p.class_of.assign(sets.size(), -1);
    std::map<BehaviorSet, int> ids;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        auto [it, fresh] = ids.try_emplace(sets[i], static_cast<int>(p.classes.size()));
        if (fresh) p.classes.emplace_back();
        p.class_of[i] = it->second;
        p.classes[it->second].push_back(static_cast<int>(i));
    }
    return p;
}

}  // namespace

RefinementResult run_refinement(MappedSystem& m, const SampleGrid& grid, int k_max) {
    RefinementResult res;
    res.outputs = m.automaton().output_alphabet();
    std::map<std::string, int> ycode;
    for (std::size_t i = 0; i < res.outputs.size(); ++i)
        ycode[res.outputs[i]] = static_cast<int>(i);

    const std::size_t n = grid.states.size();
    if (n == 0) throw EngineError("refinement needs a nonempty grid");

    // Per grid state: the bundle of runs grown so far, as state-id
    // sequences.  Runs that dead-end stay in the bundle at their final
    // length; observation happens through the mode outputs.
    std::vector<std::set<std::vector<int>>> bundles(n);
    for (std::size_t i = 0; i < n; ++i) bundles[i].insert({grid.states[i]});

    auto observe = [&](const std::set<std::vector<int>>& runs) {
        BehaviorSet ys;
        for (const auto& run : runs) {
            std::vector<int> seq;
            seq.reserve(run.size());
            for (int id : run) seq.push_back(ycode.at(m.output_of(id)));
            ys.insert(std::move(seq));
        }
        return ys;
    };

    auto snapshot = [&] {
        std::vector<BehaviorSet> h(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = observe(bundles[i]);
        return h;
    };

    std::vector<BehaviorSet> h_prev = snapshot();
    Partition q_prev = partition_from_sets(h_prev);
    res.trace.push_back({0, q_prev.class_count(), q_prev});

    constexpr std::size_t kSeqCap = 1000000;

    for (int k = 0;; ++k) {
        // Grow: extend every run of length exactly k by each available move.
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::set<std::vector<int>> next;
            for (const auto& run : bundles[i]) {
                int len = static_cast<int>(run.size()) - 1;
                if (len < k) {
                    next.insert(run);
                    continue;
                }
                int end = run.back();
                bool extended = false;
                for (const std::string& y : m.enabled_outputs(end)) {
                    for (int t : m.successors(end, y)) {
                        std::vector<int> run2 = run;
                        run2.push_back(t);
                        next.insert(std::move(run2));
                        extended = true;
                    }
                }
                if (!extended) next.insert(run);
            }
            bundles[i] = std::move(next);
            total += bundles[i].size();
            if (total > kSeqCap)
                throw EngineError("run bundles exceeded " + std::to_string(kSeqCap) +
                                  " sequences; resolution too fine or system too branching");
        }

        std::vector<BehaviorSet> h_next = snapshot();
        Partition q_next = partition_from_sets(h_next);
        res.trace.push_back({k + 1, q_next.class_count(), q_next});

        if (q_next.class_count() == q_prev.class_count()) {
            if (q_next.class_of != q_prev.class_of)
                throw EngineError("refinement plateaued with a different partition");
            res.status = RefinementStatus::FixedPoint;
            res.k_star = k;
            res.h_k = std::move(h_prev);
            res.h_k1 = std::move(h_next);
            return res;
        }
        if (k + 1 >= k_max) {
            res.status = RefinementStatus::Inconclusive;
            res.k_star = k + 1;
            res.h_k = std::move(h_prev);
            res.h_k1 = std::move(h_next);
            return res;
        }
        if (k + 1 >= static_cast<int>(n)) {
            // Unreachable when counts strictly grow; kept as a stop-gap.
            res.status = RefinementStatus::Exhausted;
            res.k_star = k + 1;
            res.h_k = std::move(h_prev);
            res.h_k1 = std::move(h_next);
            return res;
        }
        h_prev = std::move(h_next);
        q_prev = std::move(q_next);
    }
}

namespace {

// First min(k+1, len) symbols of each sequence: the depth-k view of a
// depth-(k+1) bundle.
BehaviorSet truncate_bundle(const BehaviorSet& deep, int k) {
    BehaviorSet out;
    for (const auto& seq : deep) {
        std::size_t keep = std::min(seq.size(), static_cast<std::size_t>(k) + 1);
        out.insert(std::vector<int>(seq.begin(), seq.begin() + keep));
    }
    return out;
}

}  // namespace

QuotientGraph build_quotient(MappedSystem& m, const SampleGrid& grid,
                             const RefinementResult& refinement) {
    if (refinement.status != RefinementStatus::FixedPoint)
        throw EngineError("quotient extraction needs a refinement fixed point");

    const std::size_t n = grid.states.size();
    QuotientGraph q;
    q.k = refinement.k_star;
    q.eta = grid.eta;
    q.grid_size = static_cast<int>(n);
    q.outputs = refinement.outputs;
    q.model_digest = model_digest(m.automaton().source_text);

    // One node per distinct depth-k bundle, in bundle order.
    std::map<BehaviorSet, int> node_of;
    for (std::size_t i = 0; i < n; ++i) node_of.try_emplace(refinement.h_k[i], -1);
    {
        int next_id = 0;
        for (auto& [bundle, id] : node_of) id = next_id++;
    }
    q.nodes.resize(node_of.size());
    q.node_of_grid_state.assign(n, -1);
    std::vector<bool> have_repr(node_of.size(), false);
    for (std::size_t i = 0; i < n; ++i) {
        int id = node_of.at(refinement.h_k[i]);
        q.node_of_grid_state[i] = id;
        if (!have_repr[id]) {
            have_repr[id] = true;
            QuotientNode& node = q.nodes[id];
            node.behavior = refinement.h_k[i];
            node.representative = m.state(grid.states[i]);
            node.representative_mode = m.automaton().modes[node.representative.mode].name;
            node.output = refinement.outputs[node.behavior.begin()->front()];
        }
    }

    // Edges read off the depth-(k+1) bundles: the move observing y goes to
    // the node whose bundle equals the y-tails.
    std::map<BehaviorSet, std::size_t> deep_repr;  // bundle -> first grid index
    for (std::size_t i = 0; i < n; ++i) deep_repr.try_emplace(refinement.h_k1[i], i);

    std::set<std::tuple<int, std::string, int>> edge_set;
    for (const auto& [deep, rep_idx] : deep_repr) {
        auto src_it = node_of.find(truncate_bundle(deep, refinement.k_star));
        if (src_it == node_of.end())
            throw EngineError("internal: depth-k view of a class bundle matches no node");
        int src = src_it->second;

        std::set<int> ys;
        for (const auto& seq : deep)
            if (seq.size() >= 2) ys.insert(seq[1]);
        for (int y : ys) {
            BehaviorSet tails;
            for (const auto& seq : deep)
                if (seq.size() >= 2 && seq[1] == y)
                    tails.insert(std::vector<int>(seq.begin() + 1, seq.end()));
            auto dst_it = node_of.find(tails);
            if (dst_it == node_of.end())
                throw EngineError("internal: successor bundle matches no node");
            std::string input =
                m.successor_input(grid.states[rep_idx], refinement.outputs[y]);
            edge_set.insert({src, input, dst_it->second});
        }
    }
    for (const auto& [src, input, dst] : edge_set) q.edges.push_back({src, input, dst});
    // std::set already orders by (src, input, dst).

    return q;
}

FiniteTransitionSystem quotient_to_fts(const QuotientGraph& q) {
    FiniteTransitionSystem fts;
    fts.outputs = q.outputs;
    std::map<std::string, int> out_code;
    for (std::size_t i = 0; i < q.outputs.size(); ++i)
        out_code[q.outputs[i]] = static_cast<int>(i);
    for (const QuotientNode& node : q.nodes) fts.output_of.push_back(out_code.at(node.output));
    std::map<std::string, int> in_code;
    for (const QuotientEdge& e : q.edges) {
        auto [it, fresh] = in_code.try_emplace(e.input, static_cast<int>(fts.inputs.size()));
        if (fresh) fts.inputs.push_back(e.input);
        fts.transitions.push_back({e.src, it->second, e.dst});
    }
    return fts;
}

FiniteTransitionSystem restriction_system(MappedSystem& m, const SampleGrid& grid,
                                          std::vector<int>* closure_ids) {
    // Closure of the grid under moves, breadth-first, grid states first.
    std::vector<int> order;
    std::set<int> visited;
    std::deque<int> queue;
    for (int id : grid.states)
        if (visited.insert(id).second) {
            order.push_back(id);
            queue.push_back(id);
        }
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        for (const std::string& y : m.enabled_outputs(id))
            for (int t : m.successors(id, y))
                if (visited.insert(t).second) {
                    order.push_back(t);
                    queue.push_back(t);
                }
    }

    FiniteTransitionSystem fts;
    fts.outputs = m.automaton().output_alphabet();
    std::map<std::string, int> out_code;
    for (std::size_t i = 0; i < fts.outputs.size(); ++i)
        out_code[fts.outputs[i]] = static_cast<int>(i);
    fts.inputs = m.automaton().input_alphabet();
    if (std::find(fts.inputs.begin(), fts.inputs.end(), "*") == fts.inputs.end())
        fts.inputs.push_back("*");
    std::map<std::string, int> in_code;
    for (std::size_t i = 0; i < fts.inputs.size(); ++i)
        in_code[fts.inputs[i]] = static_cast<int>(i);

    std::map<int, int> index_of;
    for (std::size_t i = 0; i < order.size(); ++i) index_of[order[i]] = static_cast<int>(i);
    for (int id : order) fts.output_of.push_back(out_code.at(m.output_of(id)));
    for (int id : order) {
        for (const std::string& y : m.enabled_outputs(id)) {
            auto succs = m.successors(id, y);
            if (succs.empty()) continue;
            int input = in_code.at(m.successor_input(id, y));
            for (int t : succs)
                fts.transitions.push_back({index_of.at(id), input, index_of.at(t)});
        }
    }

    if (closure_ids) *closure_ids = order;
    return fts;
}

SweepResult eta_sweep(const HybridAutomaton& h, double eta0, double factor, int rounds,
                      const FlowConfig& cfg, int k_max) {
    if (rounds < 1) throw EngineError("sweep needs at least one round");
    if (factor <= 0.0 || factor >= 1.0)
        throw EngineError("sweep factor must lie strictly between 0 and 1");

    SweepResult res;
    double eta = eta0;
    for (int r = 0; r < rounds; ++r) {
        MappedSystem m(h, cfg);
        SampleGrid grid = sample_grid(m, eta);
        RefinementResult ref = run_refinement(m, grid, k_max);
        SweepRound round;
        round.eta = eta;
        round.grid_size = static_cast<int>(grid.states.size());
        round.status = ref.status;
        round.k = ref.k_star;
        round.classes = ref.trace.back().class_count;
        if (ref.status == RefinementStatus::FixedPoint)
            round.quotient = build_quotient(m, grid, ref);
        res.rounds.push_back(std::move(round));
        eta *= factor;
    }

    res.stable = false;
    if (res.rounds.size() >= 2) {
        const SweepRound& a = res.rounds[res.rounds.size() - 2];
        const SweepRound& b = res.rounds.back();
        if (a.status == RefinementStatus::FixedPoint &&
            b.status == RefinementStatus::FixedPoint && a.classes == b.classes) {
            res.stable =
                find_isomorphism(quotient_to_fts(a.quotient), quotient_to_fts(b.quotient))
                    .has_value();
        }
    }
    return res;
}

}  // namespace hybisim
