#include "hybisim/transition_system.hpp"

#include <algorithm>
#include <map>

#include "hybisim/errors.hpp"

namespace hybisim {

std::vector<std::vector<std::pair<int, int>>> FiniteTransitionSystem::successor_lists() const {
    std::vector<std::vector<std::pair<int, int>>> out(state_count());
    for (const Trans& t : transitions) out[t.src].emplace_back(t.input, t.dst);
    return out;
}

std::vector<std::vector<int>> FiniteTransitionSystem::successor_states() const {
    std::vector<std::vector<int>> out(state_count());
    for (const Trans& t : transitions) out[t.src].push_back(t.dst);
    for (auto& v : out) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
}

bool is_output_deterministic(const FiniteTransitionSystem& fts) {
    auto succ = fts.successor_states();
    for (int s = 0; s < fts.state_count(); ++s) {
        std::vector<int> outs;
        for (int t : succ[s]) outs.push_back(fts.output_of[t]);
        std::sort(outs.begin(), outs.end());
        if (std::adjacent_find(outs.begin(), outs.end()) != outs.end()) return false;
    }
    return true;
}

std::set<std::vector<int>> output_behaviors(const FiniteTransitionSystem& fts, int state,
                                            int horizon) {
    auto succ = fts.successor_states();
    // Frontier entries: (observed outputs, current state).  Runs that
    // dead-end drop out of the frontier but keep their sequence.
    std::set<std::pair<std::vector<int>, int>> frontier;
    std::set<std::vector<int>> finished;
    frontier.insert({{fts.output_of[state]}, state});
    for (int step = 0; step < horizon; ++step) {
        std::set<std::pair<std::vector<int>, int>> next;
        for (const auto& [seq, s] : frontier) {
            if (succ[s].empty()) {
                finished.insert(seq);
                continue;
            }
            for (int t : succ[s]) {
                std::vector<int> ext = seq;
                ext.push_back(fts.output_of[t]);
                next.insert({std::move(ext), t});
            }
        }
        frontier = std::move(next);
    }
    std::set<std::vector<int>> out = std::move(finished);
    for (const auto& [seq, s] : frontier) out.insert(seq);
    return out;
}

Partition partition_from_classes(const std::vector<int>& keys) {
    Partition p;
    p.class_of.assign(keys.size(), -1);
    std::map<int, int> remap;
    for (std::size_t s = 0; s < keys.size(); ++s) {
        auto [it, fresh] = remap.try_emplace(keys[s], static_cast<int>(p.classes.size()));
        if (fresh) p.classes.emplace_back();
        p.class_of[s] = it->second;
        p.classes[it->second].push_back(static_cast<int>(s));
    }
    return p;
}

namespace {

// Classes numbered by their least member, which is also first in state order.
template <typename Key>
Partition partition_from_keys(const std::vector<Key>& keys) {
    Partition p;
    p.class_of.assign(keys.size(), -1);
    std::map<Key, int> ids;
    for (std::size_t s = 0; s < keys.size(); ++s) {
        auto [it, fresh] = ids.try_emplace(keys[s], static_cast<int>(p.classes.size()));
        if (fresh) p.classes.emplace_back();
        p.class_of[s] = it->second;
        p.classes[it->second].push_back(static_cast<int>(s));
    }
    return p;
}

FiniteTransitionSystem quotient_of(const FiniteTransitionSystem& fts, const Partition& p,
                                   std::vector<int>& representative) {
    FiniteTransitionSystem q;
    q.outputs = fts.outputs;
    q.inputs = fts.inputs;
    q.output_of.assign(p.classes.size(), -1);
    representative.assign(p.classes.size(), -1);
    for (std::size_t c = 0; c < p.classes.size(); ++c) {
        representative[c] = p.classes[c].front();
        q.output_of[c] = fts.output_of[p.classes[c].front()];
        for (int s : p.classes[c])
            if (fts.output_of[s] != q.output_of[c])
                throw EngineError("partition class mixes outputs; refinement is broken");
    }
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& t : fts.transitions) {
        std::tuple<int, int, int> key{p.class_of[t.src], t.input, p.class_of[t.dst]};
        if (seen.insert(key).second)
            q.transitions.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key)});
    }
    std::sort(q.transitions.begin(), q.transitions.end(), [](const auto& a, const auto& b) {
        return std::tie(a.src, a.input, a.dst) < std::tie(b.src, b.input, b.dst);
    });
    return q;
}

// Shared refinement loop.  The signature of a state is its current class
// plus a key derived from its successors; refinement stops when the class
// count stops growing.
template <typename SuccKey>
MinimizeResult refine_until_stable(const FiniteTransitionSystem& fts, SuccKey succ_key) {
    MinimizeResult res;
    Partition cur = partition_from_keys(fts.output_of);
    res.class_counts = {cur.class_count()};
    int rounds = 0;
    while (true) {
        std::vector<std::pair<int, std::vector<std::pair<int, int>>>> keys(fts.state_count());
        for (int s = 0; s < fts.state_count(); ++s)
            keys[s] = {cur.class_of[s], succ_key(s, cur)};
        Partition next = partition_from_keys(keys);
        res.class_counts.push_back(next.class_count());
        if (next.class_count() == cur.class_count()) {
            // A refinement with equal count is the identical partition.
            if (next.class_of != cur.class_of)
                throw EngineError("refinement plateaued with a different partition");
            break;
        }
        cur = std::move(next);
        ++rounds;
    }
    res.rounds = rounds;
    res.partition = std::move(cur);
    res.quotient = quotient_of(fts, res.partition, res.representative);
    return res;
}

}  // namespace

Partition partition_by_horizon(const FiniteTransitionSystem& fts, int horizon) {
    std::vector<std::set<std::vector<int>>> keys(fts.state_count());
    for (int s = 0; s < fts.state_count(); ++s) keys[s] = output_behaviors(fts, s, horizon);
    Partition p;
    p.class_of.assign(keys.size(), -1);
    std::map<std::set<std::vector<int>>, int> ids;
    for (std::size_t s = 0; s < keys.size(); ++s) {
        auto [it, fresh] = ids.try_emplace(keys[s], static_cast<int>(p.classes.size()));
        if (fresh) p.classes.emplace_back();
        p.class_of[s] = it->second;
        p.classes[it->second].push_back(static_cast<int>(s));
    }
    return p;
}

MinimizeResult minimize_by_behavior(const FiniteTransitionSystem& fts) {
    if (!is_output_deterministic(fts))
        throw EngineError(
            "system is not output-deterministic: behavior classes would not be well formed");
    auto succ = fts.successor_states();
    return refine_until_stable(fts, [&](int s, const Partition& cur) {
        std::vector<std::pair<int, int>> key;
        for (int t : succ[s]) key.emplace_back(fts.output_of[t], cur.class_of[t]);
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        return key;
    });
}

MinimizeResult classical_minimize(const FiniteTransitionSystem& fts) {
    auto succ = fts.successor_states();
    return refine_until_stable(fts, [&](int s, const Partition& cur) {
        std::vector<std::pair<int, int>> key;
        for (int t : succ[s]) key.emplace_back(cur.class_of[t], 0);
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        return key;
    });
}

BisimCheckResult check_bisimulation(const FiniteTransitionSystem& a,
                                    const FiniteTransitionSystem& b,
                                    const std::vector<std::pair<int, int>>& rel) {
    BisimCheckResult res;
    auto fail = [&](const std::string& msg) {
        res.ok = false;
        res.counterexample = msg;
        return res;
    };

    // The two systems must expose the same observed-output sets.
    auto image = [](const FiniteTransitionSystem& s) {
        std::set<std::string> ys;
        for (int code : s.output_of) ys.insert(s.outputs[code]);
        return ys;
    };
    if (image(a) != image(b)) return fail("output sets differ");

    std::set<std::pair<int, int>> in_rel(rel.begin(), rel.end());
    auto succ_a = a.successor_states();
    auto succ_b = b.successor_states();

    for (const auto& [sa, sb] : rel) {
        if (a.outputs[a.output_of[sa]] != b.outputs[b.output_of[sb]])
            return fail("related pair (" + std::to_string(sa) + ", " + std::to_string(sb) +
                        ") disagrees on output: " + a.outputs[a.output_of[sa]] + " vs " +
                        b.outputs[b.output_of[sb]]);
        for (int ta : succ_a[sa]) {
            bool matched = false;
            for (int tb : succ_b[sb])
                if (in_rel.count({ta, tb})) matched = true;
            if (!matched)
                return fail("move " + std::to_string(sa) + " -> " + std::to_string(ta) +
                            " has no related match from " + std::to_string(sb));
        }
        for (int tb : succ_b[sb]) {
            bool matched = false;
            for (int ta : succ_a[sa])
                if (in_rel.count({ta, tb})) matched = true;
            if (!matched)
                return fail("move " + std::to_string(sb) + " -> " + std::to_string(tb) +
                            " has no related match from " + std::to_string(sa) +
                            " (backward)");
        }
    }
    return res;
}

namespace {

using ColorKey = std::tuple<int, std::vector<std::pair<std::string, int>>,
                            std::vector<std::pair<std::string, int>>>;

struct IsoSearch {
    const FiniteTransitionSystem& a;
    const FiniteTransitionSystem& b;
    std::vector<int> color_a, color_b;
    std::vector<int> map_ab;  // a-state -> b-state or -1
    std::vector<bool> used_b;

    bool consistent(int sa, int sb) const {
        if (color_a[sa] != color_b[sb]) return false;
        // Every already-mapped transition endpoint must stay a transition.
        auto has_trans = [](const FiniteTransitionSystem& s, int x, const std::string& u,
                            int y) {
            for (const auto& t : s.transitions)
                if (t.src == x && t.dst == y && s.inputs[t.input] == u) return true;
            return false;
        };
        for (const auto& t : a.transitions) {
            if (t.src == sa && map_ab[t.dst] >= 0 &&
                !has_trans(b, sb, a.inputs[t.input], map_ab[t.dst]))
                return false;
            if (t.dst == sa && map_ab[t.src] >= 0 &&
                !has_trans(b, map_ab[t.src], a.inputs[t.input], sb))
                return false;
        }
        for (const auto& t : b.transitions) {
            if (t.src == sb) {
                // Find a-states already mapped to t.dst.
                for (int x = 0; x < a.state_count(); ++x)
                    if (map_ab[x] == t.dst && !has_trans(a, sa, b.inputs[t.input], x))
                        return false;
            }
            if (t.dst == sb) {
                for (int x = 0; x < a.state_count(); ++x)
                    if (map_ab[x] == t.src && !has_trans(a, x, b.inputs[t.input], sa))
                        return false;
            }
        }
        return true;
    }

    bool search(int sa) {
        if (sa == a.state_count()) return true;
        for (int sb = 0; sb < b.state_count(); ++sb) {
            if (used_b[sb] || !consistent(sa, sb)) continue;
            map_ab[sa] = sb;
            used_b[sb] = true;
            if (search(sa + 1)) return true;
            map_ab[sa] = -1;
            used_b[sb] = false;
        }
        return false;
    }
};

bool verify_isomorphism(const FiniteTransitionSystem& a, const FiniteTransitionSystem& b,
                        const std::vector<int>& map_ab) {
    for (int s = 0; s < a.state_count(); ++s)
        if (a.outputs[a.output_of[s]] != b.outputs[b.output_of[map_ab[s]]]) return false;
    auto edge_set = [](const FiniteTransitionSystem& s) {
        std::set<std::tuple<int, std::string, int>> es;
        for (const auto& t : s.transitions) es.insert({t.src, s.inputs[t.input], t.dst});
        return es;
    };
    auto eb = edge_set(b);
    std::set<std::tuple<int, std::string, int>> ea_mapped;
    for (const auto& t : a.transitions)
        ea_mapped.insert({map_ab[t.src], a.inputs[t.input], map_ab[t.dst]});
    return ea_mapped == eb;
}

}  // namespace

std::optional<std::vector<int>> find_isomorphism(const FiniteTransitionSystem& a,
                                                 const FiniteTransitionSystem& b) {
    if (a.state_count() != b.state_count()) return std::nullopt;
    const int n = a.state_count();
    if (n == 0) return std::vector<int>{};

    // Initial colors from output strings, shared across both systems.
    std::map<std::string, int> out_ids;
    auto init_colors = [&](const FiniteTransitionSystem& s) {
        std::vector<int> c(s.state_count());
        for (int i = 0; i < s.state_count(); ++i)
            c[i] = out_ids.try_emplace(s.outputs[s.output_of[i]], static_cast<int>(out_ids.size()))
                       .first->second;
        return c;
    };
    std::vector<int> ca = init_colors(a);
    std::vector<int> cb = init_colors(b);

    // Joint refinement: keys must be computed over the union so color ids
    // stay comparable.  Run the rounds over a merged system view.
    for (int round = 0; round < n; ++round) {
        std::vector<ColorKey> keys_a(n), keys_b(n);
        for (int i = 0; i < n; ++i) {
            std::get<0>(keys_a[i]) = ca[i];
            std::get<0>(keys_b[i]) = cb[i];
        }
        for (const auto& t : a.transitions) {
            std::get<1>(keys_a[t.src]).emplace_back(a.inputs[t.input], ca[t.dst]);
            std::get<2>(keys_a[t.dst]).emplace_back(a.inputs[t.input], ca[t.src]);
        }
        for (const auto& t : b.transitions) {
            std::get<1>(keys_b[t.src]).emplace_back(b.inputs[t.input], cb[t.dst]);
            std::get<2>(keys_b[t.dst]).emplace_back(b.inputs[t.input], cb[t.src]);
        }
        auto dedup_sort = [](std::vector<std::pair<std::string, int>>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        for (auto& k : keys_a) {
            dedup_sort(std::get<1>(k));
            dedup_sort(std::get<2>(k));
        }
        for (auto& k : keys_b) {
            dedup_sort(std::get<1>(k));
            dedup_sort(std::get<2>(k));
        }
        std::map<ColorKey, int> ids;
        std::vector<int> na(n), nb(n);
        for (int i = 0; i < n; ++i)
            na[i] = ids.try_emplace(keys_a[i], static_cast<int>(ids.size())).first->second;
        for (int i = 0; i < n; ++i)
            nb[i] = ids.try_emplace(keys_b[i], static_cast<int>(ids.size())).first->second;
        if (na == ca && nb == cb) break;
        ca = std::move(na);
        cb = std::move(nb);
    }

    // Color class sizes must match or no bijection exists.
    std::map<int, int> count_a, count_b;
    for (int c : ca) ++count_a[c];
    for (int c : cb) ++count_b[c];
    if (count_a != count_b) return std::nullopt;

    IsoSearch search{a, b, ca, cb, std::vector<int>(n, -1), std::vector<bool>(n, false)};
    if (!search.search(0)) return std::nullopt;
    if (!verify_isomorphism(a, b, search.map_ab)) return std::nullopt;
    return search.map_ab;
}

}  // namespace hybisim
