#pragma once

// Shared generators for property-style tests.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "hybisim/expr.hpp"
#include "hybisim/transition_system.hpp"

namespace testgen {

// Random expression tree.  Literals are nonnegative: the grammar has no
// negative literal syntax (a leading '-' always parses as negation), so
// only trees from this generator print-parse round-trip structurally.
inline hybisim::ExprPtr rand_expr(std::mt19937& rng, int depth) {
    using namespace hybisim;
    std::uniform_real_distribution<double> lit(0.0, 10.0);
    auto pick = [&rng](int n) { return static_cast<int>(rng() % n); };
    if (depth <= 0) {
        if (pick(2) == 0) return make_literal(lit(rng));
        static const char* vars[] = {"x", "y", "z"};
        return make_variable(vars[pick(3)]);
    }
    switch (pick(8)) {
        case 0: return make_literal(lit(rng));
        case 1: {
            static const char* vars[] = {"x", "y", "z"};
            return make_variable(vars[pick(3)]);
        }
        case 2: return make_negate(rand_expr(rng, depth - 1));
        case 3:
            return make_binary(ExprKind::Add, rand_expr(rng, depth - 1),
                               rand_expr(rng, depth - 1));
        case 4:
            return make_binary(ExprKind::Sub, rand_expr(rng, depth - 1),
                               rand_expr(rng, depth - 1));
        case 5:
            return make_binary(pick(2) ? ExprKind::Mul : ExprKind::Div,
                               rand_expr(rng, depth - 1), rand_expr(rng, depth - 1));
        case 6: return make_pow(rand_expr(rng, depth - 1), pick(5));
        default: {
            static const FuncId funcs[] = {FuncId::Exp, FuncId::Sin, FuncId::Cos,
                                           FuncId::Sqrt, FuncId::Abs};
            return make_call(funcs[pick(5)], rand_expr(rng, depth - 1));
        }
    }
}

// Random output-deterministic finite transition system: per state, at most
// one successor per target-output class, all transition inputs random.
inline hybisim::FiniteTransitionSystem rand_fts(std::mt19937& rng) {
    using namespace hybisim;
    auto pick = [&rng](int n) { return static_cast<int>(rng() % n); };
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const int n = 2 + pick(14);        // 2..15 states
    const int n_inputs = 1 + pick(3);  // 1..3 inputs
    const int n_out_raw = 1 + pick(4); // up to 4 outputs

    std::vector<int> raw_out(n);
    for (int s = 0; s < n; ++s) raw_out[s] = pick(n_out_raw);
    // Compact the output codes to those actually present.
    std::vector<int> present;
    for (int s = 0; s < n; ++s) {
        bool seen = false;
        for (int p : present) seen = seen || p == raw_out[s];
        if (!seen) present.push_back(raw_out[s]);
    }
    std::sort(present.begin(), present.end());

    FiniteTransitionSystem fts;
    for (std::size_t i = 0; i < present.size(); ++i)
        fts.outputs.push_back("o" + std::to_string(i));
    static const char* input_names[] = {"a", "b", "c"};
    for (int i = 0; i < n_inputs; ++i) fts.inputs.push_back(input_names[i]);
    fts.output_of.resize(n);
    for (int s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < present.size(); ++i)
            if (present[i] == raw_out[s]) fts.output_of[s] = static_cast<int>(i);
    }

    for (int s = 0; s < n; ++s) {
        if (uni(rng) < 0.15) continue;  // dead-end state
        for (std::size_t oc = 0; oc < present.size(); ++oc) {
            if (uni(rng) >= 0.5) continue;
            std::vector<int> members;
            for (int t = 0; t < n; ++t)
                if (fts.output_of[t] == static_cast<int>(oc)) members.push_back(t);
            if (members.empty()) continue;
            int dst = members[pick(static_cast<int>(members.size()))];
            fts.transitions.push_back({s, pick(n_inputs), dst});
        }
    }
    return fts;
}

}  // namespace testgen
