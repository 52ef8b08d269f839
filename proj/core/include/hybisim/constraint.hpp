#pragma once

#include <string>
#include <vector>

#include "hybisim/expr.hpp"
#include "hybisim/vec.hpp"

namespace hybisim {

enum class Relation { LE, LT, EQ, GE, GT };

const char* relation_symbol(Relation r);
bool relation_is_strict(Relation r);

// One affine row  a·x REL b  over a fixed variable ordering.
struct AffineRow {
    Vec a;
    Relation rel;
    double b;
    std::string source;  // original text, kept for diagnostics
};

// Parses a single relational constraint "E1 REL E2" where both sides are
// affine in `variables`.  The sugar abs(E) <= F (or <) expands to the two
// rows E - F <= 0 and -E - F <= 0; abs is otherwise only admitted with a
// constant argument.  Rows with no variable dependence are rejected.
std::vector<AffineRow> parse_constraint(const std::string& text,
                                        const std::vector<std::string>& variables);

// Parses a ';'-separated conjunction of constraints (one convex region).
std::vector<AffineRow> parse_constraint_block(const std::string& text,
                                              const std::vector<std::string>& variables);

}  // namespace hybisim
