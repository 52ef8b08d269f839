#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hybisim/constraint.hpp"
#include "hybisim/vec.hpp"

namespace hybisim {

// A normalized constraint row: ||a|| = 1 and rel is LE, LT, or EQ
// (GE/GT inputs are flipped on construction).
struct PolyRow {
    Vec a;
    double b;
    Relation rel;
    std::string source;
};

// One convex piece: the conjunction of its rows.
struct ConvexComponent {
    std::vector<PolyRow> rows;
};

// A finite union of convex components in a fixed ambient dimension.
// Membership and residual queries treat strict rows as closed; strictness
// is kept only so model validation can report it.
class Polytope {
public:
    Polytope() = default;
    Polytope(std::size_t dim, std::vector<std::vector<AffineRow>> components);

    std::size_t dim() const { return dim_; }
    std::size_t component_count() const { return comps_.size(); }
    const ConvexComponent& component(std::size_t ci) const { return comps_[ci]; }

    bool contains(const Vec& p, double tol = 1e-9) const;
    bool component_contains(std::size_t ci, const Vec& p, double tol = 1e-9) const;

    // Signed violation of one component: max over rows of a·p - b
    // (absolute value for EQ rows).  Negative strictly inside.
    double component_residual(std::size_t ci, const Vec& p) const;

    // Smallest component residual and the index attaining it.
    // Empty polytopes give (+inf, npos).
    std::pair<double, std::size_t> residual(const Vec& p) const;

    bool has_strict_rows() const;

    // Vertices of one component (deterministic order); empty when the
    // component has no feasible basic solution.
    std::vector<Vec> component_vertices(std::size_t ci) const;

    // Evenly spaced sample of one component with adjacent spacing <= h.
    // Points: a 0-dimensional component gives its vertex; a segment gives
    // ceil(len/h) equal intervals; a 2-dimensional component in ambient
    // dimension 2 gives its vertices plus an axis-aligned grid filtered by
    // membership.  Anything else raises EngineError.
    std::vector<Vec> component_lattice(std::size_t ci, double h) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t dim_ = 0;
    std::vector<ConvexComponent> comps_;
};

}  // namespace hybisim
