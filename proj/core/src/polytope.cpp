#include "hybisim/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hybisim/errors.hpp"

namespace hybisim {

bool solve_linear(std::vector<Vec> A, Vec b, Vec& x, double tol) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
        if (std::fabs(A[pivot][col]) < tol) return false;
        std::swap(A[col], A[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
    return true;
}

namespace {

double row_residual(const PolyRow& row, const Vec& p) {
    double r = dot(row.a, p) - row.b;
    return row.rel == Relation::EQ ? std::fabs(r) : r;
}

}  // namespace

Polytope::Polytope(std::size_t dim, std::vector<std::vector<AffineRow>> components)
    : dim_(dim) {
    for (auto& comp_rows : components) {
        ConvexComponent comp;
        for (auto& row : comp_rows) {
            if (row.a.size() != dim)
                throw EngineError("constraint row dimension mismatch");
            PolyRow r;
            r.a = row.a;
            r.b = row.b;
            r.rel = row.rel;
            r.source = row.source;
            if (r.rel == Relation::GE || r.rel == Relation::GT) {
                for (double& v : r.a) v = -v;
                r.b = -r.b;
                r.rel = r.rel == Relation::GE ? Relation::LE : Relation::LT;
            }
            double n = norm2(r.a);
            if (n == 0.0) throw EngineError("constraint row has zero normal");
            for (double& v : r.a) v /= n;
            r.b /= n;
            comp.rows.push_back(std::move(r));
        }
        comps_.push_back(std::move(comp));
    }
}

bool Polytope::component_contains(std::size_t ci, const Vec& p, double tol) const {
    for (const PolyRow& row : comps_[ci].rows)
        if (row_residual(row, p) > tol) return false;
    return true;
}

bool Polytope::contains(const Vec& p, double tol) const {
    for (std::size_t ci = 0; ci < comps_.size(); ++ci)
        if (component_contains(ci, p, tol)) return true;
    return false;
}

double Polytope::component_residual(std::size_t ci, const Vec& p) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const PolyRow& row : comps_[ci].rows)
        worst = std::max(worst, row_residual(row, p));
    return worst;
}

std::pair<double, std::size_t> Polytope::residual(const Vec& p) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_ci = npos;
    for (std::size_t ci = 0; ci < comps_.size(); ++ci) {
        double r = component_residual(ci, p);
        if (r < best) {
            best = r;
            best_ci = ci;
        }
    }
    return {best, best_ci};
}

bool Polytope::has_strict_rows() const {
    for (const auto& comp : comps_)
        for (const PolyRow& row : comp.rows)
            if (row.rel == Relation::LT) return true;
    return false;
}

std::vector<Vec> Polytope::component_vertices(std::size_t ci) const {
    const auto& rows = comps_[ci].rows;
    const std::size_t n = dim_;
    std::vector<Vec> verts;
    if (rows.size() < n) return verts;

    auto feasible = [&](const Vec& p) {
        for (const PolyRow& row : rows)
            if (row_residual(row, p) > 1e-9) return false;
        return true;
    };
    auto try_subset = [&](const std::vector<std::size_t>& sel) {
        std::vector<Vec> A;
        Vec b;
        for (std::size_t i : sel) {
            A.push_back(rows[i].a);
            b.push_back(rows[i].b);
        }
        Vec x;
        if (!solve_linear(std::move(A), std::move(b), x, 1e-10)) return;
        if (!feasible(x)) return;
        for (const Vec& v : verts)
            if (dist2(v, x) < 1e-9) return;
        verts.push_back(std::move(x));
    };
    // All size-n row subsets in lexicographic order.
    std::vector<std::size_t> sel(n);
    for (std::size_t i = 0; i < n; ++i) sel[i] = i;
    while (true) {
        try_subset(sel);
        bool advanced = false;
        std::size_t i = n;
        while (i-- > 0) {
            if (sel[i] + (n - i) < rows.size()) {
                ++sel[i];
                for (std::size_t j = i + 1; j < n; ++j) sel[j] = sel[j - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    return verts;
}

std::vector<Vec> Polytope::component_lattice(std::size_t ci, double h) const {
    if (h <= 0.0) throw EngineError("sample spacing must be positive");
    std::vector<Vec> verts = component_vertices(ci);
    if (verts.empty()) return {};

    // Affine dimension of the vertex set.
    bool all_same = true;
    for (const Vec& v : verts)
        if (dist2(v, verts[0]) > 1e-9) all_same = false;
    if (all_same) return {verts[0]};

    // Farthest-apart vertex pair, lexicographic tie-break by index order.
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j) {
            double d = dist2(verts[i], verts[j]);
            if (d > best + 1e-12) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    const Vec& v0 = verts[bi];
    const Vec& v1 = verts[bj];

    // Collinearity: every vertex must sit on the line through v0 and v1.
    bool collinear = true;
    Vec dir(dim_);
    for (std::size_t i = 0; i < dim_; ++i) dir[i] = (v1[i] - v0[i]) / best;
    for (const Vec& v : verts) {
        Vec rel(dim_);
        for (std::size_t i = 0; i < dim_; ++i) rel[i] = v[i] - v0[i];
        double t = dot(rel, dir);
        Vec proj(dim_);
        for (std::size_t i = 0; i < dim_; ++i) proj[i] = v0[i] + t * dir[i];
        if (dist2(v, proj) > 1e-9) collinear = false;
    }
    if (collinear) {
        double len = best;
        std::size_t intervals =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h - 1e-9)));
        std::vector<Vec> pts;
        for (std::size_t k = 0; k <= intervals; ++k) {
            double t = static_cast<double>(k) / static_cast<double>(intervals);
            Vec p(dim_);
            for (std::size_t i = 0; i < dim_; ++i) p[i] = v0[i] + t * (v1[i] - v0[i]);
            pts.push_back(std::move(p));
        }
        return pts;
    }

    if (dim_ != 2)
        throw EngineError("surface sampling beyond segments needs ambient dimension 2");

    // Full-dimensional piece in the plane: vertices plus a bounding-box
    // lattice filtered by membership.
    Vec lo = verts[0], hi = verts[0];
    for (const Vec& v : verts)
        for (std::size_t i = 0; i < 2; ++i) {
            lo[i] = std::min(lo[i], v[i]);
            hi[i] = std::max(hi[i], v[i]);
        }
    std::vector<Vec> pts = verts;
    auto push_unique = [&](const Vec& p) {
        for (const Vec& q : pts)
            if (dist2(p, q) < 1e-9) return;
        pts.push_back(p);
    };
    std::size_t nx = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil((hi[0] - lo[0]) / h - 1e-9)));
    std::size_t ny = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil((hi[1] - lo[1]) / h - 1e-9)));
    for (std::size_t i = 0; i <= nx; ++i)
        for (std::size_t j = 0; j <= ny; ++j) {
            Vec p = {lo[0] + (hi[0] - lo[0]) * static_cast<double>(i) / nx,
                     lo[1] + (hi[1] - lo[1]) * static_cast<double>(j) / ny};
            if (component_contains(ci, p, 1e-9)) push_unique(p);
        }
    return pts;
}

}  // namespace hybisim
