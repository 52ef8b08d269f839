#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace hybisim {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline Vec axpy(double alpha, const Vec& x, const Vec& y) {
    Vec r(y);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] += alpha * x[i];
    return r;
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// Returns false when the pivot falls below `tol` (singular system).
bool solve_linear(std::vector<Vec> A, Vec b, Vec& x, double tol = 1e-12);

}  // namespace hybisim
