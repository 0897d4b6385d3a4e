#include "mlmc/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlmc {

ThetaGrid::ThetaGrid(double theta_min_, double theta_max_, int n_)
    : theta_min(theta_min_), theta_max(theta_max_), n(n_) {
    if (!(theta_min < theta_max))
        throw std::invalid_argument("ThetaGrid: theta_min must be < theta_max");
    if (n < 4) throw std::invalid_argument("ThetaGrid: need at least 4 nodes");
}

std::vector<double> ThetaGrid::nodes() const {
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = node(j);
    return out;
}

SplineCurve fit_spline(const ThetaGrid& grid, std::span<const double> values) {
    const int n = grid.n;
    if (static_cast<int>(values.size()) != n)
        throw std::invalid_argument("fit_spline: values size must equal grid node count");

    const double h = grid.spacing();

    // Second derivatives M_j at the nodes (0-based). With uniform spacing the
    // not-a-knot conditions decouple the first and last continuity rows:
    //   M_1 = d_1 / h,  M_{n-2} = d_{n-2} / h,
    // with d_j = (y_{j+1} - 2 y_j + y_{j-1}) / h, and the remaining rows form
    // a strictly diagonally dominant tridiagonal system solved by elimination.
    std::vector<double> m(n);
    auto d = [&](int j) { return (values[j + 1] - 2.0 * values[j] + values[j - 1]) / h; };

    m[1] = d(1) / h;
    m[n - 2] = d(n - 2) / h;

    const int k = n - 4;  // unknowns M_2 .. M_{n-3}
    if (k > 0) {
        std::vector<double> diag(k, 2.0 * h / 3.0), rhs(k);
        for (int i = 0; i < k; ++i) rhs[i] = d(i + 2);
        rhs[0] -= h / 6.0 * m[1];
        rhs[k - 1] -= h / 6.0 * m[n - 2];
        const double off = h / 6.0;
        for (int i = 1; i < k; ++i) {
            const double w = off / diag[i - 1];
            diag[i] -= w * off;
            rhs[i] -= w * rhs[i - 1];
        }
        m[k + 1] = rhs[k - 1] / diag[k - 1];
        for (int i = k - 2; i >= 0; --i) m[i + 2] = (rhs[i] - off * m[i + 3]) / diag[i];
    }

    m[0] = 2.0 * m[1] - m[2];
    m[n - 1] = 2.0 * m[n - 2] - m[n - 3];

    SplineCurve curve(grid);
    curve.pieces_.resize(n - 1);
    for (int j = 0; j < n - 1; ++j) {
        auto& p = curve.pieces_[j];
        p.a = values[j];
        p.b = (values[j + 1] - values[j]) / h - h * (2.0 * m[j] + m[j + 1]) / 6.0;
        p.c = 0.5 * m[j];
        p.d = (m[j + 1] - m[j]) / (6.0 * h);
    }
    return curve;
}

int SplineCurve::locate(double theta) const {
    const double lo = grid_.theta_min;
    const double hi = grid_.theta_max;
    const double tol = 32.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(lo) + std::abs(hi) + grid_.length());
    if (theta < lo - tol || theta > hi + tol)
        throw std::domain_error("SplineCurve: theta outside the interpolation interval");
    const double t = std::clamp(theta, lo, hi);
    int j = static_cast<int>((t - lo) / grid_.spacing());
    return std::clamp(j, 0, grid_.n - 2);
}

double SplineCurve::eval(int m, double theta) const {
    if (m < 0 || m > 2) throw std::invalid_argument("SplineCurve: derivative order must be 0, 1 or 2");
    const int j = locate(theta);
    const double t = std::clamp(theta, grid_.theta_min, grid_.theta_max) - grid_.node(j);
    const auto& p = pieces_[j];
    switch (m) {
        case 0: return p.a + t * (p.b + t * (p.c + t * p.d));
        case 1: return p.b + t * (2.0 * p.c + 3.0 * p.d * t);
        default: return 2.0 * p.c + 6.0 * p.d * t;
    }
}

double SplineCurve::sup_norm_deriv(int m, int n_fine) const {
    if (n_fine < 2) throw std::invalid_argument("sup_norm_deriv: need at least 2 evaluation points");
    double best = 0.0;
    for (int i = 0; i < n_fine; ++i) {
        const double w = static_cast<double>(i) / (n_fine - 1);
        const double theta = (1.0 - w) * grid_.theta_min + w * grid_.theta_max;
        best = std::max(best, std::abs(eval(m, theta)));
    }
    return best;
}

double spline_c1(int m) {
    switch (m) {
        case 0: return 5.0 / 384.0;
        case 1: return 1.0 / 24.0;
        case 2: return 3.0 / 8.0;
        default: throw std::invalid_argument("spline_c1: m must be 0, 1 or 2");
    }
}

double spline_c2(int m, double theta_len) {
    switch (m) {
        case 0: return 1.0;
        case 1: return 18.0 / theta_len;
        case 2: return 48.0 / (theta_len * theta_len);
        default: throw std::invalid_argument("spline_c2: m must be 0, 1 or 2");
    }
}

double spline_c3() { return 7.0 * (2.0 * std::sqrt(7.0) + 1.0) / 27.0; }

double spline_log_factor(int n) {
    double sum = 0.0;
    for (int k = 2; k <= n + 1; ++k) {
        const double lk = std::log(static_cast<double>(k));
        sum += 1.0 / (static_cast<double>(k) * k * std::sqrt(lk));
    }
    const double pi = 3.14159265358979323846;
    return 2.0 * pi * (std::log(n + 1.0) + std::sqrt(8.0 / pi) * sum);
}

SplineConstants spline_constants(int m, int n, double theta_len) {
    return {spline_c1(m), spline_c2(m, theta_len), spline_c3(), spline_log_factor(n)};
}

}  // namespace mlmc
