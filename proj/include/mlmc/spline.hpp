#pragma once

#include <span>
#include <vector>

namespace mlmc {

// Uniform interpolation nodes theta_1 < ... < theta_n spanning [theta_min, theta_max].
struct ThetaGrid {
    ThetaGrid(double theta_min, double theta_max, int n);

    double theta_min;
    double theta_max;
    int n;

    double length() const { return theta_max - theta_min; }
    double spacing() const { return length() / (n - 1); }

    // Exact at both endpoints.
    double node(int j) const {
        const double w = static_cast<double>(j) / (n - 1);
        return (1.0 - w) * theta_min + w * theta_max;
    }

    std::vector<double> nodes() const;
};

// C2 piecewise cubic on the grid, immutable after construction.
// Piece j covers [node(j), node(j+1)] with local coordinate t = theta - node(j).
class SplineCurve {
public:
    struct Cubic {
        double a, b, c, d;  // a + b t + c t^2 + d t^3
    };

    // m-th derivative (m in {0,1,2}) at theta; theta must lie in the grid
    // interval (a few-ulp tolerance is allowed, no extrapolation).
    double eval(int m, double theta) const;

    // max |m-th derivative| over n_fine uniformly spaced points on the interval.
    double sup_norm_deriv(int m, int n_fine = 1000) const;

    const ThetaGrid& grid() const { return grid_; }
    const std::vector<Cubic>& pieces() const { return pieces_; }

private:
    friend SplineCurve fit_spline(const ThetaGrid&, std::span<const double>);
    explicit SplineCurve(const ThetaGrid& grid) : grid_(grid) {}

    int locate(double theta) const;

    ThetaGrid grid_;
    std::vector<Cubic> pieces_;
};

// Not-a-knot cubic spline interpolant through (node(j), values[j]).
// Requires n >= 4 nodes.
SplineCurve fit_spline(const ThetaGrid& grid, std::span<const double> values);

// Interpolation / stability constants of the cubic spline operator.
double spline_c1(int m);                       // 5/384, 1/24, 3/8
double spline_c2(int m, double theta_len);     // 1, 18/|Theta|, 48/|Theta|^2
double spline_c3();                            // 7(2*sqrt(7)+1)/27
double spline_log_factor(int n);               // c(n)

struct SplineConstants {
    double c1, c2, c3, c_n;
};
SplineConstants spline_constants(int m, int n, double theta_len);

}  // namespace mlmc
