#pragma once

#include "bdm/rational.hpp"

#include <Eigen/Dense>

#include <vector>

namespace bdm {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Midpoint discretization of the half-line truncated to [0, L]:
// nodes x_j = (j + 1/2) L / N, uniform weight h = L / N. Midpoint nodes keep
// Wiener-Hopf kernels away from their z = 0 jump except on the diagonal.
struct HalfLineGrid {
    int N = 512;
    double L = 40.0;

    double h() const { return L / N; }
    double node(int j) const { return (j + 0.5) * L / N; }
    std::vector<double> nodes() const {
        std::vector<double> xs(static_cast<std::size_t>(N));
        for (int j = 0; j < N; ++j) xs[static_cast<std::size_t>(j)] = node(j);
        return xs;
    }
    bool operator==(const HalfLineGrid& o) const { return N == o.N && L == o.L; }

    // Grid carrying kappa_lambda-transported samples: same index set, length
    // L / lambda. Exact for every lambda > 0 under this reinterpretation.
    HalfLineGrid scaled(double lambda) const { return HalfLineGrid{N, L / lambda}; }
};

// A function sampled on a half-line grid.
struct SampledFunction {
    HalfLineGrid grid;
    Vector values;

    double norm_l2() const { return std::sqrt(grid.h()) * values.norm(); }
};

// Dilation group action (kappa_lambda u)(x) = lambda^{1/2} u(lambda x).
// On the transported grid the map is exact for every lambda; resampling back
// onto the original grid uses cubic interpolation with O(h^3) error.
SampledFunction group_action(double lambda, const SampledFunction& u);

// As above but forced back onto u's own grid (cubic interpolation; samples
// beyond the truncation are taken as zero).
SampledFunction group_action_resampled(double lambda, const SampledFunction& u);

// Cubic (Catmull-Rom) interpolation of grid samples at an arbitrary point;
// zero outside [0, L].
cplx interp_cubic(const HalfLineGrid& grid, const Vector& values, double x);

// Discrete L2 inner product h * <u, v>.
cplx inner(const HalfLineGrid& grid, const Vector& u, const Vector& v);

// Operator 2-norm via SVD.
double op_norm(const Matrix& m);

} // namespace bdm
