#include "bdm/grid.hpp"

namespace bdm {

SampledFunction group_action(double lambda, const SampledFunction& u) {
    if (lambda <= 0.0) throw std::invalid_argument("group_action: lambda must be positive");
    SampledFunction out;
    out.grid = u.grid.scaled(lambda);
    out.values = std::sqrt(lambda) * u.values;
    return out;
}

cplx interp_cubic(const HalfLineGrid& grid, const Vector& values, double x) {
    if (x < 0.0 || x > grid.L) return cplx(0.0);
    double h = grid.h();
    double t = x / h - 0.5; // fractional node index
    int j1 = static_cast<int>(std::floor(t));
    double s = t - j1;
    auto at = [&](int j) -> cplx {
        if (j < 0 || j >= grid.N) return cplx(0.0);
        return values(j);
    };
    cplx p0 = at(j1 - 1), p1 = at(j1), p2 = at(j1 + 1), p3 = at(j1 + 2);
    // Catmull-Rom
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * s + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s * s +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s * s * s);
}

SampledFunction group_action_resampled(double lambda, const SampledFunction& u) {
    if (lambda <= 0.0) throw std::invalid_argument("group_action: lambda must be positive");
    SampledFunction out;
    out.grid = u.grid;
    out.values = Vector::Zero(u.grid.N);
    double root = std::sqrt(lambda);
    for (int j = 0; j < u.grid.N; ++j) {
        double x = u.grid.node(j) * lambda;
        out.values(j) = root * interp_cubic(u.grid, u.values, x);
    }
    return out;
}

cplx inner(const HalfLineGrid& grid, const Vector& u, const Vector& v) {
    return grid.h() * u.dot(v);
}

double op_norm(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    if (m.rows() <= 16 && m.cols() <= 16) {
        Eigen::JacobiSVD<Matrix> svd(m);
        return svd.singularValues()(0);
    }
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

} // namespace bdm
