#include "bdm/graph.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>

namespace bdm {

Matrix GraphProjection::assemble() const {
    const auto r1 = ul.rows(), r2 = ll.rows();
    Matrix g(r1 + r2, r1 + r2);
    g.topLeftCorner(r1, ul.cols()) = ul;
    g.topRightCorner(r1, ur.cols()) = ur;
    g.bottomLeftCorner(r2, ll.cols()) = ll;
    g.bottomRightCorner(r2, lr.cols()) = lr;
    return g;
}

double GraphProjection::idempotency_defect() const {
    Matrix g = assemble();
    return op_norm(g * g - g);
}

double GraphProjection::selfadjoint_defect() const {
    Matrix g = assemble();
    return op_norm(Matrix(g - g.adjoint()));
}

double GraphProjection::block_identity_defect() const {
    // ll ur = a (1+a*a)^{-1} (1+a*a)^{-1} a*; the direct identity uses the
    // source operator.
    const auto rows = source.rows();
    Matrix lhs = source * ul * source.adjoint();
    Eigen::LLT<Matrix> llt(Matrix(Matrix::Identity(rows, rows) + source * source.adjoint()));
    Matrix rhs = Matrix::Identity(rows, rows) - llt.solve(Matrix::Identity(rows, rows));
    return op_norm(Matrix(lhs - rhs));
}

GraphProjection graph_projection(const Matrix& a) {
    const auto cols = a.cols(), rows = a.rows();
    Matrix id_d = Matrix::Identity(cols, cols);
    Matrix id_r = Matrix::Identity(rows, rows);
    Eigen::LLT<Matrix> llt_d(Matrix(id_d + a.adjoint() * a));
    Eigen::LLT<Matrix> llt_r(Matrix(id_r + a * a.adjoint()));
    GraphProjection g;
    g.source = a;
    g.ul = llt_d.solve(id_d);
    g.ur = llt_d.solve(a.adjoint());
    g.ll = g.ur.adjoint();
    g.lr = id_r - llt_r.solve(id_r);
    return g;
}

Matrix reference_projection(int rows, int cols) {
    Matrix e = Matrix::Zero(rows + cols, rows + cols);
    e.bottomRightCorner(rows, rows) = Matrix::Identity(rows, rows);
    (void)cols;
    return e;
}

double graph_limit_defect(const Matrix& a, double t, double tol) {
    GraphProjection g = graph_projection(Matrix(t * a));
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * (sv.size() ? sv(0) : 1.0)) ++rank;
    // P_ker a = V_0 V_0^*, P_ker a* = U_0 U_0^* over the trailing directions.
    const auto cols = a.cols(), rows = a.rows();
    Matrix pker = Matrix::Zero(cols, cols);
    if (rank < cols) {
        Matrix v0 = svd.matrixV().rightCols(cols - rank);
        pker = v0 * v0.adjoint();
    }
    Matrix pcoker = Matrix::Zero(rows, rows);
    if (rank < rows) {
        Matrix u0 = svd.matrixU().rightCols(rows - rank);
        pcoker = u0 * u0.adjoint();
    }
    Matrix limit = Matrix::Zero(cols + rows, cols + rows);
    limit.topLeftCorner(cols, cols) = pker;
    limit.bottomRightCorner(rows, rows) = Matrix::Identity(rows, rows) - pcoker;
    return op_norm(Matrix(g.assemble() - limit));
}

double trace_index(const Matrix& a) {
    const auto cols = a.cols(), rows = a.rows();
    Eigen::LLT<Matrix> llt_d(Matrix(Matrix::Identity(cols, cols) + a.adjoint() * a));
    Eigen::LLT<Matrix> llt_r(Matrix(Matrix::Identity(rows, rows) + a * a.adjoint()));
    Matrix inv_d = llt_d.solve(Matrix::Identity(cols, cols));
    Matrix inv_r = llt_r.solve(Matrix::Identity(rows, rows));
    return inv_d.trace().real() - inv_r.trace().real();
}

double trace_index(const HalfLineOperator& a, double window) {
    // Realization on the truncated grid: scale by t (the graph-projection
    // limit) so the non-kernel spectrum contributes O(t^{-2}), and sum the
    // diagonal of the resolvent difference over x_j <= window * L only.
    // True kernel/cokernel modes decay in x and are captured; the spurious
    // null directions created by truncating the interval concentrate at
    // x = L and fall outside the window.
    const double t = 1.0e3;
    const int n = a.n();
    Matrix ta = t * a.matrix;
    Eigen::LLT<Matrix> llt_d(Matrix(Matrix::Identity(n, n) + ta.adjoint() * ta));
    Eigen::LLT<Matrix> llt_r(Matrix(Matrix::Identity(n, n) + ta * ta.adjoint()));
    Matrix inv_d = llt_d.solve(Matrix::Identity(n, n));
    Matrix inv_r = llt_r.solve(Matrix::Identity(n, n));
    double cut = window * a.grid.L;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        if (a.grid.node(j) > cut) break;
        acc += (inv_d(j, j) - inv_r(j, j)).real();
    }
    return acc;
}

namespace {

void gap_guard(const Eigen::VectorXd& sv, double tol) {
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) >= tol && sv(i) <= 10.0 * tol)
            throw std::runtime_error("GapViolation: singular value inside the guard band");
}

// Fraction of the vector's mass in the outer quarter of the grid.
double edge_mass(const HalfLineGrid& grid, const Eigen::VectorXcd& v) {
    double total = 0.0, edge = 0.0;
    for (int j = 0; j < grid.N; ++j) {
        double m = std::norm(v(j));
        total += m;
        if (grid.node(j) > 0.75 * grid.L) edge += m;
    }
    return total > 0.0 ? edge / total : 0.0;
}

} // namespace

int svd_index(const Matrix& a, double tol) {
    Eigen::BDCSVD<Matrix> svd(a);
    gap_guard(svd.singularValues(), tol);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) >= tol) ++rank;
    int ker = static_cast<int>(a.cols()) - rank;
    int coker = static_cast<int>(a.rows()) - rank;
    return ker - coker;
}

int svd_index(const HalfLineOperator& a, double tol) {
    Eigen::BDCSVD<Matrix> svd(a.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    gap_guard(sv, tol);
    int ker = 0, coker = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) >= tol) continue;
        // Null directions of the truncated operator: genuine kernel/cokernel
        // elements decay away from the corner; reflection ghosts live at the
        // truncation edge and are discarded.
        if (edge_mass(a.grid, svd.matrixV().col(i)) < 0.1) ++ker;
        if (edge_mass(a.grid, svd.matrixU().col(i)) < 0.1) ++coker;
    }
    return ker - coker;
}

} // namespace bdm
