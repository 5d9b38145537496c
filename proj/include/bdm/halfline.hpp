#pragma once

#include "bdm/grid.hpp"
#include "bdm/rational.hpp"

#include <optional>
#include <string>

namespace bdm {

enum class OpKind { TruncatedPsdo, SingularGreen, Potential, Trace, Composite };

std::string to_string(OpKind k);

// Dense operator on a half-line grid with order/class metadata.
struct HalfLineOperator {
    Matrix matrix;
    HalfLineGrid grid;
    int order = 0;
    int cls = 0;
    OpKind kind = OpKind::Composite;

    int n() const { return static_cast<int>(matrix.rows()); }
    double norm() const { return op_norm(matrix); }
};

HalfLineOperator identity_op(const HalfLineGrid& grid);

// Closed-form or sampled singular Green kernel. Exponential sums are kept
// symbolic so compositions and scalings stay exact.
struct GreenKernel {
    // k(x, y) = sum_i c_i x^{a_i} y^{b_i} e^{i p_i x} e^{i q_i y}
    ExpPoly2 k;

    static GreenKernel zero() { return {}; }
    static GreenKernel separable(cplx c, cplx decay_x, cplx decay_y);
    cplx eval(double x, double y) const { return k.eval(x, y); }
    bool empty() const { return k.terms.empty(); }
    // kappa_h^{-1} g kappa_h: kernel (1/h) k(x/h, y/h), exact on the data.
    GreenKernel scaled(double hbar) const;
    GreenKernel conj_transpose() const; // conj(k(y, x))
};

// Truncated Fourier multiplier (Wiener-Hopf): p(inf) I + h [k(x_i - x_j)]
// with k the residue-computed inverse Fourier transform of s - s(inf);
// diagonal takes the two-sided average. Requires s.order <= 0.
HalfLineOperator wiener_hopf(const RationalSymbol& s, const HalfLineGrid& grid);

// Integral operator h [k(x_i, x_j)], kind singular-green, class 0.
HalfLineOperator green_from_kernel(const GreenKernel& k, const HalfLineGrid& grid);

// g~^{+-}(q)(x, y) = k_q(+-(x + y)), q of order <= -1.
GreenKernel g_plus_minus(const RationalSymbol& q, int sign);

// Leftover term l(p1, p2) = (p1 p2)^+ - p1^+ p2^+ assembled structurally as
// g^+(q1) g^-(q2) (the differential sum is empty at order <= 0), with the
// composition integral in closed form. `direct_check_defect` carries the norm
// of the difference against the kernel-level direct route.
struct LeftoverResult {
    HalfLineOperator op;
    GreenKernel kernel;        // closed-form leftover kernel
    double direct_defect = 0;  // vs direct (p1 p2)^+ - p1^+ p2^+ at kernel level
    double matrix_defect = 0;  // vs the matrix-product direct route (quadrature-limited)
};
LeftoverResult leftover(const RationalSymbol& p1, const RationalSymbol& p2,
                        const HalfLineGrid& grid);

// Discretized boundary functional u -> D_n^j u(0+) via the integral
// representation with phi(s) = e^{-s}; returned as a 1 x N row operator of
// class j + 1. Convention D_n = -i d/dx.
HalfLineOperator trace_gamma(int j, const HalfLineGrid& grid, double weight = 1.0);

// Boundary symbol c = wiener_hopf(p_slice) + green_from_kernel(g).
HalfLineOperator boundary_symbol(const RationalSymbol& p_slice, const GreenKernel& g,
                                 const HalfLineGrid& grid);

// Splits (1 + c* c)^{-1} into the truncated multiplier of (1 + |p|^2)^{-1}
// plus a singular-green remainder (dense solve minus closed-form multiplier).
struct ResolventSplit {
    HalfLineOperator pseudo_part;
    HalfLineOperator green_part;
    RationalSymbol resolvent_sym;
};
ResolventSplit resolvent_decompose(const HalfLineOperator& c, const RationalSymbol& p_slice);

// Discrete L2 adjoint (conjugate transpose). Requires class 0.
HalfLineOperator adjoint(const HalfLineOperator& a);

// Best rank-r approximation by truncated SVD.
struct LowRankResult {
    HalfLineOperator op;
    double error;
};
LowRankResult green_lowrank_approx(const HalfLineOperator& g, int rank);

// Multiplication by a sampled cutoff profile, diag(phi(x_j)).
HalfLineOperator multiplication_op(const HalfLineGrid& grid,
                                   const std::function<double(double)>& phi);

// ---------------------------------------------------------------------------
// Closed-form composition algebra on exponential-polynomial kernels. All
// integrals are evaluated exactly (half-line moments and incomplete
// antiderivatives), so operator products of proper symbols and Green kernels
// stay in closed form. Used by the cyclic-chain machinery.
// ---------------------------------------------------------------------------

// int_0^inf A(x,t) B(t,y) dt
GreenKernel gg_compose(const GreenKernel& a, const GreenKernel& b);
// int_0^inf k_p(x-t) B(t,y) dt for proper p (the truncated multiplier has no
// identity part)
GreenKernel wg_compose(const RationalSymbol& p_proper, const GreenKernel& b);
// int_0^inf A(x,t) k_p(t-y) dt
GreenKernel gw_compose(const GreenKernel& a, const RationalSymbol& p_proper);
// leftover kernel of two order <= 0 symbols, closed form
GreenKernel leftover_kernel(const RationalSymbol& p1, const RationalSymbol& p2);
// int_0^inf g(x,x) dx
cplx green_trace(const GreenKernel& g);
// a + coef * b with like-term compression
GreenKernel kernel_add(const GreenKernel& a, cplx coef, const GreenKernel& b);

} // namespace bdm
