#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace bdm {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Dense complex polynomials, coefficient order c[0] + c[1] x + ...
// Degrees stay tiny (products of a handful of linear factors), so plain
// O(n^2) arithmetic is fine.
// ---------------------------------------------------------------------------
struct Poly {
    std::vector<cplx> c;

    Poly() : c{cplx(0.0)} {}
    explicit Poly(cplx constant) : c{constant} {}
    explicit Poly(std::vector<cplx> coeffs) : c(std::move(coeffs)) {
        if (c.empty()) c.push_back(cplx(0.0));
    }

    static Poly from_roots(cplx scale, const std::vector<cplx>& roots);

    int degree() const;
    cplx eval(cplx x) const;
    Poly derivative() const;
    // Coefficients of p(x0 + t) as a polynomial in t (exact Taylor shift).
    Poly shifted(cplx x0) const;
    void trim(double eps = 0.0);
};

Poly operator*(const Poly& a, const Poly& b);
Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);

// Roots via companion-matrix eigenvalues.
std::vector<cplx> poly_roots(const Poly& p);

// ---------------------------------------------------------------------------
// One-sided exponential-polynomial kernels: f(z) = sum_j coef_j z^{pow_j}
// e^{i a_j z}, valid on a half-axis. These are the closed forms produced by
// residue calculus for inverse Fourier transforms of rational symbols, and
// they are closed under the compositions the half-line calculus needs.
// ---------------------------------------------------------------------------
struct ExpPolyTerm {
    cplx coef;
    int power = 0; // z^power
    cplx freq;     // e^{i freq z}
};

struct ExpPoly {
    std::vector<ExpPolyTerm> terms;

    cplx eval(double z) const;
    bool empty() const { return terms.empty(); }
    void add(cplx coef, int power, cplx freq, double eps = 1e-300);
};

// int_0^infty t^k e^{i w t} dt = k! / (-i w)^{k+1}, requires Im w > 0.
cplx halfline_moment(int k, cplx w);

// h(x, y) = int_0^infty f(x + t) g(t + y) dt for one-sided kernels f, g
// (f valid on z > 0, g on z > 0 after its argument flip is absorbed by the
// caller). Result is a two-variable sum c x^a y^b e^{i p x} e^{i q y},
// returned as a dense evaluator.
struct ExpPoly2 {
    struct Term {
        cplx coef;
        int px = 0, py = 0;
        cplx fx, fy;
    };
    std::vector<Term> terms;
    cplx eval(double x, double y) const;
};

ExpPoly2 compose_halfline(const ExpPoly& f, const ExpPoly& g);

// ---------------------------------------------------------------------------
// RationalSymbol: scale * prod (xi - zeros_j) / prod (xi - poles_k), no real
// zeros or poles. order = #zeros - #poles.
// ---------------------------------------------------------------------------
class RationalSymbol {
public:
    RationalSymbol() : scale_(1.0) {}
    RationalSymbol(cplx scale, std::vector<cplx> zeros, std::vector<cplx> poles);

    static RationalSymbol one() { return RationalSymbol(); }
    static RationalSymbol constant(cplx c) { return RationalSymbol(c, {}, {}); }

    cplx scale() const { return scale_; }
    const std::vector<cplx>& zeros() const { return zeros_; }
    const std::vector<cplx>& poles() const { return poles_; }
    int order() const { return static_cast<int>(zeros_.size()) - static_cast<int>(poles_.size()); }

    cplx eval(double xi) const;
    cplx eval_at(cplx xi) const;
    // Value at +-infinity; finite only for order <= 0 (0 for order < 0).
    cplx value_at_infinity() const;

    RationalSymbol operator*(const RationalSymbol& other) const;
    // Conjugate-adjoint symbol: eval(xi) == conj(this->eval(xi)) on the real line.
    RationalSymbol conj_adjoint() const;
    // xi -> s(hbar xi), exact on the zero/pole data.
    RationalSymbol scaled_frequency(double hbar) const;
    // Numerator/denominator as polynomials.
    Poly numerator() const;
    Poly denominator() const;

    bool is_minus_type() const; // all zeros and poles in the lower half-plane

private:
    cplx scale_;
    std::vector<cplx> zeros_;
    std::vector<cplx> poles_;
};

// Winding number of an order-0 symbol over the compactified real line.
// Residue route: #zeros in upper half-plane - #poles in upper half-plane.
int winding_residue(const RationalSymbol& s);
// Quadrature route: (1/2pi) int Im(s'/s), adaptive Simpson on a compactified
// variable. The two must agree exactly after rounding.
int winding_quadrature(const RationalSymbol& s, double tol = 1e-9);

// Partial fraction expansion of a proper rational function num/den where den
// has the given roots (with multiplicity): returns terms A_{j,l}/(xi - p_j)^l.
struct PoleTerm {
    cplx pole;
    int mult;          // l
    cplx coef;         // A_{j,l}
};
std::vector<PoleTerm> partial_fractions(const Poly& num, const std::vector<cplx>& poles);

// One-sided inverse Fourier transform pieces of a proper rational q under the
// convention  k(z) = (1/2pi) int q(xi) e^{i z xi} d xi:
//   z > 0 picks up upper half-plane poles, z < 0 lower half-plane poles.
struct SidedKernel {
    ExpPoly plus;  // valid for z > 0
    ExpPoly minus; // valid for z < 0
    cplx eval(double z) const;       // two-sided, averaging at z == 0
    cplx eval_plus(double z) const { return plus.eval(z); }
    cplx eval_minus(double z) const { return minus.eval(z); }
};

// Requires q proper (order <= -1): q = s - s(infinity) typically.
SidedKernel rational_ift(const RationalSymbol& q);

// int_{-infty}^{infty} q(xi) d xi by residues (closes in the upper half-plane);
// requires order <= -2 so the integral converges absolutely.
cplx integral_residue(const RationalSymbol& q);

// Roots of 1 + conj(s)*s, i.e. the resolvent denominator den*den^c + num*num^c.
// Used to express (1 + |s|^2)^{-1} as a RationalSymbol.
RationalSymbol resolvent_symbol(const RationalSymbol& s);

} // namespace bdm
