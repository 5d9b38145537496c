#include "bdm/rational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

namespace bdm {

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Poly Poly::from_roots(cplx scale, const std::vector<cplx>& roots) {
    Poly p(scale);
    for (const cplx& r : roots) {
        Poly lin(std::vector<cplx>{-r, cplx(1.0)});
        p = p * lin;
    }
    return p;
}

int Poly::degree() const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
        if (c[static_cast<std::size_t>(i)] != cplx(0.0)) return i;
    return 0;
}

cplx Poly::eval(cplx x) const {
    cplx acc(0.0);
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

Poly Poly::derivative() const {
    if (c.size() <= 1) return Poly();
    std::vector<cplx> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * cplx(static_cast<double>(i));
    return Poly(std::move(d));
}

Poly Poly::shifted(cplx x0) const {
    // Repeated synthetic division by (x - x0) yields the Taylor coefficients.
    std::vector<cplx> work = c;
    std::vector<cplx> out(c.size(), cplx(0.0));
    for (std::size_t k = 0; k < out.size(); ++k) {
        cplx carry(0.0);
        std::vector<cplx> quot(work.size() > 1 ? work.size() - 1 : 0);
        for (std::size_t i = work.size(); i-- > 0;) {
            cplx v = work[i] + carry * x0;
            if (i == 0) {
                out[k] = v;
            } else {
                quot[i - 1] = v;
                carry = v;
            }
        }
        if (quot.empty()) break;
        work = std::move(quot);
    }
    return Poly(std::move(out));
}

void Poly::trim(double eps) {
    while (c.size() > 1 && std::abs(c.back()) <= eps) c.pop_back();
}

Poly operator*(const Poly& a, const Poly& b) {
    std::vector<cplx> out(a.c.size() + b.c.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) out[i + j] += a.c[i] * b.c[j];
    return Poly(std::move(out));
}

Poly operator+(const Poly& a, const Poly& b) {
    std::vector<cplx> out(std::max(a.c.size(), b.c.size()), cplx(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i) out[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) out[i] += b.c[i];
    return Poly(std::move(out));
}

Poly operator-(const Poly& a, const Poly& b) {
    std::vector<cplx> out(std::max(a.c.size(), b.c.size()), cplx(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i) out[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) out[i] -= b.c[i];
    return Poly(std::move(out));
}

std::vector<cplx> poly_roots(const Poly& p_in) {
    Poly p = p_in;
    p.trim(0.0);
    int n = p.degree();
    if (n == 0) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    cplx lead = p.c[static_cast<std::size_t>(n)];
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -p.c[static_cast<std::size_t>(i)] / lead;
    for (int i = 1; i < n; ++i) comp(i, i - 1) = cplx(1.0);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cplx> roots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return roots;
}

// ---------------------------------------------------------------------------
// ExpPoly
// ---------------------------------------------------------------------------

cplx ExpPoly::eval(double z) const {
    cplx acc(0.0);
    for (const auto& t : terms) {
        double zp = 1.0;
        for (int k = 0; k < t.power; ++k) zp *= z;
        acc += t.coef * zp * std::exp(cplx(0.0, 1.0) * t.freq * z);
    }
    return acc;
}

void ExpPoly::add(cplx coef, int power, cplx freq, double eps) {
    if (std::abs(coef) <= eps) return;
    for (auto& t : terms) {
        if (t.power == power && std::abs(t.freq - freq) < 1e-14) {
            t.coef += coef;
            return;
        }
    }
    terms.push_back({coef, power, freq});
}

cplx halfline_moment(int k, cplx w) {
    if (w.imag() <= 0.0) throw std::invalid_argument("halfline_moment: needs Im w > 0");
    cplx miw = -cplx(0.0, 1.0) * w; // Re > 0
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return fact / std::pow(miw, k + 1);
}

cplx ExpPoly2::eval(double x, double y) const {
    cplx acc(0.0);
    const cplx I(0.0, 1.0);
    for (const auto& t : terms) {
        double xp = 1.0, yp = 1.0;
        for (int k = 0; k < t.px; ++k) xp *= x;
        for (int k = 0; k < t.py; ++k) yp *= y;
        acc += t.coef * xp * yp * std::exp(I * t.fx * x) * std::exp(I * t.fy * y);
    }
    return acc;
}

ExpPoly2 compose_halfline(const ExpPoly& f, const ExpPoly& g) {
    // h(x,y) = int_0^inf f(x+t) g(y+t) dt.
    // Expand (x+t)^m, (y+t)^n binomially; each cross term integrates to a
    // halfline moment of t^(r+s) e^{i (a+b) t}.
    ExpPoly2 out;
    auto binom = [](int n, int k) {
        double b = 1.0;
        for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
        return b;
    };
    for (const auto& tf : f.terms) {
        for (const auto& tg : g.terms) {
            cplx w = tf.freq + tg.freq;
            for (int r = 0; r <= tf.power; ++r) {
                for (int s = 0; s <= tg.power; ++s) {
                    cplx coef = tf.coef * tg.coef * binom(tf.power, r) * binom(tg.power, s) *
                                halfline_moment(r + s, w);
                    ExpPoly2::Term term;
                    term.coef = coef;
                    term.px = tf.power - r;
                    term.py = tg.power - s;
                    term.fx = tf.freq;
                    term.fy = tg.freq;
                    out.terms.push_back(term);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// RationalSymbol
// ---------------------------------------------------------------------------

RationalSymbol::RationalSymbol(cplx scale, std::vector<cplx> zeros, std::vector<cplx> poles)
    : scale_(scale), zeros_(std::move(zeros)), poles_(std::move(poles)) {
    for (const cplx& z : zeros_)
        if (z.imag() == 0.0) throw std::invalid_argument("RationalSymbol: zero on the real axis");
    for (const cplx& p : poles_)
        if (p.imag() == 0.0) throw std::invalid_argument("RationalSymbol: pole on the real axis");
}

cplx RationalSymbol::eval(double xi) const { return eval_at(cplx(xi, 0.0)); }

cplx RationalSymbol::eval_at(cplx xi) const {
    cplx acc = scale_;
    for (const cplx& z : zeros_) acc *= (xi - z);
    for (const cplx& p : poles_) acc /= (xi - p);
    return acc;
}

cplx RationalSymbol::value_at_infinity() const {
    int mu = order();
    if (mu > 0) throw std::domain_error("value_at_infinity: positive order");
    if (mu < 0) return cplx(0.0);
    return scale_;
}

RationalSymbol RationalSymbol::operator*(const RationalSymbol& other) const {
    std::vector<cplx> z = zeros_, p = poles_;
    z.insert(z.end(), other.zeros_.begin(), other.zeros_.end());
    p.insert(p.end(), other.poles_.begin(), other.poles_.end());
    return RationalSymbol(scale_ * other.scale_, std::move(z), std::move(p));
}

RationalSymbol RationalSymbol::conj_adjoint() const {
    std::vector<cplx> z, p;
    z.reserve(zeros_.size());
    p.reserve(poles_.size());
    for (const cplx& w : zeros_) z.push_back(std::conj(w));
    for (const cplx& w : poles_) p.push_back(std::conj(w));
    return RationalSymbol(std::conj(scale_), std::move(z), std::move(p));
}

RationalSymbol RationalSymbol::scaled_frequency(double hbar) const {
    // s(hbar xi) = scale * hbar^order * prod (xi - z/hbar) / prod (xi - p/hbar)
    std::vector<cplx> z, p;
    for (const cplx& w : zeros_) z.push_back(w / hbar);
    for (const cplx& w : poles_) p.push_back(w / hbar);
    cplx sc = scale_ * std::pow(hbar, order());
    return RationalSymbol(sc, std::move(z), std::move(p));
}

Poly RationalSymbol::numerator() const { return Poly::from_roots(scale_, zeros_); }
Poly RationalSymbol::denominator() const { return Poly::from_roots(cplx(1.0), poles_); }

bool RationalSymbol::is_minus_type() const {
    for (const cplx& z : zeros_)
        if (z.imag() > 0.0) return false;
    for (const cplx& p : poles_)
        if (p.imag() > 0.0) return false;
    return true;
}

int winding_residue(const RationalSymbol& s) {
    if (s.order() != 0) throw std::domain_error("winding: symbol order must be 0");
    int n = 0;
    for (const cplx& z : s.zeros())
        if (z.imag() > 0.0) ++n;
    for (const cplx& p : s.poles())
        if (p.imag() > 0.0) --n;
    return n;
}

namespace {

double winding_integrand(const RationalSymbol& s, double theta) {
    // xi = tan(theta) maps (-pi/2, pi/2) to R; d xi = sec^2 d theta.
    double xi = std::tan(theta);
    double sec2 = 1.0 + xi * xi;
    cplx acc(0.0);
    for (const cplx& z : s.zeros()) acc += 1.0 / (cplx(xi) - z);
    for (const cplx& p : s.poles()) acc -= 1.0 / (cplx(xi) - p);
    return acc.imag() * sec2;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

} // namespace

int winding_quadrature(const RationalSymbol& s, double tol) {
    if (s.order() != 0) throw std::domain_error("winding: symbol order must be 0");
    const double pi = 3.14159265358979323846;
    auto f = [&](double th) { return winding_integrand(s, th); };
    // Split at 0 to keep the adaptive bisection away from tan blowup edges.
    double a = -pi / 2 + 1e-9, b = pi / 2 - 1e-9;
    double m = 0.0;
    double fa = f(a), fm = f(m), fb = f(b);
    double whole1 = (m - a) / 6.0 * (fa + 4.0 * f(0.5 * (a + m)) + fm);
    double whole2 = (b - m) / 6.0 * (fm + 4.0 * f(0.5 * (m + b)) + fb);
    double integral = adaptive_simpson(f, a, m, fa, f(0.5 * (a + m)), fm, whole1, tol, 48) +
                      adaptive_simpson(f, m, b, fm, f(0.5 * (m + b)), fb, whole2, tol, 48);
    double w = integral / (2.0 * pi);
    long rounded = std::lround(w);
    if (std::abs(w - static_cast<double>(rounded)) > 1e-6)
        throw std::runtime_error("winding_quadrature: non-integer result");
    return static_cast<int>(rounded);
}

std::vector<PoleTerm> partial_fractions(const Poly& num, const std::vector<cplx>& poles) {
    // Group poles by value (multiplicity).
    std::vector<std::pair<cplx, int>> groups;
    for (const cplx& p : poles) {
        bool found = false;
        for (auto& g : groups) {
            if (std::abs(g.first - p) < 1e-12) {
                g.second++;
                found = true;
                break;
            }
        }
        if (!found) groups.push_back({p, 1});
    }
    std::vector<PoleTerm> out;
    for (const auto& [pj, kj] : groups) {
        // h = num / prod_{other groups} (x - p_i)^{k_i}; Taylor-expand h at pj.
        Poly den_other(cplx(1.0));
        for (const auto& [pi, ki] : groups) {
            if (std::abs(pi - pj) < 1e-12) continue;
            for (int l = 0; l < ki; ++l) den_other = den_other * Poly(std::vector<cplx>{-pi, cplx(1.0)});
        }
        Poly nsh = num.shifted(pj);
        Poly dsh = den_other.shifted(pj);
        // Power series division nsh / dsh up to order kj-1.
        std::vector<cplx> series(static_cast<std::size_t>(kj), cplx(0.0));
        cplx d0 = dsh.c[0];
        for (int m = 0; m < kj; ++m) {
            cplx acc = m < static_cast<int>(nsh.c.size()) ? nsh.c[static_cast<std::size_t>(m)] : cplx(0.0);
            for (int r = 1; r <= m; ++r) {
                cplx dr = r < static_cast<int>(dsh.c.size()) ? dsh.c[static_cast<std::size_t>(r)] : cplx(0.0);
                acc -= dr * series[static_cast<std::size_t>(m - r)];
            }
            series[static_cast<std::size_t>(m)] = acc / d0;
        }
        // num/den = sum_m series[m] (x-pj)^m / (x-pj)^{kj} = sum_l series[kj-l]/(x-pj)^l
        for (int l = 1; l <= kj; ++l) {
            cplx A = series[static_cast<std::size_t>(kj - l)];
            if (std::abs(A) > 1e-300) out.push_back({pj, l, A});
        }
    }
    return out;
}

SidedKernel rational_ift(const RationalSymbol& q) {
    if (q.order() > -1) throw std::domain_error("rational_ift: symbol must be proper (order <= -1)");
    SidedKernel k;
    Poly num = q.numerator();
    auto pf = partial_fractions(num, q.poles());
    const cplx I(0.0, 1.0);
    // (1/2pi) int A/(xi-p)^l e^{i z xi} d xi:
    //   Im p > 0, z > 0:  i A (i z)^{l-1}/(l-1)! e^{i p z}
    //   Im p < 0, z < 0: -i A (i z)^{l-1}/(l-1)! e^{i p z}
    for (const auto& t : pf) {
        double fact = 1.0;
        for (int i = 2; i <= t.mult - 1; ++i) fact *= i;
        cplx base = t.coef / fact;
        // (i z)^{l-1} = i^{l-1} z^{l-1}
        cplx ipow = std::pow(I, t.mult - 1);
        if (t.pole.imag() > 0.0)
            k.plus.add(I * base * ipow, t.mult - 1, t.pole);
        else
            k.minus.add(-I * base * ipow, t.mult - 1, t.pole);
    }
    return k;
}

cplx SidedKernel::eval(double z) const {
    if (z > 0.0) return plus.eval(z);
    if (z < 0.0) return minus.eval(z);
    return 0.5 * (plus.eval(0.0) + minus.eval(0.0));
}

cplx integral_residue(const RationalSymbol& q) {
    if (q.order() > -2) throw std::domain_error("integral_residue: needs order <= -2");
    Poly num = q.numerator();
    auto pf = partial_fractions(num, q.poles());
    // int dxi = 2 pi i * sum of simple residues in the upper half-plane;
    // higher multiplicities contribute only through their l == 1 coefficient.
    const double pi = 3.14159265358979323846;
    cplx acc(0.0);
    for (const auto& t : pf)
        if (t.mult == 1 && t.pole.imag() > 0.0) acc += t.coef;
    return cplx(0.0, 2.0 * pi) * acc;
}

RationalSymbol resolvent_symbol(const RationalSymbol& s) {
    // (1 + conj(s) s)^{-1} = den^c den / (den^c den + num^c num)
    RationalSymbol sc = s.conj_adjoint();
    Poly num = s.numerator(), den = s.denominator();
    Poly numc = sc.numerator(), denc = sc.denominator();
    Poly top = denc * den;
    Poly bottom = top + numc * num;
    bottom.trim(0.0);
    std::vector<cplx> zeros;
    for (const cplx& p : s.poles()) zeros.push_back(p);
    for (const cplx& p : sc.poles()) zeros.push_back(p);
    std::vector<cplx> poles = poly_roots(bottom);
    // Leading coefficients: top is monic in our construction times 1; bottom's
    // leading coefficient carries the scale.
    cplx lead_top = top.c[static_cast<std::size_t>(top.degree())];
    cplx lead_bot = bottom.c[static_cast<std::size_t>(bottom.degree())];
    if (top.degree() != bottom.degree())
        throw std::runtime_error("resolvent_symbol: degree mismatch (|s| must be bounded)");
    for (const cplx& r : poles)
        if (std::abs(r.imag()) < 1e-9)
            throw std::runtime_error("resolvent_symbol: near-real pole");
    return RationalSymbol(lead_top / lead_bot, std::move(zeros), std::move(poles));
}

} // namespace bdm
