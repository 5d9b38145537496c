#include "bdm/symbols.hpp"

#include <cmath>
#include <stdexcept>

namespace bdm {

double bump(double r) {
    r = std::abs(r);
    if (r >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

double smoothstep(double r) {
    auto edge = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    double a = edge(r), b = edge(1.0 - r);
    return a / (a + b);
}

double BracketFunction::operator()(double xi) const {
    double r = std::abs(xi) / r0;
    double chi = bump(r);
    double v = chi * 1.0 + (1.0 - chi) * std::abs(xi);
    return std::max(v, 0.5);
}

namespace {

RationalSymbol power_symbol(cplx zero, cplx pole, int w) {
    // ((xi - zero)/(xi - pole))^w; negative w swaps the roles.
    std::vector<cplx> zs, ps;
    int n = std::abs(w);
    for (int i = 0; i < n; ++i) {
        if (w >= 0) {
            zs.push_back(zero);
            ps.push_back(pole);
        } else {
            zs.push_back(pole);
            ps.push_back(zero);
        }
    }
    return RationalSymbol(cplx(1.0), zs, ps);
}

// Moving-zero profile: +1 at the pocket center, -1 once |xi' - c| >= 1.
// At tau = -1 the slice is exactly 1 (zero and pole coincide at -i a).
double pocket_tau(double d) { return 1.0 - 2.0 * smoothstep(std::abs(d)); }

RationalSymbol pocket_slice(double xiprime, double w_center, int w) {
    double tau = pocket_tau(xiprime - w_center);
    cplx zero(0.0, tau == 0.0 ? 1e-8 : tau); // keep invariants: never exactly real
    cplx pole(0.0, -1.0);
    return power_symbol(zero, pole, w);
}

} // namespace

SymbolFamily make_family(const std::string& name, const std::vector<double>& params) {
    SymbolFamily fam;
    fam.name = name;
    fam.params = params;
    if (name == "identity") {
        fam.eval = [](double, double) { return RationalSymbol::one(); };
        return fam;
    }
    if (name == "moebius") {
        int w = params.empty() ? 1 : static_cast<int>(params[0]);
        double a = params.size() > 1 ? params[1] : 1.0;
        if (a <= 0.0) throw std::invalid_argument("moebius: scale must be positive");
        fam.eval = [w, a](double, double) {
            return power_symbol(cplx(0.0, a), cplx(0.0, -a), w);
        };
        return fam;
    }
    if (name == "minus") {
        // Minus-type: all zeros and poles in the lower half-plane, winding 0.
        int m = params.empty() ? 1 : static_cast<int>(params[0]);
        fam.eval = [m](double, double) {
            std::vector<cplx> zs, ps;
            for (int i = 0; i < m; ++i) {
                zs.push_back(cplx(0.0, -2.0));
                ps.push_back(cplx(0.0, -1.0));
            }
            return RationalSymbol(cplx(1.0), zs, ps);
        };
        return fam;
    }
    if (name == "pocket") {
        int w = params.empty() ? 1 : static_cast<int>(params[0]);
        double c = params.size() > 1 ? params[1] : 0.0;
        fam.eval = [w, c](double, double xiprime) { return pocket_slice(xiprime, c, w); };
        return fam;
    }
    if (name == "two_pockets") {
        if (params.size() < 4) throw std::invalid_argument("two_pockets: needs [w1,c1,w2,c2]");
        int w1 = static_cast<int>(params[0]);
        double c1 = params[1];
        int w2 = static_cast<int>(params[2]);
        double c2 = params[3];
        fam.eval = [w1, c1, w2, c2](double, double xiprime) {
            return pocket_slice(xiprime, c1, w1) * pocket_slice(xiprime, c2, w2);
        };
        return fam;
    }
    throw std::invalid_argument("unknown symbol family: " + name);
}

SymbolFamily smooth_near_zero(const SymbolFamily& fam, const BracketFunction& cutoff, int variant) {
    SymbolFamily out = fam;
    out.name = fam.name + "#smooth" + std::to_string(variant);
    double r0 = cutoff.r0;
    auto base = fam.eval;
    out.eval = [base, r0, variant](double xp, double xiprime) {
        double r = std::abs(xiprime) / r0;
        if (r >= 1.0) return base(xp, xiprime);
        // Radial reparametrization inside the unit ball; both variants agree
        // with the input at |xi'| >= 1 and are smooth across zero.
        double nu = variant == 0 ? 1.0 : 1.0 + 0.3 * bump(r);
        return base(xp, xiprime * nu);
    };
    return out;
}

SymbolFamily scale_semiclassical(const SymbolFamily& fam, double hbar) {
    if (!(hbar > 0.0) || hbar > 1.0) throw std::domain_error("scale_semiclassical: hbar not in (0,1]");
    SymbolFamily out = fam;
    out.name = fam.name + "#h";
    auto base = fam.eval;
    out.eval = [base, hbar](double xp, double xiprime) {
        return base(xp, hbar * xiprime).scaled_frequency(hbar);
    };
    return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double floor) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (y[i] <= floor || x[i] <= 0.0) continue;
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

DecayReport seminorm_diagnostic(const SymbolFamily& fam, int alpha, int mu,
                                const std::vector<double>& radii_in) {
    DecayReport rep;
    rep.radii = radii_in;
    if (rep.radii.empty()) {
        for (double r = 1.0; r <= 1.0e3; r *= 2.0) rep.radii.push_back(r);
    }
    BracketFunction br;
    for (double r : rep.radii) {
        // sup over both signs of xi of |D^alpha s| <xi>^{alpha - mu},
        // derivative by central finite differences on the scalar symbol.
        double sup = 0.0;
        for (double sgn : {-1.0, 1.0}) {
            double xi = sgn * r;
            double d = 1e-3 * std::max(1.0, std::abs(xi) * 1e-3);
            cplx val;
            RationalSymbol s = fam.at(0.0);
            if (alpha == 0) {
                val = s.eval(xi);
            } else if (alpha == 1) {
                val = (s.eval(xi + d) - s.eval(xi - d)) / (2.0 * d);
            } else {
                val = (s.eval(xi + d) - 2.0 * s.eval(xi) + s.eval(xi - d)) / (d * d);
            }
            sup = std::max(sup, std::abs(val) * std::pow(br(xi), alpha - mu));
        }
        rep.ratios.push_back(sup);
    }
    rep.fitted_exponent = fit_loglog_slope(rep.radii, rep.ratios);
    rep.pass = rep.fitted_exponent <= 0.2;
    return rep;
}

} // namespace bdm
