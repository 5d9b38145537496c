#pragma once

#include "bdm/rational.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bdm {

// Smooth bump chi(r) = exp(1 - 1/(1 - r^2)) on [0,1), 0 for r >= 1.
double bump(double r);

// Smooth transition S with S(r) = 0 for r <= 0, 1 for r >= 1.
double smoothstep(double r);

// <xi> function: positive everywhere, equals |xi| for |xi| >= 1, smooth,
// clipped to >= 1/2. Blend profile is the fixed bump above.
struct BracketFunction {
    double r0 = 1.0;
    double operator()(double xi) const;
};

// A tangential family of rational normal-direction symbols: for each
// (x', xi') a RationalSymbol in xi_n. Built-ins are x'-independent; the x'
// argument is kept for interface uniformity.
struct SymbolFamily {
    std::string name;
    std::vector<double> params;
    int tangential_order = 0;
    std::function<RationalSymbol(double xprime, double xiprime)> eval;

    RationalSymbol at(double xiprime) const { return eval(0.0, xiprime); }
};

// Built-in registry addressed by name + parameter vector:
//   "identity"                 -> 1
//   "moebius"     [w]          -> ((xi - i)/(xi + i))^w            (1D)
//   "moebius"     [w, a]       -> ((xi - ia)/(xi + ia))^w          (1D)
//   "minus"       [m]          -> (1 - i xi)^{-m}-type minus symbol, winding 0
//   "pocket"      [w, c]       -> cylinder family, winding w concentrated at
//                                 the tangential frequency c, identity for
//                                 |xi' - c| >= 1
//   "two_pockets" [w1,c1,w2,c2]-> product of two pocket factors
SymbolFamily make_family(const std::string& name, const std::vector<double>& params);

// Family smooth across the zero section, identical to the input for
// |xi'| >= 1. Realized as a tangential radial reparametrization
// xi' -> nu(|xi'|) xi' (preserves the rational normal-direction form).
// variant selects between the two frozen reparametrization profiles used by
// the smoothing-independence checks.
SymbolFamily smooth_near_zero(const SymbolFamily& fam, const BracketFunction& cutoff,
                              int variant = 0);

// (x, xi) -> fam(x, hbar xi); throws for hbar outside (0, 1].
SymbolFamily scale_semiclassical(const SymbolFamily& fam, double hbar);

// Scalar symbol-class decay diagnostic: samples
// sup_xi |D^alpha s(xi)| <xi>^{|alpha| - mu} over a logarithmic xi sweep and
// fits the decay exponent of the ratio. Flagged if the fitted exponent
// exceeds 0 by more than 0.2.
struct DecayReport {
    std::vector<double> radii;
    std::vector<double> ratios;
    double fitted_exponent = 0.0;
    bool pass = true;
};
DecayReport seminorm_diagnostic(const SymbolFamily& fam, int alpha, int mu,
                                const std::vector<double>& radii = {});

// Least-squares slope of log(y) against log(x); pairs with y <= floor are
// dropped.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                        double floor = 1e-14);

} // namespace bdm
