#pragma once

#include "bdm/graph.hpp"
#include "bdm/halfline.hpp"
#include "bdm/symbols.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bdm {

// ---------------------------------------------------------------------------
// Fiber-side representations.
// ---------------------------------------------------------------------------

// Node-centered uniform grid on [-V, V): v_k = -V + k (2V/N). Node centering
// puts all pairwise differences back on the lattice, so convolution operators
// are exact lattice matrices.
struct FiberGrid {
    int N = 1024;
    double V = 16.0;
    double h() const { return 2.0 * V / N; }
    double node(int k) const { return -V + k * h(); }
    int zero_index() const { return N / 2; }
};

struct FiberFunction {
    FiberGrid grid;
    Vector values;

    static FiberFunction delta(const FiberGrid& g);
    static FiberFunction gaussian(const FiberGrid& g, double sigma, double center = 0.0);
    double l1_norm() const;
};

// Fiberwise convolution pi0(f): xi(v) -> int f(v - w) xi(w) dw.
Matrix pi0(const FiberFunction& f);

// Half-fiber truncated convolution on v >= 0 (the sub-lattice of nonnegative
// nodes).
Matrix pi0_boundary(const FiberFunction& f);

// Defects of the Fourier identification: ||F pi0(f) F^{-1} - M_fhat|| and
// ||F' pi0^d(f) F'^{-1} - W(fhat)||; fhat supplied in closed form.
struct FourierIdentification {
    double interior_defect = 0.0;
    double boundary_defect = 0.0;
};
FourierIdentification fourier_identify(const FiberFunction& f,
                                       const std::function<cplx(double)>& fhat);

// ---------------------------------------------------------------------------
// Cylinder model: S^1 x R_+ with x'-independent symbols, block-diagonal over
// the integer tangential frequencies.
// ---------------------------------------------------------------------------

struct GreenFamily {
    std::string name;
    std::vector<double> params;
    std::function<GreenKernel(double xiprime)> eval;
};

// Built-ins: "none"; "sep" [c, a, b, width] with kernel
// c exp(-(xi'/width)^2) e^{-a x} e^{-b y}.
GreenFamily make_green_family(const std::string& name, const std::vector<double>& params);

struct CylinderOperator {
    int n_max = 16;
    double hbar = 1.0;
    HalfLineGrid grid;
    std::vector<HalfLineOperator> blocks; // index 0 <-> n = -n_max

    const HalfLineOperator& block(int n) const { return blocks[static_cast<std::size_t>(n + n_max)]; }
    HalfLineOperator& block(int n) { return blocks[static_cast<std::size_t>(n + n_max)]; }

    double tail_min_sv = 0.0;  // certification record over |n| >= n_tail
    double tail_max_cond = 0.0;
    int n_tail = 0;
};

// Per tangential frequency n the block is the boundary symbol of the
// hbar-scaled slice, kappa_h^{-1} [op^+(p)(x', h xi') + g(h xi')] kappa_h,
// realized directly on the grid by frequency scaling of the rational data.
// Throws on ellipticity failure of the tail (offending n in the message).
CylinderOperator assemble_family(const SymbolFamily& p, const GreenFamily& g, double hbar,
                                 int n_max, const HalfLineGrid& grid, int n_tail = -1,
                                 double margin = 0.1);

// Two-chart approximate inverse of 1 + A_h* A_h: over the collar the scaled
// resolvent symbol, over the interior the truncated multiplier of
// (1 + |p|^2)^{-1}, glued by cutoffs in the normal variable. At hbar = 1 the
// collar chart covers everything and B equals the exact inverse.
struct ApproxInverse {
    CylinderOperator B;
    double defect = 0.0;                // max over blocks of ||(1+A*A)^{-1} - B||
    std::vector<double> block_defects;
};
ApproxInverse approximate_inverse(const SymbolFamily& p, const GreenFamily& g, double hbar,
                                  int n_max, const HalfLineGrid& grid);

// Continuity of the deformation section at hbar -> 0, metrized per frequency:
//  - scaling_defect: the exact conjugation check, Gr of the scaled assembly
//    against Gr of the reference assembly on the dilated grid (Lemma-level
//    identity; machine-zero on nested grids);
//  - interior_defect: the interior cutoff applied to the difference between
//    Gr(A_h) blocks and the truncated quantization of the pointwise graph
//    projection of the symbol (the corner corrections concentrate at scale
//    hbar, so this decays as hbar -> 0).
struct ContinuityReport {
    std::vector<double> hbars;
    std::vector<double> max_interior_defect;
    std::vector<double> max_scaling_defect;
    std::vector<std::vector<double>> per_frequency; // interior defect per block
    double t4_sigma_ratio = 0.0; // sigma_20/sigma_1 of Gr(c) - quantized Gr(p)
};
ContinuityReport section_continuity(const SymbolFamily& p, const GreenFamily& g,
                                    const std::vector<double>& schedule, int n_max,
                                    const HalfLineGrid& grid);

// Pointwise 2x2 graph projection of a rational slice, as rational symbols:
// [ (1+s*s)^{-1}, (1+s*s)^{-1} s* ; s (1+s*s)^{-1}, 1 - (1+ss*)^{-1} ].
struct SymbolGraphEntries {
    RationalSymbol ul, ur, ll, lr_minus_one; // lr stored as lr - 1 (decaying part)
};
SymbolGraphEntries symbol_graph_projection(const RationalSymbol& s);

// Truncated quantization of the symbol graph projection at a scaled slice:
// e + W(entries of Gr(p) - e), assembled as a 2N x 2N matrix.
Matrix quantize_symbol_graph(const RationalSymbol& slice, const HalfLineGrid& grid);

// Interior cutoff profile used by the continuity metric and the localization
// tests: 0 for x <= 1/2, 1 for x >= 1.
double interior_cutoff(double x);

} // namespace bdm
