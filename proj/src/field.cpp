#include "bdm/field.hpp"

#include "bdm/fft.hpp"
#include "bdm/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace bdm {

FiberFunction FiberFunction::delta(const FiberGrid& g) {
    FiberFunction f;
    f.grid = g;
    f.values = Vector::Zero(g.N);
    f.values(g.zero_index()) = 1.0 / g.h(); // unit mass
    return f;
}

FiberFunction FiberFunction::gaussian(const FiberGrid& g, double sigma, double center) {
    FiberFunction f;
    f.grid = g;
    f.values = Vector::Zero(g.N);
    for (int k = 0; k < g.N; ++k) {
        double v = g.node(k) - center;
        f.values(k) = std::exp(-v * v / (2.0 * sigma * sigma));
    }
    return f;
}

double FiberFunction::l1_norm() const {
    double acc = 0.0;
    for (int k = 0; k < grid.N; ++k) acc += std::abs(values(k));
    return acc * grid.h();
}

Matrix pi0(const FiberFunction& f) {
    const int n = f.grid.N;
    const int z = f.grid.zero_index();
    Matrix m = Matrix::Zero(n, n);
    double h = f.grid.h();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int k = i - j + z;
            if (k >= 0 && k < n) m(i, j) = h * f.values(k);
        }
    }
    return m;
}

Matrix pi0_boundary(const FiberFunction& f) {
    const int n = f.grid.N;
    const int z = f.grid.zero_index();
    const int nh = n - z; // nodes v >= 0
    Matrix m = Matrix::Zero(nh, nh);
    double h = f.grid.h();
    for (int i = 0; i < nh; ++i) {
        for (int j = 0; j < nh; ++j) {
            int k = i - j + z;
            if (k >= 0 && k < n) m(i, j) = h * f.values(k);
        }
    }
    return m;
}

FourierIdentification fourier_identify(const FiberFunction& f,
                                       const std::function<cplx(double)>& fhat) {
    FourierIdentification out;
    const int n = f.grid.N;
    const double h = f.grid.h();
    const double pi = 3.14159265358979323846;
    // Frequency lattice dual to the box: xi_k = (k - N/2) * pi / V.
    const double dxi = 2.0 * pi / (n * h);

    // Interior: F pi0(f) F^{-1} is diagonal up to periodization; compare the
    // conjugated matrix against diag(fhat(xi_k)).
    Matrix F(n, n);
    const cplx I(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
        double xi = (k - n / 2) * dxi;
        for (int j = 0; j < n; ++j) F(k, j) = std::exp(-I * xi * f.grid.node(j)) * h;
    }
    // Unitary up to the lattice normalization: F^{-1} = F^* / (n h dxi / 2pi)
    // with our scaling F F^* = (2 pi / dxi) h ... compute the inverse directly.
    Matrix Finv = F.inverse();
    Matrix conj = F * pi0(f) * Finv;
    Matrix diag = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) diag(k, k) = fhat((k - n / 2) * dxi);
    out.interior_defect = op_norm(Matrix(conj - diag));

    // Boundary: pi0^d(f) against the residue-free lattice Wiener-Hopf matrix
    // built from the same fhat: s_inf I + h k with k = f itself (the inverse
    // transform), i.e. compare against the half-lattice multiplier built from
    // fhat through the interior route.
    const int z = f.grid.zero_index();
    const int nh = n - z;
    Matrix what = Matrix::Zero(nh, nh);
    // Half-lattice DFT quantization of fhat: r^+ F^{-1} M_fhat F e^+.
    Matrix big = Finv * diag * F;
    for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nh; ++j) what(i, j) = big(z + i, z + j);
    out.boundary_defect = op_norm(Matrix(pi0_boundary(f) - what));
    return out;
}

// ---------------------------------------------------------------------------
// Cylinder model
// ---------------------------------------------------------------------------

GreenFamily make_green_family(const std::string& name, const std::vector<double>& params) {
    GreenFamily g;
    g.name = name;
    g.params = params;
    if (name == "none" || name.empty()) {
        g.eval = [](double) { return GreenKernel::zero(); };
        return g;
    }
    if (name == "sep") {
        double c = params.size() > 0 ? params[0] : 1.0;
        double a = params.size() > 1 ? params[1] : 1.0;
        double b = params.size() > 2 ? params[2] : 1.0;
        double width = params.size() > 3 ? params[3] : 1.0;
        if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("sep green: decay rates must be positive");
        g.eval = [c, a, b, width](double xiprime) {
            double rho = std::exp(-(xiprime / width) * (xiprime / width));
            return GreenKernel::separable(c * rho, cplx(-a, 0.0), cplx(-b, 0.0));
        };
        return g;
    }
    throw std::invalid_argument("unknown green family: " + name);
}

namespace {

HalfLineOperator scaled_block(const SymbolFamily& p, const GreenFamily& g, double hbar, int n,
                              const HalfLineGrid& grid) {
    RationalSymbol slice = p.at(hbar * n).scaled_frequency(hbar);
    GreenKernel gk = g.eval(hbar * n).scaled(hbar);
    HalfLineOperator c = boundary_symbol(slice, gk, grid);
    c.order = slice.order();
    return c;
}

} // namespace

CylinderOperator assemble_family(const SymbolFamily& p, const GreenFamily& g, double hbar,
                                 int n_max, const HalfLineGrid& grid, int n_tail, double margin) {
    if (!(hbar > 0.0) || hbar > 1.0) throw std::domain_error("assemble_family: hbar not in (0,1]");
    CylinderOperator cyl;
    cyl.n_max = n_max;
    cyl.hbar = hbar;
    cyl.grid = grid;
    cyl.n_tail = n_tail >= 0 ? n_tail : std::max(1, n_max / 2);
    cyl.blocks.resize(static_cast<std::size_t>(2 * n_max + 1));
    parallel_for(static_cast<std::size_t>(2 * n_max + 1), [&](std::size_t idx) {
        int n = static_cast<int>(idx) - n_max;
        cyl.blocks[idx] = scaled_block(p, g, hbar, n, grid);
    });
    // Tail certification: blocks with |hbar n| >= n_tail must be uniformly
    // invertible (ellipticity for |xi'| >= 1 guarantees it once hbar n is past
    // the smoothing ball).
    double min_sv = -1.0, max_cond = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
        if (std::abs(n) < cyl.n_tail) continue;
        Eigen::BDCSVD<Matrix> svd(cyl.block(n).matrix);
        double smin = svd.singularValues()(svd.singularValues().size() - 1);
        double smax = svd.singularValues()(0);
        if (min_sv < 0.0 || smin < min_sv) min_sv = smin;
        if (smax / smin > max_cond) max_cond = smax / smin;
        if (smin < margin)
            throw std::runtime_error("EllipticityFailure: tail block n=" + std::to_string(n) +
                                     " has smallest singular value " + std::to_string(smin));
    }
    cyl.tail_min_sv = min_sv;
    cyl.tail_max_cond = max_cond;
    return cyl;
}

namespace {

double collar_cutoff(double x) { return 1.0 - smoothstep(x - 2.0); }         // 1 on [0,2], 0 past 3
double collar_wide(double x) { return 1.0 - smoothstep(x - 4.0); }           // 1 on [0,4], 0 past 5
double interior_wide(double x) { return smoothstep(2.0 * (x - 0.5)); }       // 0 on [0,1/2], 1 past 1

} // namespace

double interior_cutoff(double x) { return smoothstep(2.0 * (x - 0.5)); }

ApproxInverse approximate_inverse(const SymbolFamily& p, const GreenFamily& g, double hbar,
                                  int n_max, const HalfLineGrid& grid) {
    ApproxInverse out;
    out.B.n_max = n_max;
    out.B.hbar = hbar;
    out.B.grid = grid;
    out.B.blocks.resize(static_cast<std::size_t>(2 * n_max + 1));
    out.block_defects.assign(static_cast<std::size_t>(2 * n_max + 1), 0.0);
    const int N = grid.N;
    Matrix id = Matrix::Identity(N, N);

    Matrix phi_b = Matrix::Zero(N, N), psi_b = Matrix::Zero(N, N), phi_i = Matrix::Zero(N, N),
           psi_i = Matrix::Zero(N, N);
    for (int j = 0; j < N; ++j) {
        double x = grid.node(j);
        phi_b(j, j) = collar_cutoff(x);
        psi_b(j, j) = collar_wide(x);
        phi_i(j, j) = 1.0 - collar_cutoff(x);
        psi_i(j, j) = interior_wide(x);
    }

    parallel_for(static_cast<std::size_t>(2 * n_max + 1), [&](std::size_t idx) {
        int n = static_cast<int>(idx) - n_max;
        HalfLineOperator c = scaled_block(p, g, hbar, n, grid);
        Eigen::LLT<Matrix> llt(Matrix(id + c.matrix.adjoint() * c.matrix));
        Matrix exact = llt.solve(id);
        HalfLineOperator b;
        b.grid = grid;
        b.kind = OpKind::Composite;
        b.order = -2 * std::abs(c.order);
        if (hbar == 1.0) {
            // single boundary chart: B(1) is the exact symbol resolvent
            b.matrix = exact;
        } else {
            RationalSymbol slice = p.at(hbar * n).scaled_frequency(hbar);
            HalfLineOperator wr = wiener_hopf(resolvent_symbol(slice), grid);
            b.matrix = phi_b * exact * psi_b + phi_i * wr.matrix * psi_i;
        }
        out.B.blocks[idx] = b;
        out.block_defects[idx] = op_norm(Matrix(exact - b.matrix));
    });
    out.defect = 0.0;
    for (double d : out.block_defects) out.defect = std::max(out.defect, d);
    return out;
}

SymbolGraphEntries symbol_graph_projection(const RationalSymbol& s) {
    SymbolGraphEntries e;
    RationalSymbol sc = s.conj_adjoint();
    e.ul = resolvent_symbol(s);        // (1 + s* s)^{-1}
    e.ur = e.ul * sc;                  // (1 + s* s)^{-1} s*
    e.ll = s * e.ul;                   // s (1 + s* s)^{-1}
    // 1 - (1 + s s*)^{-1} = s s* (1 + s s*)^{-1}; store the decaying part
    // lr - 1 = -(1 + s s*)^{-1}.
    RationalSymbol res2 = resolvent_symbol(sc); // (1 + s s*)^{-1} (|s*| = |s| on R)
    e.lr_minus_one = RationalSymbol::constant(-1.0) * res2;
    return e;
}

Matrix quantize_symbol_graph(const RationalSymbol& slice, const HalfLineGrid& grid) {
    SymbolGraphEntries e = symbol_graph_projection(slice);
    const int N = grid.N;
    Matrix out = Matrix::Zero(2 * N, 2 * N);
    out.topLeftCorner(N, N) = wiener_hopf(e.ul, grid).matrix;
    out.topRightCorner(N, N) = wiener_hopf(e.ur, grid).matrix;
    out.bottomLeftCorner(N, N) = wiener_hopf(e.ll, grid).matrix;
    out.bottomRightCorner(N, N) =
        Matrix::Identity(N, N) + wiener_hopf(e.lr_minus_one, grid).matrix;
    return out;
}

ContinuityReport section_continuity(const SymbolFamily& p, const GreenFamily& g,
                                    const std::vector<double>& schedule, int n_max,
                                    const HalfLineGrid& grid) {
    ContinuityReport rep;
    const int N = grid.N;
    Matrix phi2 = Matrix::Zero(2 * N, 2 * N);
    for (int j = 0; j < N; ++j) {
        double c = interior_cutoff(grid.node(j));
        phi2(j, j) = c;
        phi2(N + j, N + j) = c;
    }
    for (double hbar : schedule) {
        if (!(hbar > 0.0)) continue;
        std::vector<double> freq_defect(static_cast<std::size_t>(2 * n_max + 1), 0.0);
        std::vector<double> scal_defect(static_cast<std::size_t>(2 * n_max + 1), 0.0);
        parallel_for(static_cast<std::size_t>(2 * n_max + 1), [&](std::size_t idx) {
            int n = static_cast<int>(idx) - n_max;
            HalfLineOperator c = scaled_block(p, g, hbar, n, grid);
            GraphProjection gp = graph_projection(c.matrix);
            Matrix gr = gp.assemble();
            // interior-matched defect against the quantized symbol projection
            RationalSymbol slice = p.at(hbar * n).scaled_frequency(hbar);
            Matrix quant = quantize_symbol_graph(slice, grid);
            freq_defect[idx] = op_norm(Matrix(phi2 * (gr - quant)));
            // exact scaling conjugation: reference assembly on the dilated grid
            HalfLineGrid dilated = grid.scaled(hbar); // length L / hbar
            HalfLineOperator ref = boundary_symbol(p.at(hbar * n), g.eval(hbar * n), dilated);
            GraphProjection gpref = graph_projection(ref.matrix);
            scal_defect[idx] = op_norm(Matrix(gr - gpref.assemble()));
        });
        double mi = 0.0, ms = 0.0;
        for (std::size_t i = 0; i < freq_defect.size(); ++i) {
            mi = std::max(mi, freq_defect[i]);
            ms = std::max(ms, scal_defect[i]);
        }
        rep.hbars.push_back(hbar);
        rep.max_interior_defect.push_back(mi);
        rep.max_scaling_defect.push_back(ms);
        rep.per_frequency.push_back(freq_defect);
    }
    // Prop-style compactness of the hbar = 0 boundary fiber: sigma-decay of
    // Gr(c) minus the truncated quantization at a representative frequency.
    {
        HalfLineOperator c = scaled_block(p, g, 1.0, 0, grid);
        GraphProjection gp = graph_projection(c.matrix);
        Matrix diff = gp.assemble() - quantize_symbol_graph(p.at(0.0), grid);
        Eigen::BDCSVD<Matrix> svd(diff);
        const auto& sv = svd.singularValues();
        if (sv.size() > 20 && sv(0) > 0.0) rep.t4_sigma_ratio = sv(19) / sv(0);
    }
    return rep;
}

} // namespace bdm
