#pragma once

#include "bdm/grid.hpp"
#include "bdm/halfline.hpp"

#include <optional>

namespace bdm {

// 2x2 block idempotent built from a bounded operator a: H1 -> H2,
//   [ (1+a*a)^{-1}      (1+a*a)^{-1} a* ]
//   [ a (1+a*a)^{-1}    1-(1+aa*)^{-1}  ]
// Self-adjoint and idempotent by construction; the lower-right identity holds
// because a (1+a*a)^{-1} a* = 1 - (1+aa*)^{-1}.
struct GraphProjection {
    Matrix ul, ur, ll, lr;
    Matrix source; // the operator a the projection was built from

    Matrix assemble() const;
    int dim() const { return static_cast<int>(ul.rows() + lr.rows()); }

    double idempotency_defect() const;  // ||G^2 - G||
    double selfadjoint_defect() const;  // ||G - G*||
    // || a (1+a*a)^{-1} a*  -  (1 - (1+aa*)^{-1}) ||, the lower-right identity.
    double block_identity_defect() const;
};

GraphProjection graph_projection(const Matrix& a);

// Reference projection diag(0, 1) of matching block sizes.
Matrix reference_projection(int rows, int cols);

// || Gr(t a) - diag(P_ker a, 1 - P_ker a*) || with the kernel projections
// taken from an SVD of a (numerical kernels at tolerance tol).
double graph_limit_defect(const Matrix& a, double t, double tol = 1e-8);

// Trace formula on plain matrices: Tr(1+a*a)^{-1} - Tr(1+aa*)^{-1}.
// Exactly dim ker - dim coker in exact arithmetic; for square matrices the
// two spectra coincide, so this sees only the rectangular shape.
double trace_index(const Matrix& a);

// Trace formula realized for half-line operators: the diagonal of
// (1+t^2 a*a)^{-1} - (1+t^2 aa*)^{-1} at large fixed t is summed over
// x_j <= window * L only. Scaling by t pushes the non-kernel spectrum out
// (the graph-projection limit); kernel contributions decay in x while the
// reflection artifacts of the truncated grid concentrate at x = L, so the
// windowed sum recovers the infinite-volume trace of the theorem.
double trace_index(const HalfLineOperator& a, double window = 0.5);

// SVD index oracle. For plain matrices: shape index (cols - rank) - (rows -
// rank). For grid operators the near-null singular directions are classified
// by decay: right singular vectors decaying away from the corner count toward
// the kernel, decaying left singular vectors toward the cokernel; reflection
// ghosts concentrated at the truncation edge are discarded.
// Throws GapViolation (runtime_error) if any singular value lies in
// [tol, 10 tol].
int svd_index(const Matrix& a, double tol);
int svd_index(const HalfLineOperator& a, double tol);

} // namespace bdm
