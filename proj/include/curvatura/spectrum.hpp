#pragma once

#include "curvatura/assemble.hpp"

namespace curvatura {

struct EigenSolveOptions {
    double tol = 1e-8;       // relative pencil residual target
    int max_vectors = 320;   // Krylov basis cap
    int block_size = 0;      // 0: min(k + 2, n)
};

/// Eigenpairs of (K - Q + B) v = lambda M v, ascending. In the constrained
/// case the pencil is restricted to the M-orthogonal complement of the
/// constants (volume-preserving subspace), by deflation.
struct Spectrum {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd eigenfunctions; // columns, M-orthonormal
    std::vector<double> residuals;  // ||S v - lambda M v|| / ((||S|| + |lambda| ||M||) ||v||)
    bool constrained = false;

    void export_csv(std::ostream& os) const; // index,lambda,residual
};

/// k smallest eigenpairs via shift-invert block Lanczos with full
/// reorthogonalization in the M inner product. Deterministic: seeds are the
/// all-ones vector followed by fixed coordinate polynomials. Throws
/// SolverError when the iteration cap is reached before convergence.
Spectrum solve_spectrum(const AssembledOperators& ops, int k, bool constrained,
                        const EigenSolveOptions& opts = {});

struct StabilityVerdict {
    double lambda_min_constrained = 0;
    double lambda_min_full = 0;
    bool stable = false;
    bool strongly_stable = false;
    double tolerance = 0;
};

/// Stability of the configuration: stable iff the constrained lambda_min is
/// >= -tol, strongly stable iff the full-space lambda_1 is. The default
/// tolerance is 1e-3 max(|l1|, |l2|, h^2 scale). Refuses (SolverError) when
/// P1 is not positive definite on the mesh.
StabilityVerdict stability_verdict(const AssembledOperators& ops, double tol = -1);

/// Distance of f from being a Jacobi field: the mass-weighted variance of the
/// discrete T1 f over interior vertices, and the max Robin defect
/// |df/dnu + alpha f| over boundary vertices (one-sided difference).
struct JacobiResidual {
    double interior_deviation = 0;
    double boundary_residual = 0;
};
JacobiResidual jacobi_residual(const AssembledOperators& ops, const Eigen::VectorXd& f);

} // namespace curvatura
