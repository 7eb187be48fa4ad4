#pragma once

#include <cstddef>

namespace kronlap {

/// Numeric tolerances and size caps shared by every module.
///
/// Default-constructed values are the library defaults. `from_env()` applies
/// the `KRONLAP_DENSE_CAP` override on top of them.
struct Config {
    /// Per-mode traceless tolerance, scaled by the mode size.
    double canonical_tol = 1e-12;
    /// Largest N for which an N x N dense matrix may be materialized.
    std::size_t dense_cap = 4096;
    /// Largest row or column count of an explicit Kronecker product.
    std::size_t kron_max_side = std::size_t{1} << 20;
    /// Relative residual below which a matrix counts as Laplacian-like.
    double membership_tol = 1e-8;
    /// Sweep cap for the iterative projection.
    std::size_t sweep_iter_max = 10;
    /// Sweep stopping threshold on the Frobenius residual.
    double sweep_tol = 1e-12;
    /// |tr(A)| <= trace_tol * N is required by the sweep procedure.
    double trace_tol = 1e-10;
    /// Relative pivot threshold for the direct solver.
    double pivot_tol = 1e-12;
    /// Relative rank threshold when checking Kronecker factor invertibility.
    double invertibility_tol = 1e-12;
    /// Truncation threshold of the Taylor series in dense_exp.
    double exp_tol = 1e-15;

    static Config from_env();
};

} // namespace kronlap
