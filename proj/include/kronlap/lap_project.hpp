#pragma once

#include "kronlap/config.hpp"
#include "kronlap/kron_core.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace kronlap {

enum class ProjectionMethod { closed_form, iterative };

std::string_view to_string(ProjectionMethod method) noexcept;

struct ProjectionReport {
    LaplacianLike projection;
    /// ||A - P(A)||_F
    double residual_fro = 0.0;
    /// residual_fro / ||A||_F, defined as 0 for A = 0.
    double relative_residual = 0.0;
    std::size_t sweeps_used = 0;
    ProjectionMethod method = ProjectionMethod::closed_form;
    /// Residual after each sweep (iterative method only).
    std::vector<double> sweep_residuals;
    /// Largest ||U_i||_F applied during each sweep (iterative method only).
    std::vector<double> sweep_update_norms;
};

/// tr(A)/N, the coefficient of id_N in the orthogonal split of A.
double identity_component(const DenseMatrix& a);

/// Traceless X_i minimizing ||A' - id ⊗ X_i ⊗ id||_F with A' = A - (tr(A)/N) id_N.
DenseMatrix mode_projection(const DenseMatrix& a, const DimSplit& dims, std::size_t mode);

/// Closed-form orthogonal projection of A onto the Laplacian-like subspace.
ProjectionReport project_laplacian(const DenseMatrix& a, const DimSplit& dims, const Config& cfg = {});

/// Gauss-Seidel sweeps towards the projection onto the traceless part.
///
/// Within a sweep, mode i is updated against the current residual, so modes
/// before i already carry this sweep's update. Requires |tr(A)| <= trace_tol * N
/// and throws PreconditionError otherwise. Stops when the Frobenius residual
/// drops below `tol` or after `iter_max` sweeps.
ProjectionReport project_delta_sweeps(const DenseMatrix& a, const DimSplit& dims, std::size_t iter_max,
                                      double tol, const Config& cfg = {});

/// Removes the identity component, runs the sweeps on the remainder and puts
/// the identity coefficient back as alpha.
ProjectionReport decompose_iterative(const DenseMatrix& a, const DimSplit& dims, std::size_t iter_max,
                                     double tol, const Config& cfg = {});

struct Membership {
    bool is_member = false;
    double relative_residual = 0.0;
    ProjectionReport report;
};

/// Relative distance from A to the Laplacian-like subspace; a member when at most `tol`.
Membership laplacian_distance(const DenseMatrix& a, const DimSplit& dims, double tol, const Config& cfg = {});

} // namespace kronlap
