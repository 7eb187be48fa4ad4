#include "kronlap/lap_project.hpp"

#include "kronlap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kronlap {

namespace {

void check_input(const DenseMatrix& a, const DimSplit& dims, std::string_view what)
{
    if (a.rows() != a.cols())
        throw ValidationError(std::string(what) + ": matrix is not square (" + std::to_string(a.rows())
                              + "x" + std::to_string(a.cols()) + ")");
    if (static_cast<std::size_t>(a.rows()) != dims.size())
        throw ValidationError(std::string(what) + ": matrix size " + std::to_string(a.rows())
                              + " does not match dims " + dims.to_string() + " (N="
                              + std::to_string(dims.size()) + ")");
    require_finite(a, what);
}

double relative(double residual, double norm)
{
    if (norm == 0.0)
        return 0.0;
    return std::min(1.0, residual / norm);
}

// r -= id ⊗ u ⊗ id
void subtract_mode(DenseMatrix& r, const DimSplit& dims, std::size_t mode, const DenseMatrix& u)
{
    const std::size_t n = dims.mode(mode);
    const std::size_t inner = dims.inner(mode);
    const std::size_t outer = dims.outer(mode);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) {
                const double v = u(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
                const std::size_t row = (o * n + p) * inner;
                const std::size_t col = (o * n + q) * inner;
                for (std::size_t k = 0; k < inner; ++k)
                    r(static_cast<Eigen::Index>(row + k), static_cast<Eigen::Index>(col + k)) -= v;
            }
}

} // namespace

std::string_view to_string(ProjectionMethod method) noexcept
{
    switch (method) {
    case ProjectionMethod::closed_form:
        return "closed";
    case ProjectionMethod::iterative:
        return "iterative";
    }
    return "unknown";
}

double identity_component(const DenseMatrix& a)
{
    if (a.rows() != a.cols() || a.rows() == 0)
        throw ValidationError("identity_component: matrix is not square (" + std::to_string(a.rows()) + "x"
                              + std::to_string(a.cols()) + ")");
    return a.trace() / static_cast<double>(a.rows());
}

DenseMatrix mode_projection(const DenseMatrix& a, const DimSplit& dims, std::size_t mode)
{
    check_input(a, dims, "mode_projection");
    const double big_n = static_cast<double>(dims.size());
    const double n = static_cast<double>(dims.mode(mode));
    DenseMatrix x = (n / big_n) * partial_trace(a, dims, mode);
    x.diagonal().array() -= a.trace() / big_n;
    return x;
}

ProjectionReport project_laplacian(const DenseMatrix& a, const DimSplit& dims, const Config& /*cfg*/)
{
    check_input(a, dims, "project_laplacian");
    std::vector<DenseMatrix> factors;
    factors.reserve(dims.order());
    for (std::size_t i = 0; i < dims.order(); ++i)
        factors.push_back(mode_projection(a, dims, i));
    LaplacianLike projection(dims, identity_component(a), std::move(factors));

    DenseMatrix residual = a;
    add_to_dense(residual, projection, -1.0);
    const double res = residual.norm();
    return ProjectionReport{std::move(projection), res, relative(res, a.norm()), 0, ProjectionMethod::closed_form,
                            {}, {}};
}

ProjectionReport project_delta_sweeps(const DenseMatrix& a, const DimSplit& dims, std::size_t iter_max,
                                      double tol, const Config& cfg)
{
    check_input(a, dims, "project_delta_sweeps");
    if (iter_max == 0)
        throw ValidationError("project_delta_sweeps: iter_max must be positive");
    if (!(tol > 0.0))
        throw ValidationError("project_delta_sweeps: tol must be positive");
    const double trace = a.trace();
    if (std::abs(trace) > cfg.trace_tol * static_cast<double>(dims.size())) {
        std::ostringstream os;
        os.precision(17);
        os << "project_delta_sweeps: input must be traceless, tr(A) = " << trace
           << "; subtract identity_component first";
        throw PreconditionError(os.str());
    }

    std::vector<DenseMatrix> factors;
    for (std::size_t n : dims.modes())
        factors.push_back(DenseMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));

    ProjectionReport report{LaplacianLike::zero(dims), 0.0, 0.0, 0, ProjectionMethod::iterative, {}, {}};
    DenseMatrix residual = a;
    double res = residual.norm();
    for (std::size_t sweep = 1; sweep <= iter_max; ++sweep) {
        double largest_update = 0.0;
        for (std::size_t i = 0; i < dims.order(); ++i) {
            DenseMatrix update = mode_projection(residual, dims, i);
            subtract_mode(residual, dims, i, update);
            factors[i] += update;
            largest_update = std::max(largest_update, update.norm());
        }
        res = residual.norm();
        report.sweeps_used = sweep;
        report.sweep_residuals.push_back(res);
        report.sweep_update_norms.push_back(largest_update);
        if (res < tol)
            break;
    }
    report.projection = LaplacianLike(dims, 0.0, std::move(factors));
    report.residual_fro = res;
    report.relative_residual = relative(res, a.norm());
    return report;
}

ProjectionReport decompose_iterative(const DenseMatrix& a, const DimSplit& dims, std::size_t iter_max, double tol,
                                     const Config& cfg)
{
    check_input(a, dims, "decompose_iterative");
    const double alpha = identity_component(a);
    DenseMatrix shifted = a;
    shifted.diagonal().array() -= alpha;
    ProjectionReport report = project_delta_sweeps(shifted, dims, iter_max, tol, cfg);
    report.projection = LaplacianLike(dims, alpha, report.projection.factors());
    report.relative_residual = relative(report.residual_fro, a.norm());
    return report;
}

Membership laplacian_distance(const DenseMatrix& a, const DimSplit& dims, double tol, const Config& cfg)
{
    if (!(tol > 0.0))
        throw ValidationError("laplacian_distance: tol must be positive");
    ProjectionReport report = project_laplacian(a, dims, cfg);
    const double rel = report.relative_residual;
    return Membership{rel <= tol, rel, std::move(report)};
}

} // namespace kronlap
