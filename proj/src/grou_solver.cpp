#include "kronlap/grou_solver.hpp"

#include "kronlap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace kronlap {

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

void check_length(const Vector& v, const DimSplit& dims, std::string_view what)
{
    if (static_cast<std::size_t>(v.size()) != dims.size())
        throw ValidationError(std::string(what) + ": vector length " + std::to_string(v.size())
                              + " does not match dims " + dims.to_string() + " (N="
                              + std::to_string(dims.size()) + ")");
}

// Kronecker product of the factors with factor `mode` replaced by the unit vector e_j.
Vector rank_one_with_unit(const std::vector<Vector>& factors, std::size_t mode, Eigen::Index j)
{
    Vector out = Vector::Ones(1);
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const Eigen::Index n = factors[i].size();
        Vector next = Vector::Zero(out.size() * n);
        for (Eigen::Index a = 0; a < out.size(); ++a) {
            if (i == mode)
                next(a * n + j) = out(a);
            else
                next.segment(a * n, n) = out(a) * factors[i];
        }
        out = std::move(next);
    }
    return out;
}

DenseMatrix mode_matrix(const LinearOperator& op, const std::vector<Vector>& factors, std::size_t mode,
                        std::size_t threads)
{
    const Eigen::Index n = factors[mode].size();
    DenseMatrix m(idx(op.dims().size()), n);
    auto fill = [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index j = begin; j < end; ++j)
            m.col(j) = op.apply(rank_one_with_unit(factors, mode, j));
    };
    const auto workers = static_cast<Eigen::Index>(std::min<std::size_t>(threads, static_cast<std::size_t>(n)));
    if (workers <= 1) {
        fill(0, n);
        return m;
    }
    std::vector<std::thread> pool;
    const Eigen::Index chunk = (n + workers - 1) / workers;
    for (Eigen::Index begin = 0; begin < n; begin += chunk)
        pool.emplace_back(fill, begin, std::min(n, begin + chunk));
    for (auto& t : pool)
        t.join();
    return m;
}

Vector assemble(const std::vector<Vector>& factors)
{
    Vector out = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) {
        const Vector& f = factors[i];
        Vector next(out.size() * f.size());
        for (Eigen::Index a = 0; a < out.size(); ++a)
            next.segment(a * f.size(), f.size()) = out(a) * f;
        out = std::move(next);
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// LinearOperator

LinearOperator::LinearOperator(DimSplit dims, std::variant<DenseMatrix, LaplacianLike> rep)
    : dims_(std::move(dims)), rep_(std::move(rep))
{
}

LinearOperator LinearOperator::dense(DimSplit dims, DenseMatrix matrix)
{
    const auto n = idx(dims.size());
    if (matrix.rows() != n || matrix.cols() != n)
        throw ValidationError("dense operator is " + std::to_string(matrix.rows()) + "x"
                              + std::to_string(matrix.cols()) + " but dims " + dims.to_string()
                              + " need " + std::to_string(n) + "x" + std::to_string(n));
    require_finite(matrix, "dense operator");
    return LinearOperator(std::move(dims), std::move(matrix));
}

LinearOperator LinearOperator::laplacian(LaplacianLike op)
{
    DimSplit dims = op.dims();
    return LinearOperator(std::move(dims), std::move(op));
}

LinearOperator LinearOperator::identity(const DimSplit& dims)
{
    return laplacian(LaplacianLike::scalar(dims, 1.0));
}

LinearOperator::Kind LinearOperator::kind() const noexcept
{
    return std::holds_alternative<DenseMatrix>(rep_) ? Kind::dense : Kind::laplacian;
}

Vector LinearOperator::apply(const Vector& x) const
{
    check_length(x, dims_, "LinearOperator::apply");
    if (const auto* m = std::get_if<DenseMatrix>(&rep_))
        return (*m) * x;
    return lap_matvec(std::get<LaplacianLike>(rep_), x);
}

const DenseMatrix* LinearOperator::dense_matrix() const noexcept
{
    return std::get_if<DenseMatrix>(&rep_);
}

const LaplacianLike* LinearOperator::laplacian_form() const noexcept
{
    return std::get_if<LaplacianLike>(&rep_);
}

std::string_view to_string(LinearOperator::Kind kind) noexcept
{
    return kind == LinearOperator::Kind::dense ? "dense" : "laplacian";
}

std::string_view to_string(StopReason reason) noexcept
{
    switch (reason) {
    case StopReason::residual_below_eps:
        return "residual_below_eps";
    case StopReason::stagnation:
        return "stagnation";
    case StopReason::rank_max_reached:
        return "rank_max_reached";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// ALS

AlsResult als_rank_one(const LinearOperator& op, const Vector& r, std::size_t iter_max, std::uint64_t seed,
                       std::size_t threads)
{
    const DimSplit& dims = op.dims();
    check_length(r, dims, "als_rank_one");
    if (iter_max == 0)
        throw ValidationError("als_rank_one: iter_max must be positive");

    const double r_norm = r.norm();
    if (r_norm == 0.0)
        return AlsResult{RankOneVector::zero(dims), 0.0, 0.0, 0, false, {}};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<Vector> factors;
    for (std::size_t n : dims.modes()) {
        Vector f(idx(n));
        for (Eigen::Index k = 0; k < f.size(); ++k)
            f(k) = dist(rng);
        f /= f.norm();
        factors.push_back(std::move(f));
    }

    AlsResult result{RankOneVector::zero(dims), 0.0, 0.0, 0, false, {}};
    double objective = (r - op.apply(assemble(factors))).norm();
    result.initial_objective = objective;

    for (std::size_t pass = 1; pass <= iter_max; ++pass) {
        const double before = objective;
        for (std::size_t k = 0; k < dims.order(); ++k) {
            const DenseMatrix m = mode_matrix(op, factors, k, threads);
            Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(m);
            if (cod.rank() < m.cols())
                result.rank_deficient = true;
            Vector z = cod.solve(r);
            const double updated = (r - m * z).norm();
            const double scale = z.norm();
            if (scale == 0.0) {
                // Nothing in this mode's range reduces the residual: y = 0 is optimal here.
                result.objective_trace.push_back(r_norm);
                result.passes = pass;
                result.objective = r_norm;
                return result;
            }
            if (k == 0) {
                factors[0] = std::move(z);
            } else {
                factors[k] = z / scale;
                factors[0] *= scale;
            }
            objective = updated;
            result.objective_trace.push_back(objective);
        }
        result.passes = pass;
        if (before - objective < 1e-14 * r_norm)
            break;
    }

    if (objective > r_norm)
        return AlsResult{RankOneVector::zero(dims), r_norm, result.initial_objective, result.passes,
                         result.rank_deficient, std::move(result.objective_trace)};
    result.y = RankOneVector(dims, std::move(factors));
    result.objective = objective;
    return result;
}

// ---------------------------------------------------------------------------
// GROU

GrouReport grou(const LinearOperator& op, const Vector& b, const GrouParams& params, const Config& cfg)
{
    check_length(b, op.dims(), "grou");
    if (op.kind() == LinearOperator::Kind::dense)
        check_dense_cap(op.dims().size(), cfg, "grou dense operator");
    require_finite(b, "right-hand side");
    if (!(params.eps > 0.0) || !(params.tol > 0.0))
        throw ValidationError("grou: eps and tol must be positive");
    if (params.rank_max == 0 || params.als_iter_max == 0)
        throw ValidationError("grou: rank_max and als_iter_max must be positive");

    GrouReport report;
    report.x = Vector::Zero(b.size());
    Vector r = b;
    double prev = r.norm();
    report.residual_history.push_back(prev);
    if (prev < params.eps) {
        report.stop_reason = StopReason::residual_below_eps;
        return report;
    }

    std::mt19937_64 seeds(params.seed);
    report.stop_reason = StopReason::rank_max_reached;
    for (std::size_t term = 0; term < params.rank_max; ++term) {
        const AlsResult als = als_rank_one(op, r, params.als_iter_max, seeds(), params.threads);
        if (als.rank_deficient)
            ++report.rank_deficient_terms;
        double next = prev;
        if (!als.y.is_zero()) {
            const Vector y = als.y.to_vector();
            Vector candidate = r - op.apply(y);
            const double cand_norm = candidate.norm();
            // The zero term is always feasible, so never accept an increase.
            if (cand_norm <= prev) {
                r = std::move(candidate);
                report.x += y;
                next = cand_norm;
            }
        }
        ++report.terms_used;
        report.residual_history.push_back(next);
        if (next < params.eps) {
            report.stop_reason = StopReason::residual_below_eps;
            break;
        }
        if (std::abs(next - prev) < params.tol) {
            report.stop_reason = StopReason::stagnation;
            break;
        }
        prev = next;
    }
    return report;
}

Vector direct_solve(const DenseMatrix& a, const Vector& b, const Config& cfg)
{
    if (a.rows() != a.cols())
        throw ValidationError("direct_solve: matrix is not square");
    if (b.size() != a.rows())
        throw ValidationError("direct_solve: right-hand side has length " + std::to_string(b.size())
                              + ", matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    check_dense_cap(static_cast<std::size_t>(a.rows()), cfg, "direct_solve");
    require_finite(a, "direct_solve matrix");
    require_finite(b, "direct_solve right-hand side");

    Eigen::PartialPivLU<DenseMatrix> lu(a);
    const double scale = a.cwiseAbs().maxCoeff();
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    Eigen::Index where = 0;
    const double smallest = pivots.minCoeff(&where);
    if (scale == 0.0 || smallest < cfg.pivot_tol * scale) {
        std::ostringstream os;
        os.precision(6);
        os << "direct_solve: matrix is singular to tolerance, pivot " << where << " has magnitude " << smallest
           << " (threshold " << cfg.pivot_tol * scale << ")";
        throw SingularMatrixError(os.str(), smallest);
    }
    return lu.solve(b);
}

} // namespace kronlap
