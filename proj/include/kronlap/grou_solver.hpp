#pragma once

#include "kronlap/config.hpp"
#include "kronlap/kron_core.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace kronlap {

/// A square operator on R^N together with the split N = n_0 * ... * n_{d-1}.
class LinearOperator {
public:
    enum class Kind { dense, laplacian };

    static LinearOperator dense(DimSplit dims, DenseMatrix matrix);
    static LinearOperator laplacian(LaplacianLike op);
    static LinearOperator identity(const DimSplit& dims);

    Kind kind() const noexcept;
    const DimSplit& dims() const noexcept { return dims_; }
    Vector apply(const Vector& x) const;

    /// nullptr unless kind() matches.
    const DenseMatrix* dense_matrix() const noexcept;
    const LaplacianLike* laplacian_form() const noexcept;

private:
    LinearOperator(DimSplit dims, std::variant<DenseMatrix, LaplacianLike> rep);

    DimSplit dims_;
    std::variant<DenseMatrix, LaplacianLike> rep_;
};

std::string_view to_string(LinearOperator::Kind kind) noexcept;

struct AlsResult {
    RankOneVector y;
    /// ||r - A y|| for the returned y.
    double objective = 0.0;
    /// ||r - A y0|| for the seeded starting point.
    double initial_objective = 0.0;
    std::size_t passes = 0;
    /// Some mode least-squares system was rank deficient; the minimum-norm solution was used.
    bool rank_deficient = false;
    /// Objective after every single-mode update, in order.
    std::vector<double> objective_trace;
};

/// Best rank-one y = y_0 ⊗ ... ⊗ y_{d-1} for min ||r - A y||_2 by alternating
/// least squares. Each mode update solves its linear least-squares problem
/// exactly from the N x n_k matrix of operator responses to
/// y_0 ⊗ ... ⊗ e_j ⊗ ... ⊗ y_{d-1}. `threads` > 1 builds those columns concurrently.
AlsResult als_rank_one(const LinearOperator& op, const Vector& r, std::size_t iter_max, std::uint64_t seed,
                       std::size_t threads = 1);

struct GrouParams {
    double eps = 1e-6;
    double tol = 2.22e-6;
    std::size_t rank_max = 3000;
    std::size_t als_iter_max = 15;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

enum class StopReason { residual_below_eps, stagnation, rank_max_reached };

std::string_view to_string(StopReason reason) noexcept;

struct GrouReport {
    Vector x;
    /// ||r_i||_2 per iteration; entry 0 is ||b||_2.
    std::vector<double> residual_history;
    std::size_t terms_used = 0;
    StopReason stop_reason = StopReason::residual_below_eps;
    /// Terms whose ALS step hit a rank-deficient mode system.
    std::size_t rank_deficient_terms = 0;
};

/// Greedy rank-one update: repeatedly subtracts the ALS rank-one correction
/// from the residual until ||r|| < eps, the residual stagnates
/// (| ||r_{i+1}|| - ||r_i|| | < tol) or rank_max terms are accepted.
/// A dense operator must fit under cfg.dense_cap; structured and identity
/// operators never form an N x N matrix.
GrouReport grou(const LinearOperator& op, const Vector& b, const GrouParams& params = {}, const Config& cfg = {});

/// Dense LU with partial pivoting; SingularMatrixError when a pivot falls
/// below pivot_tol times the largest entry of A.
Vector direct_solve(const DenseMatrix& a, const Vector& b, const Config& cfg = {});

} // namespace kronlap
