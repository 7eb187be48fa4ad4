#pragma once

#include "kronlap/config.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kronlap {

/// Plain real matrix. Entries must be finite wherever the library accepts one.
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Mode sizes n_0 ... n_{d-1} of a tensorization N = n_0 * ... * n_{d-1}.
///
/// Modes are 0-based. Mode 0 is the slowest-varying index of the flattened
/// vector, so `id ⊗ X` acts on the last (fastest) axis.
class DimSplit {
public:
    explicit DimSplit(std::vector<std::size_t> modes);

    /// Parses a comma separated list such as "2,3,5".
    static DimSplit parse(std::string_view text);

    std::size_t order() const noexcept { return modes_.size(); }
    std::size_t mode(std::size_t i) const;
    const std::vector<std::size_t>& modes() const noexcept { return modes_; }
    /// Ambient size N.
    std::size_t size() const noexcept { return size_; }
    /// Product of the mode sizes before mode i.
    std::size_t outer(std::size_t i) const;
    /// Product of the mode sizes after mode i (the stride of mode i).
    std::size_t inner(std::size_t i) const;

    std::string to_string() const;

    friend bool operator==(const DimSplit&, const DimSplit&) = default;

private:
    std::vector<std::size_t> modes_;
    std::size_t size_ = 1;
};

/// alpha * id_N + sum_i id ⊗ A_i ⊗ id with every A_i traceless.
///
/// The constructor accepts arbitrary square factors and moves tr(A_i)/n_i of
/// each into alpha, so two values representing the same matrix compare equal
/// factor by factor.
class LaplacianLike {
public:
    LaplacianLike(DimSplit dims, double alpha, std::vector<DenseMatrix> factors);

    static LaplacianLike zero(const DimSplit& dims);
    static LaplacianLike scalar(const DimSplit& dims, double alpha);

    const DimSplit& dims() const noexcept { return dims_; }
    double alpha() const noexcept { return alpha_; }
    const std::vector<DenseMatrix>& factors() const noexcept { return factors_; }
    const DenseMatrix& factor(std::size_t i) const;

    /// Frobenius norm of the represented N x N matrix, from the orthogonal split.
    double frobenius_norm() const;

private:
    DimSplit dims_;
    double alpha_;
    std::vector<DenseMatrix> factors_;
};

/// y_0 ⊗ ... ⊗ y_{d-1}; factors 1..d-1 have unit norm and factor 0 carries the
/// magnitude. A zero vector is stored with factor 0 equal to zero.
class RankOneVector {
public:
    RankOneVector(DimSplit dims, std::vector<Vector> factors);

    static RankOneVector zero(const DimSplit& dims);

    const DimSplit& dims() const noexcept { return dims_; }
    const std::vector<Vector>& factors() const noexcept { return factors_; }
    bool is_zero() const;
    /// Euclidean norm of the represented vector.
    double norm() const;
    /// Dense length-N vector.
    Vector to_vector() const;

private:
    DimSplit dims_;
    std::vector<Vector> factors_;
};

/// Kronecker product of invertible factors, ⊗_i F_i.
class FactorGroupElement {
public:
    FactorGroupElement(DimSplit dims, std::vector<DenseMatrix> factors, const Config& cfg = {});

    const DimSplit& dims() const noexcept { return dims_; }
    const std::vector<DenseMatrix>& factors() const noexcept { return factors_; }
    DenseMatrix to_dense(const Config& cfg = {}) const;
    /// Applies ⊗_i F_i to x without forming the product.
    Vector apply(const Vector& x) const;

private:
    DimSplit dims_;
    std::vector<DenseMatrix> factors_;
};

/// Throws SizeLimitError when an n x n dense matrix is over the cap.
void check_dense_cap(std::size_t n, const Config& cfg, std::string_view what);

/// Throws ValidationError when any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, std::string_view what);
void require_finite(const Vector& v, std::string_view what);

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b, const Config& cfg = {});

/// id_{outer} ⊗ X ⊗ id_{inner} as a dense N x N matrix.
DenseMatrix embed(std::size_t mode, const DenseMatrix& x, const DimSplit& dims, const Config& cfg = {});

/// out += (id ⊗ X ⊗ id) * in, for length-N vectors.
void embed_apply_add(std::size_t mode, const DenseMatrix& x, const DimSplit& dims,
                     const Vector& in, Vector& out);

double frobenius_inner(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_norm(const DenseMatrix& a);

/// Contraction over every mode except `mode`; the adjoint of embed.
DenseMatrix partial_trace(const DenseMatrix& a, const DimSplit& dims, std::size_t mode);

DenseMatrix lap_to_dense(const LaplacianLike& l, const Config& cfg = {});

/// a += scale * L, touching only the O(N * sum n_i) entries L occupies.
void add_to_dense(DenseMatrix& a, const LaplacianLike& l, double scale = 1.0);

/// L * x by mode-wise contractions; never forms an N x N matrix.
Vector lap_matvec(const LaplacianLike& l, const Vector& x);

/// [L1, L2], computed mode by mode.
LaplacianLike lie_bracket(const LaplacianLike& l1, const LaplacianLike& l2);

/// exp(L) = e^alpha ⊗_i exp(A_i), with e^alpha folded into the first factor.
FactorGroupElement lap_exp(const LaplacianLike& l, const Config& cfg = {});

/// Scaling and squaring around a truncated Taylor series.
DenseMatrix dense_exp(const DenseMatrix& a, double tol, const Config& cfg = {});

} // namespace kronlap
