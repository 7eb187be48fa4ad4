#include "kronlap/kron_core.hpp"

#include "kronlap/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace kronlap {

namespace {

using RowBlock = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowBlockMut = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

void check_mode(const DimSplit& dims, std::size_t mode)
{
    if (mode >= dims.order())
        throw ValidationError("mode index " + std::to_string(mode) + " out of range for dims "
                              + dims.to_string());
}

void check_factor(const DimSplit& dims, std::size_t mode, const DenseMatrix& x)
{
    check_mode(dims, mode);
    const auto n = idx(dims.mode(mode));
    if (x.rows() != n || x.cols() != n)
        throw ValidationError("factor for mode " + std::to_string(mode) + " is "
                              + std::to_string(x.rows()) + "x" + std::to_string(x.cols())
                              + ", expected " + std::to_string(n) + "x" + std::to_string(n));
}

void check_ambient(const DenseMatrix& a, const DimSplit& dims, std::string_view what)
{
    const auto n = idx(dims.size());
    if (a.rows() != a.cols())
        throw ValidationError(std::string(what) + ": matrix is not square ("
                              + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ")");
    if (a.rows() != n)
        throw ValidationError(std::string(what) + ": matrix size " + std::to_string(a.rows())
                              + " does not match dims " + dims.to_string() + " (N="
                              + std::to_string(n) + ")");
}

} // namespace

// ---------------------------------------------------------------------------
// DimSplit

DimSplit::DimSplit(std::vector<std::size_t> modes) : modes_(std::move(modes))
{
    if (modes_.empty())
        throw ValidationError("dimension split needs at least one mode");
    for (std::size_t n : modes_) {
        if (n == 0)
            throw ValidationError("mode sizes must be positive");
        if (modes_.size() >= 2 && n < 2)
            throw ValidationError("mode of size 1 in a split with " + std::to_string(modes_.size())
                                  + " modes");
        if (size_ > std::numeric_limits<std::size_t>::max() / n)
            throw ValidationError("product of mode sizes overflows");
        size_ *= n;
    }
}

DimSplit DimSplit::parse(std::string_view text)
{
    std::vector<std::size_t> modes;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string_view token = text.substr(pos, comma - pos);
        while (!token.empty() && token.front() == ' ')
            token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ')
            token.remove_suffix(1);
        std::size_t value = 0;
        auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || end != token.data() + token.size())
            throw ValidationError("cannot parse dims '" + std::string(text) + "'");
        modes.push_back(value);
        pos = comma + 1;
    }
    return DimSplit(std::move(modes));
}

std::size_t DimSplit::mode(std::size_t i) const
{
    if (i >= modes_.size())
        throw ValidationError("mode index " + std::to_string(i) + " out of range for dims " + to_string());
    return modes_[i];
}

std::size_t DimSplit::outer(std::size_t i) const
{
    std::size_t p = 1;
    for (std::size_t j = 0; j < i && j < modes_.size(); ++j)
        p *= modes_[j];
    return p;
}

std::size_t DimSplit::inner(std::size_t i) const
{
    std::size_t p = 1;
    for (std::size_t j = i + 1; j < modes_.size(); ++j)
        p *= modes_[j];
    return p;
}

std::string DimSplit::to_string() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < modes_.size(); ++i)
        os << (i ? "," : "") << modes_[i];
    return os.str();
}

// ---------------------------------------------------------------------------
// LaplacianLike

LaplacianLike::LaplacianLike(DimSplit dims, double alpha, std::vector<DenseMatrix> factors)
    : dims_(std::move(dims)), alpha_(alpha), factors_(std::move(factors))
{
    if (factors_.size() != dims_.order())
        throw ValidationError("expected " + std::to_string(dims_.order()) + " factors, got "
                              + std::to_string(factors_.size()));
    if (!std::isfinite(alpha_))
        throw ValidationError("alpha is not finite");
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        check_factor(dims_, i, factors_[i]);
        require_finite(factors_[i], "Laplacian-like factor");
        const double shift = factors_[i].trace() / static_cast<double>(dims_.mode(i));
        factors_[i].diagonal().array() -= shift;
        alpha_ += shift;
    }
}

LaplacianLike LaplacianLike::zero(const DimSplit& dims)
{
    return scalar(dims, 0.0);
}

LaplacianLike LaplacianLike::scalar(const DimSplit& dims, double alpha)
{
    std::vector<DenseMatrix> factors;
    factors.reserve(dims.order());
    for (std::size_t n : dims.modes())
        factors.push_back(DenseMatrix::Zero(idx(n), idx(n)));
    return LaplacianLike(dims, alpha, std::move(factors));
}

const DenseMatrix& LaplacianLike::factor(std::size_t i) const
{
    check_mode(dims_, i);
    return factors_[i];
}

double LaplacianLike::frobenius_norm() const
{
    const double n = static_cast<double>(dims_.size());
    double sq = alpha_ * alpha_ * n;
    for (std::size_t i = 0; i < factors_.size(); ++i)
        sq += factors_[i].squaredNorm() * n / static_cast<double>(dims_.mode(i));
    return std::sqrt(sq);
}

// ---------------------------------------------------------------------------
// RankOneVector

RankOneVector::RankOneVector(DimSplit dims, std::vector<Vector> factors)
    : dims_(std::move(dims)), factors_(std::move(factors))
{
    if (factors_.size() != dims_.order())
        throw ValidationError("expected " + std::to_string(dims_.order()) + " vector factors, got "
                              + std::to_string(factors_.size()));
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i].size() != idx(dims_.mode(i)))
            throw ValidationError("vector factor " + std::to_string(i) + " has length "
                                  + std::to_string(factors_[i].size()) + ", expected "
                                  + std::to_string(dims_.mode(i)));
        require_finite(factors_[i], "rank-one factor");
    }
    bool zero = factors_[0].squaredNorm() == 0.0;
    for (std::size_t i = 1; i < factors_.size(); ++i) {
        const double nrm = factors_[i].norm();
        if (nrm == 0.0) {
            zero = true;
            factors_[i].setZero();
            factors_[i](0) = 1.0;
            continue;
        }
        factors_[i] /= nrm;
        factors_[0] *= nrm;
    }
    if (zero)
        factors_[0].setZero();
}

RankOneVector RankOneVector::zero(const DimSplit& dims)
{
    std::vector<Vector> factors;
    for (std::size_t n : dims.modes())
        factors.push_back(Vector::Zero(idx(n)));
    return RankOneVector(dims, std::move(factors));
}

bool RankOneVector::is_zero() const
{
    return factors_[0].squaredNorm() == 0.0;
}

double RankOneVector::norm() const
{
    return factors_[0].norm();
}

Vector RankOneVector::to_vector() const
{
    Vector out = factors_[0];
    for (std::size_t i = 1; i < factors_.size(); ++i) {
        const Vector& f = factors_[i];
        Vector next(out.size() * f.size());
        for (Eigen::Index a = 0; a < out.size(); ++a)
            next.segment(a * f.size(), f.size()) = out(a) * f;
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// FactorGroupElement

FactorGroupElement::FactorGroupElement(DimSplit dims, std::vector<DenseMatrix> factors, const Config& cfg)
    : dims_(std::move(dims)), factors_(std::move(factors))
{
    if (factors_.size() != dims_.order())
        throw ValidationError("expected " + std::to_string(dims_.order()) + " group factors, got "
                              + std::to_string(factors_.size()));
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        check_factor(dims_, i, factors_[i]);
        require_finite(factors_[i], "group factor");
        Eigen::FullPivLU<DenseMatrix> lu(factors_[i]);
        lu.setThreshold(cfg.invertibility_tol);
        if (!lu.isInvertible())
            throw PreconditionError("group factor " + std::to_string(i) + " is singular to tolerance");
    }
}

DenseMatrix FactorGroupElement::to_dense(const Config& cfg) const
{
    check_dense_cap(dims_.size(), cfg, "Kronecker group element");
    DenseMatrix out = factors_[0];
    for (std::size_t i = 1; i < factors_.size(); ++i)
        out = kron(out, factors_[i], cfg);
    return out;
}

Vector FactorGroupElement::apply(const Vector& x) const
{
    if (x.size() != idx(dims_.size()))
        throw ValidationError("vector length " + std::to_string(x.size()) + " does not match N="
                              + std::to_string(dims_.size()));
    Vector cur = x;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        Vector next = Vector::Zero(cur.size());
        embed_apply_add(i, factors_[i], dims_, cur, next);
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Free functions

void check_dense_cap(std::size_t n, const Config& cfg, std::string_view what)
{
    if (n > cfg.dense_cap)
        throw SizeLimitError(std::string(what) + ": dense N=" + std::to_string(n)
                             + " exceeds the materialization cap " + std::to_string(cfg.dense_cap));
}

void require_finite(const DenseMatrix& m, std::string_view what)
{
    if (!m.allFinite())
        throw ValidationError(std::string(what) + " has non-finite entries");
}

void require_finite(const Vector& v, std::string_view what)
{
    if (!v.allFinite())
        throw ValidationError(std::string(what) + " has non-finite entries");
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b, const Config& cfg)
{
    const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
    const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
    if (rows > cfg.kron_max_side || cols > cfg.kron_max_side)
        throw SizeLimitError("Kronecker product would be " + std::to_string(rows) + "x"
                             + std::to_string(cols) + ", over the per-side cap "
                             + std::to_string(cfg.kron_max_side));
    DenseMatrix out(idx(rows), idx(cols));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DenseMatrix embed(std::size_t mode, const DenseMatrix& x, const DimSplit& dims, const Config& cfg)
{
    check_factor(dims, mode, x);
    check_dense_cap(dims.size(), cfg, "embed");
    DenseMatrix out = DenseMatrix::Zero(idx(dims.size()), idx(dims.size()));
    const std::size_t n = dims.mode(mode);
    const std::size_t inner = dims.inner(mode);
    const std::size_t outer = dims.outer(mode);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const double v = x(idx(a), idx(b));
                if (v == 0.0)
                    continue;
                const std::size_t row = (o * n + a) * inner;
                const std::size_t col = (o * n + b) * inner;
                for (std::size_t r = 0; r < inner; ++r)
                    out(idx(row + r), idx(col + r)) = v;
            }
    return out;
}

void embed_apply_add(std::size_t mode, const DenseMatrix& x, const DimSplit& dims, const Vector& in, Vector& out)
{
    check_factor(dims, mode, x);
    const auto total = idx(dims.size());
    if (in.size() != total || out.size() != total)
        throw ValidationError("vector length does not match N=" + std::to_string(dims.size()));
    const auto n = idx(dims.mode(mode));
    const auto inner = idx(dims.inner(mode));
    const auto outer = idx(dims.outer(mode));
    for (Eigen::Index o = 0; o < outer; ++o) {
        RowBlock src(in.data() + o * n * inner, n, inner);
        RowBlockMut dst(out.data() + o * n * inner, n, inner);
        dst.noalias() += x * src;
    }
}

double frobenius_inner(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError("Frobenius inner product of " + std::to_string(a.rows()) + "x"
                              + std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x"
                              + std::to_string(b.cols()) + " matrices");
    return a.cwiseProduct(b).sum();
}

double frobenius_norm(const DenseMatrix& a)
{
    return a.norm();
}

DenseMatrix partial_trace(const DenseMatrix& a, const DimSplit& dims, std::size_t mode)
{
    check_mode(dims, mode);
    check_ambient(a, dims, "partial_trace");
    const std::size_t n = dims.mode(mode);
    const std::size_t inner = dims.inner(mode);
    const std::size_t outer = dims.outer(mode);
    DenseMatrix out = DenseMatrix::Zero(idx(n), idx(n));
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) {
                const std::size_t row = (o * n + p) * inner;
                const std::size_t col = (o * n + q) * inner;
                double s = 0.0;
                for (std::size_t r = 0; r < inner; ++r)
                    s += a(idx(row + r), idx(col + r));
                out(idx(p), idx(q)) += s;
            }
    return out;
}

void add_to_dense(DenseMatrix& a, const LaplacianLike& l, double scale)
{
    const DimSplit& dims = l.dims();
    check_ambient(a, dims, "add_to_dense");
    a.diagonal().array() += scale * l.alpha();
    for (std::size_t i = 0; i < dims.order(); ++i) {
        const DenseMatrix& x = l.factor(i);
        const std::size_t n = dims.mode(i);
        const std::size_t inner = dims.inner(i);
        const std::size_t outer = dims.outer(i);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q) {
                    const double v = scale * x(idx(p), idx(q));
                    if (v == 0.0)
                        continue;
                    const std::size_t row = (o * n + p) * inner;
                    const std::size_t col = (o * n + q) * inner;
                    for (std::size_t r = 0; r < inner; ++r)
                        a(idx(row + r), idx(col + r)) += v;
                }
    }
}

DenseMatrix lap_to_dense(const LaplacianLike& l, const Config& cfg)
{
    check_dense_cap(l.dims().size(), cfg, "lap_to_dense");
    DenseMatrix out = DenseMatrix::Zero(idx(l.dims().size()), idx(l.dims().size()));
    add_to_dense(out, l);
    return out;
}

Vector lap_matvec(const LaplacianLike& l, const Vector& x)
{
    if (x.size() != idx(l.dims().size()))
        throw ValidationError("lap_matvec: vector length " + std::to_string(x.size())
                              + " does not match N=" + std::to_string(l.dims().size()));
    Vector out = l.alpha() * x;
    for (std::size_t i = 0; i < l.dims().order(); ++i)
        embed_apply_add(i, l.factor(i), l.dims(), x, out);
    return out;
}

LaplacianLike lie_bracket(const LaplacianLike& l1, const LaplacianLike& l2)
{
    if (!(l1.dims() == l2.dims()))
        throw ValidationError("lie_bracket: dims " + l1.dims().to_string() + " vs "
                              + l2.dims().to_string());
    std::vector<DenseMatrix> factors;
    factors.reserve(l1.dims().order());
    for (std::size_t i = 0; i < l1.dims().order(); ++i)
        factors.push_back(l1.factor(i) * l2.factor(i) - l2.factor(i) * l1.factor(i));
    return LaplacianLike(l1.dims(), 0.0, std::move(factors));
}

FactorGroupElement lap_exp(const LaplacianLike& l, const Config& cfg)
{
    std::vector<DenseMatrix> factors;
    factors.reserve(l.dims().order());
    for (const DenseMatrix& a : l.factors())
        factors.push_back(a.exp());
    factors[0] *= std::exp(l.alpha());
    return FactorGroupElement(l.dims(), std::move(factors), cfg);
}

DenseMatrix dense_exp(const DenseMatrix& a, double tol, const Config& cfg)
{
    if (a.rows() != a.cols())
        throw ValidationError("dense_exp needs a square matrix");
    if (!(tol > 0.0))
        throw ValidationError("dense_exp tolerance must be positive");
    check_dense_cap(static_cast<std::size_t>(a.rows()), cfg, "dense_exp");
    require_finite(a, "dense_exp input");

    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5)
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    const DenseMatrix scaled = a / std::ldexp(1.0, squarings);

    const auto n = a.rows();
    DenseMatrix sum = DenseMatrix::Identity(n, n);
    DenseMatrix term = DenseMatrix::Identity(n, n);
    for (int k = 1; k <= 200; ++k) {
        term = (term * scaled) / static_cast<double>(k);
        sum += term;
        const double tn = term.norm();
        if (tn == 0.0 || tn <= tol * sum.norm())
            break;
    }
    for (int s = 0; s < squarings; ++s)
        sum = (sum * sum).eval();
    return sum;
}

} // namespace kronlap
