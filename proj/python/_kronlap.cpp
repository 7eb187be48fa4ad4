#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kronlap/errors.hpp"
#include "kronlap/grou_solver.hpp"
#include "kronlap/kron_core.hpp"
#include "kronlap/lap_project.hpp"
#include "kronlap/matrix_market.hpp"
#include "kronlap/poisson_bench.hpp"

namespace py = pybind11;
using namespace kronlap;

namespace {

DimSplit to_dims(const std::vector<std::size_t>& modes)
{
    return DimSplit(modes);
}

py::dict projection_dict(const ProjectionReport& r)
{
    py::dict d;
    d["projection"] = r.projection;
    d["alpha"] = r.projection.alpha();
    d["factors"] = r.projection.factors();
    d["residual_fro"] = r.residual_fro;
    d["relative_residual"] = r.relative_residual;
    d["sweeps_used"] = r.sweeps_used;
    d["method"] = std::string(to_string(r.method));
    return d;
}

GrouParams make_params(double eps, double tol, std::size_t rank_max, std::size_t als_iter_max, std::uint64_t seed,
                       std::size_t threads)
{
    GrouParams p;
    p.eps = eps;
    p.tol = tol;
    p.rank_max = rank_max;
    p.als_iter_max = als_iter_max;
    p.seed = seed;
    p.threads = threads;
    return p;
}

py::dict grou_dict(const GrouReport& r)
{
    py::dict d;
    d["x"] = r.x;
    d["residual_history"] = r.residual_history;
    d["terms_used"] = r.terms_used;
    d["stop_reason"] = std::string(to_string(r.stop_reason));
    d["rank_deficient_terms"] = r.rank_deficient_terms;
    return d;
}

} // namespace

PYBIND11_MODULE(_kronlap, m)
{
    m.doc() = "Laplacian-like Kronecker decompositions and a greedy rank-one linear solver.";

    auto base = py::register_exception<Error>(m, "KronlapError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<SizeLimitError>(m, "SizeLimitError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<LaplacianLike>(m, "LaplacianLike")
        .def(py::init([](const std::vector<std::size_t>& dims, double alpha, std::vector<DenseMatrix> factors) {
                 return LaplacianLike(to_dims(dims), alpha, std::move(factors));
             }),
             py::arg("dims"), py::arg("alpha"), py::arg("factors"))
        .def_property_readonly("dims", [](const LaplacianLike& l) { return l.dims().modes(); })
        .def_property_readonly("alpha", &LaplacianLike::alpha)
        .def_property_readonly("factors", &LaplacianLike::factors)
        .def("to_dense", [](const LaplacianLike& l) { return lap_to_dense(l, Config::from_env()); })
        .def("matvec", [](const LaplacianLike& l, const Vector& x) { return lap_matvec(l, x); }, py::arg("x"))
        .def("frobenius_norm", &LaplacianLike::frobenius_norm)
        .def("__repr__", [](const LaplacianLike& l) {
            return "LaplacianLike(dims=" + l.dims().to_string() + ", alpha=" + std::to_string(l.alpha()) + ")";
        });

    m.def("kron", [](const DenseMatrix& a, const DenseMatrix& b) { return kron(a, b, Config::from_env()); });
    m.def(
        "embed",
        [](std::size_t mode, const DenseMatrix& x, const std::vector<std::size_t>& dims) {
            return embed(mode, x, to_dims(dims), Config::from_env());
        },
        py::arg("mode"), py::arg("x"), py::arg("dims"));
    m.def(
        "partial_trace",
        [](const DenseMatrix& a, const std::vector<std::size_t>& dims, std::size_t mode) {
            return partial_trace(a, to_dims(dims), mode);
        },
        py::arg("a"), py::arg("dims"), py::arg("mode"));
    m.def("lie_bracket", &lie_bracket);
    m.def(
        "lap_exp", [](const LaplacianLike& l) { return lap_exp(l).factors(); }, py::arg("op"),
        "Per-mode factors whose Kronecker product is exp(op).");
    m.def(
        "dense_exp", [](const DenseMatrix& a, double tol) { return dense_exp(a, tol, Config::from_env()); },
        py::arg("a"), py::arg("tol") = 1e-15);

    m.def(
        "decompose",
        [](const DenseMatrix& a, const std::vector<std::size_t>& dims, const std::string& method,
           std::size_t iter_max, double tol) {
            const Config cfg = Config::from_env();
            if (method == "closed")
                return projection_dict(project_laplacian(a, to_dims(dims), cfg));
            if (method == "iterative")
                return projection_dict(decompose_iterative(a, to_dims(dims), iter_max, tol, cfg));
            throw ValidationError("method must be 'closed' or 'iterative'");
        },
        py::arg("a"), py::arg("dims"), py::arg("method") = "closed", py::arg("iter_max") = 10,
        py::arg("tol") = 1e-12);
    m.def(
        "laplacian_distance",
        [](const DenseMatrix& a, const std::vector<std::size_t>& dims, double tol) {
            const Membership mem = laplacian_distance(a, to_dims(dims), tol, Config::from_env());
            return py::make_tuple(mem.is_member, mem.relative_residual);
        },
        py::arg("a"), py::arg("dims"), py::arg("tol") = 1e-8);

    m.def(
        "grou",
        [](const py::object& op, const Vector& b, const std::vector<std::size_t>& dims, double eps, double tol,
           std::size_t rank_max, std::size_t als_iter_max, std::uint64_t seed, std::size_t threads) {
            const GrouParams params = make_params(eps, tol, rank_max, als_iter_max, seed, threads);
            const Config cfg = Config::from_env();
            if (py::isinstance<LaplacianLike>(op))
                return grou_dict(grou(LinearOperator::laplacian(op.cast<LaplacianLike>()), b, params, cfg));
            if (dims.empty())
                throw ValidationError("dims is required for a dense operator");
            return grou_dict(grou(LinearOperator::dense(to_dims(dims), op.cast<DenseMatrix>()), b, params, cfg));
        },
        py::arg("op"), py::arg("b"), py::arg("dims") = std::vector<std::size_t>{}, py::arg("eps") = 1e-6,
        py::arg("tol") = 2.22e-6, py::arg("rank_max") = 3000, py::arg("als_iter_max") = 15, py::arg("seed") = 0,
        py::arg("threads") = 1,
        "Greedy rank-one solve of op x = b. `op` is a LaplacianLike or a dense matrix with `dims`.");
    m.def(
        "direct_solve", [](const DenseMatrix& a, const Vector& b) { return direct_solve(a, b, Config::from_env()); },
        py::arg("a"), py::arg("b"));

    m.def(
        "build_poisson",
        [](std::size_t n) {
            const PoissonProblem p = build_poisson(n);
            py::dict d;
            d["n"] = p.n;
            d["h"] = p.h;
            d["op"] = p.op;
            d["rhs"] = p.rhs;
            d["exact"] = p.exact;
            return d;
        },
        py::arg("n"));

    m.def("read_matrix_market", &read_matrix_market, py::arg("path"));
    m.def(
        "write_matrix_market",
        [](const std::filesystem::path& path, const DenseMatrix& a, bool coordinate) {
            write_matrix_market(path, a, coordinate ? MatrixMarketLayout::coordinate : MatrixMarketLayout::array);
        },
        py::arg("path"), py::arg("a"), py::arg("coordinate") = false);
}
