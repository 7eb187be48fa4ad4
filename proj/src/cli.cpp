#include "kronlap/cli.hpp"

#include "kronlap/errors.hpp"
#include "kronlap/grou_solver.hpp"
#include "kronlap/lap_project.hpp"
#include "kronlap/matrix_market.hpp"
#include "kronlap/poisson_bench.hpp"
#include "kronlap/reports.hpp"

#include <CLI11.hpp>

#include <limits>
#include <random>
#include <sstream>

namespace kronlap::cli {

namespace {

namespace fs = std::filesystem;

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn)
{
    try {
        return fn();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const SingularMatrixError& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const SizeLimitError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}

const DimSplit& require_dims(const RunConfig& config)
{
    if (!config.dims)
        throw ValidationError("--dims is required");
    return *config.dims;
}

void require_positive(double value, const char* name)
{
    if (!(value > 0.0))
        throw ValidationError(std::string(name) + " must be strictly positive");
}

void require_path(const fs::path& p, const char* flag)
{
    if (p.empty())
        throw ValidationError(std::string(flag) + " is required");
}

void check_square_matches(const DenseMatrix& a, const DimSplit& dims, const fs::path& from)
{
    if (a.rows() != a.cols())
        throw ValidationError(from.string() + " is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols())
                              + ", expected a square matrix");
    if (static_cast<std::size_t>(a.rows()) != dims.size())
        throw ValidationError("matrix in " + from.string() + " has size " + std::to_string(a.rows())
                              + " but --dims " + dims.to_string() + " gives N=" + std::to_string(dims.size()));
}

std::string json_text(const nlohmann::json& j)
{
    return j.dump(2) + "\n";
}

Vector uniform_vector(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = dist(rng);
    return v;
}

DenseMatrix uniform_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = dist(rng);
    return m;
}

std::vector<std::size_t> parse_sizes(const std::string& text)
{
    std::vector<std::size_t> sizes;
    if (text.empty())
        return sizes;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != token.size())
            throw ValidationError("cannot parse --sizes '" + text + "'");
        sizes.push_back(static_cast<std::size_t>(v));
    }
    return sizes;
}

} // namespace

// ---------------------------------------------------------------------------

int cli_decompose(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const DimSplit& dims = require_dims(config);
        require_path(config.input, "--input");
        require_path(config.output, "--output");
        require_positive(config.membership_tol, "--tol");
        const std::string method = config.method.empty() ? "closed" : config.method;
        if (method != "closed" && method != "iterative")
            throw ValidationError("--method must be closed or iterative, got '" + method + "'");
        if (config.iter_max == 0)
            throw ValidationError("--iter-max must be positive");

        const DenseMatrix a = read_matrix_market(config.input);
        check_square_matches(a, dims, config.input);

        ProjectionReport report = [&] {
            if (method == "closed")
                return project_laplacian(a, dims, config.numeric);
            const double stop = std::max(config.membership_tol * a.norm(), std::numeric_limits<double>::min());
            return decompose_iterative(a, dims, config.iter_max, stop, config.numeric);
        }();

        write_file_atomic(config.output, json_text(decompose_report_json(report, config.membership_tol, config.threads)));
        out << "decompose: alpha=" << report.projection.alpha() << " relative_residual=" << report.relative_residual
            << " is_member=" << (report.relative_residual <= config.membership_tol ? "true" : "false") << '\n';
        return int{exit_ok};
    });
}

int cli_solve(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const DimSplit& dims = require_dims(config);
        require_path(config.matrix, "--matrix");
        require_path(config.rhs, "--rhs");
        require_path(config.output, "--output");
        require_positive(config.eps, "--eps");
        require_positive(config.tol, "--tol");
        require_positive(config.membership_tol, "--detect-tol");
        if (config.rank_max == 0 || config.als_iter_max == 0)
            throw ValidationError("--rank-max and --als-iter-max must be positive");
        const std::string method = config.method.empty() ? "auto" : config.method;
        if (method != "auto" && method != "grou" && method != "direct")
            throw ValidationError("--method must be auto, grou or direct, got '" + method + "'");

        const DenseMatrix a = read_matrix_market(config.matrix);
        const Vector b = read_vector_market(config.rhs);
        check_square_matches(a, dims, config.matrix);
        if (static_cast<std::size_t>(b.size()) != dims.size())
            throw ValidationError("right-hand side in " + config.rhs.string() + " has length "
                                  + std::to_string(b.size()) + " but --dims " + dims.to_string()
                                  + " gives N=" + std::to_string(dims.size()));

        const fs::path report_path = config.report.empty() ? fs::path(config.output.string() + ".json") : config.report;

        if (method == "direct") {
            const Vector x = direct_solve(a, b, config.numeric);
            const double res = (b - a * x).norm();
            write_vector_market(config.output, x);
            write_file_atomic(report_path, json_text(direct_report_json(dims, LinearOperator::Kind::dense, b.norm(),
                                                                        res, config.threads)));
            out << "solve: direct residual=" << res << '\n';
            return int{exit_ok};
        }

        std::optional<LinearOperator> op;
        if (method == "auto") {
            Membership m = laplacian_distance(a, dims, config.membership_tol, config.numeric);
            if (m.is_member)
                op = LinearOperator::laplacian(std::move(m.report.projection));
        }
        if (!op)
            op = LinearOperator::dense(dims, a);

        GrouParams params;
        params.eps = config.eps;
        params.tol = config.tol;
        params.rank_max = config.rank_max;
        params.als_iter_max = config.als_iter_max;
        params.seed = config.seed;
        params.threads = config.threads;
        const GrouReport report = grou(*op, b, params, config.numeric);
        const double b_norm = b.norm();
        const double rel = b_norm == 0.0 ? 0.0 : (b - a * report.x).norm() / b_norm;

        write_vector_market(config.output, report.x);
        write_file_atomic(report_path, json_text(solve_report_json(dims, op->kind(), report, rel, config.threads)));
        out << "solve: " << to_string(op->kind()) << " operator, " << report.terms_used << " terms, stop "
            << to_string(report.stop_reason) << ", relative residual " << rel << '\n';
        return int{exit_ok};
    });
}

int cli_bench(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        if (config.kind != "poisson")
            throw ValidationError("bench supports only 'poisson', got '" + config.kind + "'");
        require_path(config.output, "--output");
        require_positive(config.eps, "--eps");
        require_positive(config.tol, "--tol");

        BenchOptions opts;
        opts.grou.eps = config.eps;
        opts.grou.tol = config.tol;
        opts.grou.rank_max = config.rank_max;
        opts.grou.als_iter_max = config.als_iter_max;
        opts.grou.seed = config.seed;
        opts.grou.threads = config.threads;
        opts.repeats = config.repeats;
        const std::vector<BenchRow> rows = bench_poisson(config.sizes, opts, config.numeric);
        const std::string csv = bench_csv(rows);
        write_file_atomic(config.output, csv);
        out << csv;
        return int{exit_ok};
    });
}

int cli_gen(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        require_path(config.output, "--output");
        std::mt19937_64 rng(config.seed);

        if (config.kind == "poisson") {
            if (config.n < 2)
                throw ValidationError("--n must be at least 2 for --kind poisson");
            const PoissonProblem problem = build_poisson(config.n);
            const DenseMatrix a = lap_to_dense(problem.op, config.numeric);
            std::error_code ec;
            fs::create_directories(config.output, ec);
            if (!fs::is_directory(config.output))
                throw IoError("cannot create directory " + config.output.string());
            write_matrix_market(config.output / "A.mtx", a, MatrixMarketLayout::coordinate);
            write_vector_market(config.output / "b.mtx", problem.rhs);
            write_vector_market(config.output / "exact.mtx", problem.exact);
            out << "gen: poisson n=" << config.n << " written to " << config.output.string() << '\n';
            return int{exit_ok};
        }

        const DimSplit& dims = require_dims(config);
        DenseMatrix a;
        if (config.kind == "laplacian") {
            check_dense_cap(dims.size(), config.numeric, "gen");
            const double alpha = uniform_vector(rng, 1)(0);
            std::vector<DenseMatrix> factors;
            for (std::size_t n : dims.modes())
                factors.push_back(uniform_matrix(rng, n, n));
            a = lap_to_dense(LaplacianLike(dims, alpha, std::move(factors)), config.numeric);
        } else if (config.kind == "dense") {
            check_dense_cap(dims.size(), config.numeric, "gen");
            a = uniform_matrix(rng, dims.size(), dims.size());
        } else {
            throw ValidationError("--kind must be laplacian, dense or poisson, got '" + config.kind + "'");
        }
        if (!config.rhs.empty()) {
            const Vector b = uniform_vector(rng, dims.size());
            write_vector_market(config.rhs, b);
        }
        write_matrix_market(config.output, a);
        out << "gen: " << config.kind << " " << dims.size() << "x" << dims.size() << " written to "
            << config.output.string() << '\n';
        return int{exit_ok};
    });
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig config;
    std::string dims_text;
    std::string sizes_text;

    CLI::App app{"Laplacian-like decomposition and greedy rank-one solver"};
    app.name("kronlap");
    app.require_subcommand(1);

    auto add_dims = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--dims", dims_text, "Mode sizes, e.g. 2,3,5");
        if (required)
            opt->required();
    };
    auto add_grou = [&](CLI::App* sub) {
        sub->add_option("--eps", config.eps, "Absolute residual target")->capture_default_str();
        sub->add_option("--tol", config.tol, "Stagnation threshold on consecutive residuals")->capture_default_str();
        sub->add_option("--rank-max", config.rank_max, "Maximum number of rank-one terms")->capture_default_str();
        sub->add_option("--als-iter-max", config.als_iter_max, "ALS passes per term")->capture_default_str();
        sub->add_option("--seed", config.seed, "ALS initialization seed")->capture_default_str();
        sub->add_option("--threads", config.threads, "Threads for building ALS mode matrices")->capture_default_str();
    };

    auto* decompose = app.add_subcommand("decompose", "Project a matrix onto the Laplacian-like subspace");
    decompose->add_option("--input", config.input, "Matrix Market input")->required();
    add_dims(decompose, true);
    decompose->add_option("--method", config.method, "closed or iterative")->default_str("closed");
    decompose->add_option("--iter-max", config.iter_max, "Sweep cap for --method iterative")->capture_default_str();
    decompose->add_option("--tol", config.membership_tol, "Relative membership tolerance")->capture_default_str();
    decompose->add_option("--threads", config.threads, "Recorded in the report")->capture_default_str();
    decompose->add_option("--output", config.output, "JSON report path")->required();

    auto* solve = app.add_subcommand("solve", "Solve A x = b with the greedy rank-one update");
    solve->add_option("--matrix", config.matrix, "Matrix Market operator")->required();
    solve->add_option("--rhs", config.rhs, "Matrix Market right-hand side")->required();
    add_dims(solve, true);
    add_grou(solve);
    solve->add_option("--method", config.method, "auto, grou or direct")->default_str("auto");
    solve->add_option("--detect-tol", config.membership_tol, "Relative tolerance for structure detection")
        ->capture_default_str();
    solve->add_option("--report", config.report, "JSON report path (default <output>.json)");
    solve->add_option("--output", config.output, "Matrix Market solution path")->required();

    auto* bench = app.add_subcommand("bench", "Benchmark GROU against the direct solver");
    bench->add_option("problem", config.kind, "Benchmark problem (poisson)")->required();
    bench->add_option("--sizes", sizes_text, "Grid sizes n, e.g. 4,6,8");
    add_grou(bench);
    bench->add_option("--repeats", config.repeats, "Timed repetitions, best reported")->capture_default_str();
    bench->add_option("--output", config.output, "CSV path")->required();

    auto* gen = app.add_subcommand("gen", "Generate test matrices");
    gen->add_option("--kind", config.kind, "laplacian, dense or poisson")->required();
    add_dims(gen, false);
    gen->add_option("--n", config.n, "Interior nodes per axis for --kind poisson");
    gen->add_option("--seed", config.seed, "Generator seed")->capture_default_str();
    gen->add_option("--rhs", config.rhs, "Also write a random right-hand side here");
    gen->add_option("--output", config.output, "Output file (directory for poisson)")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty())
        reversed.pop_back(); // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }

    try {
        config.numeric = Config::from_env();
        if (!dims_text.empty())
            config.dims = DimSplit::parse(dims_text);
        config.sizes = parse_sizes(sizes_text);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }

    if (decompose->parsed()) {
        config.command = Command::decompose;
        return cli_decompose(config, out, err);
    }
    if (solve->parsed()) {
        config.command = Command::solve;
        return cli_solve(config, out, err);
    }
    if (bench->parsed()) {
        config.command = Command::bench;
        return cli_bench(config, out, err);
    }
    config.command = Command::gen;
    return cli_gen(config, out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

} // namespace kronlap::cli
