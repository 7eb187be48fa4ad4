#pragma once

#include "kronlap/config.hpp"
#include "kronlap/kron_core.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace kronlap::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    exit_ok = 0,
    exit_io = 1,
    exit_validation = 2,
    exit_numerical = 3,
};

enum class Command { decompose, solve, bench, gen };

struct RunConfig {
    Command command = Command::decompose;
    std::optional<DimSplit> dims;

    std::filesystem::path input;
    std::filesystem::path matrix;
    std::filesystem::path rhs;
    std::filesystem::path output;
    /// Solve only; defaults to `<output>.json`.
    std::filesystem::path report;

    /// decompose: closed | iterative. solve: auto | grou | direct.
    std::string method;
    /// gen: laplacian | dense | poisson. bench: poisson.
    std::string kind;

    /// Relative membership tolerance (decompose --tol, solve --detect-tol).
    double membership_tol = 1e-8;
    std::size_t iter_max = 10;

    double eps = 1e-6;
    double tol = 2.22e-6;
    std::size_t rank_max = 3000;
    std::size_t als_iter_max = 15;
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    std::size_t n = 0;
    std::vector<std::size_t> sizes;
    std::size_t repeats = 3;

    Config numeric;
};

/// Parses argv and dispatches; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Each command validates its inputs before computing, writes outputs
/// atomically and maps library errors onto ExitCode, reporting them on `err`.
int cli_decompose(const RunConfig& config, std::ostream& out, std::ostream& err);
int cli_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cli_bench(const RunConfig& config, std::ostream& out, std::ostream& err);
int cli_gen(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace kronlap::cli
