#pragma once

#include "kronlap/grou_solver.hpp"
#include "kronlap/lap_project.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>

namespace kronlap {

/// Row-major nested arrays.
nlohmann::json matrix_json(const DenseMatrix& m);

/// Keys: dims, alpha, factors, residual_fro, relative_residual, is_member,
/// tol, method, sweeps_used, threads.
nlohmann::json decompose_report_json(const ProjectionReport& report, double membership_tol, std::size_t threads);

/// Keys: dims, operator_kind, method, terms_used, stop_reason,
/// residual_history, final_residual, relative_residual, threads.
nlohmann::json solve_report_json(const DimSplit& dims, LinearOperator::Kind kind, const GrouReport& report,
                                 double relative_residual, std::size_t threads);

/// Report for the direct arm: terms_used 0, stop_reason "direct_solve".
nlohmann::json direct_report_json(const DimSplit& dims, LinearOperator::Kind kind, double rhs_norm,
                                  double final_residual, std::size_t threads);

} // namespace kronlap
