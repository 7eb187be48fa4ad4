#include "kronlap/reports.hpp"

namespace kronlap {

nlohmann::json matrix_json(const DenseMatrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json decompose_report_json(const ProjectionReport& report, double membership_tol, std::size_t threads)
{
    const LaplacianLike& p = report.projection;
    nlohmann::json factors = nlohmann::json::array();
    for (const DenseMatrix& f : p.factors())
        factors.push_back(matrix_json(f));
    return {
        {"dims", p.dims().modes()},
        {"alpha", p.alpha()},
        {"factors", std::move(factors)},
        {"residual_fro", report.residual_fro},
        {"relative_residual", report.relative_residual},
        {"is_member", report.relative_residual <= membership_tol},
        {"tol", membership_tol},
        {"method", std::string(to_string(report.method))},
        {"sweeps_used", report.sweeps_used},
        {"threads", threads},
    };
}

nlohmann::json solve_report_json(const DimSplit& dims, LinearOperator::Kind kind, const GrouReport& report,
                                 double relative_residual, std::size_t threads)
{
    return {
        {"dims", dims.modes()},
        {"operator_kind", std::string(to_string(kind))},
        {"method", "grou"},
        {"terms_used", report.terms_used},
        {"stop_reason", std::string(to_string(report.stop_reason))},
        {"residual_history", report.residual_history},
        {"final_residual", report.residual_history.back()},
        {"relative_residual", relative_residual},
        {"threads", threads},
    };
}

nlohmann::json direct_report_json(const DimSplit& dims, LinearOperator::Kind kind, double rhs_norm,
                                  double final_residual, std::size_t threads)
{
    return {
        {"dims", dims.modes()},
        {"operator_kind", std::string(to_string(kind))},
        {"method", "direct"},
        {"terms_used", 0},
        {"stop_reason", "direct_solve"},
        {"residual_history", {rhs_norm, final_residual}},
        {"final_residual", final_residual},
        {"relative_residual", rhs_norm == 0.0 ? 0.0 : final_residual / rhs_norm},
        {"threads", threads},
    };
}

} // namespace kronlap
