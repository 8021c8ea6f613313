#include "mrgark/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mrgark {

namespace {

using nlohmann::json;

double entry_to_double(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto slash = s.find('/');
        if (slash == std::string::npos) return std::stod(s);
        const double num = std::stod(s.substr(0, slash));
        const double den = std::stod(s.substr(slash + 1));
        if (den == 0.0) throw std::invalid_argument("rational with zero denominator: " + s);
        return num / den;
    }
    throw std::invalid_argument("matrix entries must be numbers or 'p/q' strings");
}

Matrix json_to_matrix(const json& rows) {
    if (!rows.is_array() || rows.empty())
        throw std::invalid_argument("expected a non-empty array of rows");
    const auto nrows = rows.size();
    const auto ncols = rows[0].size();
    Matrix m(nrows, ncols);
    for (std::size_t i = 0; i < nrows; ++i) {
        if (!rows[i].is_array() || rows[i].size() != ncols)
            throw std::invalid_argument("ragged matrix rows");
        for (std::size_t j = 0; j < ncols; ++j) m(i, j) = entry_to_double(rows[i][j]);
    }
    return m;
}

Vector json_to_vector(const json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("expected an array");
    Vector v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(i) = entry_to_double(arr[i]);
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

RkTableau tableau_from_json(const json& j) {
    const Matrix a = json_to_matrix(j.at("A"));
    const Vector b = json_to_vector(j.at("b"));
    if (j.contains("c")) return RkTableau(a, b, json_to_vector(j.at("c")));
    return RkTableau(a, b);
}

json tableau_to_json(const RkTableau& t) {
    return json{{"A", matrix_to_json(t.A())}, {"b", vector_to_json(t.b())},
                {"c", vector_to_json(t.c())}};
}

std::string dumped(const json& j, int indent) { return indent < 0 ? j.dump() : j.dump(indent); }

}  // namespace

std::string scheme_to_json(const MrGarkScheme& scheme, int indent) {
    json j;
    j["fast"] = tableau_to_json(scheme.fast());
    j["slow"] = tableau_to_json(scheme.slow());
    j["M"] = scheme.M();
    json fs = json::array();
    for (const Matrix& m : scheme.couplings_fs()) fs.push_back(matrix_to_json(m));
    json sf = json::array();
    for (const Matrix& m : scheme.couplings_sf()) sf.push_back(matrix_to_json(m));
    j["couplings_fs"] = std::move(fs);
    j["couplings_sf"] = std::move(sf);
    return dumped(j, indent);
}

MrGarkScheme scheme_from_json(const std::string& text) {
    const json j = json::parse(text);
    RkTableau fast = tableau_from_json(j.at("fast"));
    RkTableau slow = tableau_from_json(j.at("slow"));
    const int M = j.at("M").get<int>();
    std::vector<Matrix> fs, sf;
    for (const json& m : j.at("couplings_fs")) fs.push_back(json_to_matrix(m));
    for (const json& m : j.at("couplings_sf")) sf.push_back(json_to_matrix(m));
    return MrGarkScheme(std::move(fast), std::move(slow), M, std::move(fs), std::move(sf));
}

MrGarkScheme load_scheme_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scheme file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return scheme_from_json(buf.str());
}

void save_scheme_file(const MrGarkScheme& scheme, const std::string& path, int indent) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scheme file: " + path);
    out << scheme_to_json(scheme, indent) << "\n";
}

std::string order_report_to_json(const OrderReport& report, int indent) {
    json j;
    j["table_source"] = report.table_source;
    j["classified_order"] = report.classified_order;
    json entries = json::array();
    for (const auto& e : report.entries) {
        json row{{"id", e.id}, {"order", e.order}, {"partition", e.partition},
                 {"residual", e.residual}};
        if (!e.alias_of.empty()) row["alias_of"] = e.alias_of;
        entries.push_back(std::move(row));
    }
    j["residuals"] = std::move(entries);
    return dumped(j, indent);
}

std::string stability_report_to_json(const StabilityReport& report, int indent) {
    json j;
    j["partitioning"] =
        report.partitioning == Partitioning::Additive ? "additive" : "component";
    j["algebraically_stable"] = report.algebraically_stable;
    j["stability_decoupled"] = report.stability_decoupled;
    j["min_eigenvalue"] = report.min_eigenvalue;
    j["coupling_norm"] = report.coupling_norm;
    if (report.conditional_r) j["conditional_r"] = *report.conditional_r;
    if (report.step_bound) j["step_bound"] = *report.step_bound;
    j["P_ff"] = matrix_to_json(report.blocks.P_ff);
    j["P_fs"] = matrix_to_json(report.blocks.P_fs);
    j["P_ss"] = matrix_to_json(report.blocks.P_ss);
    return dumped(j, indent);
}

std::string monotonicity_report_to_json(const MonotonicityReport& report, int indent) {
    json j;
    j["radius"] = report.radius;
    j["saturated"] = report.saturated;
    j["ahat_nonnegative"] = report.ahat_nonnegative;
    json samples = json::array();
    for (const auto& [r, verdict] : report.am_checked_at)
        samples.push_back(json{{"r", r}, {"am", verdict}});
    j["am_checked_at"] = std::move(samples);
    if (!report.incidence_verdicts.empty()) {
        json inc;
        for (const auto& [id, ok] : report.incidence_verdicts) inc[id] = ok;
        j["incidence"] = std::move(inc);
    }
    if (report.step_bound) j["step_bound"] = *report.step_bound;
    return dumped(j, indent);
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream out;
    out.precision(17);
    out << "t";
    const auto dim = traj.states.empty() ? 0 : traj.states.front().size();
    for (Eigen::Index i = 0; i < dim; ++i) out << ",y" << i;
    out << "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << traj.times[k];
        for (Eigen::Index i = 0; i < dim; ++i) out << "," << traj.states[k](i);
        out << "\n";
    }
    return out.str();
}

std::string trajectory_to_json(const Trajectory& traj, int indent) {
    json j;
    j["times"] = traj.times;
    json states = json::array();
    for (const Vector& y : traj.states) states.push_back(vector_to_json(y));
    j["states"] = std::move(states);
    j["stats"] = json{{"rhs_slow_evals", traj.stats.rhs_slow_evals},
                      {"rhs_fast_evals", traj.stats.rhs_fast_evals},
                      {"newton_iters", traj.stats.newton_iters},
                      {"jacobian_builds", traj.stats.jacobian_builds}};
    if (!traj.stage_norm_max.empty()) j["stage_norm_max"] = traj.stage_norm_max;
    return dumped(j, indent);
}

}  // namespace mrgark
