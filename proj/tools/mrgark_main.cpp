#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrgark/json_io.hpp"
#include "mrgark/monotonicity.hpp"
#include "mrgark/order.hpp"
#include "mrgark/problems.hpp"
#include "mrgark/schemes.hpp"
#include "mrgark/stability.hpp"

namespace {

using nlohmann::json;
using namespace mrgark;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct SchemeRef {
    std::string spec;     // catalog name or file path
    int M = 2;
    std::string variant;
};

double condition_tolerance() {
    if (const char* env = std::getenv("MRGARK_TOL")) {
        try {
            return std::stod(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("MRGARK_TOL is not a number");
        }
    }
    return kOrderTol;
}

/// Resolve a scheme reference: an existing file path wins, otherwise the
/// catalog is consulted.
CatalogEntry resolve_scheme(const SchemeRef& ref) {
    if (std::filesystem::exists(ref.spec)) {
        CatalogEntry e;
        e.name = ref.spec;
        e.scheme = load_scheme_file(ref.spec);
        e.M = e.scheme->M();
        e.documented_order = -1;  // nothing asserted for file schemes
        e.summary = "scheme file";
        return e;
    }
    return make_scheme(ref.spec, ref.M, ref.variant);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write output file: " + out_path);
    out << text;
}

std::string error_code_for(const std::exception& e) {
    const std::string what = e.what();
    if (what.rfind("unknown scheme", 0) == 0) return "UnknownScheme";
    if (what.rfind("unknown problem", 0) == 0) return "UnknownProblem";
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
    if (dynamic_cast<const IntegrationError*>(&e)) return "IntegrationFailed";
    return "Error";
}

int fail_with(const std::exception& e) {
    json err{{"code", error_code_for(e)}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return kExitUsage;
}

json check_report_json(const CatalogEntry& entry, double tol) {
    json j;
    j["scheme"] = entry.name;
    j["M"] = entry.M;
    if (!entry.variant.empty()) j["variant"] = entry.variant;
    if (!entry.note.empty()) j["note"] = entry.note;

    const FlatGarkTableau flat = entry.flat();
    json order;
    if (entry.scheme) {
        const OrderReport slow = slow_order_residuals(*entry.scheme, 3, tol);
        const OrderReport fast = fast_order_residuals(*entry.scheme, 3, tol);
        const OrderReport combined = combined_order_residuals(*entry.scheme, 3, tol);
        order["slow"] = json::parse(order_report_to_json(slow));
        order["fast"] = json::parse(order_report_to_json(fast));
        order["remaining"] =
            json::parse(order_report_to_json(remaining_order3_report(*entry.scheme)));
        order["classified_order"] = combined.classified_order;
        const auto cons = internal_consistency_residuals(*entry.scheme);
        j["internal_consistency"] = json{{"res_fast", cons.res_fast},
                                         {"res_slow", cons.res_slow},
                                         {"consistent", cons.res_fast <= 1e-12 &&
                                                            cons.res_slow <= 1e-12}};
    } else {
        const OrderReport rep = flat_order_residuals(flat, tol);
        order["flat"] = json::parse(order_report_to_json(rep));
        order["classified_order"] = rep.classified_order;
        if (entry.mis_order3) order["MIS.3"] = *entry.mis_order3;
    }
    j["order"] = std::move(order);

    const StabilityReport stab = analyze_stability(flat);
    j["stability"] = json::parse(stability_report_to_json(stab));
    j["stability"].erase("P_ff");
    j["stability"].erase("P_fs");
    j["stability"].erase("P_ss");

    MonotonicityReport mono = analyze_monotonicity(flat);
    if (entry.is_telescopic()) mono.incidence_verdicts = incidence_conditions(*entry.scheme);
    j["monotonicity"] = json::parse(monotonicity_report_to_json(mono));

    if (entry.documented_order >= 0) {
        j["expected_order"] = entry.documented_order;
        j["order_matches_expected"] =
            j["order"]["classified_order"].get<int>() == entry.documented_order;
    }
    return j;
}

void print_check_text(const json& j) {
    std::cout << "scheme: " << j["scheme"].get<std::string>() << "  (M=" << j["M"].get<int>()
              << ")\n";
    if (j.contains("note")) std::cout << "note: " << j["note"].get<std::string>() << "\n";
    std::cout << "order: " << j["order"]["classified_order"].get<int>() << "\n";
    if (j.contains("internal_consistency")) {
        const auto& c = j["internal_consistency"];
        std::cout << "internally consistent: " << (c["consistent"].get<bool>() ? "yes" : "no")
                  << "  (res_fast=" << c["res_fast"].get<double>()
                  << ", res_slow=" << c["res_slow"].get<double>() << ")\n";
    }
    const auto& s = j["stability"];
    std::cout << "algebraically stable: " << (s["algebraically_stable"].get<bool>() ? "yes" : "no")
              << "  (min eig " << s["min_eigenvalue"].get<double>() << ")\n";
    std::cout << "stability-decoupled: " << (s["stability_decoupled"].get<bool>() ? "yes" : "no")
              << "  (|P_fs| " << s["coupling_norm"].get<double>() << ")\n";
    const auto& m = j["monotonicity"];
    std::cout << "monotonicity radius: " << m["radius"].get<double>()
              << (m["saturated"].get<bool>() ? " (saturated)" : "") << "\n";
    if (j.contains("order_matches_expected"))
        std::cout << "expected order " << j["expected_order"].get<int>() << ": "
                  << (j["order_matches_expected"].get<bool>() ? "match" : "MISMATCH") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multirate GARK scheme analysis and integration"};
    app.require_subcommand(1);

    SchemeRef ref;
    std::string problem_name = "linear2";
    std::string h_list_arg;
    std::string out_path;
    std::string format = "text";
    double t_end = 1.0;
    double H = 0.1;
    std::optional<double> rho;
    std::optional<double> expect_slope;
    double slope_tol = 0.25;

    auto add_scheme_opts = [&](CLI::App* cmd, bool positional) {
        if (positional)
            cmd->add_option("scheme", ref.spec, "catalog name or scheme JSON file")->required();
        else
            cmd->add_option("--scheme", ref.spec, "catalog name or scheme JSON file")->required();
        cmd->add_option("--M", ref.M, "micro-steps per macro-step (catalog schemes)");
        cmd->add_option("--variant", ref.variant, "catalog variant, e.g. corrected-base");
    };

    CLI::App* list_cmd = app.add_subcommand("list", "enumerate the scheme catalog");

    CLI::App* check_cmd = app.add_subcommand("check", "order/stability/monotonicity report");
    add_scheme_opts(check_cmd, false);
    check_cmd->add_option("--format", format, "text or json");
    check_cmd->add_option("--out", out_path, "write the report to a file");
    std::string dump_path;
    check_cmd->add_option("--dump", dump_path, "write the scheme to a JSON file");

    CLI::App* conv_cmd = app.add_subcommand("converge", "fixed-step convergence study");
    add_scheme_opts(conv_cmd, false);
    conv_cmd->add_option("--problem", problem_name, "registered problem name");
    conv_cmd->add_option("--H", h_list_arg, "comma-separated step sizes")->required();
    conv_cmd->add_option("--t-end", t_end, "final time");
    conv_cmd->add_option("--format", format, "text, csv or json");
    conv_cmd->add_option("--out", out_path, "write the table to a file");
    conv_cmd->add_option("--expect-slope", expect_slope, "fail unless slope is within tolerance");
    conv_cmd->add_option("--slope-tol", slope_tol, "tolerance for --expect-slope");

    CLI::App* stab_cmd = app.add_subcommand("stability", "algebraic stability report");
    add_scheme_opts(stab_cmd, true);
    stab_cmd->add_option("--format", format, "text or json");
    std::string partitioning = "additive";
    stab_cmd->add_option("--partitioning", partitioning, "additive or component");

    CLI::App* mono_cmd = app.add_subcommand("monotonicity", "absolute monotonicity report");
    add_scheme_opts(mono_cmd, true);
    mono_cmd->add_option("--rho", rho, "forward-Euler monotonicity radius of the problem");
    mono_cmd->add_option("--format", format, "text or json");

    CLI::App* int_cmd = app.add_subcommand("integrate", "fixed-step integration");
    add_scheme_opts(int_cmd, false);
    int_cmd->add_option("--problem", problem_name, "registered problem name");
    int_cmd->add_option("--H", H, "macro step size");
    int_cmd->add_option("--t-end", t_end, "final time");
    int_cmd->add_option("--format", format, "csv or json");
    int_cmd->add_option("--out", out_path, "write the trajectory to a file");

    CLI11_PARSE(app, argc, argv);

    try {
        const double tol = condition_tolerance();

        if (list_cmd->parsed()) {
            for (const std::string& name : catalog_names()) {
                const CatalogEntry e = make_scheme(name, 2);
                std::cout << name << ": " << e.summary << "\n";
            }
            return kExitOk;
        }

        if (check_cmd->parsed()) {
            const CatalogEntry entry = resolve_scheme(ref);
            const json report = check_report_json(entry, tol);
            if (!dump_path.empty() && entry.scheme) save_scheme_file(*entry.scheme, dump_path);
            if (format == "json")
                emit(report.dump(2), out_path);
            else
                print_check_text(report);
            if (report.contains("order_matches_expected") &&
                !report["order_matches_expected"].get<bool>())
                return kExitCheckFailed;
            return kExitOk;
        }

        if (conv_cmd->parsed()) {
            const CatalogEntry entry = resolve_scheme(ref);
            const PartitionedIvp ivp = problem_by_name(problem_name);
            std::vector<double> h_list;
            std::stringstream ss(h_list_arg);
            for (std::string tok; std::getline(ss, tok, ',');) h_list.push_back(std::stod(tok));

            ConvergenceResult res;
            if (entry.scheme)
                res = observed_order(*entry.scheme, ivp, h_list, t_end);
            else
                res = observed_order(entry.flat(), ivp, h_list, t_end);

            std::ostringstream csv;
            csv.precision(17);
            csv << "H,error\n";
            for (std::size_t i = 0; i < res.H.size(); ++i)
                csv << res.H[i] << "," << res.errors[i] << "\n";
            if (format == "json") {
                json j{{"scheme", entry.name}, {"M", entry.M}, {"problem", problem_name},
                       {"H", res.H},          {"errors", res.errors}, {"slope", res.slope}};
                emit(j.dump(2), out_path);
            } else {
                emit(csv.str(), out_path);
                std::cout << "slope: " << res.slope << "\n";
            }
            if (expect_slope && std::abs(res.slope - *expect_slope) > slope_tol) {
                std::cerr << "slope " << res.slope << " outside " << *expect_slope << " +/- "
                          << slope_tol << "\n";
                return kExitCheckFailed;
            }
            return kExitOk;
        }

        if (stab_cmd->parsed()) {
            const CatalogEntry entry = resolve_scheme(ref);
            const Partitioning part = partitioning == "component" ? Partitioning::Component
                                                                  : Partitioning::Additive;
            const StabilityReport rep = analyze_stability(entry.flat(), part, tol);
            if (format == "json") {
                emit(stability_report_to_json(rep, 2), out_path);
            } else {
                std::cout << "algebraically stable: " << (rep.algebraically_stable ? "yes" : "no")
                          << "\n"
                          << "min eigenvalue: " << rep.min_eigenvalue << "\n"
                          << "stability-decoupled: " << (rep.stability_decoupled ? "yes" : "no")
                          << "  (|P_fs| = " << rep.coupling_norm << ")\n";
                if (rep.conditional_r)
                    std::cout << "conditional stability weight r: " << *rep.conditional_r << "\n";
            }
            return kExitOk;
        }

        if (mono_cmd->parsed()) {
            const CatalogEntry entry = resolve_scheme(ref);
            MonotonicityReport rep = analyze_monotonicity(entry.flat(), rho);
            if (entry.is_telescopic())
                rep.incidence_verdicts = incidence_conditions(*entry.scheme);
            if (format == "json") {
                emit(monotonicity_report_to_json(rep, 2), out_path);
            } else {
                std::cout << "radius: " << rep.radius << (rep.saturated ? " (saturated)" : "")
                          << "\n";
                if (!rep.ahat_nonnegative)
                    std::cout << "bordered matrix has negative entries (not monotonic)\n";
                for (const auto& [id, ok] : rep.incidence_verdicts)
                    std::cout << "incidence " << id << ": " << (ok ? "pass" : "fail") << "\n";
                if (rep.step_bound) std::cout << "step bound H <= " << *rep.step_bound << "\n";
            }
            return kExitOk;
        }

        if (int_cmd->parsed()) {
            const CatalogEntry entry = resolve_scheme(ref);
            const PartitionedIvp ivp = problem_by_name(problem_name);
            Trajectory traj;
            if (entry.scheme)
                traj = integrate(MrGarkStepper(*entry.scheme), ivp, t_end, H);
            else
                traj = integrate(FlatGarkStepper(entry.flat()), ivp, t_end, H);
            emit(format == "json" ? trajectory_to_json(traj, 2) : trajectory_to_csv(traj),
                 out_path);
            return kExitOk;
        }
    } catch (const std::exception& e) {
        return fail_with(e);
    }
    return kExitUsage;
}
