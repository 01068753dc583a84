#include "admmpep/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "admmpep/admm.hpp"
#include "admmpep/certificate.hpp"
#include "admmpep/errors.hpp"
#include "admmpep/gamma_context.hpp"
#include "admmpep/model.hpp"
#include "admmpep/sdp_solver.hpp"

namespace admmpep::cli {

namespace {

constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kComputeError = 2;

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIterations: return "max_iterations";
        case SolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

/// Writes `text` to the path, or to `out` when the path is empty.
int emit(const std::string& path, const std::string& text, std::ostream& out,
         std::ostream& err) {
    if (path.empty()) {
        out << text;
        return kOk;
    }
    std::ofstream file(path);
    if (!file) {
        err << "error: cannot open output path: " << path << "\n";
        return kComputeError;
    }
    file << text;
    if (!file.good()) {
        err << "error: failed writing output path: " << path << "\n";
        return kComputeError;
    }
    return kOk;
}

SweepRow sweep_row(double gamma, double tolerance) {
    SweepRow row;
    row.gamma = gamma;
    const GammaContext ctx(gamma);
    const SdpSolution sol = solve(build_problem(ctx), tolerance, 200);
    row.status = status_name(sol.status);
    if (sol.status == SolveStatus::Optimal) row.sdp_value = sol.objective;
    if (gamma > ctx.phi) {
        try {
            row.analytic_value = closed_form_objective(ctx, ObjectiveForm::Compact);
        } catch (const DomainError&) {
            // certificate undefined here; leave the column empty
        }
    }
    if (row.sdp_value && row.analytic_value) {
        row.gap = std::abs(*row.sdp_value - *row.analytic_value);
    }
    return row;
}

int cmd_solve(double gamma, double tolerance, std::ostream& out, std::ostream& err) {
    if (!(gamma > 1.0) || !(gamma <= 2.5)) {
        err << "error: solve requires 1 < gamma <= 2.5\n";
        return kUsageError;
    }
    if (gamma > 2.0) {
        out << "note: gamma > 2 extrapolates beyond the studied range\n";
    }
    const GammaContext ctx(gamma);
    const SdpSolution sol = solve(build_problem(ctx), tolerance, 200);
    out << "gamma " << format_value(gamma) << "\n"
        << "status " << status_name(sol.status) << "\n"
        << "objective " << format_value(sol.objective) << "\n"
        << "iterations " << sol.iterations << "\n"
        << "primal_infeas " << format_value(sol.residuals.primal_infeas) << "\n"
        << "dual_infeas " << format_value(sol.residuals.dual_infeas) << "\n"
        << "gap " << format_value(sol.residuals.gap) << "\n";
    if (sol.status != SolveStatus::Optimal) {
        err << "error: solver did not reach optimality: " << sol.diagnostic << "\n";
        return kComputeError;
    }
    return kOk;
}

int cmd_verify(double gamma, std::ostream& out, std::ostream& err) {
    if (!(gamma > 1.0) || !(gamma <= 2.0)) {
        err << "error: verify requires gamma in (1, 2]\n";
        return kUsageError;
    }
    const GammaContext ctx(gamma);
    FeasibilityReport rep;
    try {
        rep = feasibility_report(ctx);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kComputeError;
    }
    out << "gamma " << format_value(gamma) << "\n";
    out << "inequality_values";
    for (double v : rep.inequality_values) out << " " << format_value(v);
    out << "\nequality_residual " << format_value(rep.equality_residual) << "\n";
    out << "eigenvalues";
    for (double v : rep.eigenvalues) out << " " << format_value(v);
    out << "\nrank " << rep.rank_estimate << "\n"
        << "objective_trace " << format_value(rep.objective_trace) << "\n"
        << "objective_expanded " << format_value(rep.objective_expanded) << "\n"
        << "objective_compact " << format_value(rep.objective_compact) << "\n"
        << "max_objective_discrepancy " << format_value(rep.max_objective_discrepancy)
        << "\n";
    if (!rep.inside_claimed_region) {
        out << "flag outside claimed region (gamma <= golden ratio)\n";
    }
    const bool pass = rep.feasible && (!rep.inside_claimed_region || rep.objective_compact > 1.0);
    out << "result " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kOk : kComputeError;
}

int cmd_sweep(double gamma_min, double gamma_max, double step, double tolerance,
              const std::string& out_path, const std::string& format, int threads,
              std::ostream& out, std::ostream& err) {
    if (!(gamma_min > 1.0) || !(gamma_min < gamma_max) || !(gamma_max <= 2.5) ||
        !(step > 0.0)) {
        err << "error: sweep requires 1 < gamma-min < gamma-max <= 2.5 and step > 0\n";
        return kUsageError;
    }
    if (format != "csv" && format != "json") {
        err << "error: unknown format: " << format << "\n";
        return kUsageError;
    }
    const auto rows = run_sweep(gamma_min, gamma_max, step, tolerance, threads);
    const std::string text = (format == "csv") ? sweep_to_csv(rows) : sweep_to_json(rows);
    return emit(out_path, text, out, err);
}

int cmd_counterexample(double gamma, const std::string& out_path, std::ostream& out,
                       std::ostream& err) {
    const double phi = golden_ratio();
    if (!(gamma > phi + 0.01) || !(gamma <= 2.0)) {
        err << "error: counterexample requires gamma in (phi + 0.01, 2]\n";
        return kUsageError;
    }
    const GammaContext ctx(gamma);
    CounterexampleInstance inst;
    try {
        inst = build_instance(ctx);
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return kComputeError;
    }

    // The replayed iteration must land on the designated next state.
    const AdmmState replay = admm_step(inst);
    const double mismatch =
        std::max({(replay.x - inst.designated_next.x).cwiseAbs().maxCoeff(),
                  (replay.y - inst.designated_next.y).cwiseAbs().maxCoeff(),
                  (replay.z - inst.designated_next.z).cwiseAbs().maxCoeff()});
    if (mismatch > 1e-6) {
        err << "error: replay mismatch " << format_value(mismatch) << " exceeds 1e-6\n";
        return kComputeError;
    }

    const nlohmann::json j = inst;
    const int rc = emit(out_path, j.dump(2) + "\n", out, err);
    if (rc != kOk) return rc;

    const double r_k = j.at("R_k").get<double>();
    const double r_next = j.at("R_next").get<double>();
    if (!(r_next > r_k)) {
        err << "error: measure did not increase (R_k=" << format_value(r_k)
            << ", R_next=" << format_value(r_next) << ")\n";
        return kComputeError;
    }
    return kOk;
}

}  // namespace

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<SweepRow> run_sweep(double gamma_min, double gamma_max, double step,
                                double tolerance, int threads) {
    std::vector<double> grid;
    for (double g = gamma_min; g <= gamma_max + 0.5 * step; g += step) {
        grid.push_back(std::min(g, gamma_max));
    }
    std::vector<SweepRow> rows(grid.size());

    unsigned n_workers = threads > 0 ? static_cast<unsigned>(threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(grid.size()));
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (std::size_t i = cursor.fetch_add(1); i < grid.size(); i = cursor.fetch_add(1)) {
            rows[i] = sweep_row(grid[i], tolerance);
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "gamma,sdp_value,analytic_value,gap,status\n";
    for (const auto& r : rows) {
        os << format_value(r.gamma) << ',';
        if (r.sdp_value) os << format_value(*r.sdp_value);
        os << ',';
        if (r.analytic_value) os << format_value(*r.analytic_value);
        os << ',';
        if (r.gap) os << format_value(*r.gap);
        os << ',' << r.status << '\n';
    }
    return os.str();
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"gamma", r.gamma}, {"status", r.status}};
        j["sdp_value"] = r.sdp_value ? nlohmann::json(*r.sdp_value) : nlohmann::json();
        j["analytic_value"] =
            r.analytic_value ? nlohmann::json(*r.analytic_value) : nlohmann::json();
        j["gap"] = r.gap ? nlohmann::json(*r.gap) : nlohmann::json();
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Worst-case analysis of one ADMM iteration over the dual step length"};
    app.require_subcommand(1);

    double gamma = 1.8;
    double tolerance = 1e-9;
    double gamma_min = 1.5;
    double gamma_max = 2.0;
    double step = 0.005;
    std::string out_path;
    std::string format = "csv";
    int threads = 0;

    auto* solve_cmd = app.add_subcommand("solve", "Solve the SDP at one gamma");
    solve_cmd->add_option("--gamma", gamma, "dual step length in (1, 2.5]")->required();
    solve_cmd->add_option("--tol", tolerance, "stopping tolerance (default 1e-9)");

    auto* verify_cmd = app.add_subcommand("verify", "Check the analytic certificate");
    verify_cmd->add_option("--gamma", gamma, "dual step length in (1, 2]")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Solve and verify on a gamma grid");
    sweep_cmd->add_option("--gamma-min", gamma_min, "grid start (default 1.5)");
    sweep_cmd->add_option("--gamma-max", gamma_max, "grid end (default 2.0)");
    sweep_cmd->add_option("--step", step, "grid step (default 0.005)");
    sweep_cmd->add_option("--tol", tolerance, "stopping tolerance (default 1e-9)");
    sweep_cmd->add_option("--out", out_path, "output path (default: stdout)");
    sweep_cmd->add_option("--format", format, "csv or json (default csv)");
    sweep_cmd->add_option("--threads", threads, "worker count (default: hardware)");

    auto* ce_cmd = app.add_subcommand("counterexample", "Export the reconstructed instance");
    ce_cmd->add_option("--gamma", gamma, "dual step length in (phi + 0.01, 2]")->required();
    ce_cmd->add_option("--out", out_path, "output path (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(gamma, tolerance, out, err);
        if (verify_cmd->parsed()) return cmd_verify(gamma, out, err);
        if (sweep_cmd->parsed()) {
            return cmd_sweep(gamma_min, gamma_max, step, tolerance, out_path, format,
                             threads, out, err);
        }
        if (ce_cmd->parsed()) return cmd_counterexample(gamma, out_path, out, err);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kComputeError;
    }
    err << "error: no command selected\n";
    return kUsageError;
}

}  // namespace admmpep::cli
