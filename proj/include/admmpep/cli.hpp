#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace admmpep::cli {

/// One grid point of a gamma sweep. Optional fields are absent when the
/// corresponding computation does not apply (certificate below the golden
/// ratio) or failed.
struct SweepRow {
    double gamma = 0.0;
    std::optional<double> sdp_value;
    std::optional<double> analytic_value;
    std::optional<double> gap;  ///< |sdp_value - analytic_value| when both present
    std::string status;
};

/// Solves and evaluates the certificate on the inclusive grid
/// gamma_min, gamma_min + step, ... ; rows are computed concurrently on
/// `threads` workers (>=1) and returned in grid order.
std::vector<SweepRow> run_sweep(double gamma_min, double gamma_max, double step,
                                double tolerance, int threads);

/// Formats with 12 significant digits (CSV round-trip contract).
std::string format_value(double v);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

/// Entry point behind the binary: args excludes the program name.
/// Exit codes: 0 success, 1 usage error, 2 computational failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace admmpep::cli
