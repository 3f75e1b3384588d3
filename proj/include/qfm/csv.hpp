// csv.hpp — CSV output with replay-fidelity float formatting (17 significant
// digits, so parsing a written value recovers the exact double).
#pragma once

#include <string>
#include <vector>

#include "qfm/analytic.hpp"

namespace qfm {

std::string format_g17(double x);

struct RateCsvRow {
    double e0_over_omega = 0.0;
    double gamma_over_omega = 0.0;
    std::string method;
    double amp_over_omega = 0.0;
    int realization_id = 0;
};

extern const char* kRateCsvHeader;

void write_rate_csv(const std::string& path, const std::vector<RateCsvRow>& rows);

struct RabiCsvRow {
    int m = 0;
    double a_over_omega = 0.0;
    double predicted = 0.0;
    double measured = 0.0;
    double rel_err = 0.0;
};

void write_rabi_csv(const std::string& path, const std::vector<RabiCsvRow>& rows);

void write_scaling_csv(const std::string& path, const std::vector<double>& indices,
                       const std::vector<double>& sigmas);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace qfm
