#include "qfm/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qfm {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

const char* kRateCsvHeader = "e0_over_omega,gamma_over_omega,method,amp_over_omega,realization_id";

void write_rate_csv(const std::string& path, const std::vector<RateCsvRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_rate_csv: cannot open " + path);
    out << kRateCsvHeader << "\n";
    for (const auto& r : rows) {
        out << format_g17(r.e0_over_omega) << ',' << format_g17(r.gamma_over_omega) << ','
            << r.method << ',' << format_g17(r.amp_over_omega) << ',' << r.realization_id << "\n";
    }
}

void write_rabi_csv(const std::string& path, const std::vector<RabiCsvRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_rabi_csv: cannot open " + path);
    out << "m,a_over_omega,predicted,measured,rel_err\n";
    for (const auto& r : rows) {
        out << r.m << ',' << format_g17(r.a_over_omega) << ',' << format_g17(r.predicted) << ','
            << format_g17(r.measured) << ',' << format_g17(r.rel_err) << "\n";
    }
}

void write_scaling_csv(const std::string& path, const std::vector<double>& indices,
                       const std::vector<double>& sigmas) {
    if (indices.size() != sigmas.size())
        throw std::invalid_argument("write_scaling_csv: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_scaling_csv: cannot open " + path);
    out << "amp_over_omega,sigma_over_omega\n";
    for (std::size_t i = 0; i < indices.size(); ++i)
        out << format_g17(indices[i]) << ',' << format_g17(sigmas[i]) << "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_text_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace qfm
