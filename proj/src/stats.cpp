#include "htsim/stats.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "htsim/errors.hpp"

namespace htsim::stats {

namespace {

// Upper-tail critical values, evaluated with scipy.stats (norm.isf(a / 2),
// chi2.isf(a, 255)) and cross-checked against printed tables.
struct CriticalRow {
    double significance;
    double normal_two_sided;
    double chi_square_255;
};

constexpr std::array<CriticalRow, 4> kCritical = {{
    {0.10, 1.6448536269514729, 284.3359078234513},
    {0.05, 1.9599639845400545, 293.2478350807012},
    {0.01, 2.5758293035489010, 310.4573882199059},
    {0.001, 3.2905267314918945, 330.5197436340059},
}};

const CriticalRow& row_for(double significance) {
    for (const auto& row : kCritical)
        if (std::abs(row.significance - significance) < 1e-12) return row;
    throw StructuralError("unsupported significance " + std::to_string(significance) +
                          " (supported: 0.1, 0.05, 0.01, 0.001)");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

TestReport make_report(std::string name, double statistic, double threshold, std::size_t n) {
    return TestReport{std::move(name), statistic, threshold, statistic <= threshold, n};
}

} // namespace

double normal_two_sided_critical(double significance) { return row_for(significance).normal_two_sided; }
double chi_square_255_critical(double significance) { return row_for(significance).chi_square_255; }

double monobit_statistic(std::span<const Bit> bits) {
    if (bits.empty()) return kInf;
    long long sum = 0;
    for (Bit b : bits) sum += b ? 1 : -1;
    return std::abs(static_cast<double>(sum)) / std::sqrt(static_cast<double>(bits.size()));
}

double runs_statistic(std::span<const Bit> bits) {
    const double n = static_cast<double>(bits.size());
    if (bits.size() < 2) return kInf;
    std::size_t ones = 0;
    for (Bit b : bits) ones += b;
    const double pi = static_cast<double>(ones) / n;
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return kInf;
    std::size_t runs = 1;
    for (std::size_t i = 1; i < bits.size(); ++i) runs += (bits[i] != bits[i - 1]);
    const double v = static_cast<double>(runs);
    return std::abs(v - 2.0 * n * pi * (1.0 - pi)) / (2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi));
}

double byte_chi_square_statistic(std::span<const Bit> bits) {
    const std::size_t n_bytes = bits.size() / 8;
    if (n_bytes == 0) return kInf;
    std::array<std::size_t, 256> counts{};
    for (std::size_t k = 0; k < n_bytes; ++k) {
        unsigned v = 0;
        for (std::size_t i = 0; i < 8; ++i) v = (v << 1) | bits[8 * k + i];
        ++counts[v];
    }
    const double expected = static_cast<double>(n_bytes) / 256.0;
    double chi = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi += d * d / expected;
    }
    return chi;
}

double serial_correlation_statistic(std::span<const Bit> bits) {
    const std::size_t n = bits.size();
    if (n < 3) return kInf;
    double mean = 0.0;
    for (Bit b : bits) mean += b;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = bits[i] - mean;
        den += d * d;
        if (i + 1 < n) num += d * (bits[i + 1] - mean);
    }
    if (den == 0.0) return kInf;
    return std::abs(num / den) * std::sqrt(static_cast<double>(n - 1));
}

std::vector<TestReport> randomness_battery(std::span<const Bit> bits, double significance) {
    if (bits.size() < kMinBits)
        throw StructuralError("randomness battery needs at least " + std::to_string(kMinBits) + " bits, got " +
                              std::to_string(bits.size()));
    const CriticalRow& row = row_for(significance);
    const std::size_t n = bits.size();
    return {
        make_report("monobit", monobit_statistic(bits), row.normal_two_sided, n),
        make_report("runs", runs_statistic(bits), row.normal_two_sided, n),
        make_report("byte_chi_square", byte_chi_square_statistic(bits), row.chi_square_255, n),
        make_report("serial_correlation_lag1", serial_correlation_statistic(bits), row.normal_two_sided, n),
    };
}

bool all_pass(const std::vector<TestReport>& reports) {
    for (const auto& r : reports)
        if (!r.pass) return false;
    return true;
}

std::string format_table(const std::vector<TestReport>& reports) {
    std::ostringstream os;
    os << std::left << std::setw(26) << "test" << std::right << std::setw(14) << "statistic" << std::setw(14)
       << "threshold" << std::setw(10) << "n_bits" << "  result\n";
    for (const auto& r : reports) {
        os << std::left << std::setw(26) << r.test_name << std::right << std::fixed << std::setprecision(4)
           << std::setw(14) << r.statistic << std::setw(14) << r.threshold << std::setw(10) << r.n_bits << "  "
           << (r.pass ? "pass" : "FAIL") << '\n';
    }
    return os.str();
}

} // namespace htsim::stats
