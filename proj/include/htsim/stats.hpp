#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "htsim/bits.hpp"

namespace htsim::stats {

inline constexpr std::size_t kMinBits = 1000;

struct TestReport {
    std::string test_name;
    double statistic = 0.0; // +inf when the test's precondition on the data fails
    double threshold = 0.0;
    bool pass = false;      // statistic <= threshold
    std::size_t n_bits = 0;
};

// Supported significance levels: 0.10, 0.05, 0.01, 0.001.
double normal_two_sided_critical(double significance);
double chi_square_255_critical(double significance);

// |sum(2b - 1)| / sqrt(n).
double monobit_statistic(std::span<const Bit> bits);
// |V - 2n pi (1 - pi)| / (2 sqrt(2n) pi (1 - pi)), V = number of runs;
// +inf when |pi - 1/2| >= 2 / sqrt(n).
double runs_statistic(std::span<const Bit> bits);
// Pearson chi-square of non-overlapping bytes (MSB first) against uniform, 255 dof.
double byte_chi_square_statistic(std::span<const Bit> bits);
// |r1| * sqrt(n - 1), r1 = lag-1 sample autocorrelation; +inf for constant input.
double serial_correlation_statistic(std::span<const Bit> bits);

// Monobit, runs, byte chi-square and lag-1 serial correlation, in that order.
// Throws StructuralError below kMinBits or for an unsupported significance.
std::vector<TestReport> randomness_battery(std::span<const Bit> bits, double significance = 0.01);

bool all_pass(const std::vector<TestReport>& reports);

std::string format_table(const std::vector<TestReport>& reports);

} // namespace htsim::stats
