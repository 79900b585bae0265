#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace swabsim {

struct StatsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double regularized_gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b), x in [0, 1], a, b > 0.
double regularized_incomplete_beta(double x, double a, double b);

/// Survival function of the chi-square distribution with df degrees.
double chi_square_sf(double x, double df);

/// Two-sided p-value of Student's t with df degrees of freedom.
double t_two_sided_p(double t, double df);

/// 2x2 contingency counts, rows = mode, columns = success / failure.
struct ContingencyTable {
  // [row][col]
  std::array<std::array<double, 2>, 2> counts{{{0, 0}, {0, 0}}};

  double row_total(int r) const { return counts[r][0] + counts[r][1]; }
  double col_total(int c) const { return counts[0][c] + counts[1][c]; }
  double total() const { return row_total(0) + row_total(1); }
};

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Pearson chi-square, 1 degree of freedom. `yates` applies the continuity
/// correction (off by default). Throws StatsError when any expected count
/// is zero (degenerate marginal).
ChiSquareResult chi_square_2x2(const ContingencyTable& table, bool yates = false);

struct TTestResult {
  double t = 0.0;
  double p_value = 1.0;
  double mean_difference = 0.0;
  double sd_difference = 0.0;
  int n = 0;
};

/// Paired two-sided t-test on equal-length samples. Throws StatsError on
/// fewer than two pairs or zero-variance differences.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace swabsim
