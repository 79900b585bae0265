#include "swabsim/stats.hpp"

#include <cmath>
#include <limits>

namespace swabsim {

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1 (modified Lentz).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw StatsError("gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0)
    throw StatsError("incomplete_beta: domain error");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
  return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        b * std::log1p(-x) + a * std::log(x)) *
                   beta_cf(1.0 - x, b, a) / b;
}

double chi_square_sf(double x, double df) {
  if (x < 0.0 || !(df > 0.0)) throw StatsError("chi_square_sf: domain error");
  return regularized_gamma_q(df / 2.0, x / 2.0);
}

double t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw StatsError("t_two_sided_p: df must be > 0");
  return regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
}

ChiSquareResult chi_square_2x2(const ContingencyTable& table, bool yates) {
  const double n = table.total();
  if (!(n > 0.0)) throw StatsError("chi_square_2x2: empty table");
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      if (table.counts[r][c] < 0) throw StatsError("chi_square_2x2: negative count");
      const double expected = table.row_total(r) * table.col_total(c) / n;
      if (!(expected > 0.0))
        throw StatsError("chi_square_2x2: zero marginal, test undefined");
    }
  const double a = table.counts[0][0], b = table.counts[0][1];
  const double c = table.counts[1][0], d = table.counts[1][1];
  double num = std::abs(a * d - b * c);
  if (yates) num = std::max(0.0, num - n / 2.0);
  ChiSquareResult out;
  out.statistic = n * num * num /
                  (table.row_total(0) * table.row_total(1) * table.col_total(0) * table.col_total(1));
  out.p_value = chi_square_sf(out.statistic, 1.0);
  return out;
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw StatsError("paired_t_test: unequal sample sizes");
  const int n = static_cast<int>(a.size());
  if (n < 2) throw StatsError("paired_t_test: need at least 2 pairs");
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (n - 1));
  if (!(sd > 0.0)) throw StatsError("paired_t_test: zero-variance differences, test degenerate");
  TTestResult out;
  out.n = n;
  out.mean_difference = mean;
  out.sd_difference = sd;
  out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  out.p_value = t_two_sided_p(out.t, n - 1.0);
  return out;
}

}  // namespace swabsim
