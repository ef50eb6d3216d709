#include "core/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rfts::numkit {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) {
  if (!std::isfinite(x)) {
    if (std::isnan(x)) throw std::invalid_argument("normal_cdf: x is NaN");
    return x > 0 ? 1.0 : 0.0;
  }
  return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie in (0,1), got " +
                                std::to_string(p));

  // Acklam's rational approximation (relative error ~1e-9 before refinement).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against the accurate cdf.
  const double e = normal_cdf(x) - p;
  const double u = e / normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double binomial_cdf(std::int64_t k, std::int64_t m, double p) {
  if (m < 1) throw std::invalid_argument("binomial_cdf: m must be positive");
  if (k > m)
    throw std::invalid_argument("binomial_cdf: k = " + std::to_string(k) +
                                " exceeds m = " + std::to_string(m));
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binomial_cdf: p must lie in [0,1]");
  if (k < 0) return 0.0;
  if (k == m) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;

  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log1p(static_cast<long double>(-p));
  auto log_pmf = [&](std::int64_t j) -> long double {
    return lgammal(static_cast<long double>(m) + 1) -
           lgammal(static_cast<long double>(j) + 1) -
           lgammal(static_cast<long double>(m - j) + 1) +
           static_cast<long double>(j) * lp + static_cast<long double>(m - j) * lq;
  };

  // Sum the smaller tail, anchored at its largest term so the ratio
  // recurrence only ever multiplies by factors < 1.
  const long double odds_down = (1.0L - p) / p;  // pmf(j-1)/pmf(j) factor
  const long double odds_up = p / (1.0L - p);    // pmf(j+1)/pmf(j) factor
  long double result;
  if (static_cast<long double>(k) <= static_cast<long double>(m) * p) {
    long double s = 1.0L, t = 1.0L;
    for (std::int64_t j = k; j >= 1; --j) {
      t *= static_cast<long double>(j) / static_cast<long double>(m - j + 1) * odds_down;
      s += t;
      if (t < s * 1e-22L) break;
    }
    result = expl(log_pmf(k) + logl(s));
  } else {
    long double s = 1.0L, t = 1.0L;
    for (std::int64_t j = k + 1; j < m; ++j) {
      t *= static_cast<long double>(m - j) / static_cast<long double>(j + 1) * odds_up;
      s += t;
      if (t < s * 1e-22L) break;
    }
    result = 1.0L - expl(log_pmf(k + 1) + logl(s));
  }
  return std::clamp(static_cast<double>(result), 0.0, 1.0);
}

std::int64_t binomial_quantile(double alpha, std::int64_t m, double p) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("binomial_quantile: alpha must lie in (0,1)");
  if (m < 1) throw std::invalid_argument("binomial_quantile: m must be positive");
  std::int64_t lo = 0, hi = m;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (binomial_cdf(mid, m, p) >= alpha)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0))
    throw std::invalid_argument("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, double nu) {
  if (!(nu > 0.0))
    throw std::invalid_argument("student_t_cdf: nu must be positive");
  if (std::isnan(x)) throw std::invalid_argument("student_t_cdf: x is NaN");
  if (x == 0.0) return 0.5;
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double half_tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, nu / (nu + x * x));
  return x > 0 ? 1.0 - half_tail : half_tail;
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("gamma_p: a must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  constexpr int kMaxIter = 500;
  constexpr double kEps = 3e-16;
  const double lga = std::lgamma(a);
  if (x < a + 1.0) {
    // series representation
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * kEps)
        return sum * std::exp(-x + a * std::log(x) - lga);
    }
  } else {
    // continued fraction for Q(a,x)
    constexpr double kFpMin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / kFpMin, d = 1.0 / b, h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
      const double an = -i * (i - a);
      b += 2.0;
      d = an * d + b;
      if (std::fabs(d) < kFpMin) d = kFpMin;
      c = b + an / c;
      if (std::fabs(c) < kFpMin) c = kFpMin;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) < kEps)
        return 1.0 - h * std::exp(-x + a * std::log(x) - lga);
    }
  }
  throw std::runtime_error("gamma_p: no convergence");
}

double chi_squared_cdf(double x, double k) { return gamma_p(0.5 * k, 0.5 * x); }

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace rfts::numkit
