#include "sarmruin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "sarmruin/errors.hpp"

namespace sarmruin::quad {
namespace {

// Kronrod abscissae and weights (QUADPACK qk21); odd entries are Gauss nodes.
constexpr double kNodes[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kKronrod[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208395026776, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kGauss[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod21(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::fabs(half);

  const double fc = f(center);
  double res_gauss = 0.0;
  double res_kronrod = fc * kKronrod[10];
  double res_abs = std::fabs(res_kronrod);
  double fv1[10], fv2[10];

  for (int j = 0; j < 10; ++j) {
    const double dx = half * kNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    if (!std::isfinite(f1) || !std::isfinite(f2)) {
      throw NumericalError("quadrature: integrand is not finite near x = " +
                           std::to_string(std::isfinite(f1) ? center + dx : center - dx));
    }
    fv1[j] = f1;
    fv2[j] = f2;
    res_kronrod += kKronrod[j] * (f1 + f2);
    res_abs += kKronrod[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) res_gauss += kGauss[j / 2] * (f1 + f2);
  }
  if (!std::isfinite(fc)) throw NumericalError("quadrature: integrand is not finite at the midpoint");

  const double mean = 0.5 * res_kronrod;
  double res_asc = kKronrod[10] * std::fabs(fc - mean);
  for (int j = 0; j < 10; ++j) res_asc += kKronrod[j] * (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));

  const double value = res_kronrod * half;
  res_abs *= abs_half;
  res_asc *= abs_half;
  double error = std::fabs((res_kronrod - res_gauss) * half);
  if (res_asc != 0.0 && error != 0.0) error = res_asc * std::min(1.0, std::pow(200.0 * error / res_asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  if (res_abs > tiny / (50.0 * eps)) error = std::max(50.0 * eps * res_abs, error);
  return {a, b, value, error};
}

}  // namespace

Result integrate(const Integrand& f, std::span<const double> points, const Options& opts) {
  if (points.size() < 2) throw DomainError("quadrature: need at least two points");
  if (!std::is_sorted(points.begin(), points.end())) throw DomainError("quadrature: breakpoints must be sorted");

  std::priority_queue<Segment> heap;
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    if (points[k + 1] == points[k]) continue;
    Segment s = kronrod21(f, points[k], points[k + 1]);
    total += s.value;
    total_error += s.error;
    heap.push(s);
  }

  std::size_t splits = 0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  while (total_error > std::max(opts.abs_tol, opts.rel_tol * std::fabs(total))) {
    if (heap.empty()) break;
    if (splits >= opts.max_subdivisions) {
      throw NumericalError("quadrature: no convergence after " + std::to_string(splits) +
                           " subdivisions (estimate " + std::to_string(total) + ", error " +
                           std::to_string(total_error) + ")");
    }
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (std::fabs(worst.b - worst.a) <= 4.0 * eps * std::max(std::fabs(mid), eps)) {
      throw NumericalError("quadrature: interval collapsed near x = " + std::to_string(mid) +
                           " before reaching tolerance");
    }
    heap.pop();
    const Segment left = kronrod21(f, worst.a, mid);
    const Segment right = kronrod21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }

  // Re-sum to shed the drift of the incremental updates.
  double value = 0.0;
  double error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, splits};
}

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
  const double pts[2] = {a, b};
  return integrate(f, std::span<const double>(pts), opts);
}

Result integrate_to_infinity(const Integrand& f, double a, const Options& opts) {
  auto mapped = [&](double t) {
    const double s = 1.0 - t;
    return f(a + t / s) / (s * s);
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

Result integrate_real_line(const Integrand& f, const Options& opts) {
  auto mapped = [&](double t) {
    const double s = 1.0 - t * t;
    return f(t / s) * (1.0 + t * t) / (s * s);
  };
  return integrate(mapped, -1.0, 1.0, opts);
}

}  // namespace sarmruin::quad
