#include "bridgelab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "bridgelab/errors.hpp"

namespace bridgelab {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss nodes.
constexpr std::array<double, 11> kXgk21 = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk21 = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980468530, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg10 = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr std::array<double, 8> kXgk15 = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk15 = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
};

struct ByError {
  bool operator()(const Segment& a, const Segment& b) const {
    return a.error < b.error;
  }
};

// QUADPACK qk21 including its error-estimate transform.
Segment gauss_kronrod21(const ScalarFunction& f, double lo, double hi) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kTiny = std::numeric_limits<double>::min();
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kWgk21[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  std::array<double, 10> f1{};
  std::array<double, 10> f2{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk21[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kWgk21[j] * pair;
    abs_sum += kWgk21[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kWg10[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk21[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    asc += kWgk21[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double value = kronrod * half;
  abs_sum *= std::abs(half);
  asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  if (abs_sum > kTiny / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * abs_sum, err);
  }
  return {lo, hi, value, err};
}

double tolerance_for(const QuadratureConfig& quad, double value) {
  return std::max(quad.abs_tol, quad.rel_tol * std::abs(value));
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw DomainError("quadrature tolerances must be positive");
  }
  if (max_subdivisions < 1) {
    throw DomainError("quadrature needs at least one subdivision");
  }
  if (!(truncation_radius > 0.0)) {
    throw DomainError("quadrature truncation radius must be positive");
  }
}

QuadratureConfig QuadratureConfig::tightened(double factor) const {
  QuadratureConfig out = *this;
  out.abs_tol *= factor;
  out.rel_tol *= factor;
  return out;
}

double gauss_kronrod15(const ScalarFunction& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = kWgk15[7] * f(center);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk15[j];
    sum += kWgk15[j] * (f(center - dx) + f(center + dx));
  }
  return sum * half;
}

QuadratureResult integrate(const ScalarFunction& f, double lo, double hi,
                           const QuadratureConfig& quad,
                           std::span<const double> breakpoints) {
  quad.validate();
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("integrate: interval endpoints must be finite");
  }
  QuadratureResult result;
  if (lo == hi) return result;
  const double sign = hi > lo ? 1.0 : -1.0;
  if (hi < lo) std::swap(lo, hi);

  std::vector<double> cuts{lo, hi};
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Segment s = gauss_kronrod21(f, cuts[i], cuts[i + 1]);
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }
  int subdivisions = static_cast<int>(cuts.size()) - 1;
  int evaluations = 21 * subdivisions;

  const double min_width = 1e-14 * std::max(std::abs(lo), std::abs(hi));
  bool roundoff_limited = false;
  while (total_err > tolerance_for(quad, total) &&
         subdivisions < quad.max_subdivisions) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (worst.hi - worst.lo <= min_width || mid <= worst.lo || mid >= worst.hi) {
      roundoff_limited = true;
      break;
    }
    heap.pop();
    const Segment left = gauss_kronrod21(f, worst.lo, mid);
    const Segment right = gauss_kronrod21(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
    evaluations += 42;
  }

  // Re-sum to shed drift from the running updates.
  total = 0.0;
  total_err = 0.0;
  std::vector<Segment> segments;
  segments.reserve(heap.size());
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  for (const Segment& s : segments) {
    total += s.value;
    total_err += s.error;
  }

  result.value = sign * total;
  result.error_estimate = total_err;
  result.subdivisions = subdivisions;
  result.evaluations = evaluations;
  result.converged = total_err <= tolerance_for(quad, total);
  if (!std::isfinite(total)) {
    result.converged = false;
  }
  if (!result.converged && !roundoff_limited) {
    throw QuadratureError("integrate: subdivision limit exhausted", result);
  }
  if (!result.converged) {
    throw QuadratureError("integrate: roundoff prevents further subdivision",
                          result);
  }
  return result;
}

QuadratureResult integrate_halfline(const ScalarFunction& f,
                                    const QuadratureConfig& quad, double center,
                                    double width) {
  quad.validate();
  if (!(width > 0.0) || !std::isfinite(center)) {
    throw DomainError("integrate_halfline: width must be positive");
  }
  center = std::max(center, 0.0);
  const double radius = center + quad.truncation_radius * width;
  std::vector<double> breaks;
  for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
    breaks.push_back(center + k * width);
  }
  QuadratureResult bulk = integrate(f, 0.0, radius, quad, breaks);

  double lo = radius;
  double piece_len = std::max(radius, width);
  double tail = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double hi = lo + piece_len;
    QuadratureResult piece = integrate(f, lo, hi, quad);
    bulk.value += piece.value;
    bulk.error_estimate += piece.error_estimate;
    bulk.subdivisions += piece.subdivisions;
    bulk.evaluations += piece.evaluations;
    tail = std::abs(piece.value);
    if (tail <= tolerance_for(quad, bulk.value) * 1e-3) break;
    lo = hi;
    piece_len *= 2.0;
    if (k == 59) {
      bulk.converged = false;
      bulk.tail_estimate = tail;
      throw QuadratureError("integrate_halfline: tail does not decay", bulk);
    }
  }
  bulk.tail_estimate = tail;
  return bulk;
}

namespace {

QuadratureResult integrate_axes(const VectorFunction& f,
                                std::span<const WindowAxis> axes,
                                std::vector<double>& point, std::size_t depth,
                                const QuadratureConfig& quad) {
  const WindowAxis& axis = axes[depth];
  if (depth + 1 == axes.size()) {
    return integrate(
        [&](double v) {
          point[depth] = v;
          return f(point);
        },
        axis.lo, axis.hi, quad, axis.breakpoints);
  }
  const QuadratureConfig inner = quad.tightened(0.1);
  int inner_evals = 0;
  QuadratureResult outer = integrate(
      [&](double v) {
        point[depth] = v;
        const QuadratureResult r = integrate_axes(f, axes, point, depth + 1, inner);
        inner_evals += r.evaluations;
        return r.value;
      },
      axis.lo, axis.hi, quad, axis.breakpoints);
  outer.evaluations += inner_evals;
  return outer;
}

}  // namespace

QuadratureResult integrate_box(const VectorFunction& f,
                               std::span<const WindowAxis> axes,
                               const QuadratureConfig& quad) {
  if (axes.empty()) {
    throw DomainError("integrate_box: need at least one axis");
  }
  std::vector<double> point(axes.size(), 0.0);
  return integrate_axes(f, axes, point, 0, quad);
}

}  // namespace bridgelab
