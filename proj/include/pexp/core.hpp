#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>
#include <random>

namespace pexp {

// Raised for parameter or argument values outside the admissible set.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an iterative numeric routine misses its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial, double error_estimate)
      : std::runtime_error(what), partial_(partial), error_estimate_(error_estimate) {}
  double partial() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double partial_;
  double error_estimate_;
};

// A bound was requested with its two distributions in the wrong rate order.
class OrderingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The hypotheses of a bound are not met by the supplied parameters.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(name) + " must be positive and finite, got " + fmt(v));
}

// 1 - e^{-t} without cancellation for small t.
inline double one_minus_exp_neg(double t) { return -std::expm1(-t); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Random numbers
//
// Uniform variates are assembled from the top 53 bits of a 64-bit engine, so
// draws are identical across standard library implementations.

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream number `index` derived from a base seed.
inline Engine derive_engine(std::uint64_t seed, std::uint64_t index) {
  return Engine(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

// Uniform on the open interval (0, 1).
template <class G>
double uniform_open(G& gen) {
  static_assert(G::max() - G::min() == std::numeric_limits<std::uint64_t>::max(),
                "a full 64-bit engine is required");
  const std::uint64_t bits = static_cast<std::uint64_t>(gen() - G::min()) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

template <class G>
double exponential(G& gen, double rate) {
  return -std::log(uniform_open(gen)) / rate;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature (7-point Gauss, 15-point Kronrod)

struct QuadTolerance {
  double abs = 1e-10;
  double rel = 1e-8;
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

struct Segment {
  double a, b, value, error;
};

template <class F>
Segment gk15(F& f, double a, double b) {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  std::array<double, 7> fv1{}, fv2{};
  const double fc = f(centr);
  double resg = fc * wg[3];
  double resk = fc * wgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * xgk[jtw];
    const double f1 = f(centr - absc), f2 = f(centr + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += wg[j] * (f1 + f2);
    resk += wgk[jtw] * (f1 + f2);
    resabs += wgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * xgk[jtwm1];
    const double f1 = f(centr - absc), f2 = f(centr + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += wgk[jtwm1] * (f1 + f2);
    resabs += wgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  const double reskh = resk * 0.5;
  double resasc = wgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  const double result = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double abserr = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * epmach)) abserr = std::max(epmach * 50.0 * resabs, abserr);
  return {a, b, result, abserr};
}

}  // namespace detail

// Integrates f over [a, b]. Never throws; check `converged`.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadTolerance& tol = {}) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  auto by_error = [](const detail::Segment& l, const detail::Segment& r) { return l.error < r.error; };
  std::vector<detail::Segment> heap;
  heap.reserve(64);
  heap.push_back(detail::gk15(f, a, b));
  double total = heap.front().value, err = heap.front().error;
  auto done = [&] { return err <= std::max(tol.abs, tol.rel * std::abs(total)); };
  while (!done() && static_cast<int>(heap.size()) < tol.max_intervals) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted at machine precision
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    const detail::Segment l = detail::gk15(f, worst.a, mid);
    const detail::Segment r = detail::gk15(f, mid, worst.b);
    heap.push_back(l);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(r);
    std::push_heap(heap.begin(), heap.end(), by_error);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    if (heap.size() % 64 == 0 || done()) {  // re-sum to cancel drift
      total = 0.0;
      err = 0.0;
      for (const auto& s : heap) {
        total += s.value;
        err += s.error;
      }
    }
  }
  out.value = total;
  out.abs_error = err;
  out.intervals = static_cast<int>(heap.size());
  out.converged = done();
  return out;
}

// Integrates over consecutive breakpoints; tolerance is shared across pieces.
template <class F>
QuadResult integrate_pieces(F&& f, const std::vector<double>& points, const QuadTolerance& tol = {}) {
  QuadResult out;
  out.converged = true;
  if (points.size() < 2) return out;
  const double pieces = static_cast<double>(points.size() - 1);
  QuadTolerance sub = tol;
  sub.abs = tol.abs / pieces;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const QuadResult r = integrate(f, points[i], points[i + 1], sub);
    out.value += r.value;
    out.abs_error += r.abs_error;
    out.intervals += r.intervals;
    out.converged = out.converged && r.converged;
  }
  return out;
}

// Throwing variant used where a silent inaccurate answer is worse than none.
template <class F>
double integrate_or_throw(F&& f, double a, double b, const QuadTolerance& tol, const char* what) {
  const QuadResult r = integrate(f, a, b, tol);
  if (!r.converged)
    throw ConvergenceError(std::string(what) + ": quadrature did not reach abs " + detail::fmt(tol.abs) + " / rel " +
                               detail::fmt(tol.rel) + " (estimate " + detail::fmt(r.abs_error) + ")",
                           r.value, r.abs_error);
  return r.value;
}

// ---------------------------------------------------------------------------
// Misc helpers

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work item i always
// does the same computation, so results do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Log-log least-squares slope.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double d = static_cast<double>(m);
  return (d * sxy - sx * sy) / (d * sxx - sx * sx);
}

}  // namespace pexp
