#include "qgfid/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>

namespace qgfid {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double real_gprime(double x, QParam q, const SeriesControl& ctrl) {
  return g_q_jet(cplx(x, 0.0), q, ctrl).first.real();
}

// Clockwise rotation, in (0, 2π], taking direction angle `from` to `to`.
double clockwise_turn(double from, double to) {
  double a = std::fmod(from - to, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a;
}

struct Landing {
  cplx w;
  double t = 0.0;
  cplx direction;
};

class Tracer {
 public:
  Tracer(QParam q, double t_max, double tol, const TraceOptions& opt, const SeriesControl& ctrl)
      : q_(q), t_max_(t_max), tol_(tol), opt_(opt), ctrl_(ctrl) {
    trace_.q = q.value();
    trace_.trace_tol = tol;
  }

  PathTrace run() {
    cplx w = 0.0;
    double t = 0.0;
    cplx heading = 1.0;
    push(t, w);
    double h = opt_.relative_step * 0.1;
    while (t < t_max_) {
      if (std::abs(w) > opt_.escape_radius) {
        trace_.stop = PathTrace::Stop::Escaped;
        return std::move(trace_);
      }
      if (static_cast<int>(trace_.size()) >= opt_.max_points) {
        throw StallError("trace_gamma: point budget exhausted before t_max");
      }
      const GqJet jet = g_q_jet(w, q_, ctrl_);
      h = std::min(h, opt_.relative_step * std::max(std::abs(w), 0.1));

      if (auto landing = try_critical(w, t, jet, heading, h)) {
        w = landing->w;
        t = landing->t;
        heading = landing->direction;
        push(t, w);
        continue;
      }

      const double dt = std::min(h * std::abs(jet.first), t_max_ - t);
      const double t_next = (t_max_ - t - dt <= 1e-15 * t_max_) ? t_max_ : t + dt;
      const cplx predicted = w + (t_next - t) / jet.first;
      cplx corrected;
      if (correct(predicted, t_next, &corrected) &&
          std::abs(corrected - predicted) <= 0.3 * std::abs(predicted - w)) {
        heading = corrected - w;
        w = corrected;
        t = t_next;
        if (w.real() < -1e-12 || w.imag() > 1e-12) {
          throw NumericFailure("trace_gamma: trace left the closed fourth quadrant at t = " +
                               std::to_string(t));
        }
        push(t, w);
        h *= 1.5;
        continue;
      }
      h *= 0.5;
      if (h < 1e-13 * std::max(1.0, std::abs(w))) {
        throw StallError("trace_gamma: step control cannot hold trace_tol near t = " +
                         std::to_string(t));
      }
    }
    trace_.stop = PathTrace::Stop::ReachedTMax;
    return std::move(trace_);
  }

 private:
  void push(double t, cplx w) {
    trace_.parameters.push_back(t);
    trace_.points.push_back(w);
    trace_.residuals.push_back(std::abs(g_q(w, q_, ctrl_) - t));
  }

  // Newton on g_q(w) = t; succeeds once the residual is well inside trace_tol.
  bool correct(cplx guess, double t, cplx* out) const {
    cplx v = guess;
    for (int it = 0; it < 10; ++it) {
      const GqJet jet = g_q_jet(v, q_, ctrl_);
      const double residual = std::abs(jet.value - t);
      if (residual <= 1e-4 * tol_) {
        *out = v;
        return true;
      }
      if (std::abs(jet.first) < 1e-14) return false;
      const cplx step = (jet.value - t) / jet.first;
      v -= step;
      if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(v))) {
        const double r = std::abs(g_q(v, q_, ctrl_) - t);
        *out = v;
        return r <= tol_;
      }
    }
    return false;
  }

  // If a critical point of g_q lies on the curve just ahead, jump onto it and
  // leave along the "first to the right" branch.
  std::optional<Landing> try_critical(cplx w, double t, const GqJet& jet, cplx heading,
                                      double& h) {
    const bool flat = std::abs(jet.first) < opt_.critical_threshold;
    if (!flat && std::abs(jet.second) == 0.0) return std::nullopt;
    const cplx estimate = flat ? w : w - jet.first / jet.second;
    if (!flat && std::abs(estimate - w) > 2.0 * h) return std::nullopt;

    cplx c = estimate;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const GqJet cj = g_q_jet(c, q_, ctrl_);
      if (std::abs(cj.second) == 0.0) break;
      const cplx step = cj.first / cj.second;
      c -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(c))) {
        converged = true;
        break;
      }
    }
    if (!converged || std::abs(c - w) > 4.0 * h + std::abs(estimate - w)) return std::nullopt;
    for (const cplx& seen : trace_.critical_points) {
      if (std::abs(seen - c) <= 1e-10 * std::max(1.0, std::abs(c))) return std::nullopt;
    }

    const cplx tc = g_q(c, q_, ctrl_);
    const bool on_curve = std::abs(tc.imag()) <= tol_ && tc.real() >= t - tol_;
    if (!on_curve || tc.real() > t_max_) {
      // Off-curve critical point nearby: approach it with smaller steps.
      h = std::min(h, 0.25 * std::abs(c - w));
      return std::nullopt;
    }
    push(tc.real(), c);
    trace_.critical_points.push_back(c);
    const cplx incoming = std::abs(c - w) > 0.0 ? c - w : heading;
    return branch_out(c, tc.real(), incoming);
  }

  Landing branch_out(cplx c, double tc, cplx incoming) {
    // Taylor coefficients a_j ρ^j of g_q(c + ρ e^{iθ}) - tc from a ring of samples.
    constexpr int kSamples = 64;
    constexpr int kOrders = 8;
    const double rho = 0.02 * std::max(std::abs(c), 0.5);
    std::array<cplx, kSamples> values{};
    for (int m = 0; m < kSamples; ++m) {
      values[m] = g_q(c + std::polar(rho, kTwoPi * m / kSamples), q_, ctrl_) - tc;
    }
    std::array<cplx, kOrders + 1> scaled{};
    double largest = 0.0;
    for (int j = 1; j <= kOrders; ++j) {
      cplx acc = 0.0;
      for (int m = 0; m < kSamples; ++m) acc += values[m] * std::polar(1.0, -kTwoPi * j * m / kSamples);
      scaled[j] = acc / static_cast<double>(kSamples);
      largest = std::max(largest, std::abs(scaled[j]));
    }
    int order = 0;
    for (int j = 2; j <= kOrders; ++j) {
      if (std::abs(scaled[j]) >= 1e-6 * largest) {
        order = j;
        break;
      }
    }
    if (order == 0 || std::abs(scaled[1]) > 1e-6 * largest) {
      throw StallError("trace_gamma: could not resolve the branch structure at a critical point");
    }

    const double arg_lead = std::arg(scaled[order]);
    const double in_angle = std::arg(incoming);
    double best_turn = 10.0;
    double best_angle = 0.0;
    for (int m = 0; m < order; ++m) {
      const double angle = (-arg_lead + kTwoPi * m) / order;
      const double turn = clockwise_turn(in_angle, angle);
      if (turn < best_turn) {
        best_turn = turn;
        best_angle = angle;
      }
    }

    const double offset = 0.25 * rho;
    const double lead = std::abs(scaled[order]) / std::pow(rho, order);
    const double t0 = tc + lead * std::pow(offset, order);
    const cplx guess = c + std::polar(offset, best_angle);
    cplx landed;
    if (!correct(guess, t0, &landed)) {
      throw StallError("trace_gamma: corrector failed leaving a critical point");
    }
    const double deviation = std::abs(std::remainder(std::arg(landed - c) - best_angle, kTwoPi));
    if (deviation > kPi / (2.0 * order)) {
      throw StallError("trace_gamma: corrector slid onto a neighbouring branch");
    }
    return {landed, t0, std::polar(1.0, best_angle)};
  }

  QParam q_;
  double t_max_;
  double tol_;
  TraceOptions opt_;
  SeriesControl ctrl_;
  PathTrace trace_;
};

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double orient(cplx a, cplx b, cplx c) { return cross(b - a, c - a); }

bool within_box(cplx a, cplx b, cplx p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

bool segments_intersect(cplx p1, cplx p2, cplx p3, cplx p4) {
  if (std::max(p1.real(), p2.real()) < std::min(p3.real(), p4.real()) ||
      std::max(p3.real(), p4.real()) < std::min(p1.real(), p2.real()) ||
      std::max(p1.imag(), p2.imag()) < std::min(p3.imag(), p4.imag()) ||
      std::max(p3.imag(), p4.imag()) < std::min(p1.imag(), p2.imag())) {
    return false;
  }
  const double d1 = orient(p3, p4, p1);
  const double d2 = orient(p3, p4, p2);
  const double d3 = orient(p1, p2, p3);
  const double d4 = orient(p1, p2, p4);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && within_box(p3, p4, p1)) || (d2 == 0 && within_box(p3, p4, p2)) ||
         (d3 == 0 && within_box(p1, p2, p3)) || (d4 == 0 && within_box(p1, p2, p4));
}

class WindingCounter {
 public:
  WindingCounter(QParam q, cplx target, const SeriesControl& ctrl)
      : q_(q), target_(target), ctrl_(ctrl) {}

  cplx f(cplx w) const {
    const cplx v = g_q(w, q_, ctrl_) - target_;
    if (std::abs(v) < 1e-8) {
      throw OnContourZero("count_zeros_contour: g_q - target vanishes near w = (" +
                          std::to_string(w.real()) + ", " + std::to_string(w.imag()) + ")");
    }
    return v;
  }

  double turn(cplx a, cplx b, cplx fa, cplx fb, int depth) const {
    const double step = std::arg(fb / fa);
    if (std::fabs(step) < 0.5 * kPi) return step;
    if (depth >= 48) {
      throw OnContourZero("count_zeros_contour: argument jump unresolved by refinement");
    }
    const cplx mid = 0.5 * (a + b);
    const cplx fm = f(mid);
    return turn(a, mid, fa, fm, depth + 1) + turn(mid, b, fm, fb, depth + 1);
  }

 private:
  QParam q_;
  cplx target_;
  SeriesControl ctrl_;
};

}  // namespace

std::vector<double> real_critical_points(QParam q, double search_bound, const SeriesControl& ctrl) {
  if (!(search_bound > 0.0)) throw DomainError("real_critical_points: search_bound must be positive");
  std::vector<double> roots;
  if (q.value() == 0.0) throw NoneFound("real_critical_points: g_0' is identically 1");
  const int cells = std::clamp(static_cast<int>(std::ceil(search_bound / 1e-3)), 2000, 400000);
  const double dx = search_bound / cells;
  double x_prev = 0.0;
  double f_prev = real_gprime(0.0, q, ctrl);
  for (int i = 1; i <= cells; ++i) {
    const double x = i * dx;
    const double f = real_gprime(x, q, ctrl);
    if (f == 0.0) {
      roots.push_back(x);
    } else if (f_prev != 0.0 && std::signbit(f) != std::signbit(f_prev)) {
      double lo = x_prev, hi = x;
      double f_lo = f_prev;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = real_gprime(mid, q, ctrl);
        if (std::signbit(fm) == std::signbit(f_lo)) {
          lo = mid;
          f_lo = fm;
        } else {
          hi = mid;
        }
      }
      double root = 0.5 * (lo + hi);
      for (int it = 0; it < 3; ++it) {
        const GqJet jet = g_q_jet(cplx(root, 0.0), q, ctrl);
        if (jet.second.real() == 0.0) break;
        const double next = root - jet.first.real() / jet.second.real();
        if (!(next >= x_prev && next <= x)) break;
        root = next;
      }
      roots.push_back(root);
    }
    x_prev = x;
    f_prev = f;
  }
  if (roots.empty()) {
    throw NoneFound("real_critical_points: no zero of g_q' in (0, " + std::to_string(search_bound) +
                    "]");
  }
  return roots;
}

double PathTrace::max_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

void PathTrace::write_csv(std::ostream& out) const {
  out << "t,re,im,residual\n" << std::setprecision(17);
  for (std::size_t j = 0; j < points.size(); ++j) {
    out << parameters[j] << ',' << points[j].real() << ',' << points[j].imag() << ','
        << residuals[j] << '\n';
  }
}

PathTrace trace_gamma(QParam q, double t_max, double trace_tol, const TraceOptions& options,
                      const SeriesControl& ctrl) {
  if (q.value() <= 0.0) {
    throw DomainError("trace_gamma: requires q > 0 (at q = 0 the preimage of [0, ∞) is [0, ∞))");
  }
  if (!(t_max > 0.0)) throw DomainError("trace_gamma: t_max must be positive");
  if (!(trace_tol > 0.0)) throw DomainError("trace_gamma: trace_tol must be positive");
  return Tracer(q, t_max, trace_tol, options, ctrl).run();
}

Contour Contour::from_vertices(std::vector<cplx> v) {
  if (v.size() < 4) throw DomainError("Contour: need at least three distinct vertices");
  if (v.front() != v.back()) throw DomainError("Contour: first and last vertex must coincide");
  const std::size_t edges = v.size() - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    if (v[i] == v[i + 1]) throw DomainError("Contour: repeated consecutive vertex");
  }
  for (std::size_t i = 0; i < edges; ++i) {
    for (std::size_t j = i + 2; j < edges; ++j) {
      if (i == 0 && j == edges - 1) continue;  // share the closing vertex
      if (segments_intersect(v[i], v[i + 1], v[j], v[j + 1])) {
        throw DomainError("Contour: edges " + std::to_string(i) + " and " + std::to_string(j) +
                          " intersect");
      }
    }
  }
  Contour c(std::move(v));
  if (!(c.signed_area() > 0.0)) throw DomainError("Contour: orientation must be counterclockwise");
  return c;
}

Contour Contour::circle(cplx center, double radius, int segments) {
  if (segments < 3 || !(radius > 0.0)) throw DomainError("Contour::circle: bad radius or segment count");
  std::vector<cplx> v;
  v.reserve(segments + 1);
  for (int j = 0; j < segments; ++j) v.push_back(center + std::polar(radius, kTwoPi * j / segments));
  v.push_back(v.front());
  return from_vertices(std::move(v));
}

double Contour::signed_area() const {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) area += cross(vertices_[i], vertices_[i + 1]);
  return 0.5 * area;
}

int count_zeros_contour(QParam q, const Contour& contour, cplx target, const SeriesControl& ctrl) {
  const WindingCounter counter(q, target, ctrl);
  const auto& v = contour.vertices();
  double total = 0.0;
  cplx f_prev = counter.f(v.front());
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const cplx f_next = counter.f(v[i + 1]);
    total += counter.turn(v[i], v[i + 1], f_prev, f_next, 0);
    f_prev = f_next;
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::fabs(turns - rounded) > 1e-6) {
    throw NumericFailure("count_zeros_contour: accumulated argument is not a whole number of turns");
  }
  return static_cast<int>(rounded);
}

XqRegion build_xq_region(QParam q, const PathTrace& trace, const SeriesControl& ctrl) {
  if (trace.size() < 3 || !(trace.points.back().imag() < 0.0)) {
    throw DomainError("build_xq_region: trace must leave the real axis");
  }
  const std::vector<cplx>& pts = trace.points;
  const cplx end = pts.back();
  const double radius = std::abs(end);
  const double end_angle = std::arg(end);      // in (-π/2, 0)
  const double start_angle = -kPi - end_angle;  // angle of -conj(end)
  const double span = end_angle - start_angle;
  const int arc_segments = std::max(64, static_cast<int>(std::ceil(span / 2e-3)));

  std::vector<cplx> v;
  v.reserve(2 * pts.size() + arc_segments + 1);
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) v.push_back(*it);
  for (std::size_t j = 1; j < pts.size(); ++j) v.push_back(-std::conj(pts[j]));

  XqRegion region{Contour::circle(0.0, 1.0, 3)};
  region.t_end = trace.parameters.back();
  region.arc_min_modulus = region.t_end;
  for (int j = 1; j < arc_segments; ++j) {
    const cplx w = std::polar(radius, start_angle + span * j / arc_segments);
    v.push_back(w);
    region.arc_min_modulus = std::min(region.arc_min_modulus, std::abs(g_q(w, q, ctrl)));
  }
  v.push_back(end);
  region.boundary = Contour::from_vertices(std::move(v));
  region.target_radius = 0.9 * std::min(region.arc_min_modulus, region.t_end);
  return region;
}

InjectivityReport injectivity_witness(QParam q, const XqRegion& region, int samples,
                                      std::uint64_t seed, const SeriesControl& ctrl) {
  if (samples < 0) throw DomainError("injectivity_witness: negative sample count");
  InjectivityReport report;
  report.q = q.value();
  report.samples = samples;
  report.target_radius = region.target_radius;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    cplx v;
    do {
      v = std::polar(region.target_radius * std::sqrt(unit(rng)), -kPi * unit(rng));
    } while (!(v.imag() < 0.0));
    const int count = count_zeros_contour(q, region.boundary, v, ctrl);
    if (count != 1) report.violations.push_back({v, count});
  }
  return report;
}

}  // namespace qgfid
