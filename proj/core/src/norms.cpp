#include "sobexlab/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

#include "sobexlab/errors.hpp"
#include "sobexlab/logspace.hpp"
#include "sobexlab/quadrature.hpp"
#include "sobexlab/rng.hpp"

namespace sobexlab::norms {

using geometry::CollarSub;
using geometry::RegionKind;
namespace quad_rules = sobexlab::quadrature;

std::string method_name(QuadMethod m) {
  return m == QuadMethod::TensorCylindrical ? "tensor" : "monte-carlo";
}

QuadMethod parse_method(const std::string& name) {
  if (name == "tensor" || name == "tensor-cylindrical")
    return QuadMethod::TensorCylindrical;
  if (name == "monte-carlo" || name == "mc") return QuadMethod::MonteCarlo;
  throw ConfigError("unknown quadrature method '" + name + "'");
}

namespace {

int thread_cap() {
  if (const char* env = std::getenv("SOBEXLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, count); deterministic regardless of thread count
// because every index writes only its own slot.
void parallel_indices(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const int threads = std::min<std::size_t>(thread_cap(), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::size_t i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double checked_eval(const Integrand& f, const Point& x) {
  const double v = f(x);
  if (!std::isfinite(v))
    throw NumericalError("non-finite integrand sample at " + x.str());
  return v;
}

struct Accum {
  double linear = 0;
  Log2Acc lg;
  long long evals = 0;
  void add(double term) {
    linear += term;
    lg.add_linear(term);
    ++evals;
  }
};

// Angular directions in the base plane for dimension d = n-1 with weights
// summing to |S^{d-1}|.  d = 1: two points; d = 2: periodic trapezoid;
// d >= 3: single direction, valid for axisymmetric integrands.
struct AngularRule {
  std::vector<std::array<double, 2>> dir;  // first two base coordinates
  std::vector<double> weight;
};

AngularRule angular_rule(int d, int nodes) {
  AngularRule rule;
  if (d == 1) {
    rule.dir = {{1, 0}, {-1, 0}};
    rule.weight = {1, 1};
  } else if (d == 2) {
    for (int j = 0; j < nodes; ++j) {
      const double th = 2 * M_PI * (j + 0.5) / nodes;
      rule.dir.push_back({std::cos(th), std::sin(th)});
      rule.weight.push_back(2 * M_PI / nodes);
    }
  } else {
    rule.dir = {{1, 0}};
    rule.weight = {geometry::sphere_area(d)};
  }
  return rule;
}

QuadratureSpec halved(const QuadratureSpec& q) {
  QuadratureSpec h = q;
  h.radial_nodes = std::max(2, q.radial_nodes / 2);
  h.axial_nodes = std::max(2, q.axial_nodes / 2);
  h.angular_nodes = std::max(4, q.angular_nodes / 2);
  h.graded_panels = std::max(3, q.graded_panels / 2);
  h.estimate_error = false;
  return h;
}

IntegResult finish(const Accum& acc) {
  IntegResult r;
  r.value = acc.linear;
  r.log2_value = acc.lg.log2_total();
  r.evals = acc.evals;
  return r;
}

// ---------------------------------------------------------------------------
// Box integration.
// ---------------------------------------------------------------------------

IntegResult integrate_box_once(const Integrand& f, const BoxShape& box,
                               const QuadratureSpec& quad,
                               std::uint64_t stream) {
  const int n = box.lo.dim();
  Accum acc;
  if (quad.method == QuadMethod::TensorCylindrical) {
    std::vector<std::vector<double>> xs(n), ws(n);
    std::vector<std::size_t> sizes(n);
    for (int i = 0; i < n; ++i) {
      quad_rules::interval_rule(box.lo[i], box.hi[i], quad.axial_nodes, xs[i],
                                ws[i]);
      sizes[i] = xs[i].size();
    }
    std::vector<std::size_t> idx(n, 0);
    Point x = Point::zero(n);
    while (true) {
      double w = 1;
      for (int i = 0; i < n; ++i) {
        x[i] = xs[i][idx[i]];
        w *= ws[i][idx[i]];
      }
      acc.add(w * checked_eval(f, x));
      int c = n - 1;
      while (c >= 0 && ++idx[c] == sizes[c]) idx[c--] = 0;
      if (c < 0) break;
    }
  } else {
    const CounterRng rng(quad.seed, stream);
    double vol = 1;
    for (int i = 0; i < n; ++i) vol *= box.hi[i] - box.lo[i];
    double sum = 0, sumsq = 0;
    Point x = Point::zero(n);
    for (long long s = 0; s < quad.mc_samples; ++s) {
      for (int i = 0; i < n; ++i)
        x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * rng.uniform(s, i);
      const double v = checked_eval(f, x);
      sum += v;
      sumsq += v * v;
      ++acc.evals;
    }
    const double mean = sum / quad.mc_samples;
    acc.linear = vol * mean;
    acc.lg.add_linear(acc.linear);
    IntegResult r = finish(acc);
    const double var =
        std::max(0.0, sumsq / quad.mc_samples - mean * mean);
    r.stderr_ = vol * std::sqrt(var / quad.mc_samples);
    return r;
  }
  return finish(acc);
}

// ---------------------------------------------------------------------------
// Cylindrical shell integration.
// ---------------------------------------------------------------------------

// Blocked radial intervals along the ray base = center + s*dir (n = 3).
void blocked_intervals(const ShellShape& shell,
                       const std::array<double, 2>& dir, double s0, double s1,
                       std::vector<std::pair<double, double>>& blocked) {
  blocked.clear();
  for (const auto& band : shell.blocked) {
    const double dx = band.cx - shell.center[0];
    const double dy = band.cy - shell.center[1];
    const double along = dx * dir[0] + dy * dir[1];
    const double perp2 = dx * dx + dy * dy - along * along;
    auto chord = [&](double radius) -> std::pair<double, double> {
      const double disc = radius * radius - perp2;
      if (disc <= 0) return {1, 0};  // empty
      const double h = std::sqrt(disc);
      return {along - h, along + h};
    };
    const auto outer = chord(band.r_hi);
    if (outer.first > outer.second) continue;
    const auto inner = chord(band.r_lo);
    if (band.r_lo > 0 && inner.first <= inner.second) {
      blocked.emplace_back(outer.first, inner.first);
      blocked.emplace_back(inner.second, outer.second);
    } else {
      blocked.emplace_back(outer.first, outer.second);
    }
  }
  for (auto& b : blocked) {
    b.first = std::max(b.first, s0);
    b.second = std::min(b.second, s1);
  }
  std::erase_if(blocked, [](auto& b) { return b.first >= b.second; });
  std::sort(blocked.begin(), blocked.end());
}

bool point_blocked(const ShellShape& shell, const Point& x) {
  for (const auto& band : shell.blocked) {
    const double dx = x[0] - band.cx;
    const double dy = x[1] - band.cy;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d >= band.r_lo && d <= band.r_hi) return true;
  }
  return false;
}

IntegResult integrate_shell_once(const Integrand& f, const ShellShape& shell,
                                 int n, const QuadratureSpec& quad,
                                 std::uint64_t stream) {
  const int d = n - 1;
  Accum acc;
  if (quad.method == QuadMethod::TensorCylindrical) {
    if (d > 2 && !shell.blocked.empty())
      throw NumericalError("shell: clipping requires n = 3");
    const AngularRule ang = angular_rule(d, quad.angular_nodes);

    std::vector<double> zs, zw;
    if (shell.grade_axial) {
      auto panels =
          quad_rules::graded_panels(shell.z0, shell.z1, true, true,
                                    quad.graded_panels, quad.grading_ratio);
      quad_rules::composite_rule(panels, quad.axial_nodes, zs, zw);
    } else {
      quad_rules::interval_rule(shell.z0, shell.z1, quad.axial_nodes, zs, zw);
    }

    std::vector<std::pair<double, double>> blocked;
    std::vector<std::pair<double, double>> allowed;
    std::vector<double> ss, sw;
    Point x = Point::zero(n);
    for (std::size_t a = 0; a < ang.dir.size(); ++a) {
      blocked_intervals(shell, ang.dir[a], shell.s0, shell.s1, blocked);
      allowed.clear();
      double cursor = shell.s0;
      for (const auto& b : blocked) {
        if (b.first > cursor) allowed.emplace_back(cursor, b.first);
        cursor = std::max(cursor, b.second);
      }
      if (cursor < shell.s1) allowed.emplace_back(cursor, shell.s1);

      for (const auto& seg : allowed) {
        std::vector<quad_rules::Panel> panels;
        if (shell.grade_inner && seg.first == shell.s0) {
          panels = quad_rules::graded_panels(seg.first, seg.second, true, false,
                                             quad.graded_panels,
                                             quad.grading_ratio);
        } else {
          const double mid = 0.5 * (seg.first + seg.second);
          panels = {{seg.first, mid}, {mid, seg.second}};
        }
        quad_rules::composite_rule(panels, quad.radial_nodes, ss, sw);
        for (std::size_t i = 0; i < ss.size(); ++i) {
          const double s = ss[i];
          const double radial_w =
              sw[i] * std::pow(s, d - 1) * ang.weight[a];
          for (int c = 0; c < d; ++c) x[c] = shell.center[c];
          x[0] += s * ang.dir[a][0];
          if (d >= 2) x[1] += s * ang.dir[a][1];
          for (std::size_t z = 0; z < zs.size(); ++z) {
            x[n - 1] = zs[z];
            acc.add(radial_w * zw[z] * checked_eval(f, x));
          }
        }
      }
    }
    return finish(acc);
  }

  // Monte Carlo: exact power-law radial sampling, uniform axial.
  const CounterRng rng(quad.seed, stream);
  const double sd0 = std::pow(shell.s0, d), sd1 = std::pow(shell.s1, d);
  const double volume = geometry::unit_ball_volume(d) * (sd1 - sd0) *
                        (shell.z1 - shell.z0);
  double sum = 0, sumsq = 0;
  Point x = Point::zero(n);
  for (long long s = 0; s < quad.mc_samples; ++s) {
    const double u = rng.uniform(s, 0);
    const double rad = std::pow(sd0 + u * (sd1 - sd0), 1.0 / d);
    for (int c = 0; c < d; ++c) x[c] = shell.center[c];
    if (d == 1) {
      x[0] += (rng.uniform(s, 1) < 0.5 ? -1 : 1) * rad;
    } else if (d == 2) {
      const double th = 2 * M_PI * rng.uniform(s, 1);
      x[0] += rad * std::cos(th);
      x[1] += rad * std::sin(th);
    } else {
      double g[kMaxDim], norm2 = 0;
      for (int c = 0; c < d; ++c) {
        g[c] = rng.normal(s, c);
        norm2 += g[c] * g[c];
      }
      const double inv = rad / std::sqrt(norm2);
      for (int c = 0; c < d; ++c) x[c] += inv * g[c];
    }
    x[n - 1] = shell.z0 + (shell.z1 - shell.z0) * rng.uniform(s, 2);
    const double v = point_blocked(shell, x) ? 0.0 : checked_eval(f, x);
    sum += v;
    sumsq += v * v;
    ++acc.evals;
  }
  const double mean = sum / quad.mc_samples;
  acc.linear = volume * mean;
  acc.lg.add_linear(acc.linear);
  IntegResult r = finish(acc);
  const double var = std::max(0.0, sumsq / quad.mc_samples - mean * mean);
  r.stderr_ = volume * std::sqrt(var / quad.mc_samples);
  return r;
}

// ---------------------------------------------------------------------------
// Collar corner cones.
// ---------------------------------------------------------------------------

IntegResult integrate_cone_once(const Integrand& f, const ConeShape& cone,
                                int n, const QuadratureSpec& quad,
                                std::uint64_t stream) {
  const int d = n - 1;
  const double half = cone.r / 2;
  Accum acc;
  auto assemble = [&](double a, double sigma, const std::array<double, 2>& dir,
                      Point& x) -> double {
    // s spans (r/2, r - a); returns the radial Jacobian factor
    const double width = half - a;
    const double s = half + sigma * width;
    for (int c = 0; c < d; ++c) x[c] = cone.center[c];
    x[0] += s * dir[0];
    if (d >= 2) x[1] += s * dir[1];
    x[n - 1] = cone.z_base + (cone.upper ? 1.0 - a : a);
    return width * std::pow(s, d - 1);
  };

  if (quad.method == QuadMethod::TensorCylindrical) {
    const AngularRule ang = angular_rule(d, quad.angular_nodes);
    std::vector<double> as, aw, ss, sw;
    auto a_panels = quad_rules::graded_panels(0, half, true, false,
                                              quad.graded_panels,
                                              quad.grading_ratio);
    quad_rules::composite_rule(a_panels, quad.axial_nodes, as, aw);
    auto s_panels = quad_rules::graded_panels(0, 1, true, false,
                                              quad.graded_panels,
                                              quad.grading_ratio);
    quad_rules::composite_rule(s_panels, quad.radial_nodes, ss, sw);
    Point x = Point::zero(n);
    for (std::size_t ia = 0; ia < ang.dir.size(); ++ia)
      for (std::size_t i = 0; i < as.size(); ++i)
        for (std::size_t j = 0; j < ss.size(); ++j) {
          const double jac = assemble(as[i], ss[j], ang.dir[ia], x);
          acc.add(ang.weight[ia] * aw[i] * sw[j] * jac * checked_eval(f, x));
        }
    return finish(acc);
  }

  const CounterRng rng(quad.seed, stream);
  const double param_vol = half * 1.0 * 2 * M_PI;  // (a, sigma, theta) box
  if (d != 2) throw NumericalError("cone MC sampling implemented for n = 3");
  double sum = 0, sumsq = 0;
  Point x = Point::zero(n);
  for (long long s = 0; s < quad.mc_samples; ++s) {
    const double a = half * rng.uniform(s, 0);
    const double sigma = rng.uniform(s, 1);
    const double th = 2 * M_PI * rng.uniform(s, 2);
    const std::array<double, 2> dir{std::cos(th), std::sin(th)};
    const double jac = assemble(a, sigma, dir, x);
    const double v = jac * checked_eval(f, x);
    sum += v;
    sumsq += v * v;
    ++acc.evals;
  }
  const double mean = sum / quad.mc_samples;
  acc.linear = param_vol * mean;
  acc.lg.add_linear(acc.linear);
  IntegResult r = finish(acc);
  const double var = std::max(0.0, sumsq / quad.mc_samples - mean * mean);
  r.stderr_ = param_vol * std::sqrt(var / quad.mc_samples);
  return r;
}

// ---------------------------------------------------------------------------
// Cusp profile solid.
// ---------------------------------------------------------------------------

IntegResult integrate_profile_once(const Integrand& f, const ProfileShape& shape,
                                   const QuadratureSpec& quad,
                                   std::uint64_t stream) {
  const auto& cusp = *shape.cusp;
  const int n = cusp.n;
  const int d = n - 1;
  Accum acc;
  // Cusp layout: axis is the *first* coordinate.
  if (quad.method == QuadMethod::TensorCylindrical) {
    const AngularRule ang = angular_rule(d, quad.angular_nodes);
    std::vector<double> ts, tw, ss, sw;
    quad_rules::interval_rule(0, 1, quad.axial_nodes, ts, tw);
    Point x = Point::zero(n);
    for (std::size_t it = 0; it < ts.size(); ++it) {
      const double psi = cusp.psi(ts[it]);
      if (psi <= 0) continue;
      quad_rules::interval_rule(0, psi, quad.radial_nodes, ss, sw);
      x[0] = ts[it];
      for (std::size_t ia = 0; ia < ang.dir.size(); ++ia) {
        for (std::size_t j = 0; j < ss.size(); ++j) {
          const double s = ss[j];
          for (int c = 1; c < n; ++c) x[c] = 0;
          x[1] = s * ang.dir[ia][0];
          if (d >= 2 && n >= 3) x[2] = s * ang.dir[ia][1];
          acc.add(tw[it] * sw[j] * std::pow(s, d - 1) * ang.weight[ia] *
                  checked_eval(f, x));
        }
      }
    }
    return finish(acc);
  }

  const CounterRng rng(quad.seed, stream);
  double sum = 0, sumsq = 0;
  Point x = Point::zero(n);
  const double vd = geometry::unit_ball_volume(d);
  for (long long s = 0; s < quad.mc_samples; ++s) {
    const double t = rng.uniform(s, 0);
    const double psi = cusp.psi(t);
    double v = 0;
    if (psi > 0) {
      const double rad = psi * std::pow(rng.uniform(s, 1), 1.0 / d);
      x[0] = t;
      for (int c = 1; c < n; ++c) x[c] = 0;
      if (d == 1) {
        x[1] = (rng.uniform(s, 2) < 0.5 ? -1 : 1) * rad;
      } else if (d == 2) {
        const double th = 2 * M_PI * rng.uniform(s, 2);
        x[1] = rad * std::cos(th);
        x[2] = rad * std::sin(th);
      } else {
        double g[kMaxDim], norm2 = 0;
        for (int c = 0; c < d; ++c) {
          g[c] = rng.normal(s, c);
          norm2 += g[c] * g[c];
        }
        const double inv = rad / std::sqrt(norm2);
        for (int c = 0; c < d; ++c) x[1 + c] = inv * g[c];
      }
      v = vd * std::pow(psi, d) * checked_eval(f, x);
    }
    sum += v;
    sumsq += v * v;
    ++acc.evals;
  }
  const double mean = sum / quad.mc_samples;
  acc.linear = mean;  // expectation over t in (0,1) already integrates dt
  acc.lg.add_linear(acc.linear);
  IntegResult r = finish(acc);
  const double var = std::max(0.0, sumsq / quad.mc_samples - mean * mean);
  r.stderr_ = std::sqrt(var / quad.mc_samples);
  return r;
}

template <typename Shape, typename Fn>
IntegResult with_error_estimate(const Fn& run, const Shape&,
                                const QuadratureSpec& quad) {
  IntegResult r = run(quad);
  if (quad.method == QuadMethod::TensorCylindrical && quad.estimate_error) {
    const IntegResult coarse = run(halved(quad));
    r.stderr_ = std::abs(r.value - coarse.value);
  }
  return r;
}

}  // namespace

IntegResult integrate_box(const Integrand& f, const BoxShape& box,
                          const QuadratureSpec& quad, std::uint64_t stream) {
  return with_error_estimate(
      [&](const QuadratureSpec& q) { return integrate_box_once(f, box, q, stream); },
      box, quad);
}

IntegResult integrate_shell(const Integrand& f, const ShellShape& shell, int n,
                            const QuadratureSpec& quad, std::uint64_t stream) {
  return with_error_estimate(
      [&](const QuadratureSpec& q) {
        return integrate_shell_once(f, shell, n, q, stream);
      },
      shell, quad);
}

IntegResult integrate_cone(const Integrand& f, const ConeShape& cone, int n,
                           const QuadratureSpec& quad, std::uint64_t stream) {
  return with_error_estimate(
      [&](const QuadratureSpec& q) {
        return integrate_cone_once(f, cone, n, q, stream);
      },
      cone, quad);
}

IntegResult integrate_profile(const Integrand& f, const ProfileShape& shape,
                              const QuadratureSpec& quad,
                              std::uint64_t stream) {
  return with_error_estimate(
      [&](const QuadratureSpec& q) {
        return integrate_profile_once(f, shape, q, stream);
      },
      shape, quad);
}

// ---------------------------------------------------------------------------
// Region-tagged norms.
// ---------------------------------------------------------------------------

RegionSelect parse_region_select(const std::string& name) {
  if (name == "all") return RegionSelect::All;
  if (name == "cube") return RegionSelect::Cube;
  if (name == "stems") return RegionSelect::Stems;
  if (name == "heads") return RegionSelect::Heads;
  if (name == "collars") return RegionSelect::Collars;
  if (name == "slab") return RegionSelect::Slab;
  if (name == "omega") return RegionSelect::Omega;
  throw ConfigError("unknown region set '" + name + "'");
}

std::vector<RegionTag> select_regions(const MushroomSpec& spec,
                                      RegionSelect sel) {
  std::vector<RegionTag> out;
  auto add_stems = [&] {
    for (int k = 1; k <= spec.m; ++k) out.push_back(geometry::tag_stem(k));
  };
  auto add_heads = [&] {
    for (int k = 1; k <= spec.m; ++k) out.push_back(geometry::tag_head(k));
  };
  auto add_collars = [&] {
    for (int k = 1; k <= spec.m; ++k)
      out.push_back(geometry::tag_stem_collar(k));
    for (int k = 1; k <= spec.m; ++k)
      out.push_back(geometry::tag_head_collar(k));
  };
  switch (sel) {
    case RegionSelect::All:
      out.push_back(geometry::tag_cube());
      add_stems();
      add_heads();
      add_collars();
      out.push_back(geometry::tag_slab());
      break;
    case RegionSelect::Cube:
      out.push_back(geometry::tag_cube());
      break;
    case RegionSelect::Stems:
      add_stems();
      break;
    case RegionSelect::Heads:
      add_heads();
      break;
    case RegionSelect::Collars:
      add_collars();
      break;
    case RegionSelect::Slab:
      out.push_back(geometry::tag_slab());
      break;
    case RegionSelect::Omega:
      out.push_back(geometry::tag_cube());
      add_stems();
      add_heads();
      break;
  }
  return out;
}

namespace {

bool tag_matches(const RegionTag& request, const RegionTag& actual) {
  if (request.sub == CollarSub::None) return request.same_region(actual);
  return request == actual;
}

// Every tagged region integrates the classify-restricted integrand over its
// parametrized shape; shapes of distinct tags are disjoint up to the
// head-collar overlaps, which are clipped out of the shell explicitly for
// n = 3 and zeroed by the classify indicator otherwise.
struct RegionShape {
  enum class Kind { Box, Shell } kind = Kind::Box;
  BoxShape box;
  ShellShape shell;
};

RegionShape shape_for(const MushroomSpec& spec, const RegionTag& tag) {
  RegionShape rs;
  const int n = spec.n;
  switch (tag.kind) {
    case RegionKind::Cube: {
      rs.kind = RegionShape::Kind::Box;
      rs.box.lo = Point::zero(n);
      rs.box.hi = Point::zero(n);
      for (int i = 0; i < n; ++i) rs.box.hi[i] = 1;
      return rs;
    }
    case RegionKind::Slab: {
      rs.kind = RegionShape::Kind::Box;
      rs.box.lo = Point::zero(n);
      rs.box.hi = Point::zero(n);
      for (int i = 0; i < n - 1; ++i) rs.box.hi[i] = 1;
      rs.box.lo[n - 1] = MushroomSpec::stem_z0;
      rs.box.hi[n - 1] = MushroomSpec::stem_z1;
      return rs;
    }
    case RegionKind::Stem:
      rs.kind = RegionShape::Kind::Shell;
      rs.shell = {spec.z[tag.k - 1], 0, spec.stem_radius(tag.k),
                  MushroomSpec::stem_z0, MushroomSpec::stem_z1, false, false,
                  {}};
      return rs;
    case RegionKind::Head:
      rs.kind = RegionShape::Kind::Shell;
      rs.shell = {spec.z[tag.k - 1], 0, spec.head_radius(tag.k),
                  MushroomSpec::head_z0, MushroomSpec::head_z1, false, false,
                  {}};
      return rs;
    case RegionKind::StemCollar:
      rs.kind = RegionShape::Kind::Shell;
      rs.shell = {spec.z[tag.k - 1], spec.stem_radius(tag.k),
                  2 * spec.stem_radius(tag.k), MushroomSpec::stem_z0,
                  MushroomSpec::stem_z1, true, true, {}};
      return rs;
    case RegionKind::HeadCollar: {
      rs.kind = RegionShape::Kind::Shell;
      rs.shell = {spec.z[tag.k - 1], spec.head_radius(tag.k),
                  2 * spec.head_radius(tag.k), MushroomSpec::head_z0,
                  MushroomSpec::head_z1, true, true, {}};
      if (n == 3) {
        for (int j = 1; j <= spec.m; ++j) {
          if (j == tag.k) continue;
          // foreign heads win by Omega precedence; lower-k collars by order
          rs.shell.blocked.push_back({spec.z[j - 1][0], spec.z[j - 1][1], 0,
                                      spec.head_radius(j)});
          if (j < tag.k)
            rs.shell.blocked.push_back({spec.z[j - 1][0], spec.z[j - 1][1],
                                        spec.head_radius(j),
                                        2 * spec.head_radius(j)});
        }
      }
      return rs;
    }
    default:
      throw ConfigError("no quadrature shape for tag " + tag.str());
  }
}

IntegResult integrate_region(const MushroomSpec& spec, const RegionTag& tag,
                             const Integrand& f, const QuadratureSpec& quad,
                             std::uint64_t stream) {
  const RegionShape rs = shape_for(spec, tag);
  Integrand restricted = [&spec, tag, &f](const Point& x) {
    return tag_matches(tag, geometry::classify(spec, x)) ? f(x) : 0.0;
  };
  if (rs.kind == RegionShape::Kind::Box)
    return integrate_box(restricted, rs.box, quad, stream);
  return integrate_shell(restricted, rs.shell, spec.n, quad, stream);
}

NormReport norm_report(const MushroomSpec& spec, const ScalarField& f,
                       const std::vector<RegionTag>& regions, double p,
                       const QuadratureSpec& quad, bool gradient) {
  if (p < 1) throw ConfigError("norm: exponent p must be >= 1");
  NormReport rep;
  rep.field = f.name;
  rep.integrand = gradient ? "grad" : "lp";
  rep.p = p;
  rep.regions.resize(regions.size());

  Integrand integrand;
  if (gradient) {
    integrand = [&f, p](const Point& x) {
      return std::pow(f.gradient(x).norm(), p);
    };
  } else {
    integrand = [&f, p](const Point& x) {
      return std::pow(std::abs(f.value(x)), p);
    };
  }

  parallel_indices(regions.size(), [&](std::size_t i) {
    const RegionTag& tag = regions[i];
    const std::uint64_t stream =
        fnv1a(tag.str()) ^ fnv1a(rep.integrand) ^ fnv1a(f.name);
    rep.regions[i] = {tag.str(),
                      integrate_region(spec, tag, integrand, quad, stream)};
  });

  Log2Acc lg;
  double total = 0, var = 0;
  for (const auto& r : rep.regions) {
    total += r.integral.value;
    lg.add(r.integral.log2_value);
    var += r.integral.stderr_ * r.integral.stderr_;
  }
  rep.total = total;
  rep.log2_total = lg.log2_total();
  rep.stderr_total = std::sqrt(var);
  rep.root = std::pow(total, 1.0 / p);
  return rep;
}

}  // namespace

NormReport lp_norm(const MushroomSpec& spec, const ScalarField& f,
                   const std::vector<RegionTag>& regions, double p,
                   const QuadratureSpec& quad) {
  return norm_report(spec, f, regions, p, quad, false);
}

NormReport sobolev_seminorm(const MushroomSpec& spec, const ScalarField& f,
                            const std::vector<RegionTag>& regions, double p,
                            const QuadratureSpec& quad) {
  return norm_report(spec, f, regions, p, quad, true);
}

double integral_over_omega(const MushroomSpec& spec, const ScalarField& f,
                           const QuadratureSpec& quad) {
  const auto regions = select_regions(spec, RegionSelect::Omega);
  std::vector<double> parts(regions.size());
  parallel_indices(regions.size(), [&](std::size_t i) {
    const std::uint64_t stream = fnv1a(regions[i].str()) ^ fnv1a("signed") ^
                                 fnv1a(f.name);
    parts[i] =
        integrate_region(spec, regions[i], f.value, quad, stream).value;
  });
  double total = 0;
  for (double v : parts) total += v;
  return total;
}

double mean_over_omega(const MushroomSpec& spec, const ScalarField& f,
                       const QuadratureSpec& quad) {
  double measure = 0;
  for (const auto& tag : select_regions(spec, RegionSelect::Omega))
    measure += geometry::region_measure(spec, tag);
  return integral_over_omega(spec, f, quad) / measure;
}

IntegResult comb_lp(const CombSpec& comb, const ScalarField& f, double p,
                    bool gradient, const QuadratureSpec& quad) {
  Integrand integrand;
  if (gradient) {
    integrand = [&f, p](const Point& x) {
      return std::pow(f.gradient(x).norm(), p);
    };
  } else {
    integrand = [&f, p](const Point& x) {
      return std::pow(std::abs(f.value(x)), p);
    };
  }
  const int n = comb.n;
  Log2Acc lg;
  double total = 0, var = 0;
  long long evals = 0;

  BoxShape box;
  box.lo = Point::zero(n);
  box.hi = Point::zero(n);
  box.hi[0] = 20;
  for (int i = 1; i < n; ++i) box.hi[i] = 1;
  auto keep = [&](const IntegResult& r) {
    total += r.value;
    lg.add(r.log2_value);
    var += r.stderr_ * r.stderr_;
    evals += r.evals;
  };
  keep(integrate_box(integrand, box, quad, fnv1a("comb-box") ^ fnv1a(f.name)));
  for (int k = 1; k <= comb.kmax; ++k) {
    ShellShape cyl{comb.z[k - 1], 0, comb.radius(k), -comb.depth(k), 0,
                   false, false, {}};
    keep(integrate_shell(integrand, cyl, n, quad,
                         fnv1a("comb-cyl" + std::to_string(k)) ^
                             fnv1a(f.name)));
  }
  IntegResult r;
  r.value = total;
  r.log2_value = lg.log2_total();
  r.stderr_ = std::sqrt(var);
  r.evals = evals;
  return r;
}

// ---------------------------------------------------------------------------
// Poincare quotients.
// ---------------------------------------------------------------------------

namespace {

PoincareResult quotient_from(const std::function<IntegResult(const Integrand&,
                                                             std::uint64_t)>& integrate,
                             double volume, const ScalarField& f, double p) {
  const double raw =
      integrate([&f](const Point& x) { return f.value(x); }, fnv1a("mean"))
          .value;
  const double mean = raw / volume;
  PoincareResult res;
  res.mean = mean;
  res.numerator = integrate(
                      [&f, mean, p](const Point& x) {
                        return std::pow(std::abs(f.value(x) - mean), p);
                      },
                      fnv1a("num"))
                      .value;
  res.denominator = integrate(
                        [&f, p](const Point& x) {
                          return std::pow(f.gradient(x).norm(), p);
                        },
                        fnv1a("den"))
                        .value;
  if (res.denominator == 0)
    throw NumericalError("poincare quotient: zero gradient energy");
  res.quotient = res.numerator / res.denominator;
  res.diam_pow = std::numeric_limits<double>::quiet_NaN();
  return res;
}

}  // namespace

PoincareResult poincare_quotient(const BoxShape& box, const ScalarField& f,
                                 double p, const QuadratureSpec& quad) {
  double volume = 1;
  for (int i = 0; i < box.lo.dim(); ++i) volume *= box.hi[i] - box.lo[i];
  return quotient_from(
      [&](const Integrand& g, std::uint64_t stream) {
        return integrate_box(g, box, quad, stream ^ fnv1a(f.name));
      },
      volume, f, p);
}

PoincareResult poincare_quotient(const MushroomSpec& spec,
                                 const ScalarField& f, double p,
                                 const QuadratureSpec& quad) {
  double volume = 0;
  for (const auto& tag : select_regions(spec, RegionSelect::Omega))
    volume += geometry::region_measure(spec, tag);
  return quotient_from(
      [&](const Integrand& g, std::uint64_t stream) {
        IntegResult total;
        Log2Acc lg;
        for (const auto& tag : select_regions(spec, RegionSelect::Omega)) {
          const auto r = integrate_region(spec, tag, g, quad,
                                          stream ^ fnv1a(tag.str()) ^
                                              fnv1a(f.name));
          total.value += r.value;
          lg.add(r.log2_value);
          total.stderr_ = std::hypot(total.stderr_, r.stderr_);
          total.evals += r.evals;
        }
        total.log2_value = lg.log2_total();
        return total;
      },
      volume, f, p);
}

PoincareResult poincare_quotient(const CuspSpec& cusp, const ScalarField& f,
                                 double p, const QuadratureSpec& quad) {
  ProfileShape shape{&cusp};
  const double volume =
      integrate_profile([](const Point&) { return 1.0; }, shape, quad,
                        fnv1a("cusp-vol"))
          .value;
  auto res = quotient_from(
      [&](const Integrand& g, std::uint64_t stream) {
        return integrate_profile(g, shape, quad, stream ^ fnv1a(f.name));
      },
      volume, f, p);
  res.diam_pow = std::pow(cusp.diameter(), p);
  return res;
}

// ---------------------------------------------------------------------------
// Hyperplane slices.
// ---------------------------------------------------------------------------

namespace {

// d-dimensional polar integral over a disc/annulus slice at fixed axial t.
IntegResult slice_polar(const Integrand& g, const std::vector<double>& center,
                        double s0, double s1, double t, int n,
                        bool grade_inner, const QuadratureSpec& quad,
                        std::uint64_t stream) {
  const int d = n - 1;
  Accum acc;
  if (quad.method == QuadMethod::TensorCylindrical) {
    const AngularRule ang = angular_rule(d, quad.angular_nodes);
    std::vector<double> ss, sw;
    std::vector<quad_rules::Panel> panels;
    if (grade_inner && s0 > 0)
      panels = quad_rules::graded_panels(s0, s1, true, false,
                                         quad.graded_panels,
                                         quad.grading_ratio);
    else {
      const double mid = 0.5 * (s0 + s1);
      panels = {{s0, mid}, {mid, s1}};
    }
    quad_rules::composite_rule(panels, quad.radial_nodes, ss, sw);
    Point x = Point::zero(n);
    x[n - 1] = t;
    for (std::size_t a = 0; a < ang.dir.size(); ++a)
      for (std::size_t i = 0; i < ss.size(); ++i) {
        for (int c = 0; c < d; ++c) x[c] = center[c];
        x[0] += ss[i] * ang.dir[a][0];
        if (d >= 2) x[1] += ss[i] * ang.dir[a][1];
        acc.add(sw[i] * std::pow(ss[i], d - 1) * ang.weight[a] *
                checked_eval(g, x));
      }
    return finish(acc);
  }
  const CounterRng rng(quad.seed, stream);
  const double sd0 = std::pow(s0, d), sd1 = std::pow(s1, d);
  const double area = geometry::unit_ball_volume(d) * (sd1 - sd0);
  double sum = 0, sumsq = 0;
  Point x = Point::zero(n);
  x[n - 1] = t;
  for (long long s = 0; s < quad.mc_samples; ++s) {
    const double rad =
        std::pow(sd0 + rng.uniform(s, 0) * (sd1 - sd0), 1.0 / d);
    const double th = 2 * M_PI * rng.uniform(s, 1);
    for (int c = 0; c < d; ++c) x[c] = center[c];
    x[0] += rad * std::cos(th);
    if (d >= 2) x[1] += rad * std::sin(th);
    const double v = checked_eval(g, x);
    sum += v;
    sumsq += v * v;
    ++acc.evals;
  }
  const double mean = sum / quad.mc_samples;
  acc.linear = area * mean;
  acc.lg.add_linear(acc.linear);
  IntegResult r = finish(acc);
  const double var = std::max(0.0, sumsq / quad.mc_samples - mean * mean);
  r.stderr_ = area * std::sqrt(var / quad.mc_samples);
  return r;
}

// Tensor/MC integral of g over the base square slice at axial t.
IntegResult slice_square(const Integrand& g, double t, int n, double hi0,
                         const QuadratureSpec& quad, std::uint64_t stream) {
  const int d = n - 1;
  Accum acc;
  if (quad.method == QuadMethod::TensorCylindrical) {
    std::vector<std::vector<double>> xs(d), ws(d);
    std::vector<std::size_t> sizes(d);
    for (int i = 0; i < d; ++i) {
      quad_rules::interval_rule(0, i == 0 ? hi0 : 1.0, quad.axial_nodes,
                                xs[i], ws[i]);
      sizes[i] = xs[i].size();
    }
    std::vector<std::size_t> idx(d, 0);
    Point x = Point::zero(n);
    x[n - 1] = t;
    while (true) {
      double w = 1;
      for (int i = 0; i < d; ++i) {
        x[i] = xs[i][idx[i]];
        w *= ws[i][idx[i]];
      }
      acc.add(w * checked_eval(g, x));
      int c = d - 1;
      while (c >= 0 && ++idx[c] == sizes[c]) idx[c--] = 0;
      if (c < 0) break;
    }
    return finish(acc);
  }
  const CounterRng rng(quad.seed, stream);
  const double area = hi0;
  double sum = 0, sumsq = 0;
  Point x = Point::zero(n);
  x[n - 1] = t;
  for (long long s = 0; s < quad.mc_samples; ++s) {
    x[0] = hi0 * rng.uniform(s, 0);
    for (int i = 1; i < d; ++i) x[i] = rng.uniform(s, i);
    const double v = checked_eval(g, x);
    sum += v;
    sumsq += v * v;
    ++acc.evals;
  }
  const double mean = sum / quad.mc_samples;
  acc.linear = area * mean;
  acc.lg.add_linear(acc.linear);
  IntegResult r = finish(acc);
  const double var = std::max(0.0, sumsq / quad.mc_samples - mean * mean);
  r.stderr_ = area * std::sqrt(var / quad.mc_samples);
  return r;
}

IntegResult combine(std::vector<IntegResult> parts) {
  IntegResult total;
  Log2Acc lg;
  double var = 0;
  for (const auto& r : parts) {
    total.value += r.value;
    lg.add(r.log2_value);
    var += r.stderr_ * r.stderr_;
    total.evals += r.evals;
  }
  total.log2_value = lg.log2_total();
  total.stderr_ = std::sqrt(var);
  return total;
}

}  // namespace

IntegResult plane_seminorm(const MushroomSpec& spec, const ScalarField& f,
                           double t, double q, const QuadratureSpec& quad) {
  if (t <= 0 || t >= 3)
    throw NumericalError("plane_seminorm: slice intersects no support");
  Integrand g = [&f, q](const Point& x) {
    return std::pow(f.gradient(x).norm(), q);
  };
  const std::uint64_t base = fnv1a(f.name) ^ fnv1a("plane");
  std::vector<IntegResult> parts;
  if (quad.method == QuadMethod::MonteCarlo) {
    // Uniform slice sampling captures every region in proportion to area.
    parts.push_back(slice_square(g, t, spec.n, 1.0, quad, base));
    return combine(std::move(parts));
  }
  if (t < 1) {
    parts.push_back(slice_square(g, t, spec.n, 1.0, quad, base));
  } else if (t <= 2) {
    Integrand g_slab = [&](const Point& x) {
      return geometry::classify(spec, x).kind == RegionKind::Slab ? g(x) : 0.0;
    };
    parts.push_back(slice_square(g_slab, t, spec.n, 1.0, quad, base));
    for (int k = 1; k <= spec.m; ++k) {
      parts.push_back(slice_polar(g, spec.z[k - 1], 0, spec.stem_radius(k), t,
                                  spec.n, false, quad, base ^ fnv1a("sd") ^ k));
      parts.push_back(slice_polar(g, spec.z[k - 1], spec.stem_radius(k),
                                  2 * spec.stem_radius(k), t, spec.n, true,
                                  quad, base ^ fnv1a("sc") ^ k));
    }
  } else {
    for (int k = 1; k <= spec.m; ++k) {
      Integrand g_k = [&, k](const Point& x) {
        const auto tag = geometry::classify(spec, x);
        return tag.k == k ? g(x) : 0.0;
      };
      parts.push_back(slice_polar(g_k, spec.z[k - 1], 0, spec.head_radius(k),
                                  t, spec.n, false, quad,
                                  base ^ fnv1a("hd") ^ k));
      parts.push_back(slice_polar(g_k, spec.z[k - 1], spec.head_radius(k),
                                  2 * spec.head_radius(k), t, spec.n, true,
                                  quad, base ^ fnv1a("hc") ^ k));
    }
  }
  return combine(std::move(parts));
}

IntegResult plane_seminorm(const CombSpec& comb, const ScalarField& f,
                           double t, double q, const QuadratureSpec& quad) {
  if (t >= 1 || t <= -1)
    throw NumericalError("plane_seminorm: slice intersects no support");
  Integrand g = [&f, q](const Point& x) {
    return std::pow(f.gradient(x).norm(), q);
  };
  const std::uint64_t base = fnv1a(f.name) ^ fnv1a("comb-plane");
  std::vector<IntegResult> parts;
  if (t > 0) {
    parts.push_back(slice_square(g, t, comb.n, 20.0, quad, base));
    return combine(std::move(parts));
  }
  for (int k = 1; k <= comb.kmax; ++k) {
    if (t < -comb.depth(k)) continue;
    parts.push_back(slice_polar(g, comb.z[k - 1], 0, comb.radius(k), t,
                                comb.n, false, quad, base ^ k));
  }
  if (parts.empty())
    throw NumericalError("plane_seminorm: slice intersects no support");
  return combine(std::move(parts));
}

SeriesTail series_tail(double a, int k0) {
  SeriesTail tail;
  if (a <= 0) {
    tail.convergent = false;
    tail.sum = std::numeric_limits<double>::infinity();
    tail.log2_sum = std::numeric_limits<double>::infinity();
    return tail;
  }
  tail.convergent = true;
  tail.log2_sum = -a * k0 - std::log2(1.0 - std::exp2(-a));
  tail.sum = exp2_of(tail.log2_sum);
  return tail;
}

}  // namespace sobexlab::norms
