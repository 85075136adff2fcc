#include "sobexlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "sobexlab/errors.hpp"

namespace sobexlab::quadrature {

namespace {

GLRule compute_gl(int n) {
  GLRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = x;
    rule.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

std::mutex g_cache_mutex;
std::map<int, GLRule> g_cache;

}  // namespace

const GLRule& gauss_legendre(int n) {
  if (n < 1) throw NumericalError("gauss_legendre: order must be >= 1");
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_cache.find(n);
  if (it == g_cache.end()) it = g_cache.emplace(n, compute_gl(n)).first;
  return it->second;
}

std::vector<Panel> graded_panels(double a, double b, bool toward_a,
                                 bool toward_b, int panels, double ratio) {
  std::vector<Panel> out;
  if (!(b > a)) throw NumericalError("graded_panels: empty interval");
  if (!toward_a && !toward_b) {
    out.push_back({a, b});
    return out;
  }
  if (toward_a && toward_b) {
    const double mid = 0.5 * (a + b);
    auto lo = graded_panels(a, mid, true, false, panels, ratio);
    auto hi = graded_panels(mid, b, false, true, panels, ratio);
    lo.insert(lo.end(), hi.begin(), hi.end());
    return lo;
  }
  // widths form a geometric progression, smallest at the flagged end
  const double len = b - a;
  const double scale = (1.0 - ratio) / (1.0 - std::pow(ratio, panels));
  double pos = toward_a ? a : b;
  for (int i = 0; i < panels; ++i) {
    const double w = len * scale * std::pow(ratio, panels - 1 - i);
    if (toward_a) {
      out.push_back({pos, pos + w});
      pos += w;
    } else {
      out.push_back({pos - w, pos});
      pos -= w;
    }
  }
  if (!toward_a) std::reverse(out.begin(), out.end());
  out.front().a = a;
  out.back().b = b;
  return out;
}

void composite_rule(const std::vector<Panel>& panels, int nodes_per_panel,
                    std::vector<double>& xs, std::vector<double>& ws) {
  const GLRule& gl = gauss_legendre(nodes_per_panel);
  xs.clear();
  ws.clear();
  xs.reserve(panels.size() * gl.x.size());
  ws.reserve(panels.size() * gl.x.size());
  for (const auto& p : panels) {
    const double h = 0.5 * (p.b - p.a);
    const double c = 0.5 * (p.a + p.b);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      xs.push_back(c + h * gl.x[i]);
      ws.push_back(h * gl.w[i]);
    }
  }
}

void interval_rule(double a, double b, int nodes, std::vector<double>& xs,
                   std::vector<double>& ws) {
  const double mid = 0.5 * (a + b);
  composite_rule({{a, mid}, {mid, b}}, nodes, xs, ws);
}

}  // namespace sobexlab::quadrature
