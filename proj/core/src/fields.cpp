#include "sobexlab/fields.hpp"

#include <cmath>

#include "sobexlab/errors.hpp"

namespace sobexlab::fields {

using geometry::CombKind;
using geometry::CombSpec;
using geometry::MushroomSpec;
using geometry::RegionKind;

Vec fd_gradient(const std::function<double(const Point&)>& f, const Point& x,
                double h) {
  Vec g = Vec::zero(x.dim());
  for (int i = 0; i < x.dim(); ++i) {
    Point a = x, b = x;
    a[i] -= h;
    b[i] += h;
    g[i] = (f(b) - f(a)) / (2 * h);
  }
  return g;
}

Vec ScalarField::gradient(const Point& x) const {
  if (grad) return grad(x);
  const double h = fd_scale * 6e-6;
  return fd_gradient(value, x, h);
}

ScalarField make_const(double c, int n) {
  ScalarField f;
  f.name = "const:" + std::to_string(c);
  f.value = [c](const Point&) { return c; };
  f.grad = [n](const Point&) { return Vec::zero(n); };
  return f;
}

ScalarField make_poly(int degree, int n) {
  if (degree < 0) throw ConfigError("poly: degree must be >= 0");
  ScalarField f;
  f.name = "poly:" + std::to_string(degree);
  f.value = [degree, n](const Point& x) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += x[i];
    return std::pow(s / n, degree);
  };
  f.grad = [degree, n](const Point& x) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += x[i];
    const double c = degree == 0 ? 0.0
                                 : degree * std::pow(s / n, degree - 1) / n;
    Vec g = Vec::zero(n);
    for (int i = 0; i < n; ++i) g[i] = c;
    return g;
  };
  return f;
}

ScalarField make_trig(double freq, int n) {
  ScalarField f;
  f.name = "trig:" + std::to_string(freq);
  f.value = [freq, n](const Point& x) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += x[i];
    return std::sin(freq * s);
  };
  f.grad = [freq, n](const Point& x) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += x[i];
    const double c = freq * std::cos(freq * s);
    Vec g = Vec::zero(n);
    for (int i = 0; i < n; ++i) g[i] = c;
    return g;
  };
  return f;
}

double thm53_amplitude_log2(const MushroomSpec& spec, int k) {
  return 2.0 * k * (spec.n - 1) / spec.q;
}

ScalarField field_thm53(const MushroomSpec& spec) {
  ScalarField f;
  f.name = "thm53";
  const MushroomSpec* sp = &spec;
  f.value = [sp](const Point& x) {
    const auto tag = geometry::classify(*sp, x);
    switch (tag.kind) {
      case RegionKind::Stem:
        return std::exp2(thm53_amplitude_log2(*sp, tag.k)) * (x.axial() - 1.0);
      case RegionKind::Head:
        return std::exp2(thm53_amplitude_log2(*sp, tag.k));
      default:
        return 0.0;
    }
  };
  f.grad = [sp](const Point& x) {
    Vec g = Vec::zero(sp->n);
    const auto tag = geometry::classify(*sp, x);
    if (tag.kind == RegionKind::Stem)
      g[sp->n - 1] = std::exp2(thm53_amplitude_log2(*sp, tag.k));
    return g;
  };
  return f;
}

ScalarField field_sec6(const CombSpec& comb, int k) {
  if (k < 1 || k > comb.kmax) throw ConfigError("sec6: k out of range");
  ScalarField f;
  f.name = "sec6:" + std::to_string(k);
  const CombSpec* cb = &comb;
  const double h = comb.depth(k);
  f.fd_scale = comb.radius(k);
  f.value = [cb, k, h](const Point& x) {
    const auto tag = geometry::classify(*cb, x);
    if (tag.k != k) return 0.0;
    if (tag.kind == CombKind::HalfCyl) return 1.0;
    if (tag.kind == CombKind::Cyl) return -2.0 * x.axial() / h;
    return 0.0;
  };
  f.grad = [cb, k, h](const Point& x) {
    Vec g = Vec::zero(cb->n);
    const auto tag = geometry::classify(*cb, x);
    if (tag.k == k && tag.kind == CombKind::Cyl) g[cb->n - 1] = -2.0 / h;
    return g;
  };
  return f;
}

ScalarField field_sec7(const MushroomSpec& spec, int k) {
  if (k < 1 || k > spec.m) throw ConfigError("sec7: k out of range");
  ScalarField f;
  f.name = "sec7:" + std::to_string(k);
  const MushroomSpec* sp = &spec;
  f.fd_scale = spec.stem_radius(k);
  f.value = [sp, k](const Point& x) {
    const auto tag = geometry::classify(*sp, x);
    if (tag.k != k) return 0.0;
    if (tag.kind == RegionKind::Head) return 1.0;
    if (tag.kind == RegionKind::Stem) return x.axial() - 1.0;
    return 0.0;
  };
  f.grad = [sp, k](const Point& x) {
    Vec g = Vec::zero(sp->n);
    const auto tag = geometry::classify(*sp, x);
    if (tag.k == k && tag.kind == RegionKind::Stem) g[sp->n - 1] = 1.0;
    return g;
  };
  return f;
}

namespace {

// "name:arg" split; arg empty when absent.
std::pair<std::string, std::string> split_descriptor(const std::string& d) {
  const auto pos = d.find(':');
  if (pos == std::string::npos) return {d, ""};
  return {d.substr(0, pos), d.substr(pos + 1)};
}

double parse_num(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field descriptor: bad numeric argument for " + what);
  }
}

}  // namespace

ScalarField parse_field(const std::string& descriptor,
                        const MushroomSpec& spec) {
  const auto [name, arg] = split_descriptor(descriptor);
  if (name == "const") return make_const(parse_num(arg, "const"), spec.n);
  if (name == "poly")
    return make_poly(static_cast<int>(parse_num(arg, "poly")), spec.n);
  if (name == "trig") return make_trig(parse_num(arg, "trig"), spec.n);
  if (name == "thm53") return field_thm53(spec);
  if (name == "sec7")
    return field_sec7(spec, static_cast<int>(parse_num(arg, "sec7")));
  throw ConfigError("unknown field descriptor '" + descriptor + "'");
}

ScalarField parse_field(const std::string& descriptor, const CombSpec& comb) {
  const auto [name, arg] = split_descriptor(descriptor);
  if (name == "const") return make_const(parse_num(arg, "const"), comb.n);
  if (name == "poly")
    return make_poly(static_cast<int>(parse_num(arg, "poly")), comb.n);
  if (name == "trig") return make_trig(parse_num(arg, "trig"), comb.n);
  if (name == "sec6")
    return field_sec6(comb, static_cast<int>(parse_num(arg, "sec6")));
  throw ConfigError("unknown field descriptor '" + descriptor + "'");
}

}  // namespace sobexlab::fields
