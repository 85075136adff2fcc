#include "sobexlab/extension.hpp"

#include <cmath>
#include <utility>

#include "sobexlab/cutoffs.hpp"
#include "sobexlab/errors.hpp"

namespace sobexlab::extension {

using cutoffs::CollarCoords;
using geometry::CollarSub;
using geometry::RegionKind;

ExtensionField::ExtensionField(MushroomSpec spec, ScalarField u)
    : spec_(std::move(spec)), u_(std::move(u)), slab_map_(maps::slab_reflection()) {
  head_maps_.reserve(spec_.m);
  stem_maps_.reserve(spec_.m);
  for (int k = 1; k <= spec_.m; ++k) {
    head_maps_.push_back(maps::head_reflection(spec_, k));
    stem_maps_.push_back(maps::stem_reflection(spec_, k));
  }
}

namespace {

// Collar coordinates in the normalized collar frame for a collar tag.
CollarCoords collar_coords(const MushroomSpec& spec, const RegionTag& tag,
                           const Point& x) {
  CollarCoords c;
  c.s = spec.base_dist(x, tag.k);
  if (tag.kind == RegionKind::StemCollar) {
    c.r = 2 * spec.stem_radius(tag.k);
    c.xn = x.axial() - MushroomSpec::stem_z0;
  } else {
    c.r = 2 * spec.head_radius(tag.k);
    c.xn = x.axial() - MushroomSpec::head_z0;
  }
  return c;
}

Vec collar_grad_cartesian(const cutoffs::CollarGrad& g, const MushroomSpec& spec,
                          int k, const Point& x, double s) {
  Vec v = Vec::zero(spec.n);
  for (int i = 0; i < spec.n - 1; ++i)
    v[i] = g.d_s * (x[i] - spec.z[k - 1][i]) / s;
  v[spec.n - 1] = g.d_xn;
  return v;
}

}  // namespace

double ExtensionField::value_as(const RegionTag& tag, const Point& x) const {
  switch (tag.kind) {
    case RegionKind::Cube:
    case RegionKind::Stem:
    case RegionKind::Head:
      return u_.value(x);
    case RegionKind::Slab:
      return cutoffs::eval_L1(x.axial()) * u_.value(maps::apply(slab_map_, x));
    case RegionKind::HeadCollar: {
      const auto c = collar_coords(spec_, tag, x);
      const double li = cutoffs::eval_Li(c);
      return li == 0 ? 0.0
                     : li * u_.value(maps::apply(head_maps_[tag.k - 1], x));
    }
    case RegionKind::StemCollar: {
      const auto c = collar_coords(spec_, tag, x);
      const double li = cutoffs::eval_Li(c);
      const double lo = cutoffs::eval_Lo(c);
      const double l1 = cutoffs::eval_L1(x.axial());
      double v = 0;
      if (l1 * lo != 0) v += l1 * lo * u_.value(maps::apply(slab_map_, x));
      if (li != 0) v += li * u_.value(maps::apply(stem_maps_[tag.k - 1], x));
      return v;
    }
    default:
      return 0.0;
  }
}

Vec ExtensionField::gradient_as(const RegionTag& tag, const Point& x) const {
  const int n = spec_.n;
  switch (tag.kind) {
    case RegionKind::Cube:
    case RegionKind::Stem:
    case RegionKind::Head:
      return u_.gradient(x);
    case RegionKind::Slab: {
      const Point y = maps::apply(slab_map_, x);
      const double l1 = cutoffs::eval_L1(x.axial());
      Vec g = maps::pullback_gradient(slab_map_, x, u_.gradient(y));
      g *= l1;
      g[n - 1] += -u_.value(y);  // grad L1 = -e_n
      return g;
    }
    case RegionKind::HeadCollar: {
      const auto c = collar_coords(spec_, tag, x);
      const auto& map = head_maps_[tag.k - 1];
      const Point y = maps::apply(map, x);
      const double li = cutoffs::eval_Li(c);
      Vec g = maps::pullback_gradient(map, x, u_.gradient(y));
      g *= li;
      Vec gli =
          collar_grad_cartesian(cutoffs::grad_Li_local(c), spec_, tag.k, x, c.s);
      gli *= u_.value(y);
      return g + gli;
    }
    case RegionKind::StemCollar: {
      const auto c = collar_coords(spec_, tag, x);
      const auto& map = stem_maps_[tag.k - 1];
      const Point yr = maps::apply(slab_map_, x);
      const Point yc = maps::apply(map, x);
      const double l1 = cutoffs::eval_L1(x.axial());
      const double li = cutoffs::eval_Li(c);
      const double lo = cutoffs::eval_Lo(c);
      const double ur = u_.value(yr);

      // grad(L1 Lo) u(R1 x) + L1 Lo grad(u o R1)
      Vec g = maps::pullback_gradient(slab_map_, x, u_.gradient(yr));
      g *= l1 * lo;
      Vec glo =
          collar_grad_cartesian(cutoffs::grad_Lo_local(c), spec_, tag.k, x, c.s);
      glo *= l1 * ur;
      g += glo;
      g[n - 1] += -lo * ur;  // Lo (grad L1) u(R1 x)

      // grad Li u(CR x) + Li grad(u o CR)
      Vec gc = maps::pullback_gradient(map, x, u_.gradient(yc));
      gc *= li;
      Vec gli =
          collar_grad_cartesian(cutoffs::grad_Li_local(c), spec_, tag.k, x, c.s);
      gli *= u_.value(yc);
      return g + gc + gli;
    }
    default:
      return Vec::zero(n);
  }
}

double ExtensionField::value(const Point& x) const {
  if (!spec_.in_ambient(x))
    throw NumericalError("extension: point outside the ambient cylinder " +
                         x.str());
  return value_as(geometry::classify(spec_, x), x);
}

Vec ExtensionField::gradient(const Point& x) const {
  if (!spec_.in_ambient(x))
    throw NumericalError("extension: point outside the ambient cylinder " +
                         x.str());
  return gradient_as(geometry::classify(spec_, x), x);
}

ScalarField extend(const MushroomSpec& spec, const ScalarField& u) {
  auto ef = std::make_shared<ExtensionField>(spec, u);
  ScalarField f;
  f.name = "E(" + u.name + ")";
  f.value = [ef](const Point& x) { return ef->value(x); };
  f.grad = [ef](const Point& x) { return ef->gradient(x); };
  return f;
}

ScalarField homogenize(const MushroomSpec& spec, const ScalarField& u,
                       double mean) {
  ScalarField shifted = u;
  shifted.name = u.name + "-mean";
  auto base = u.value;
  shifted.value = [base, mean](const Point& x) { return base(x) - mean; };
  auto ef = std::make_shared<ExtensionField>(spec, shifted);
  ScalarField f;
  f.name = "T(" + u.name + ")";
  f.value = [ef, mean](const Point& x) { return ef->value(x) + mean; };
  f.grad = [ef](const Point& x) { return ef->gradient(x); };
  return f;
}

// ---------------------------------------------------------------------------
// Interface jumps.
// ---------------------------------------------------------------------------

Face parse_face(const std::string& name) {
  if (name == "stem-lateral") return Face::StemLateral;
  if (name == "stem-collar-outer") return Face::StemCollarOuter;
  if (name == "cube-top") return Face::CubeTop;
  if (name == "head-bottom") return Face::HeadBottom;
  if (name == "head-lateral") return Face::HeadLateral;
  if (name == "head-collar-outer") return Face::HeadCollarOuter;
  throw ConfigError("unknown face '" + name + "'");
}

std::string face_name(Face face) {
  switch (face) {
    case Face::StemLateral: return "stem-lateral";
    case Face::StemCollarOuter: return "stem-collar-outer";
    case Face::CubeTop: return "cube-top";
    case Face::HeadBottom: return "head-bottom";
    case Face::HeadLateral: return "head-lateral";
    case Face::HeadCollarOuter: return "head-collar-outer";
  }
  throw ConfigError("unknown face");
}

namespace {

struct FaceSample {
  Point x;      // point on the face
  Vec normal;   // unit normal
  double scale; // local feature size for the offset sequence
};

// Radially symmetric sample set around center k at radius s and axial z.
void ring_samples(const MushroomSpec& spec, int k, double s, double z0,
                  double z1, int count, double scale, bool radial_normal,
                  std::vector<FaceSample>& out) {
  const int n = spec.n;
  const int n_theta = 8;
  const int n_z = std::max(1, count / n_theta);
  for (int iz = 0; iz < n_z; ++iz) {
    const double z = z0 + (z1 - z0) * (iz + 0.5) / n_z;
    for (int it = 0; it < n_theta; ++it) {
      const double th = 2 * M_PI * (it + 0.37) / n_theta;
      Point x = Point::zero(n);
      for (int i = 0; i < n - 1; ++i) x[i] = spec.z[k - 1][i];
      x[0] += s * std::cos(th);
      x[1] += s * std::sin(th);
      x.set_axial(z);
      if (!spec.in_ambient(x)) continue;
      Vec nv = Vec::zero(n);
      if (radial_normal) {
        nv[0] = std::cos(th);
        nv[1] = std::sin(th);
      } else {
        nv[n - 1] = 1;
      }
      out.push_back({x, nv, scale});
    }
  }
}

std::vector<FaceSample> face_samples(const MushroomSpec& spec, Face face,
                                     int k, int count) {
  std::vector<FaceSample> out;
  const int n = spec.n;
  switch (face) {
    case Face::StemLateral:
      ring_samples(spec, k, spec.stem_radius(k), 1.05, 1.95, count,
                   spec.stem_radius(k), true, out);
      break;
    case Face::StemCollarOuter:
      ring_samples(spec, k, 2 * spec.stem_radius(k), 1.05, 1.95, count,
                   spec.stem_radius(k), true, out);
      break;
    case Face::HeadLateral:
      ring_samples(spec, k, spec.head_radius(k), 2.05, 2.95, count,
                   spec.head_radius(k), true, out);
      break;
    case Face::HeadCollarOuter:
      ring_samples(spec, k, 2 * spec.head_radius(k), 2.05, 2.95, count,
                   spec.head_radius(k), true, out);
      break;
    case Face::HeadBottom: {
      const int n_theta = 8;
      const int n_s = std::max(1, count / n_theta);
      for (int is = 0; is < n_s; ++is) {
        // annulus between the stem machinery and the head boundary
        const double lo = std::max(3 * spec.stem_radius(k),
                                   0.05 * spec.head_radius(k));
        const double s = lo + (0.95 * spec.head_radius(k) - lo) *
                                  (is + 0.5) / n_s;
        for (int it = 0; it < n_theta; ++it) {
          const double th = 2 * M_PI * (it + 0.37) / n_theta;
          Point x = Point::zero(n);
          for (int i = 0; i < n - 1; ++i) x[i] = spec.z[k - 1][i];
          x[0] += s * std::cos(th);
          x[1] += s * std::sin(th);
          x.set_axial(2.0);
          if (!spec.in_ambient(x)) continue;
          Vec nv = Vec::zero(n);
          nv[n - 1] = 1;
          out.push_back({x, nv, spec.head_radius(k)});
        }
      }
      break;
    }
    case Face::CubeTop: {
      const int grid = std::max(2, static_cast<int>(std::sqrt(count)));
      for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
          Point x = Point::zero(n);
          x[0] = 0.06 + 0.88 * (i + 0.5) / grid;
          x[1] = 0.06 + 0.88 * (j + 0.5) / grid;
          for (int c = 2; c < n - 1; ++c) x[c] = 0.5;
          x.set_axial(1.0);
          bool near_stem = false;
          for (int kk = 1; kk <= spec.m; ++kk)
            if (spec.base_dist(x, kk) < 3 * spec.stem_radius(kk))
              near_stem = true;
          if (near_stem) continue;
          Vec nv = Vec::zero(n);
          nv[n - 1] = 1;
          out.push_back({x, nv, 1.0});
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace

namespace {

// Region kinds expected on the two sides of a face.  Samples whose offset
// points stray into foreign regions (collar overlaps of neighbouring k, the
// ambient boundary) measure a different interface and are skipped.
bool side_matches(const MushroomSpec& spec, Face face, int k, const Point& x,
                  bool outer) {
  const auto tag = geometry::classify(spec, x);
  switch (face) {
    case Face::StemLateral:
      return outer ? tag.same_region(geometry::tag_stem_collar(k))
                   : tag == geometry::tag_stem(k);
    case Face::StemCollarOuter:
      return outer ? tag.kind == RegionKind::Slab
                   : tag.same_region(geometry::tag_stem_collar(k));
    case Face::CubeTop:
      return outer ? tag.kind == RegionKind::Slab ||
                         tag.kind == RegionKind::Stem ||
                         tag.kind == RegionKind::StemCollar
                   : tag.kind == RegionKind::Cube;
    case Face::HeadBottom:
      return outer ? tag == geometry::tag_head(k)
                   : tag.kind == RegionKind::Slab ||
                         tag.kind == RegionKind::StemCollar;
    case Face::HeadLateral:
      return outer ? tag.same_region(geometry::tag_head_collar(k))
                   : tag == geometry::tag_head(k);
    case Face::HeadCollarOuter:
      return outer ? tag.kind == RegionKind::Outside
                   : tag.same_region(geometry::tag_head_collar(k));
  }
  return false;
}

}  // namespace

TraceJumpReport trace_jump(const MushroomSpec& spec, const ScalarField& u,
                           Face face, int k, double q, int samples) {
  if ((face == Face::CubeTop && k != 0) ||
      (face != Face::CubeTop && (k < 1 || k > spec.m)))
    throw ConfigError("trace_jump: bad cylinder index for face");

  ExtensionField ef(spec, u);
  const auto pts = face_samples(spec, face, k, samples);

  constexpr double eps_rel[] = {1e-3, 1e-4, 1e-5, 1e-6};
  TraceJumpReport rep;
  double acc_q = 0;
  for (const auto& fs : pts) {
    double j[4];
    bool usable = true;
    for (int i = 0; i < 4 && usable; ++i) {
      const double eps = eps_rel[i] * fs.scale;
      const Point xp = fs.x + eps * fs.normal;
      const Point xm = fs.x - eps * fs.normal;
      if (!spec.in_ambient(xp) || !spec.in_ambient(xm) ||
          !side_matches(spec, face, k, xp, true) ||
          !side_matches(spec, face, k, xm, false)) {
        usable = false;
        break;
      }
      j[i] = ef.value(xp) - ef.value(xm);
    }
    if (!usable) continue;
    // one-sided limits approach the jump linearly in eps
    const double e1 = eps_rel[2] * fs.scale, e2 = eps_rel[3] * fs.scale;
    const double j0 = (e1 * j[3] - e2 * j[2]) / (e1 - e2);
    rep.sup_jump = std::max(rep.sup_jump, std::abs(j0));
    acc_q += std::pow(std::abs(j0), q);
    rep.eps_min = e2;
    ++rep.samples;
  }
  if (rep.samples == 0)
    throw NumericalError("trace_jump: no usable face samples");
  rep.lq_mean = std::pow(acc_q / rep.samples, 1.0 / q);
  return rep;
}

}  // namespace sobexlab::extension
