#include "llmc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "llmc/error.hpp"

namespace llmc {

namespace {

constexpr double kCutoffRatio = 1e-16;
constexpr double kCutoffCap = 1048576.0;  // 2^20
constexpr double kDensityUpperCap = 1125899906842624.0;  // 2^50

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

quad::Options tight() {
  quad::Options o;
  o.abs_tol = 0.0;
  o.rel_tol = 1e-12;
  o.max_panels = 20000;
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// TargetDensity

TargetDensity::TargetDensity(RealFunction density, std::vector<double> breakpoints,
                             std::optional<double> tail_rate_hint,
                             std::optional<double> domain_cutoff) {
  if (!density) throw MalformedDensity("target density has no evaluator");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > 0.0) || !std::isfinite(breakpoints[i])) {
      throw MalformedDensity("breakpoints must be positive and finite");
    }
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      throw MalformedDensity("breakpoints must be strictly increasing");
    }
  }
  if (tail_rate_hint && !(*tail_rate_hint > 0.0)) {
    throw MalformedDensity("tail rate hint must be positive");
  }
  if (domain_cutoff && !(*domain_cutoff > 0.0 && std::isfinite(*domain_cutoff))) {
    throw MalformedDensity("domain cutoff must be positive and finite");
  }

  auto state = std::make_shared<State>();
  state->density = std::move(density);
  state->breakpoints = std::move(breakpoints);
  state->tail_rate_hint = tail_rate_hint;
  state_ = state;

  // Peak and cutoff: scan (0, 1] and then each doubling interval.
  double peak = 0.0;
  auto scan = [&](double lo, double hi, int points) {
    for (int i = 1; i <= points; ++i) {
      peak = std::max(peak, (*this)(lo + (hi - lo) * i / points));
    }
  };
  for (int k = -6; k < 0; ++k) scan(std::pow(10.0, k) * 0.1, std::pow(10.0, k + 1) * 0.1, 16);
  scan(0.0, 1.0, 256);

  if (domain_cutoff) {
    double hi = 1.0;
    while (hi < *domain_cutoff) {
      scan(hi, std::min(2 * hi, *domain_cutoff), 64);
      hi *= 2;
    }
    state->cutoff = *domain_cutoff;
  } else {
    double hi = 1.0;
    bool found = false;
    while (hi < kCutoffCap) {
      scan(hi, 2 * hi, 64);
      hi *= 2;
      if ((*this)(hi) < kCutoffRatio * peak) {
        found = true;
        break;
      }
    }
    if (found) {
      double lo = hi / 2;
      if ((*this)(lo) < kCutoffRatio * peak) lo = 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((*this)(mid) < kCutoffRatio * peak) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      state->cutoff = hi;
    } else {
      state->cutoff = kCutoffCap;
      state->cutoff_resolved = false;
    }
  }
  state->peak = peak;
  if (!(peak > 0.0)) throw MalformedDensity("target density vanishes on the scanned grid");

  double mass = 0.0;
  try {
    mass = integrate(0.0, state->cutoff, tight());
  } catch (const QuadratureError& e) {
    throw MalformedDensity(std::string("target mass quadrature failed: ") + e.what());
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw MalformedDensity("target density has non-positive or non-finite mass");
  }
  state->mass = mass;
}

double TargetDensity::operator()(double x) const {
  if (!(x > 0.0)) return 0.0;
  double v = 0.0;
  try {
    v = state_->density(x);
  } catch (const MalformedDensity&) {
    throw;
  } catch (const std::exception& e) {
    throw MalformedDensity("target density evaluation failed at x=" + fmt(x) + ": " + e.what());
  }
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw MalformedDensity("target density is negative or non-finite at x=" + fmt(x));
  }
  return v;
}

double TargetDensity::integrate(double a, double b, const quad::Options& opts) const {
  return quad::integral([this](double x) { return (*this)(x); }, a, b, state_->breakpoints, opts);
}

// ---------------------------------------------------------------------------
// LevyMeasure

struct LevyMeasure::State {
  std::vector<Atom> atoms;                // sorted by location
  std::vector<double> atom_suffix_mass;   // sum of masses from index i on
  double atom_mass = 0.0;
  double atom_moment = 0.0;

  std::optional<JumpDensity> density;
  double upper = 0.0;                     // effective density support end
  std::vector<double> anchors;            // cell boundaries of the density support
  std::vector<double> anchor_tail;        // density tail at each anchor
  double density_mass = 0.0;
  double density_moment = 0.0;

  bool mass_finite = true;
  bool moment_finite = true;
};

LevyMeasure::LevyMeasure(std::vector<Atom> atoms, std::optional<JumpDensity> density) {
  auto s = std::make_shared<State>();
  for (const auto& a : atoms) {
    if (!std::isfinite(a.location) || !std::isfinite(a.mass)) {
      throw InvalidMeasure("atom location and mass must be finite");
    }
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& p, const Atom& q) { return p.location < q.location; });
  s->atoms = std::move(atoms);
  s->atom_suffix_mass.assign(s->atoms.size() + 1, 0.0);
  for (std::size_t i = s->atoms.size(); i-- > 0;) {
    s->atom_suffix_mass[i] = s->atom_suffix_mass[i + 1] + s->atoms[i].mass;
  }
  for (const auto& a : s->atoms) {
    s->atom_mass += a.mass;
    s->atom_moment += a.location * a.mass;
  }

  if (density) {
    if (!density->density) throw InvalidMeasure("jump density has no evaluator");
    auto& d = *density;
    std::sort(d.breakpoints.begin(), d.breakpoints.end());
    d.breakpoints.erase(std::unique(d.breakpoints.begin(), d.breakpoints.end()),
                        d.breakpoints.end());
    s->density = std::move(density);
  }
  state_ = s;

  if (!s->density) return;
  const auto& d = *s->density;
  const double lower = std::max(0.0, d.support_lower);

  // Effective upper end: the given bound, or the first power of two beyond
  // which z^2 f(z) is negligible.
  if (std::isfinite(d.support_upper)) {
    s->upper = d.support_upper;
  } else {
    double scale = 0.0;
    for (int i = 1; i <= 256; ++i) {
      const double z = lower + i / 16.0;
      scale = std::max(scale, (1.0 + z) * z * density_at(z));
    }
    double z = std::max(1.0, 2.0 * lower);
    bool found = false;
    while (z <= kDensityUpperCap) {
      const double v = z * z * density_at(z);
      if (v <= 1e-18 * std::max(scale, 1e-300)) {
        found = true;
        break;
      }
      scale = std::max(scale, (1.0 + z) * z * density_at(z));
      z *= 2;
    }
    s->upper = found ? z : kDensityUpperCap;
    if (!found) s->moment_finite = false;
  }
  if (!(s->upper > lower)) {
    s->upper = lower;
    return;
  }

  // Anchors: unit-ish uniform cells near the origin, powers of two beyond,
  // and every declared breakpoint.
  std::vector<double> anchors{lower, s->upper};
  const double span = s->upper - lower;
  const double uniform_end = span <= 256.0 ? s->upper : lower + 256.0;
  const double h = (uniform_end - lower) / 256.0;
  for (int i = 1; i < 256; ++i) anchors.push_back(lower + h * i);
  for (double p = 512.0; p < s->upper; p *= 2) {
    if (p > uniform_end) anchors.push_back(p);
  }
  anchors.push_back(uniform_end);
  for (double b : d.breakpoints) {
    if (b > lower && b < s->upper) anchors.push_back(b);
  }
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
  s->anchors = std::move(anchors);

  const std::size_t n = s->anchors.size();
  s->anchor_tail.assign(n, 0.0);
  auto f = [this](double z) { return density_at(z); };
  try {
    if (d.tail) {
      const double up = std::isfinite(d.support_upper) ? d.tail(s->upper) : 0.0;
      for (std::size_t k = 0; k < n; ++k) s->anchor_tail[k] = d.tail(s->anchors[k]) - up;
      s->anchor_tail[n - 1] = std::isfinite(d.support_upper) ? 0.0 : d.tail(s->upper);
      s->density_mass = d.tail(lower) - up;
    } else {
      for (std::size_t k = n - 1; k-- > 0;) {
        s->anchor_tail[k] =
            s->anchor_tail[k + 1] + quad::integral(f, s->anchors[k], s->anchors[k + 1], {}, tight());
      }
      s->density_mass = s->anchor_tail[0];
    }
  } catch (const QuadratureError&) {
    s->mass_finite = false;
    s->moment_finite = false;
    return;
  } catch (const InvalidMeasure&) {
    throw;
  } catch (const std::exception& e) {
    throw InvalidMeasure(std::string("jump density tail evaluation failed: ") + e.what());
  }
  if (!std::isfinite(s->density_mass) || s->density_mass < 0.0) {
    s->mass_finite = false;
    s->moment_finite = false;
    return;
  }

  if (s->moment_finite) {
    try {
      s->density_moment = quad::integral([&f](double z) { return z * f(z); }, lower, s->upper,
                                         s->anchors, tight());
    } catch (const QuadratureError&) {
      s->moment_finite = false;
    }
    if (!std::isfinite(s->density_moment)) s->moment_finite = false;
  }
}

std::span<const Atom> LevyMeasure::atoms() const { return state_->atoms; }
bool LevyMeasure::has_density() const { return state_->density.has_value(); }
const std::optional<JumpDensity>& LevyMeasure::density() const { return state_->density; }
double LevyMeasure::density_mass() const { return state_->density_mass; }
bool LevyMeasure::mass_finite() const { return state_->mass_finite; }
bool LevyMeasure::moment_finite() const { return state_->moment_finite; }
double LevyMeasure::density_upper() const { return state_->upper; }

double LevyMeasure::density_at(double z) const {
  const auto& d = state_->density;
  if (!d || !(z > d->support_lower) || !(z < d->support_upper) || !(z > 0.0)) return 0.0;
  double v = 0.0;
  try {
    v = d->density(z);
  } catch (const std::exception& e) {
    throw InvalidMeasure("jump density evaluation failed at z=" + fmt(z) + ": " + e.what());
  }
  if (!std::isfinite(v) || v < 0.0) {
    throw InvalidMeasure("jump density is negative or non-finite at z=" + fmt(z));
  }
  return v;
}

double LevyMeasure::density_tail(double z) const {
  const auto& s = *state_;
  if (!s.density || s.anchors.empty()) return 0.0;
  if (!s.mass_finite) throw InvalidMeasure("jump density has infinite mass");
  if (z <= s.anchors.front()) return s.density_mass;
  if (z >= s.upper) return 0.0;
  if (s.density->tail) {
    const double up = std::isfinite(s.density->support_upper) ? s.density->tail(s.upper) : 0.0;
    return s.density->tail(z) - up;
  }
  return density_tail_numeric(z);
}

double LevyMeasure::density_tail_numeric(double z) const {
  const auto& s = *state_;
  const auto it = std::upper_bound(s.anchors.begin(), s.anchors.end(), z);
  const auto k = static_cast<std::size_t>(it - s.anchors.begin());  // anchors[k-1] <= z < anchors[k]
  quad::Options o;
  o.abs_tol = 1e-15 * s.density_mass;
  o.rel_tol = 1e-12;
  const double cell = quad::integral([this](double u) { return density_at(u); }, z, s.anchors[k],
                                     {}, o);
  return s.anchor_tail[k] + cell;
}

double LevyMeasure::integrated_tail(double x) const {
  if (!(x > 0.0)) throw PreconditionError("integrated tail requires x > 0");
  const auto& s = *state_;
  const auto it = std::upper_bound(s.atoms.begin(), s.atoms.end(), x,
                                   [](double v, const Atom& a) { return v < a.location; });
  const double atom_part = s.atom_suffix_mass[static_cast<std::size_t>(it - s.atoms.begin())];
  return atom_part + density_tail(x);
}

double LevyMeasure::total_mass() const {
  const auto& s = *state_;
  const double m = s.atom_mass + s.density_mass;
  if (!s.mass_finite || !std::isfinite(m)) throw InvalidMeasure("jump measure has infinite mass");
  if (!(m > 0.0)) throw InvalidMeasure("jump measure has zero mass");
  return m;
}

double LevyMeasure::first_moment() const {
  const auto& s = *state_;
  if (!s.mass_finite || !s.moment_finite) {
    throw AssumptionViolation("jump measure has infinite first moment");
  }
  return s.atom_moment + s.density_moment;
}

double LevyMeasure::mean_jump() const { return first_moment() / total_mass(); }

bool LevyMeasure::is_zero() const {
  const auto& s = *state_;
  return s.atom_mass == 0.0 && (!s.density || (s.mass_finite && s.density_mass == 0.0));
}

std::vector<double> LevyMeasure::discontinuities() const {
  const auto& s = *state_;
  std::vector<double> out;
  for (const auto& a : s.atoms) out.push_back(a.location);
  if (s.density) {
    if (s.density->support_lower > 0.0) out.push_back(s.density->support_lower);
    for (double b : s.density->breakpoints) out.push_back(b);
    if (std::isfinite(s.density->support_upper)) out.push_back(s.density->support_upper);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LevyMeasure LevyMeasure::restricted(double lo, double hi) const {
  const auto& s = *state_;
  std::vector<Atom> atoms;
  for (const auto& a : s.atoms) {
    if (a.location > lo && a.location < hi) atoms.push_back(a);
  }
  std::optional<JumpDensity> dens;
  if (s.density) {
    const auto& d = *s.density;
    const double new_lo = std::max(lo, d.support_lower);
    const double new_hi = std::min(hi, d.support_upper);
    if (new_lo < new_hi) {
      JumpDensity r;
      r.density = d.density;
      r.support_lower = new_lo;
      r.support_upper = new_hi;
      for (double b : d.breakpoints) {
        if (b > new_lo && b < new_hi) r.breakpoints.push_back(b);
      }
      if (d.tail) {
        r.tail = [tail = d.tail, new_lo, new_hi](double z) {
          const double zz = std::max(z, new_lo);
          if (zz >= new_hi) return 0.0;
          return tail(zz) - tail(new_hi);
        };
      }
      dens = std::move(r);
    }
  }
  return LevyMeasure(std::move(atoms), std::move(dens));
}

double LevyMeasure::mass_outside(double lo, double hi) const {
  const auto& s = *state_;
  double m = 0.0;
  for (const auto& a : s.atoms) {
    if (a.location <= lo || a.location >= hi) m += a.mass;
  }
  if (s.density) {
    const double low_part = lo > 0.0 ? s.density_mass - density_tail(lo) : 0.0;
    m += low_part + density_tail(hi);
  }
  return m;
}

void LevyMeasure::require_valid() const {
  const auto& s = *state_;
  for (const auto& a : s.atoms) {
    if (!(a.location > 0.0)) {
      throw InvalidMeasure("atom at " + fmt(a.location) + " violates spectral positivity");
    }
    if (!(a.mass > 0.0)) throw InvalidMeasure("atom masses must be positive");
  }
  if (s.density && s.density->support_lower < 0.0) {
    throw InvalidMeasure("jump density must be supported on (0, inf)");
  }
  total_mass();
  first_moment();
}

double LevyMeasure::sample(RandomStream& rng) const {
  const auto& s = *state_;
  const double total = total_mass();
  double u = rng.uniform() * total;
  for (const auto& a : s.atoms) {
    if (u < a.mass) return a.location;
    u -= a.mass;
  }
  if (!s.density || s.density_mass <= 0.0) return s.atoms.back().location;
  return invert_density_tail(rng.uniform() * s.density_mass);
}

double LevyMeasure::invert_density_tail(double target) const {
  const auto& s = *state_;
  // anchor_tail is non-increasing; find the cell with tail[k] >= target > tail[k+1].
  const auto it = std::lower_bound(s.anchor_tail.begin(), s.anchor_tail.end(), target,
                                   [](double t, double v) { return t >= v; });
  std::size_t k = static_cast<std::size_t>(it - s.anchor_tail.begin());
  if (k == 0) k = 1;
  if (k >= s.anchors.size()) k = s.anchors.size() - 1;
  double lo = s.anchors[k - 1];
  double hi = s.anchors[k];
  const double t_lo = s.anchor_tail[k - 1];
  const double t_hi = s.anchor_tail[k];
  double z = t_lo > t_hi ? lo + (hi - lo) * (t_lo - target) / (t_lo - t_hi) : 0.5 * (lo + hi);
  const double tol = 1e-13 * s.density_mass;
  for (int it_count = 0; it_count < 200; ++it_count) {
    const double g = density_tail(z) - target;
    if (std::abs(g) <= tol) break;
    if (g > 0.0) {
      lo = z;
    } else {
      hi = z;
    }
    if (hi - lo <= 1e-15 * (1.0 + std::abs(z))) break;
    const double slope = -density_at(z);
    double next = slope < 0.0 ? z - g / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    z = next;
  }
  return z;
}

// ---------------------------------------------------------------------------

bool LevyTriplet::is_nondeterministic() const {
  return sigma_sq > 0.0 || !mu.is_zero() || (rho && !rho->is_zero());
}

double integrated_tail(const LevyMeasure& mu, double x) { return mu.integrated_tail(x); }

double signed_integrated_tail(const LevyMeasure& mu, double x) {
  return x > 0.0 ? mu.integrated_tail(x) : 0.0;
}

double double_integrated_tail(const LevyMeasure& rho, double x) {
  if (!(x > 0.0)) return 0.0;
  double v = 0.0;
  for (const auto& a : rho.atoms()) v += a.mass * std::max(0.0, a.location - x);
  if (rho.has_density() && rho.density_upper() > x) {
    auto bps = rho.discontinuities();
    quad::Options o;
    o.abs_tol = 1e-14;
    o.rel_tol = 1e-11;
    v += quad::integral([&rho, x](double w) { return (w - x) * rho.density_at(w); }, x,
                        rho.density_upper(), bps, o);
  }
  return v;
}

double total_mass(const LevyMeasure& mu) { return mu.total_mass(); }

double mean_jump(const LevyMeasure& mu) { return mu.mean_jump(); }

double sample_jump(const LevyMeasure& mu, RandomStream& rng) { return mu.sample(rng); }

}  // namespace llmc
