#include "llmc/drift_field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "llmc/drift.hpp"
#include "llmc/error.hpp"
#include "llmc/random.hpp"
#include "parallel.hpp"

namespace llmc {

namespace {

enum class Kind : char { Base, Kink, JumpLeft, JumpRight };

struct Node {
  double x;
  Kind kind;
};

// n/4 points log-spaced up to min(1, cutoff/10), the rest linear to cutoff.
std::vector<double> base_grid(double x_min, double cutoff, std::size_t n) {
  const double x_split = std::max(std::min(1.0, cutoff / 10.0), 10.0 * x_min);
  const std::size_t n_log = std::max<std::size_t>(n / 4, 2);
  const std::size_t n_lin = n - n_log;

  std::vector<double> base;
  const double l0 = std::log(x_min);
  const double l1 = std::log(x_split);
  for (std::size_t i = 0; i < n_log; ++i) {
    base.push_back(std::exp(l0 + (l1 - l0) * static_cast<double>(i) / (n_log - 1)));
  }
  base.front() = x_min;
  base.back() = x_split;
  for (std::size_t i = 1; i <= n_lin; ++i) {
    base.push_back(x_split + (cutoff - x_split) * static_cast<double>(i) / n_lin);
  }
  base.back() = cutoff;
  return base;
}

std::vector<Node> make_nodes(const TargetDensity& pi, const LevyMeasure& mu, std::size_t n,
                             double x_min) {
  const double cutoff = pi.domain_cutoff();
  const std::vector<double> base = base_grid(x_min, cutoff, n);

  std::vector<Node> special;
  auto inside = [&](double v) { return v > x_min && v < cutoff; };
  for (double b : pi.breakpoints()) {
    const double eps = 1e-9 * std::max(1.0, b);
    if (inside(b - eps) && inside(b + eps)) {
      special.push_back({b - eps, Kind::JumpLeft});
      special.push_back({b + eps, Kind::JumpRight});
    }
  }
  for (double m : mu.discontinuities()) {
    if (inside(m)) special.push_back({m, Kind::Kink});
    for (double b : pi.breakpoints()) {
      if (inside(m + b)) special.push_back({m + b, Kind::Kink});
    }
  }
  std::sort(special.begin(), special.end(), [](const Node& a, const Node& b) { return a.x < b.x; });

  // Drop base nodes crowding a special node; keep special nodes unique.
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double h = std::min(i > 0 ? base[i] - base[i - 1] : base[1] - base[0],
                              i + 1 < base.size() ? base[i + 1] - base[i] : base[i] - base[i - 1]);
    const auto it = std::lower_bound(special.begin(), special.end(), base[i],
                                     [](const Node& s, double v) { return s.x < v; });
    bool crowded = false;
    if (it != special.end() && it->x - base[i] < 0.3 * h) crowded = true;
    if (it != special.begin() && base[i] - std::prev(it)->x < 0.3 * h) crowded = true;
    if (!crowded || i == 0) nodes.push_back({base[i], Kind::Base});
  }
  for (const auto& s : special) nodes.push_back(s);
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.x < b.x; });
  std::vector<Node> unique;
  for (const auto& nd : nodes) {
    if (!unique.empty() && nd.x <= unique.back().x) {
      if (nd.kind != Kind::Base) unique.back() = nd;
      continue;
    }
    unique.push_back(nd);
  }
  return unique;
}

// Derivative at t[j] of the Lagrange polynomial through t[lo..lo+k).
double lagrange_slope(const std::vector<double>& t, const std::vector<double>& y, std::size_t lo,
                      std::size_t k, std::size_t j) {
  double d = 0.0;
  for (std::size_t a = lo; a < lo + k; ++a) {
    if (a == j) {
      double s = 0.0;
      for (std::size_t b = lo; b < lo + k; ++b) {
        if (b != j) s += 1.0 / (t[j] - t[b]);
      }
      d += y[j] * s;
    } else {
      double w = 1.0 / (t[a] - t[j]);
      for (std::size_t b = lo; b < lo + k; ++b) {
        if (b != a && b != j) w *= (t[j] - t[b]) / (t[a] - t[b]);
      }
      d += y[a] * w;
    }
  }
  return d;
}

void write_number(std::ostream& os, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, r.ptr - buf);
}

}  // namespace

double DriftField::exact(double x) const { return drift_cp(pi_, mu_, x); }

double DriftField::operator()(double x) const {
  if (x < x_.front()) return exact(x);
  if (x >= x_.back()) return phi_.back();
  const auto i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  if (bridge_[i]) {
    const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return phi_[i] + w * (phi_[i + 1] - phi_[i]);
  }
  const double h = t_[i + 1] - t_[i];
  const double s = (std::log(x) - t_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double psi = (2 * s3 - 3 * s2 + 1) * psi_[i] + (s3 - 2 * s2 + s) * h * slope_[2 * i] +
                     (-2 * s3 + 3 * s2) * psi_[i + 1] + (s3 - s2) * h * slope_[2 * i + 1];
  return -std::exp(psi);
}

void DriftField::write_csv(std::ostream& os, std::size_t rows) const {
  if (rows < 2) throw PreconditionError("write_csv needs at least 2 rows");
  os << "x,phi\n";
  for (double x : base_grid(grid_min(), grid_max(), rows)) {
    write_number(os, x);
    os << ',';
    write_number(os, (*this)(x));
    os << '\n';
  }
}

void DriftField::write_csv(std::ostream& os) const {
  os << "x,phi\n";
  for (std::size_t i = 0; i < x_.size(); ++i) {
    write_number(os, x_[i]);
    os << ',';
    write_number(os, phi_[i]);
    os << '\n';
  }
}

DriftField build_drift_table(const TargetDensity& pi, const LevyMeasure& mu, std::size_t n_points,
                             const DriftTableOptions& opts) {
  if (n_points < 64) {
    throw PreconditionError("drift table needs at least 64 points, got " +
                            std::to_string(n_points));
  }
  if (!(opts.x_min > 0.0) || opts.x_min > 1e-6) {
    throw PreconditionError("drift table x_min must lie in (0, 1e-6]");
  }
  if (!(pi.domain_cutoff() > 100.0 * opts.x_min)) {
    throw PreconditionError("domain cutoff too small for a drift table");
  }

  DriftField field(pi, mu);
  for (int level = 0;; ++level) {
    const auto nodes = make_nodes(pi, mu, n_points << level, opts.x_min);
    const std::size_t n = nodes.size();
    std::vector<double> phi(n);
    detail::parallel_for(n, opts.threads, [&](std::size_t i) { phi[i] = drift_cp(pi, mu, nodes[i].x); });
    for (std::size_t i = 0; i < n; ++i) {
      if (!(phi[i] < 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "drift is not negative at x=" << nodes[i].x << " (phi=" << phi[i] << ")";
        throw FormulaInconsistency(os.str());
      }
    }

    field.x_.resize(n);
    field.phi_ = phi;
    field.t_.resize(n);
    field.psi_.resize(n);
    field.bridge_.assign(n, 0);
    field.slope_.assign(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      field.x_[i] = nodes[i].x;
      field.t_[i] = std::log(nodes[i].x);
      field.psi_[i] = std::log(-phi[i]);
    }

    // Segments are maximal runs of nodes free of kinks and jumps inside.
    std::size_t start = 0;
    while (start + 1 < n) {
      std::size_t end = start + 1;
      while (end + 1 < n && nodes[end].kind == Kind::Base) ++end;
      if (nodes[start].kind == Kind::JumpLeft) {
        field.bridge_[start] = 1;
        start = end;
        continue;
      }
      if (nodes[end].kind == Kind::JumpRight && end == start + 1) {
        field.bridge_[start] = 1;
        start = end;
        continue;
      }
      const std::size_t count = end - start + 1;
      const std::size_t k = std::min<std::size_t>(5, count);
      std::vector<double> m(count);
      for (std::size_t j = start; j <= end; ++j) {
        const std::size_t lo =
            std::clamp<std::size_t>(j >= start + 2 ? j - 2 : start, start, end + 1 - k);
        m[j - start] = lagrange_slope(field.t_, field.psi_, lo, k, j);
      }
      for (std::size_t i = start; i < end; ++i) {
        double m0 = m[i - start];
        double m1 = m[i + 1 - start];
        const double d = (field.psi_[i + 1] - field.psi_[i]) / (field.t_[i + 1] - field.t_[i]);
        auto secant = [&](std::size_t a) {
          return (field.psi_[a + 1] - field.psi_[a]) / (field.t_[a + 1] - field.t_[a]);
        };
        const bool monotone = d != 0.0 && (i == start || secant(i - 1) * d > 0.0) &&
                              (i + 1 == end || secant(i + 1) * d > 0.0);
        if (monotone) {
          double a = m0 / d;
          double b = m1 / d;
          if (a < 0.0) a = 0.0;
          if (b < 0.0) b = 0.0;
          const double r = a * a + b * b;
          if (r > 9.0) {
            const double tau = 3.0 / std::sqrt(r);
            a *= tau;
            b *= tau;
          }
          m0 = a * d;
          m1 = b * d;
        }
        field.slope_[2 * i] = m0;
        field.slope_[2 * i + 1] = m1;
      }
      start = end;
    }

    // Validation at deterministic pseudo-random points, half uniform in x
    // and half uniform in log x.
    RandomStream rng(0x6c6c6d63u, static_cast<std::uint64_t>(level));
    std::vector<double> probe;
    const double lo = field.x_.front();
    const double hi = field.x_.back();
    while (probe.size() < opts.validation_points) {
      const bool log_scale = probe.size() % 2 == 1;
      const double u = rng.uniform();
      const double x = log_scale ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)))
                                 : lo + u * (hi - lo);
      const auto i = static_cast<std::size_t>(
                         std::upper_bound(field.x_.begin(), field.x_.end(), x) - field.x_.begin()) -
                     1;
      if (i + 1 >= n || field.bridge_[i]) continue;
      probe.push_back(x);
    }
    std::vector<double> err(probe.size());
    detail::parallel_for(probe.size(), opts.threads, [&](std::size_t i) {
      const double e = drift_cp(pi, mu, probe[i]);
      err[i] = std::abs(field(probe[i]) - e) / std::abs(e);
    });
    field.validation_error_ = *std::max_element(err.begin(), err.end());
    field.refinements_ = level;
    if (field.validation_error_ <= opts.tolerance) {
      field.accuracy_warning_ = false;
      break;
    }
    if (level >= opts.max_refinements) {
      field.accuracy_warning_ = true;
      break;
    }
  }
  return field;
}

}  // namespace llmc
