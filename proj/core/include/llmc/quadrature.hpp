#pragma once

// Adaptive composite Gauss-Legendre quadrature with mandatory panel
// boundaries. Integrands in this library are only piecewise smooth, so every
// known discontinuity is passed in as a breakpoint and never straddled by a
// panel.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "llmc/error.hpp"

namespace llmc::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  std::size_t max_panels = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

namespace detail {

struct GaussLegendre15 {
  std::array<double, 15> nodes{};
  std::array<double, 15> weights{};
};

// Nodes and weights on [-1, 1] from Newton iteration on P_15.
inline GaussLegendre15 compute_gauss_legendre_15() {
  constexpr int n = 15;
  GaussLegendre15 rule;
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.nodes[i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

inline const GaussLegendre15& gauss_legendre_15() {
  static const GaussLegendre15 rule = compute_gauss_legendre_15();
  return rule;
}

template <class F>
double gauss_panel(F& f, double a, double b) {
  const auto& rule = gauss_legendre_15();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

struct Panel {
  double a;
  double b;
  double left;   // G15 on [a, mid]
  double right;  // G15 on [mid, b]
  double error;  // |G15[a,b] - (left + right)|
  double value() const { return left + right; }
};

struct ByError {
  bool operator()(const Panel& p, const Panel& q) const { return p.error < q.error; }
};

}  // namespace detail

/// Integrates f over [a, b]. Breakpoints strictly inside (a, b) become fixed
/// panel boundaries. Panels are bisected, worst first, until the summed
/// error estimate is below max(abs_tol, rel_tol * |I|).
template <class F>
Result integrate(F&& f, double a, double b, std::span<const double> breakpoints = {},
                 const Options& opts = {}) {
  Result result;
  if (!(b > a)) return result;

  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(a);
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto make_panel = [&f](double l, double r, double whole) {
    const double m = 0.5 * (l + r);
    detail::Panel p{l, r, detail::gauss_panel(f, l, m), detail::gauss_panel(f, m, r), 0.0};
    p.error = std::abs(whole - p.value());
    return p;
  };

  std::vector<detail::Panel> heap;
  heap.reserve(2 * cuts.size() + 16);
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double whole = detail::gauss_panel(f, cuts[i], cuts[i + 1]);
    heap.push_back(make_panel(cuts[i], cuts[i + 1], whole));
    total += heap.back().value();
    total_error += heap.back().error;
  }
  std::make_heap(heap.begin(), heap.end(), detail::ByError{});

  while (total_error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (!std::isfinite(total) || !std::isfinite(total_error)) {
      const auto& w = heap.front();
      throw QuadratureError("non-finite integrand", w.a, w.b, w.error);
    }
    if (heap.size() >= opts.max_panels) {
      const auto& w = heap.front();
      throw QuadratureError("quadrature did not converge", w.a, w.b, w.error);
    }
    std::pop_heap(heap.begin(), heap.end(), detail::ByError{});
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      throw QuadratureError("panel cannot be bisected further", worst.a, worst.b, worst.error);
    }
    const detail::Panel lo = make_panel(worst.a, m, worst.left);
    const detail::Panel hi = make_panel(m, worst.b, worst.right);
    total += lo.value() + hi.value() - worst.value();
    total_error += lo.error + hi.error - worst.error;
    heap.push_back(lo);
    std::push_heap(heap.begin(), heap.end(), detail::ByError{});
    heap.push_back(hi);
    std::push_heap(heap.begin(), heap.end(), detail::ByError{});
  }

  // Re-sum left to right so the value does not depend on refinement history.
  std::sort(heap.begin(), heap.end(),
            [](const detail::Panel& p, const detail::Panel& q) { return p.a < q.a; });
  double value = 0.0;
  double err = 0.0;
  for (const auto& p : heap) {
    value += p.value();
    err += p.error;
  }
  if (!std::isfinite(value)) {
    throw QuadratureError("non-finite integral", a, b, err);
  }
  result.value = value;
  result.error = err;
  result.panels = heap.size();
  return result;
}

/// Convenience overload returning only the value.
template <class F>
double integral(F&& f, double a, double b, std::span<const double> breakpoints = {},
                const Options& opts = {}) {
  return integrate(std::forward<F>(f), a, b, breakpoints, opts).value;
}

}  // namespace llmc::quad
