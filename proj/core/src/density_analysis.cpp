#include "archmix/density_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "archmix/errors.hpp"
#include "archmix/quadrature.hpp"

namespace archmix {

namespace {

// Integrate g over [0, hi], routing the origin through the y = u^2 transform
// when the innovation density blows up at zero, and splitting at the knots.
double integrate_density_functional(const InnovationModel& innovation,
                                    const std::function<double(double)>& g, double hi,
                                    std::vector<double> knots) {
  std::sort(knots.begin(), knots.end());
  knots.erase(std::remove_if(knots.begin(), knots.end(),
                             [hi](double x) { return !(x > 0.0 && x < hi); }),
              knots.end());
  if (!innovation.density_unbounded_at_zero())
    return integrate_split(g, 0.0, hi, knots, 1e-9);
  const double first = knots.empty() ? hi : knots.front();
  double total = integrate_sqrt_singular(g, first, 1e-9);
  if (first < hi) total += integrate_split(g, first, hi, knots, 1e-9);
  return total;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1.0));
  return g;
}

// Crossing of (1/s1) f(y/s1) and (1/s2) f(y/s2) for the gamma-type families
// (exponential, scaled chi-square): y* = s1 s2 log(s2/s1)/(s2-s1). The |.| TV
// integrand has its only interior kink there.
std::vector<double> scale_crossing_knots(const InnovationModel& innovation, double s1, double s2) {
  if (innovation.family() == InnovationFamily::UniformOnZeroTwo) return {};
  if (s1 == s2) return {};
  return {s1 * s2 * std::log(s2 / s1) / (s2 - s1)};
}

// Crossing of f(u) and f(u(1+a)) for the unimodal chi-square(m >= 3) density:
// u* = (m-2) log(1+a) / (m a). Monotone densities have no interior crossing.
std::vector<double> clause_crossing_knots(const InnovationModel& innovation, double a) {
  if (innovation.monotone_density()) return {};
  const double m = static_cast<double>(innovation.dof());
  return {(m - 2.0) * std::log1p(a) / (m * a)};
}

}  // namespace

std::vector<double> default_lipschitz_grid() { return log_spaced(1e-3, 4.0, 33); }

LipschitzReport innovation_tv_lipschitz(const InnovationModel& innovation,
                                        std::span<const double> a_grid) {
  if (a_grid.empty()) throw ValidationError("innovation_tv_lipschitz: empty a-grid");
  for (double a : a_grid)
    if (!(a > 0.0))
      throw ValidationError("innovation_tv_lipschitz: grid point a = " + std::to_string(a) +
                            " is not positive");

  LipschitzReport rep;
  rep.tau_subgrid_points = 16;
  const double hi = innovation.upper_tail_cutoff(1e-12);
  for (double a : a_grid) {
    // density edges map to kinks of the scaled integrand (uniform: 2/(1+a), 2)
    std::vector<double> knots{2.0 / (1.0 + a), 2.0, 1.0};
    for (double x : clause_crossing_knots(innovation, a)) knots.push_back(x);

    auto f3 = [&](double u) {
      return std::abs(innovation.density(u) - innovation.density(u * (1.0 + a)));
    };
    const double i3 = integrate_density_functional(innovation, f3, hi, knots);
    rep.clause_iii.push_back({a, i3, i3 / a});

    const std::vector<double> taus = log_spaced(a / 256.0, a, rep.tau_subgrid_points);
    auto f4 = [&](double u) {
      const double fu = innovation.density(u);
      double best = 0.0;
      for (double tau : taus)
        best = std::max(best, std::abs(fu - innovation.density(u * (1.0 + tau))));
      return best;
    };
    const double i4 = integrate_density_functional(innovation, f4, hi, knots);
    rep.clause_iv.push_back({a, i4, i4 / a});
  }
  auto max_ratio = [](const std::vector<TvGridPoint>& pts) {
    double m = 0.0;
    for (const auto& p : pts) m = std::max(m, p.ratio);
    return m;
  };
  rep.k_iii = max_ratio(rep.clause_iii);
  rep.k_iv = std::max(rep.k_iii, max_ratio(rep.clause_iv));
  return rep;
}

ScaleMixtureTv scale_mixture_tv(const InnovationModel& innovation, double A, double B) {
  if (!(A > 0.0)) throw ValidationError("scale_mixture_tv: A must be > 0");
  if (B < 0.0) throw ValidationError("scale_mixture_tv: B must be >= 0");
  if (B == 0.0) return {0.0, 0.0};

  const double hi = (A + B) * innovation.upper_tail_cutoff(1e-12);
  auto g = [&](double y) {
    return std::abs(innovation.density(y / (A + B)) / (A + B) -
                    innovation.density(y / A) / A);
  };
  std::vector<double> knots{2.0 * A, 2.0 * (A + B), A, A + B};
  for (double x : scale_crossing_knots(innovation, A, A + B)) knots.push_back(x);
  const double tv = integrate_density_functional(innovation, g, hi, knots);
  const double bound = innovation.lipschitz_iii() * B / A + B / (A + B);
  if (tv > bound + 1e-6)
    throw ConsistencyError("scale_mixture_tv: TV " + std::to_string(tv) +
                           " exceeds the certified bound " + std::to_string(bound));
  return {tv, bound};
}

ScaleMixtureTv scale_mixture_sup_tv(const InnovationModel& innovation, double A,
                                    std::span<const double> Bs) {
  if (!(A > 0.0)) throw ValidationError("scale_mixture_sup_tv: A must be > 0");
  if (Bs.empty()) throw ValidationError("scale_mixture_sup_tv: empty B family");
  double bmax = 0.0, ratio_term = 0.0;
  for (double b : Bs) {
    if (b < 0.0) throw ValidationError("scale_mixture_sup_tv: B must be >= 0");
    bmax = std::max(bmax, b);
    ratio_term = std::max(ratio_term, b / (A + b));
  }
  if (bmax == 0.0) return {0.0, 0.0};

  const double hi = (A + bmax) * innovation.upper_tail_cutoff(1e-12);
  std::vector<double> knots{2.0 * A, A};
  for (double b : Bs) {
    knots.push_back(2.0 * (A + b));
    knots.push_back(A + b);
    for (double x : scale_crossing_knots(innovation, A, A + b)) knots.push_back(x);
  }
  auto g = [&](double y) {
    const double ref = innovation.density(y / A) / A;
    double best = 0.0;
    for (double b : Bs)
      best = std::max(best, std::abs(innovation.density(y / (A + b)) / (A + b) - ref));
    return best;
  };
  const double tv = integrate_density_functional(innovation, g, hi, knots);
  const double bound = innovation.lipschitz_iv() * bmax / A + ratio_term;
  if (tv > bound + 1e-6)
    throw ConsistencyError("scale_mixture_sup_tv: TV exceeds the certified bound");
  return {tv, bound};
}

double conditional_density(const InnovationModel& innovation, double p_term, double q_term,
                           double y) {
  if (!(p_term > 0.0)) throw ValidationError("conditional_density: p_term must be > 0");
  if (q_term < 0.0) throw ValidationError("conditional_density: q_term must be >= 0");
  const double scale = p_term + q_term;
  return innovation.density(y / scale) / scale;
}

}  // namespace archmix
