#include "archmix/verify.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "archmix/bounds.hpp"
#include "archmix/density_analysis.hpp"
#include "archmix/errors.hpp"
#include "archmix/process.hpp"
#include "archmix/quadrature.hpp"
#include "archmix/rng.hpp"
#include "archmix/volterra.hpp"

namespace archmix {

namespace {

double rel_err(double got, double want) {
  const double scale = std::max({std::abs(got), std::abs(want), 1e-300});
  return std::abs(got - want) / scale;
}

struct CheckAccum {
  VerifyCheck check;
  explicit CheckAccum(std::string name, double tol) : tol_(tol) { check.check = std::move(name); }
  void add(double err) {
    ++check.instances;
    check.max_rel_err = std::max(check.max_rel_err, err);
  }
  VerifyCheck done() {
    check.pass = check.instances > 0 && check.max_rel_err <= tol_;
    return check;
  }
  double tol_;
};

TvArchSpec random_tvarch2(SplitMix64& rng) {
  TvArchSpec spec;
  spec.p = 2;
  spec.delta = 0.1 + 0.3 * rng.next_uniform();
  const double budget = (1.0 - spec.delta) * (0.35 + 0.55 * rng.next_uniform());
  const double split = rng.next_uniform();
  // mild piecewise time variation, sup over t stays within the budget
  const double f0 = 0.6 + 0.4 * rng.next_uniform();
  spec.intercept = Schedule::piecewise({0, 7}, {0.05 + 0.4 * rng.next_uniform(),
                                                0.05 + 0.4 * rng.next_uniform()});
  spec.coeffs.push_back(Schedule::piecewise({0, 11}, {budget * split * f0, budget * split}));
  spec.coeffs.push_back(Schedule::piecewise({0, 5}, {budget * (1.0 - split),
                                                     budget * (1.0 - split) * f0}));
  return spec;
}

ArchInfSpec random_archinf_finite(SplitMix64& rng, int head_len) {
  ArchInfSpec spec;
  spec.a0 = 0.1 + 0.9 * rng.next_uniform();
  spec.delta = 0.1 + 0.2 * rng.next_uniform();
  const double budget = (1.0 - spec.delta) * (0.3 + 0.6 * rng.next_uniform());
  std::vector<double> head(static_cast<std::size_t>(head_len));
  double total = 0.0;
  for (auto& h : head) {
    h = rng.next_uniform();
    total += h;
  }
  for (auto& h : head) h *= budget / total;
  spec.coeffs = ArchInfCoeffs::finite(std::move(head));
  spec.nu = 1.0;
  return spec;
}

ArchInfSpec random_archinf_geometric(SplitMix64& rng) {
  ArchInfSpec spec;
  spec.a0 = 0.1 + 0.9 * rng.next_uniform();
  spec.delta = 0.05 + 0.15 * rng.next_uniform();
  const double ratio = 0.2 + 0.6 * rng.next_uniform();
  const double sum = (1.0 - spec.delta) * (0.2 + 0.6 * rng.next_uniform());
  spec.coeffs = ArchInfCoeffs::geometric_rule(ratio, sum);
  spec.nu = 1.0;
  return spec;
}

// X_m = z_m (a0 + sum_j a_j X_{m-j}) unrolled directly; the reference path
// for the P/Q exactness identities.
std::vector<double> unroll_tvarch(const TvArchSpec& spec, long t, std::span<const double> x,
                                  std::span<const double> z) {
  std::vector<double> path(z.size());
  auto value_at = [&](long m, const std::vector<double>& p) -> double {
    // m >= 1: window value; m <= 0: past block
    if (m >= 1) return p[static_cast<std::size_t>(m - 1)];
    return x[static_cast<std::size_t>(-m)];
  };
  for (long m = 1; m <= static_cast<long>(z.size()); ++m) {
    double acc = spec.a0(t + m);
    for (int j = 1; j <= spec.p; ++j) acc += spec.a(j, t + m) * value_at(m - j, path);
    path[static_cast<std::size_t>(m - 1)] = z[static_cast<std::size_t>(m - 1)] * acc;
  }
  return path;
}

std::vector<double> unroll_archinf(const ArchInfSpec& spec, std::span<const double> x,
                                   std::span<const double> z) {
  std::vector<double> path(z.size());
  auto value_at = [&](long m, const std::vector<double>& p) -> double {
    if (m >= 1) return p[static_cast<std::size_t>(m - 1)];
    return static_cast<std::size_t>(-m) < x.size() ? x[static_cast<std::size_t>(-m)] : 0.0;
  };
  const long jmax = spec.coeffs.head_size();
  for (long m = 1; m <= static_cast<long>(z.size()); ++m) {
    double acc = spec.a0;
    for (long j = 1; j <= jmax; ++j) acc += spec.coeffs.at(j) * value_at(m - j, path);
    path[static_cast<std::size_t>(m - 1)] = z[static_cast<std::size_t>(m - 1)] * acc;
  }
  return path;
}

}  // namespace

std::vector<VerifyCheck> verify_volterra(std::uint64_t seed) {
  SplitMix64 rng(splitmix_finalize(seed ^ 0x766f6c74ULL));
  std::vector<VerifyCheck> out;

  {
    CheckAccum c("psi_convolution_identity", 1e-12);
    for (int rep = 0; rep < 50; ++rep) {
      const int len = 1 + static_cast<int>(rng.next_u64() % 6);
      std::vector<double> a(static_cast<std::size_t>(len));
      double total = 0.0;
      for (auto& v : a) {
        v = rng.next_uniform();
        total += v;
      }
      const double target = 0.95 * rng.next_uniform();
      for (auto& v : a) v *= target / total;
      const PsiSequence psi = psi_coefficients(a, 60);
      for (int m = 1; m <= 60; ++m) {
        double conv = 0.0;
        for (int j = 1; j <= std::min(m, len); ++j)
          conv += a[static_cast<std::size_t>(j - 1)] * psi.values[static_cast<std::size_t>(m - j)];
        c.add(std::abs(psi.values[static_cast<std::size_t>(m)] - conv));
      }
    }
    out.push_back(c.done());
  }

  {
    CheckAccum c("q0k_dual_route", 1e-10);
    for (int rep = 0; rep < 100; ++rep) {
      const ArchInfSpec spec = rep % 2 == 0 ? random_archinf_geometric(rng)
                                            : random_archinf_finite(rng, 4);
      const int k = 1 + static_cast<int>(rng.next_u64() % 50);
      std::vector<double> xv(3 + rng.next_u64() % 4);
      for (auto& v : xv) v = 3.0 * rng.next_uniform();
      const PastBlock x = PastBlock::finite(xv);
      const std::vector<double> d = d_sequence(spec, x, k);
      const PsiSequence psi = psi_coefficients(spec.coeffs, k - 1);
      double conv = 0.0;
      for (int j = 0; j < k; ++j)
        conv += psi.values[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(k - j)];
      c.add(rel_err(q0k_mean(spec, x, k), conv));
    }
    out.push_back(c.done());
  }

  {
    CheckAccum c("pq_tvarch_path_identity", 1e-10);
    const InnovationModel innovation = InnovationModel::exponential_unit_mean();
    for (int rep = 0; rep < 20; ++rep) {
      const TvArchSpec spec = random_tvarch2(rng);
      const long t = -3 + static_cast<long>(rng.next_u64() % 7);
      std::vector<double> x(2);
      for (auto& v : x) v = 3.0 * rng.next_uniform();
      std::vector<double> z(11);
      for (auto& v : z) v = innovation.quantile(rng.next_uniform());
      const std::vector<double> path = unroll_tvarch(spec, t, x, z);
      for (int k = 1; k <= 8; ++k)
        for (int s = 0; s <= 3; ++s) {
          const std::span<const double> zblock(z.data(), static_cast<std::size_t>(k + s - 1));
          const PqTerms pq = pq_tvarch(spec, zblock, x, s, k, t);
          const double lhs = path[static_cast<std::size_t>(k + s - 1)];
          const double zks = z[static_cast<std::size_t>(k + s - 1)];
          c.add(rel_err(zks * (pq.p_term + pq.q_term), lhs));
        }
    }
    out.push_back(c.done());
  }

  {
    CheckAccum c("pq_archinf_path_identity", 1e-10);
    const InnovationModel innovation = InnovationModel::uniform_on_zero_two();
    for (int rep = 0; rep < 20; ++rep) {
      const ArchInfSpec spec = random_archinf_finite(rng, 3);
      std::vector<double> x(4);
      for (auto& v : x) v = 3.0 * rng.next_uniform();
      std::vector<double> z(11);
      for (auto& v : z) v = innovation.quantile(rng.next_uniform());
      const std::vector<double> path = unroll_archinf(spec, x, z);
      for (int k = 1; k <= 8; ++k)
        for (int s = 0; s <= 3; ++s) {
          const std::span<const double> zblock(z.data(), static_cast<std::size_t>(k + s - 1));
          const PqTerms pq = pq_archinf(spec, zblock, x, s, k);
          const double lhs = path[static_cast<std::size_t>(k + s - 1)];
          const double zks = z[static_cast<std::size_t>(k + s - 1)];
          c.add(rel_err(zks * (pq.p_term + pq.q_term), lhs));
        }
    }
    out.push_back(c.done());
  }

  {
    CheckAccum c("pq_multiindex_oracle", 1e-10);
    const InnovationModel innovation = InnovationModel::exponential_unit_mean();
    for (int rep = 0; rep < 20; ++rep) {
      const ArchInfSpec spec = rep % 2 == 0 ? random_archinf_geometric(rng)
                                            : random_archinf_finite(rng, 3);
      std::vector<double> x(4);
      for (auto& v : x) v = 3.0 * rng.next_uniform();
      std::vector<double> z(11);
      for (auto& v : z) v = innovation.quantile(rng.next_uniform());
      for (int k = 1; k <= 12; ++k) {
        const std::span<const double> zblock(z.data(), static_cast<std::size_t>(k - 1));
        const PqTerms rec = pq_archinf(spec, zblock, x, 0, k);
        const PqTerms idx = pq_archinf_multiindex(spec, zblock, x, k);
        c.add(rel_err(rec.p_term, idx.p_term));
        c.add(rel_err(rec.q_term, idx.q_term));
      }
    }
    out.push_back(c.done());
  }

  {
    // E Q_{0,k}(Z, x) = Q_{0,k}(1, x) within 3 Monte Carlo standard errors
    CheckAccum c("q_expectation_identity", 3.0);
    const InnovationModel innovation = InnovationModel::exponential_unit_mean();
    for (int rep = 0; rep < 4; ++rep) {
      const ArchInfSpec spec = random_archinf_geometric(rng);
      std::vector<double> xv(4);
      for (auto& v : xv) v = 3.0 * rng.next_uniform();
      const PastBlock x = PastBlock::finite(xv);
      const int k = 3 + static_cast<int>(rng.next_u64() % 4);
      const double want = q0k_mean(spec, x, k);
      double sum = 0.0, sumsq = 0.0;
      const int draws = 100000;
      std::vector<double> z(static_cast<std::size_t>(k - 1));
      for (int i = 0; i < draws; ++i) {
        for (auto& v : z) v = innovation.quantile(rng.next_uniform());
        const PqTerms pq = pq_archinf(spec, z, xv, 0, k);
        sum += pq.q_term;
        sumsq += pq.q_term * pq.q_term;
      }
      const double mean = sum / draws;
      const double sd = std::sqrt(std::max(0.0, sumsq / draws - mean * mean));
      const double se = sd / std::sqrt(static_cast<double>(draws));
      c.add(se > 0.0 ? std::abs(mean - want) / se : 0.0);
    }
    out.push_back(c.done());
  }

  {
    CheckAccum c("q_linearity", 0.0);
    for (int rep = 0; rep < 20; ++rep) {
      const ArchInfSpec spec = random_archinf_geometric(rng);
      std::vector<double> xv(4);
      for (auto& v : xv) v = 3.0 * rng.next_uniform();
      const double lambda = 4.0 * rng.next_uniform();
      std::vector<double> xs(xv);
      for (auto& v : xs) v *= lambda;
      const int k = 1 + static_cast<int>(rng.next_u64() % 12);
      const double q1 = q0k_mean(spec, PastBlock::finite(xv), k);
      const double q2 = q0k_mean(spec, PastBlock::finite(xs), k);
      c.add(rel_err(q2, lambda * q1) > 1e-12 ? 1.0 : 0.0);
    }
    out.push_back(c.done());
  }

  return out;
}

std::vector<VerifyCheck> verify_minimize_eta(std::uint64_t seed) {
  SplitMix64 rng(splitmix_finalize(seed ^ 0x6d696e65ULL));
  std::vector<VerifyCheck> out;

  CheckAccum closed("minimize_eta_vs_golden_section", 1e-8);
  CheckAccum dominance("minimize_eta_objective_dominance", 1e-12);
  const double nus[] = {0.5, 1.0, 2.0, 3.0};
  for (int rep = 0; rep < 100; ++rep) {
    EtaProblem prob;
    prob.nu = nus[rep % 4];
    const int n = 1 + static_cast<int>(rng.next_u64() % 8);
    for (int i = 0; i < n; ++i) {
      prob.c.push_back(0.05 + 5.0 * rng.next_uniform());
      prob.d.push_back(0.05 + 5.0 * rng.next_uniform());
    }
    const EtaSolution sol = minimize_eta(prob);

    auto tv = [&prob](std::span<const double> eta) {
      double s = 0.0;
      for (std::size_t i = 0; i < prob.c.size(); ++i) s += prob.c[i] * eta[i];
      return s / 2.0;
    };
    auto tail = [&prob](std::span<const double> eta) {
      double s = 0.0;
      for (std::size_t i = 0; i < prob.d.size(); ++i) s += prob.d[i] * std::pow(eta[i], -prob.nu);
      return s / 4.0;
    };
    const EtaSolution numeric = assemble_envelope(n, tv, tail);
    closed.add(rel_err(sol.value, numeric.value));

    for (int probe = 0; probe < 10; ++probe) {
      double obj = 0.0;
      for (int i = 0; i < n; ++i) {
        const double eta = std::exp(-3.0 + 6.0 * rng.next_uniform());
        obj += prob.c[static_cast<std::size_t>(i)] * eta +
               prob.d[static_cast<std::size_t>(i)] * std::pow(eta, -prob.nu);
      }
      dominance.add(sol.value <= obj * (1.0 + 1e-12) ? 0.0 : rel_err(sol.value, obj));
    }
  }
  out.push_back(closed.done());
  out.push_back(dominance.done());
  return out;
}

std::vector<DensityGridRow> density_tv_grid(const InnovationModel& innovation) {
  std::vector<DensityGridRow> rows;
  for (double A : {0.5, 1.0, 2.0})
    for (double B : {0.0, 0.1, 1.0, 10.0}) {
      const ScaleMixtureTv r = scale_mixture_tv(innovation, A, B);
      rows.push_back({innovation.name(), A, B, r.tv, r.bound,
                      r.bound > 0.0 ? r.tv / r.bound : 0.0});
    }
  return rows;
}

std::vector<VerifyCheck> verify_density(const std::string& innovation_filter) {
  std::vector<InnovationModel> models;
  if (innovation_filter.empty()) {
    models.push_back(InnovationModel::exponential_unit_mean());
    models.push_back(InnovationModel::uniform_on_zero_two());
    models.push_back(InnovationModel::scaled_chi_square(1));
  } else {
    models.push_back(InnovationModel::parse(innovation_filter));
  }

  std::vector<VerifyCheck> out;
  for (const InnovationModel& innovation : models) {
    const std::string tag = "[" + innovation.name() + "]";
    const double hi = innovation.upper_tail_cutoff(1e-13);

    {
      CheckAccum c("density_normalization" + tag, 1e-9);
      auto f = [&](double z) { return innovation.density(z); };
      const double integral = innovation.density_unbounded_at_zero()
                                  ? integrate_sqrt_singular(f, hi, 1e-10)
                                  : integrate(f, 0.0, hi, 1e-10);
      c.add(std::abs(integral - 1.0));
      out.push_back(c.done());
    }
    {
      CheckAccum c("unit_mean" + tag, 1e-9);
      auto f = [&](double z) { return z * innovation.density(z); };
      const double mean = innovation.density_unbounded_at_zero()
                              ? integrate_sqrt_singular(f, hi, 1e-10)
                              : integrate(f, 0.0, hi, 1e-10);
      c.add(std::abs(mean - 1.0));
      out.push_back(c.done());
    }
    {
      CheckAccum c("lemmaA4_dominance" + tag, 1.0 + 1e-6);
      for (const DensityGridRow& row : density_tv_grid(innovation))
        c.add(row.ratio);
      out.push_back(c.done());
    }
    {
      CheckAccum c("sup_family_dominance" + tag, 1.0 + 1e-6);
      const std::vector<double> family{0.1, 0.5, 2.0};
      for (double A : {0.5, 1.0, 2.0}) {
        const ScaleMixtureTv r = scale_mixture_sup_tv(innovation, A, family);
        c.add(r.bound > 0.0 ? r.tv / r.bound : 0.0);
      }
      out.push_back(c.done());
    }
    {
      CheckAccum c("tv_scale_invariance" + tag, 1e-7);
      for (double lambda : {0.5, 3.0}) {
        const double base = scale_mixture_tv(innovation, 1.0, 0.7).tv;
        const double scaled = scale_mixture_tv(innovation, lambda, 0.7 * lambda).tv;
        c.add(rel_err(base, scaled));
      }
      out.push_back(c.done());
    }
    {
      CheckAccum c("conditional_density_normalization" + tag, 1e-9);
      for (double pterm : {0.2, 1.0}) {
        for (double qterm : {0.0, 0.8}) {
          auto f = [&](double y) { return conditional_density(innovation, pterm, qterm, y); };
          const double upper = (pterm + qterm) * hi;
          const double integral = innovation.density_unbounded_at_zero()
                                      ? integrate_sqrt_singular(f, upper, 1e-10)
                                      : integrate(f, 0.0, upper, 1e-10);
          c.add(std::abs(integral - 1.0));
        }
      }
      out.push_back(c.done());
    }
    if (innovation.family() == InnovationFamily::UniformOnZeroTwo) {
      CheckAccum c("uniform_closed_form", 1e-9);
      for (double A : {0.5, 1.0, 2.0})
        for (double B : {0.1, 1.0, 10.0}) {
          const ScaleMixtureTv r = scale_mixture_tv(innovation, A, B);
          c.add(std::abs(r.tv - 2.0 * B / (A + B)));
        }
      out.push_back(c.done());
    }
    if (innovation.family() == InnovationFamily::ExponentialUnitMean) {
      // CDF-crossing closed form 2 (F_1(y*) - F_{1+a}(y*)), y* = (1+a) log(1+a)/a
      CheckAccum c("exponential_closed_form", 1e-8);
      for (double B : {0.1, 1.0}) {
        const double a = B;  // A = 1
        const double ystar = (1.0 + a) * std::log1p(a) / a;
        const double want = 2.0 * (std::exp(-ystar / (1.0 + a)) - std::exp(-ystar));
        const ScaleMixtureTv r = scale_mixture_tv(innovation, 1.0, B);
        c.add(rel_err(r.tv, want));
      }
      out.push_back(c.done());
    }
  }
  return out;
}

}  // namespace archmix
