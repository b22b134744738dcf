#include "archmix/innovation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "archmix/density_analysis.hpp"
#include "archmix/errors.hpp"

namespace archmix {

namespace {

boost::math::chi_squared_distribution<double> chi2(int dof) {
  return boost::math::chi_squared_distribution<double>(static_cast<double>(dof));
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(llo + (lhi - llo) * i / (n - 1.0));
  return g;
}

}  // namespace

InnovationModel::InnovationModel(InnovationFamily family, int dof)
    : family_(family), dof_(dof) {
  switch (family_) {
    case InnovationFamily::ExponentialUnitMean: name_ = "exponential"; break;
    case InnovationFamily::UniformOnZeroTwo: name_ = "uniform02"; break;
    case InnovationFamily::ScaledChiSquare: {
      name_ = "chisq(" + std::to_string(dof_) + ")";
      const double h = dof_ / 2.0;
      // log of the chi-square(m) normalizer, cached for the hot density path
      chisq_log_norm_ = h * std::log(2.0) + std::lgamma(h);
      break;
    }
  }
}

InnovationModel InnovationModel::exponential_unit_mean() {
  return InnovationModel(InnovationFamily::ExponentialUnitMean, 0);
}

InnovationModel InnovationModel::uniform_on_zero_two() {
  return InnovationModel(InnovationFamily::UniformOnZeroTwo, 0);
}

InnovationModel InnovationModel::scaled_chi_square(int dof) {
  if (dof < 1) throw ValidationError("scaled_chi_square: dof must be >= 1");
  return InnovationModel(InnovationFamily::ScaledChiSquare, dof);
}

InnovationModel InnovationModel::parse(const std::string& name) {
  if (name == "exponential" || name == "exp")
    return exponential_unit_mean();
  if (name == "uniform" || name == "uniform02")
    return uniform_on_zero_two();
  if (name == "chisq")
    return scaled_chi_square(1);
  if (name.rfind("chisq(", 0) == 0 && name.back() == ')') {
    const std::string inner = name.substr(6, name.size() - 7);
    return scaled_chi_square(std::stoi(inner));
  }
  throw ValidationError("unknown innovation '" + name +
                        "' (expected exponential|uniform02|chisq(M))");
}

double InnovationModel::density(double z) const {
  if (z <= 0.0) return 0.0;
  switch (family_) {
    case InnovationFamily::ExponentialUnitMean:
      return std::exp(-z);
    case InnovationFamily::UniformOnZeroTwo:
      return z <= 2.0 ? 0.5 : 0.0;
    case InnovationFamily::ScaledChiSquare: {
      const double y = dof_ * z;  // chi-square(m) variate
      const double h = dof_ / 2.0;
      return dof_ * std::exp((h - 1.0) * std::log(y) - y / 2.0 - chisq_log_norm_);
    }
  }
  return 0.0;
}

double InnovationModel::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw ValidationError("quantile: u must be in (0,1)");
  switch (family_) {
    case InnovationFamily::ExponentialUnitMean:
      return -std::log1p(-u);
    case InnovationFamily::UniformOnZeroTwo:
      return 2.0 * u;
    case InnovationFamily::ScaledChiSquare:
      return boost::math::quantile(chi2(dof_), u) / dof_;
  }
  return 0.0;
}

double InnovationModel::second_moment() const {
  switch (family_) {
    case InnovationFamily::ExponentialUnitMean: return 2.0;
    case InnovationFamily::UniformOnZeroTwo: return 4.0 / 3.0;
    case InnovationFamily::ScaledChiSquare: return 1.0 + 2.0 / dof_;
  }
  return 0.0;
}

double InnovationModel::abs_moment(double nu) const {
  if (nu < 0.0) throw ValidationError("abs_moment: nu must be >= 0");
  switch (family_) {
    case InnovationFamily::ExponentialUnitMean:
      return std::tgamma(1.0 + nu);
    case InnovationFamily::UniformOnZeroTwo:
      return std::pow(2.0, nu) / (nu + 1.0);
    case InnovationFamily::ScaledChiSquare: {
      const double h = dof_ / 2.0;
      return std::exp(std::lgamma(h + nu) - std::lgamma(h) + nu * std::log(2.0 / dof_));
    }
  }
  return 0.0;
}

bool InnovationModel::monotone_density() const {
  // chi-square(m)/m has mode (m-2)/m; nonincreasing iff m <= 2.
  return family_ != InnovationFamily::ScaledChiSquare || dof_ <= 2;
}

bool InnovationModel::density_unbounded_at_zero() const {
  return family_ == InnovationFamily::ScaledChiSquare && dof_ == 1;
}

double InnovationModel::upper_tail_cutoff(double eps) const {
  switch (family_) {
    case InnovationFamily::ExponentialUnitMean:
      return -std::log(eps);
    case InnovationFamily::UniformOnZeroTwo:
      return 2.0;
    case InnovationFamily::ScaledChiSquare:
      return boost::math::quantile(boost::math::complement(chi2(dof_), eps)) / dof_;
  }
  return 0.0;
}

// For m >= 3 the density is unimodal, so the monotone closed form does not
// apply; certify once per dof over a grid wide enough to cover every B/A the
// scale-mixture checks touch. The cache is process-wide because models are
// value types and tests construct them freely.
void InnovationModel::certify_lipschitz() const {
  static std::mutex mu;
  static std::map<int, std::pair<double, double>> cache;
  {
    std::scoped_lock lk(mu);
    if (const auto it = cache.find(dof_); it != cache.end()) {
      k_iii_ = it->second.first;
      k_iv_ = it->second.second;
      return;
    }
  }
  const LipschitzReport rep = innovation_tv_lipschitz(*this, log_spaced(1e-3, 32.0, 33));
  std::scoped_lock lk(mu);
  cache[dof_] = {rep.k_iii, rep.k_iv};
  k_iii_ = rep.k_iii;
  k_iv_ = rep.k_iv;
}

double InnovationModel::lipschitz_iii() const {
  if (monotone_density()) return 1.0;
  if (k_iii_ < 0.0) certify_lipschitz();
  return k_iii_;
}

double InnovationModel::lipschitz_iv() const {
  if (monotone_density()) return 1.0;
  if (k_iv_ < 0.0) certify_lipschitz();
  return k_iv_;
}

}  // namespace archmix
