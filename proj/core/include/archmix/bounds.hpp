#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "archmix/innovation.hpp"
#include "archmix/process.hpp"

namespace archmix {

// inf over eta > 0 of sum_i (c_i eta_i + d_i eta_i^{-nu}).
struct EtaProblem {
  std::vector<double> c;
  std::vector<double> d;
  double nu = 1.0;
};

struct EtaSolution {
  double value = 0.0;
  std::vector<double> eta;
};

// Closed form: value = (nu^{1/(1+nu)} + nu^{-nu/(nu+1)}) sum_i c_i^{nu/(nu+1)} d_i^{1/(nu+1)},
// eta_i = (nu d_i / c_i)^{1/(1+nu)}. The plug-back identity is asserted to
// 1e-12 relative.
EtaSolution minimize_eta(const EtaProblem& problem);

// inf over eta of 2 tv_sum(eta) + 4 tail_prob(eta). The EtaProblem overload
// (tv = sum c_i eta_i / 2, tail = sum d_i eta_i^{-nu} / 4) reduces exactly to
// minimize_eta; the callable overload runs cyclic per-coordinate golden
// section and probes the monotonicity contract first.
EtaSolution assemble_envelope(const EtaProblem& problem);
EtaSolution assemble_envelope(int dim,
                              const std::function<double(std::span<const double>)>& tv_sum,
                              const std::function<double(std::span<const double>)>& tail_prob);

// Exact 1 x p weight row of x -> Q_{s,k,t}(1, x), by companion-matrix products.
std::vector<double> q_weight_row(const TvArchSpec& spec, long t, int k, int s);

// Explicit-constant tvARCH bound at lag k (alpha/2-mix with K_iii, beta with
// K_iv):
//   tight    = inf_eta [ 2 (K+1)/inf a0 sum_s w_s . eta + 4 M sum_j eta_j^{-1} ]
//   envelope = the same assembly with w_s replaced by its geometric majorant
//              K_Q (1-dt)^k over the curve range, i.e. K' (1-dt)^{k/2}.
struct TvArchBound {
  double envelope = 0.0;
  double tight = 0.0;
  double k_prime = 0.0;  // envelope = k_prime (1-dt)^{k/2}
  double k_q = 0.0;      // smallest K with max_j (w_s)_j <= K (1-dt)^k on the range
  std::vector<std::vector<double>> weights;  // w_s, s = 0..p-1
};

TvArchBound tvarch_alpha_bound(const TvArchSpec& spec, const InnovationModel& innovation,
                               long t, int k, double delta_tilde, int range_k_max = -1,
                               bool clause_iv_constants = false);

struct TvArchBoundCurve {
  std::vector<int> lags;
  std::vector<double> alpha_env, beta_env;
  std::vector<double> alpha_tight, beta_tight;
  double delta_tilde = 0.0;
  double k_q = 0.0;
  double k_prime_alpha = 0.0, k_prime_beta = 0.0;
  double inf_a0 = 0.0, mean_bound = 0.0, k_iii = 0.0, k_iv = 0.0;
};

TvArchBoundCurve tvarch_bound_curve(const TvArchSpec& spec, const InnovationModel& innovation,
                                    long t, int k_lo, int k_hi,
                                    double delta_tilde = -1.0 /* default 0.9 delta */);

struct SpectralDecayReport {
  std::vector<double> norms;  // ||prod_{i=0}^{k-1} A~_{t-i}||_spec, k = 1..k_max
  double smallest_k_const = 0.0;
  double delta_tilde = 0.0;
  bool certified = false;
};

SpectralDecayReport spectral_product_decay(const TvArchSpec& spec, long t, int k_max,
                                           double delta_tilde);

struct ArchInfBoundOptions {
  long i_max = -1;   // explicit i-terms; -1 picks a class-dependent default
  long s_max = -1;   // explicit s-terms inside the tail sums; remainder analytic
  bool theorem42_literal = false;  // 2-mix bracket a_j |psi_j| instead of |psi_j|
};

struct ArchInfBound {
  double packaged = 0.0;     // K(nu)-form value, analytic tail certificates included
  double tight = 0.0;        // direct Lemma-4.4 minimization of the proof display
  double certificate = 0.0;  // part of `packaged` contributed by the i-tail
  double k_nu = 0.0;
  double moment_bound = 0.0;  // E|X_0|^nu used
};

ArchInfBound archinf_alpha_beta_bound(const ArchInfSpec& spec, const InnovationModel& innovation,
                                      int k, const ArchInfBoundOptions& opt = {});
ArchInfBound archinf_two_mix_bound(const ArchInfSpec& spec, const InnovationModel& innovation,
                                   int k, const ArchInfBoundOptions& opt = {});

struct RateClass {
  TailClass::Kind kind = TailClass::Kind::Geometric;
  double param = 0.0;        // coefficient ratio | coefficient decay exponent
  double delta_tilde = 0.0;  // polynomial: param * nu/(nu+1)
  double alpha_beta_class(int k) const;
  double two_mix_class(int k) const;
  std::string label() const;
};

RateClass rate_classifier(const ArchInfSpec& spec);

// Per-lag curves in the form the CLI serializes.
struct BoundCurve {
  std::vector<int> lags;
  std::vector<double> alpha_bound, beta_bound, twomix_bound, tight_alpha;
  std::string rate_class_label;
  std::vector<double> rate_class_value;
  // assembled constants, echoed to the JSON sidecar
  double k_iii = 0.0, k_iv = 0.0, k_nu = 0.0, delta_tilde = 0.0;
  double moment_bound = 0.0, mean_bound = 0.0, certificate = 0.0;
  double k_prime = 0.0, k_q = 0.0;  // tvARCH only
};

BoundCurve bound_curve(const TvArchSpec& spec, const InnovationModel& innovation, long t,
                       int k_lo, int k_hi, double delta_tilde = -1.0);
BoundCurve bound_curve(const ArchInfSpec& spec, const InnovationModel& innovation, int k_lo,
                       int k_hi, const ArchInfBoundOptions& opt = {});

}  // namespace archmix
