#include "archmix/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "archmix/errors.hpp"
#include "archmix/quadrature.hpp"
#include "archmix/volterra.hpp"

namespace archmix {

namespace {

double knu_constant(double nu) {
  return 3.0 * (std::pow(nu, 1.0 / (1.0 + nu)) + std::pow(nu, -nu / (nu + 1.0)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Lemma-form minimization

EtaSolution minimize_eta(const EtaProblem& problem) {
  const std::size_t n = problem.c.size();
  if (n == 0 || problem.d.size() != n)
    throw ValidationError("minimize_eta: c and d must be non-empty and equal-sized");
  if (!(problem.nu > 0.0)) throw ValidationError("minimize_eta: nu must be > 0");
  for (std::size_t i = 0; i < n; ++i)
    if (!(problem.c[i] > 0.0) || !(problem.d[i] > 0.0))
      throw ValidationError("minimize_eta: entries must be > 0 (index " + std::to_string(i) + ")");

  const double nu = problem.nu;
  const double prefactor = std::pow(nu, 1.0 / (1.0 + nu)) + std::pow(nu, -nu / (nu + 1.0));
  EtaSolution sol;
  sol.eta.resize(n);
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    value += prefactor * std::pow(problem.c[i], nu / (nu + 1.0)) *
             std::pow(problem.d[i], 1.0 / (nu + 1.0));
    sol.eta[i] = std::pow(nu * problem.d[i] / problem.c[i], 1.0 / (1.0 + nu));
  }
  sol.value = value;

  double plugged = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    plugged += problem.c[i] * sol.eta[i] + problem.d[i] * std::pow(sol.eta[i], -nu);
  if (std::abs(plugged - value) > 1e-12 * std::max(std::abs(value), 1e-300))
    throw ConsistencyError("minimize_eta: plug-back identity violated: closed form " +
                           std::to_string(value) + " vs objective " + std::to_string(plugged));
  return sol;
}

EtaSolution assemble_envelope(const EtaProblem& problem) {
  EtaProblem scaled;
  scaled.nu = problem.nu;
  scaled.c = problem.c;
  scaled.d = problem.d;
  // 2 * (sum c eta / 2) + 4 * (sum d eta^-nu / 4) is the lemma objective itself
  return minimize_eta(scaled);
}

namespace {

double golden_min_1d(const std::function<double(double)>& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a); f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

EtaSolution assemble_envelope(int dim,
                              const std::function<double(std::span<const double>)>& tv_sum,
                              const std::function<double(std::span<const double>)>& tail_prob) {
  if (dim < 1) throw ValidationError("assemble_envelope: dim must be >= 1");
  std::vector<double> eta(static_cast<std::size_t>(dim), 1.0);

  // contract probe: tv nondecreasing, tail nonincreasing, coordinatewise
  for (double base : {0.25, 1.0, 4.0}) {
    std::vector<double> e(static_cast<std::size_t>(dim), base);
    const double tv0 = tv_sum(e), tp0 = tail_prob(e);
    for (int j = 0; j < dim; ++j) {
      e[static_cast<std::size_t>(j)] = base * 2.0;
      if (tv_sum(e) < tv0 - 1e-12 * std::max(1.0, std::abs(tv0)))
        throw ValidationError("assemble_envelope: tv_sum is not coordinatewise nondecreasing");
      if (tail_prob(e) > tp0 + 1e-12 * std::max(1.0, std::abs(tp0)))
        throw ValidationError("assemble_envelope: tail_prob is not coordinatewise nonincreasing");
      e[static_cast<std::size_t>(j)] = base;
    }
  }

  auto objective = [&](std::span<const double> e) { return 2.0 * tv_sum(e) + 4.0 * tail_prob(e); };
  double prev = objective(eta);
  for (int sweep = 0; sweep < 200; ++sweep) {
    for (int j = 0; j < dim; ++j) {
      auto fj = [&](double logv) {
        std::vector<double> e(eta);
        e[static_cast<std::size_t>(j)] = std::exp(logv);
        return objective(e);
      };
      const double best = golden_min_1d(fj, -34.5, 34.5, 1e-10);
      eta[static_cast<std::size_t>(j)] = std::exp(best);
    }
    const double cur = objective(eta);
    if (std::abs(prev - cur) <= 1e-12 * std::max(std::abs(cur), 1e-300)) break;
    prev = cur;
  }
  return {objective(eta), eta};
}

// ---------------------------------------------------------------------------
// tvARCH: exact Q-weights, envelope assembly, spectral certificates

namespace {

Eigen::MatrixXd companion_tilde(const TvArchSpec& spec, long t) {
  const int p = spec.p;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) A(0, j) = spec.a(j + 1, t);
  for (int i = 1; i < p; ++i) A(i, i - 1) = 1.0;
  return A;
}

// rows[m] = first row of A~_{t+m} ... A~_{t+1}, m = 1..m_max, so that
// Q_{0,m,t}(1, x) = rows[m] . x.
std::vector<Eigen::RowVectorXd> product_first_rows(const TvArchSpec& spec, long t, int m_max) {
  const int p = spec.p;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(p, p);
  std::vector<Eigen::RowVectorXd> rows(static_cast<std::size_t>(m_max) + 1);
  rows[0] = Eigen::RowVectorXd::Zero(p);
  for (int m = 1; m <= m_max; ++m) {
    M = companion_tilde(spec, t + m) * M;
    rows[static_cast<std::size_t>(m)] = M.row(0);
  }
  return rows;
}

Eigen::RowVectorXd weight_row_from_products(const TvArchSpec& spec, long t, int k, int s,
                                            const std::vector<Eigen::RowVectorXd>& rows) {
  const int p = spec.p;
  Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(p);
  if (s == 0) return rows[static_cast<std::size_t>(k)];
  if (s > p) return w;
  const long T = t + k + s;
  for (int i = s; i <= p; ++i) {
    const int kp = k + s - i;
    if (kp >= 1)
      w += spec.a(i, T) * rows[static_cast<std::size_t>(kp)];
    else
      w(-kp) += spec.a(i, T);  // X_{t+kp} is a raw past coordinate
  }
  return w;
}

double power_iteration_spectral_norm(const Eigen::MatrixXd& B, double tol) {
  const Eigen::MatrixXd G = B.transpose() * B;
  const int p = static_cast<int>(G.rows());
  Eigen::VectorXd v(p);
  for (int i = 0; i < p; ++i) v(i) = 1.0 + 1e-3 * i;  // deterministic, not an eigenvector of G in general
  v.normalize();
  double lambda = v.dot(G * v);
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd w = G * v;
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
    const double next = v.dot(G * v);
    if (std::abs(next - lambda) <= tol * std::max(next, 1e-300)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

struct TvArchConstants {
  double inf_a0;
  double mean_bound;
};

TvArchConstants tvarch_constants(const TvArchSpec& spec, long t, int k_hi) {
  double inf_a0 = HUGE_VAL;
  for (long u = t - spec.p; u <= t + k_hi + spec.p; ++u) inf_a0 = std::min(inf_a0, spec.a0(u));
  if (!(inf_a0 > 0.0)) throw ValidationError("tvarch bound: inf a0 <= 0 on the queried range");
  return {inf_a0, stationary_mean_bound(spec, t - spec.p, t + k_hi + spec.p)};
}

}  // namespace

std::vector<double> q_weight_row(const TvArchSpec& spec, long t, int k, int s) {
  spec.validate_basic();
  if (k < 1) throw ValidationError("q_weight_row: k must be >= 1");
  if (s < 0) throw ValidationError("q_weight_row: s must be >= 0");
  const auto rows = product_first_rows(spec, t, k + std::min(s, spec.p));
  const Eigen::RowVectorXd w = weight_row_from_products(spec, t, k, s, rows);
  return std::vector<double>(w.data(), w.data() + w.size());
}

TvArchBoundCurve tvarch_bound_curve(const TvArchSpec& spec, const InnovationModel& innovation,
                                    long t, int k_lo, int k_hi, double delta_tilde) {
  spec.validate_basic();
  if (k_lo < 1 || k_hi < k_lo) throw ValidationError("tvarch_bound_curve: bad lag range");
  if (delta_tilde < 0.0) delta_tilde = 0.9 * spec.delta;
  if (!(delta_tilde > 0.0 && delta_tilde < spec.delta))
    throw ValidationError("tvarch_bound_curve: delta_tilde must lie in (0, delta)");

  const auto [inf_a0, mean_bound] = tvarch_constants(spec, t, k_hi);
  const double k_iii = innovation.lipschitz_iii();
  const double k_iv = innovation.lipschitz_iv();
  const int p = spec.p;
  const double one_minus = 1.0 - delta_tilde;

  const auto rows = product_first_rows(spec, t, k_hi + p);

  // K_Q: smallest constant with max_j (w_s(k))_j <= K_Q (1-dt)^k on the range.
  double k_q = 0.0;
  std::vector<std::vector<Eigen::RowVectorXd>> wtab(static_cast<std::size_t>(k_hi) + 1);
  for (int k = 1; k <= k_hi; ++k) {
    auto& per_s = wtab[static_cast<std::size_t>(k)];
    per_s.resize(static_cast<std::size_t>(p));
    for (int s = 0; s < p; ++s) {
      per_s[static_cast<std::size_t>(s)] = weight_row_from_products(spec, t, k, s, rows);
      k_q = std::max(k_q, per_s[static_cast<std::size_t>(s)].maxCoeff() /
                              std::pow(one_minus, static_cast<double>(k)));
    }
  }

  TvArchBoundCurve curve;
  curve.delta_tilde = delta_tilde;
  curve.k_q = k_q;
  curve.inf_a0 = inf_a0;
  curve.mean_bound = mean_bound;
  curve.k_iii = k_iii;
  curve.k_iv = k_iv;
  const double pd = static_cast<double>(p);
  curve.k_prime_alpha = 2.0 * pd * std::sqrt(8.0 * (k_iii + 1.0) * pd * k_q * mean_bound / inf_a0);
  curve.k_prime_beta = 2.0 * pd * std::sqrt(8.0 * (k_iv + 1.0) * pd * k_q * mean_bound / inf_a0);

  for (int k = k_lo; k <= k_hi; ++k) {
    curve.lags.push_back(k);
    const double env_scale = std::pow(one_minus, 0.5 * k);
    curve.alpha_env.push_back(curve.k_prime_alpha * env_scale);
    curve.beta_env.push_back(curve.k_prime_beta * env_scale);

    // exact-weight assembly: c_j = 2 (K+1)/inf a0 sum_s (w_s)_j, d_j = 4 M
    Eigen::RowVectorXd wsum = Eigen::RowVectorXd::Zero(p);
    for (int s = 0; s < p; ++s) wsum += wtab[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
    auto tight_value = [&](double klip) {
      EtaProblem prob;
      prob.nu = 1.0;
      for (int j = 0; j < p; ++j) {
        // an exactly zero weight can occur (decoupled coordinate); it simply
        // drops out of the objective
        const double cj = 2.0 * (klip + 1.0) / inf_a0 * wsum(j);
        if (cj > 0.0) {
          prob.c.push_back(cj);
          prob.d.push_back(4.0 * mean_bound);
        }
      }
      return prob.c.empty() ? 0.0 : minimize_eta(prob).value;
    };
    curve.alpha_tight.push_back(tight_value(k_iii));
    curve.beta_tight.push_back(tight_value(k_iv));
  }
  return curve;
}

TvArchBound tvarch_alpha_bound(const TvArchSpec& spec, const InnovationModel& innovation,
                               long t, int k, double delta_tilde, int range_k_max,
                               bool clause_iv_constants) {
  if (range_k_max < k) range_k_max = k;
  const TvArchBoundCurve curve =
      tvarch_bound_curve(spec, innovation, t, k, range_k_max, delta_tilde);
  TvArchBound out;
  out.envelope = clause_iv_constants ? curve.beta_env.front() : curve.alpha_env.front();
  out.tight = clause_iv_constants ? curve.beta_tight.front() : curve.alpha_tight.front();
  out.k_prime = clause_iv_constants ? curve.k_prime_beta : curve.k_prime_alpha;
  out.k_q = curve.k_q;
  for (int s = 0; s < spec.p; ++s) out.weights.push_back(q_weight_row(spec, t, k, s));
  return out;
}

SpectralDecayReport spectral_product_decay(const TvArchSpec& spec, long t, int k_max,
                                           double delta_tilde) {
  spec.validate_basic();
  if (k_max < spec.p) throw ValidationError("spectral_product_decay: k_max must be >= p");
  if (delta_tilde < 0.0) delta_tilde = 0.9 * spec.delta;

  SpectralDecayReport rep;
  rep.delta_tilde = delta_tilde;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(spec.p, spec.p);
  double smallest = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    M = M * companion_tilde(spec, t - (k - 1));  // append A~_{t-(k-1)} on the right
    const double norm = power_iteration_spectral_norm(M, 1e-10);
    rep.norms.push_back(norm);
    smallest = std::max(smallest, norm / std::pow(1.0 - delta_tilde, static_cast<double>(k)));
  }
  rep.smallest_k_const = smallest;
  rep.certified = std::isfinite(smallest);
  return rep;
}

// ---------------------------------------------------------------------------
// ARCH(inf): Theorem 4.1 / 4.2 brackets with analytic tails

namespace {

// coefficient access at real index (tail region only for non-integer values)
double coeff_real(const ArchInfCoeffs& c, double j) {
  if (j < 1.0) throw ValidationError("coeff_real: index must be >= 1");
  const double r = std::round(j);
  if (std::abs(j - r) < 1e-9 && r <= static_cast<double>(c.head_size()))
    return c.at(static_cast<long>(r));
  if (c.finite_support()) return j > static_cast<double>(c.head_size()) ? 0.0 : c.at(static_cast<long>(r));
  return c.at_real(j);
}

struct ArchInfBracket {
  const ArchInfSpec* spec;
  std::vector<double> psi;   // psi_0..psi_k
  std::vector<double> tsum;  // tsum[u] = sum_{j>=u} a_j for u = 1..k
  int k;
  enum class Form { AlphaBeta, TwoMix, TwoMixLiteral } form;

  // bracket_i as a function of real i >= 0 (1/a0 included)
  double operator()(double i) const {
    const ArchInfCoeffs& c = spec->coeffs;
    double acc = 0.0;
    if (form == Form::AlphaBeta) {
      // sum_u T(u) C_{k-u}(i) + T(k+i), C_M(i) = sum_{l<=M} psi_l a_{M-l+i},
      // dropping the intercept-index term (l = M at i = 0)
      for (int u = 1; u <= k; ++u) {
        const double tu = tsum[static_cast<std::size_t>(u)];
        if (tu == 0.0) continue;
        const int M = k - u;
        double cm = 0.0;
        for (int l = 0; l <= M; ++l) {
          const double idx = static_cast<double>(M - l) + i;
          if (idx < 0.5) continue;
          cm += psi[static_cast<std::size_t>(l)] * coeff_real(c, idx);
        }
        acc += tu * cm;
      }
      acc += c.tail_sum_real(static_cast<double>(k) + i);
    } else if (form == Form::TwoMix) {
      for (int l = 0; l <= k - 1; ++l)
        acc += psi[static_cast<std::size_t>(l)] * coeff_real(c, static_cast<double>(k - l) + i);
    } else {
      for (int l = 1; l <= k - 1; ++l)
        acc += c.at(l) * psi[static_cast<std::size_t>(l)] *
               coeff_real(c, static_cast<double>(k - l) + i);
    }
    return acc / spec->a0;
  }
};

struct PowerSum {
  double explicit_part = 0.0;
  double tail_part = 0.0;  // analytic certificate, included in the total
  double total() const { return explicit_part + tail_part; }
};

// sum_{i>=0} bracket(i)^q with an analytic tail past the explicit range.
PowerSum bracket_power_sum(const ArchInfBracket& bracket, double q, long i_max) {
  const ArchInfCoeffs& c = bracket.spec->coeffs;
  PowerSum out;

  if (c.finite_support()) {
    const long last = c.head_size() + bracket.k;  // all indices dead past this
    for (long i = 0; i <= last; ++i) out.explicit_part += std::pow(bracket(static_cast<double>(i)), q);
    return out;
  }

  if (c.tail().kind == TailClass::Kind::Geometric) {
    const double r = c.tail().param;
    long i0 = std::max<long>(c.head_size() + 1, 8);
    if (i_max >= 0) i0 = std::max(i0, i_max);
    for (long i = 0; i <= i0; ++i) out.explicit_part += std::pow(bracket(static_cast<double>(i)), q);
    // past the head every coefficient is in the pure geometric tail, so
    // bracket(i+1) = r * bracket(i) exactly and the remainder sums in closed form
    const double rq = std::pow(r, q);
    out.tail_part = std::pow(bracket(static_cast<double>(i0)), q) * rq / (1.0 - rq);
    return out;
  }

  // polynomial tail: bracket(i) ~ i^{-(beta-1)}; the q-power sum converges
  // iff (beta-1) q > 1
  const double beta = c.tail().param;
  const double gamma = (beta - 1.0) * q - 1.0;
  if (gamma <= 0.0)
    throw TruncationError(
        "archinf bound: (exponent-1)*nu/(nu+1) <= 1, the i-sum diverges and the "
        "packaged bound is infinite",
        -1);
  long i0 = std::max<long>({c.head_size() + 1, 2L * bracket.k, 128});
  if (i_max >= 0) i0 = std::max(i0, i_max);
  for (long i = 0; i <= i0; ++i) out.explicit_part += std::pow(bracket(static_cast<double>(i)), q);

  // decreasing integrand: sum_{i>i0} f(i) <= f(i0+1) + int_{i0+1}^inf f(x) dx;
  // integrate in log space where the decay is exponential
  const double x0 = static_cast<double>(i0) + 1.0;
  const double f_lead = std::pow(bracket(x0), q);
  const double vmax = std::min(60.0 / gamma, 600.0);
  auto integrand = [&](double v) {
    const double x = x0 * std::exp(v);
    return std::pow(bracket(x), q) * x;
  };
  const double integral = integrate(integrand, 0.0, vmax, std::max(1e-14, 1e-9 * f_lead * x0));
  out.tail_part = f_lead + integral;
  return out;
}

double resolve_moment_bound(const ArchInfSpec& spec) {
  if (spec.nu == 1.0) return stationary_mean_bound(spec);
  if (spec.moment_bound) {
    if (!(*spec.moment_bound > 0.0))
      throw ValidationError("archinf bound: moment_bound must be > 0");
    return *spec.moment_bound;
  }
  throw ValidationError(
      "archinf bound: nu > 1 requires a user-supplied E|X|^nu bound (moment_bound)");
}

ArchInfBound archinf_bound_impl(const ArchInfSpec& spec, const InnovationModel& innovation,
                                int k, const ArchInfBoundOptions& opt,
                                ArchInfBracket::Form form) {
  spec.validate_basic();
  if (k < 1) throw ValidationError("archinf bound: k must be >= 1");
  (void)innovation;  // constants of Theorems 4.1/4.2 do not involve K_iii/K_iv

  const double nu = spec.nu;
  const double q = nu / (nu + 1.0);
  const double ex = resolve_moment_bound(spec);

  ArchInfBracket bracket;
  bracket.spec = &spec;
  bracket.k = k;
  bracket.form = form;
  bracket.psi = psi_coefficients(spec.coeffs, k).values;
  bracket.tsum.assign(static_cast<std::size_t>(k) + 1, 0.0);
  if (form == ArchInfBracket::Form::AlphaBeta) {
    // T(u) = sum_{s>=0} a_{s+u}: explicit s-terms up to s_max plus the analytic
    // remainder, which together reproduce the full tail sum
    for (int u = 1; u <= k; ++u) {
      double tu = 0.0;
      if (opt.s_max >= 0) {
        for (long s = 0; s <= opt.s_max; ++s) tu += spec.coeffs.at(u + s);
        tu += spec.coeffs.tail_sum(u + opt.s_max + 1);
      } else {
        tu = spec.coeffs.tail_sum(u);
      }
      bracket.tsum[static_cast<std::size_t>(u)] = tu;
    }
  }

  const PowerSum sums = bracket_power_sum(bracket, q, opt.i_max);
  const double knu = knu_constant(nu);
  const double ex_pow = std::pow(ex, 1.0 / (nu + 1.0));

  ArchInfBound out;
  out.k_nu = knu;
  out.moment_bound = ex;
  out.packaged = knu * ex_pow * sums.total();
  out.certificate = knu * ex_pow * sums.tail_part;
  // proof-display minimization: c_i = 2 bracket_i, d_i = 4 E|X|^nu, so the
  // tight value is the packaged sum rescaled by 2^q 4^{1/(nu+1)} / 3
  out.tight = out.packaged * std::pow(2.0, q) * std::pow(4.0, 1.0 / (nu + 1.0)) / 3.0;
  return out;
}

}  // namespace

ArchInfBound archinf_alpha_beta_bound(const ArchInfSpec& spec, const InnovationModel& innovation,
                                      int k, const ArchInfBoundOptions& opt) {
  return archinf_bound_impl(spec, innovation, k, opt, ArchInfBracket::Form::AlphaBeta);
}

ArchInfBound archinf_two_mix_bound(const ArchInfSpec& spec, const InnovationModel& innovation,
                                   int k, const ArchInfBoundOptions& opt) {
  return archinf_bound_impl(spec, innovation, k, opt,
                            opt.theorem42_literal ? ArchInfBracket::Form::TwoMixLiteral
                                                  : ArchInfBracket::Form::TwoMix);
}

// ---------------------------------------------------------------------------
// Rate classes

double RateClass::alpha_beta_class(int k) const {
  const double kd = static_cast<double>(k);
  if (kind == TailClass::Kind::Geometric) return kd * std::pow(param, kd / 2.0);
  return kd * std::pow(kd + 1.0, -delta_tilde + 3.0) + std::pow(kd + 1.0, -delta_tilde + 2.0);
}

double RateClass::two_mix_class(int k) const {
  const double kd = static_cast<double>(k);
  if (kind == TailClass::Kind::Geometric) return kd * std::pow(param, kd / 2.0);
  return kd * std::pow(kd + 1.0, -delta_tilde + 1.0);
}

std::string RateClass::label() const {
  char buf[64];
  if (kind == TailClass::Kind::Geometric) {
    std::snprintf(buf, sizeof(buf), "geometric(ratio=%.6g)", param);
  } else {
    std::snprintf(buf, sizeof(buf), "polynomial(delta=%.6g;delta_tilde=%.6g)", param, delta_tilde);
  }
  return buf;
}

RateClass rate_classifier(const ArchInfSpec& spec) {
  spec.validate_basic();
  if (spec.coeffs.finite_support())
    throw ValidationError("rate_classifier: finite-support coefficients carry no tail class");
  RateClass rc;
  rc.kind = spec.coeffs.tail().kind;
  rc.param = spec.coeffs.tail().param;
  rc.delta_tilde = rc.kind == TailClass::Kind::Polynomial
                       ? rc.param * spec.nu / (spec.nu + 1.0)
                       : 0.0;
  return rc;
}

// ---------------------------------------------------------------------------
// Curves

BoundCurve bound_curve(const TvArchSpec& spec, const InnovationModel& innovation, long t,
                       int k_lo, int k_hi, double delta_tilde) {
  const TvArchBoundCurve c = tvarch_bound_curve(spec, innovation, t, k_lo, k_hi, delta_tilde);
  BoundCurve out;
  out.lags = c.lags;
  out.alpha_bound = c.alpha_env;
  out.beta_bound = c.beta_env;
  // single coordinates generate sub-sigma-algebras of the p-blocks, so the
  // alpha envelope bounds the 2-mixing rate as well
  out.twomix_bound = c.alpha_env;
  out.tight_alpha = c.alpha_tight;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "geometric(ratio=%.6g)", std::sqrt(1.0 - c.delta_tilde));
  out.rate_class_label = buf;
  for (int k : out.lags)
    out.rate_class_value.push_back(std::pow(1.0 - c.delta_tilde, 0.5 * k));
  out.k_iii = c.k_iii;
  out.k_iv = c.k_iv;
  out.delta_tilde = c.delta_tilde;
  out.mean_bound = c.mean_bound;
  out.moment_bound = c.mean_bound;
  out.k_prime = c.k_prime_alpha;
  out.k_q = c.k_q;
  return out;
}

BoundCurve bound_curve(const ArchInfSpec& spec, const InnovationModel& innovation, int k_lo,
                       int k_hi, const ArchInfBoundOptions& opt) {
  if (k_lo < 1 || k_hi < k_lo) throw ValidationError("bound_curve: bad lag range");
  BoundCurve out;
  out.k_iii = innovation.lipschitz_iii();
  out.k_iv = innovation.lipschitz_iv();
  out.delta_tilde = 0.0;
  bool have_class = true;
  RateClass rc;
  try {
    rc = rate_classifier(spec);
    out.rate_class_label = rc.label();
    out.delta_tilde = rc.delta_tilde;
  } catch (const ValidationError&) {
    have_class = false;
    out.rate_class_label = "finite-support";
  }
  for (int k = k_lo; k <= k_hi; ++k) {
    const ArchInfBound ab = archinf_alpha_beta_bound(spec, innovation, k, opt);
    const ArchInfBound tm = archinf_two_mix_bound(spec, innovation, k, opt);
    out.lags.push_back(k);
    out.alpha_bound.push_back(ab.packaged);
    out.beta_bound.push_back(ab.packaged);
    out.twomix_bound.push_back(tm.packaged);
    out.tight_alpha.push_back(ab.tight);
    out.rate_class_value.push_back(have_class ? rc.alpha_beta_class(k) : 0.0);
    out.k_nu = ab.k_nu;
    out.moment_bound = ab.moment_bound;
    out.certificate = std::max(out.certificate, ab.certificate);
  }
  out.mean_bound = stationary_mean_bound(spec);
  return out;
}

}  // namespace archmix
