#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "archmix/innovation.hpp"

namespace archmix {

// Piecewise-constant coefficient schedule over integer time, or an arbitrary
// rule. No smoothness is assumed anywhere; only values on the queried range
// are ever validated.
class Schedule {
 public:
  static Schedule constant(double v);
  // value(t) = values[i] for the largest knots[i] <= t; values[0] before.
  static Schedule piecewise(std::vector<long> knots, std::vector<double> values);
  static Schedule rule(std::function<double(long)> fn);

  double operator()(long t) const;
  bool is_constant() const { return kind_ == Kind::Constant; }

 private:
  enum class Kind { Constant, Piecewise, Rule };
  Kind kind_ = Kind::Constant;
  double const_value_ = 0.0;
  std::vector<long> knots_;
  std::vector<double> values_;
  std::function<double(long)> fn_;
};

// Squared tvARCH(p): X_t = Z_t (a0(t) + sum_j a_j(t) X_{t-j}).
struct TvArchSpec {
  int p = 1;
  Schedule intercept;              // a0(t) > 0
  std::vector<Schedule> coeffs;    // a_j(t) >= 0, j = 1..p
  double delta = 0.0;              // sup_t sum_j a_j(t) <= 1 - delta

  double a0(long t) const { return intercept(t); }
  double a(int j, long t) const { return coeffs.at(static_cast<std::size_t>(j) - 1)(t); }
  double coeff_sum(long t) const;
  void validate_basic() const;  // field-level checks independent of any t-range
};

struct TailClass {
  enum class Kind { Geometric, Polynomial };
  Kind kind = Kind::Geometric;
  double param = 0.5;  // ratio in (0,1) | exponent > 1
};

// Coefficient sequence of an ARCH(inf) spec: explicit head up to a cutoff,
// extended past it by the declared tail class (anchored at the last head
// value), or a pure closed-form rule c*r^j / c*j^{-beta}.
class ArchInfCoeffs {
 public:
  static ArchInfCoeffs explicit_head(std::vector<double> head, TailClass tail);
  static ArchInfCoeffs geometric_rule(double ratio, double total_sum);
  static ArchInfCoeffs polynomial_rule(double exponent, double total_sum);
  static ArchInfCoeffs finite(std::vector<double> head);  // a_j = 0 past the head

  double at(long j) const;        // a_j, j >= 1
  double at_real(double j) const; // tail-class extension at real argument
  double tail_sum(long from) const;  // sum_{j >= from} a_j, analytic tail
  // sum_{s >= 0} a(u + s) at real u past the explicit head (Hurwitz tail for
  // polynomial classes, closed form for geometric ones)
  double tail_sum_real(double u) const;
  double total_sum() const { return tail_sum(1); }
  long head_size() const { return static_cast<long>(head_.size()); }
  const TailClass& tail() const { return tail_; }
  bool finite_support() const { return finite_; }
  // Smallest L with tail_sum(L+1) <= tol, or -1 if none below `limit`.
  long truncation_lag(double tol, long limit = 100000000L) const;

 private:
  std::vector<double> head_;  // a_1..a_cutoff
  TailClass tail_;
  bool finite_ = false;
  double tail_scale_ = 0.0;  // geometric: a_j = s*r^j; polynomial: a_j = s*j^-b
};

// Squared ARCH(inf): X_t = Z_t (a0 + sum_{j>=1} a_j X_{t-j}).
struct ArchInfSpec {
  double a0 = 1.0;
  ArchInfCoeffs coeffs;
  double delta = 0.0;  // sum_j a_j < 1 - delta
  double nu = 1.0;     // moment order; the paper assumes nu > 1, nu = 1 is
                       // accepted so first-moment bounds stay expressible
  std::optional<double> moment_bound;  // user-supplied E|X|^nu for nu > 1

  void validate_basic() const;
};

struct AssumptionClause {
  std::string id;       // e.g. "1(i)", "2(i)", "2(ii)-moment"
  bool pass = false;
  std::string witness;  // what was checked / the violating value
};

struct AssumptionReport {
  std::vector<AssumptionClause> clauses;
  bool all_pass() const;
  const AssumptionClause* find(const std::string& id) const;
};

AssumptionReport check_assumptions(const TvArchSpec& spec, const InnovationModel& innovation,
                                   long t_lo, long t_hi);
AssumptionReport check_assumptions(const ArchInfSpec& spec, const InnovationModel& innovation);

// sup_t a0(t) / (1 - sup_t sum_j a_j(t)); bounds sup_t E|X_t| (Volterra).
double stationary_mean_bound(const TvArchSpec& spec, long t_lo, long t_hi);
double stationary_mean_bound(const ArchInfSpec& spec);

struct PathEnsemble {
  std::string spec_id;
  std::uint64_t master_seed = 0;
  int replicate_count = 0;
  long t_lo = 0;  // time index of paths[r][0]
  long burn_in = 0;
  long truncation_lag = 0;  // ARCH(inf) only
  std::vector<std::vector<double>> paths;

  long length() const { return paths.empty() ? 0 : static_cast<long>(paths[0].size()); }
};

struct SimulateOptions {
  int replicates = 1;
  std::uint64_t master_seed = 1;
  long burn_in = -1;                    // -1: 10 * max(p, truncation_lag, 50)
  std::optional<double> forced_z;      // test hook: Z_t = const
  std::optional<std::vector<double>> initial_state;  // pre-sample block, newest first
  double tail_tol = 1e-8;               // ARCH(inf): relative neglected tail mass
  long truncation_lag = -1;             // -1: smallest lag meeting tail_tol
  int workers = 0;                      // 0: hardware concurrency
};

// Paths carry X_t for t in [t_lo, t_hi]. Deterministic given seeds: replicate
// r is regenerated bit-identically from (master_seed, r).
PathEnsemble simulate_tvarch(const TvArchSpec& spec, const InnovationModel& innovation,
                             long t_lo, long t_hi, const SimulateOptions& opt);

PathEnsemble simulate_archinf(const ArchInfSpec& spec, const InnovationModel& innovation,
                              long n, const SimulateOptions& opt);

// Companion matrices of the p-dimensional state recursion
// Xblock_{t} = A_t Xblock_{t-1} + b_t, row-major p x p storage.
struct CompanionMatrices {
  int p = 0;
  std::vector<double> A;        // first row a_j(t) z, unit subdiagonal
  std::vector<double> A_tilde;  // A at z = 1
  std::vector<double> b;        // (a0(t) z, 0, ..., 0)
};

CompanionMatrices companion_matrices(const TvArchSpec& spec, long t, double z);

}  // namespace archmix
