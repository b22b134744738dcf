#include "archmix/process.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include <boost/math/special_functions/zeta.hpp>

#include "archmix/errors.hpp"

namespace archmix {

namespace {

// sum_{j >= u} j^{-beta} via explicit head + Euler-Maclaurin remainder.
double hurwitz_tail(double beta, double u) {
  if (beta <= 1.0) throw ValidationError("polynomial tail exponent must be > 1");
  double s = 0.0;
  double U = u;
  for (int i = 0; i < 30; ++i, U += 1.0) s += std::pow(U, -beta);
  s += std::pow(U, 1.0 - beta) / (beta - 1.0) + 0.5 * std::pow(U, -beta) +
       beta / 12.0 * std::pow(U, -beta - 1.0) -
       beta * (beta + 1.0) * (beta + 2.0) / 720.0 * std::pow(U, -beta - 3.0);
  return s;
}

void run_parallel(int n, int workers, const std::function<void(int)>& body) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

// ---------------------------------------------------------------------------
// Schedule

Schedule Schedule::constant(double v) {
  Schedule s;
  s.kind_ = Kind::Constant;
  s.const_value_ = v;
  return s;
}

Schedule Schedule::piecewise(std::vector<long> knots, std::vector<double> values) {
  if (knots.empty() || knots.size() != values.size())
    throw ValidationError("piecewise schedule: knots/values must be non-empty and equal-sized");
  if (!std::is_sorted(knots.begin(), knots.end()))
    throw ValidationError("piecewise schedule: knots must be sorted");
  Schedule s;
  s.kind_ = Kind::Piecewise;
  s.knots_ = std::move(knots);
  s.values_ = std::move(values);
  return s;
}

Schedule Schedule::rule(std::function<double(long)> fn) {
  Schedule s;
  s.kind_ = Kind::Rule;
  s.fn_ = std::move(fn);
  return s;
}

double Schedule::operator()(long t) const {
  switch (kind_) {
    case Kind::Constant: return const_value_;
    case Kind::Piecewise: {
      auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      if (it == knots_.begin()) return values_.front();
      return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
    }
    case Kind::Rule: return fn_(t);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// TvArchSpec

double TvArchSpec::coeff_sum(long t) const {
  double s = 0.0;
  for (const auto& c : coeffs) s += c(t);
  return s;
}

void TvArchSpec::validate_basic() const {
  if (p < 1) throw ValidationError("TvArchSpec.p: order must be >= 1");
  if (static_cast<int>(coeffs.size()) != p)
    throw ValidationError("TvArchSpec.coeff_schedules: expected p = " + std::to_string(p) +
                          " schedules, got " + std::to_string(coeffs.size()));
  if (!(delta > 0.0 && delta < 1.0))
    throw ValidationError("TvArchSpec.delta: must lie in (0,1)");
}

// ---------------------------------------------------------------------------
// ArchInfCoeffs

ArchInfCoeffs ArchInfCoeffs::explicit_head(std::vector<double> head, TailClass tail) {
  if (head.empty()) throw ValidationError("ArchInfCoeffs.coeffs: explicit head is empty");
  for (std::size_t j = 0; j < head.size(); ++j)
    if (head[j] < 0.0)
      throw ValidationError("ArchInfCoeffs.coeffs: a_" + std::to_string(j + 1) + " is negative");
  ArchInfCoeffs c;
  c.head_ = std::move(head);
  c.tail_ = tail;
  const double a_cut = c.head_.back();
  const double cut = static_cast<double>(c.head_.size());
  if (tail.kind == TailClass::Kind::Geometric) {
    if (!(tail.param > 0.0 && tail.param < 1.0))
      throw ValidationError("ArchInfCoeffs.tail: geometric ratio must be in (0,1)");
    c.tail_scale_ = a_cut * std::pow(tail.param, -cut);
  } else {
    if (!(tail.param > 1.0))
      throw ValidationError("ArchInfCoeffs.tail: polynomial exponent must be > 1");
    c.tail_scale_ = a_cut * std::pow(cut, tail.param);
  }
  return c;
}

ArchInfCoeffs ArchInfCoeffs::geometric_rule(double ratio, double total_sum) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ValidationError("geometric_rule: ratio must be in (0,1)");
  if (!(total_sum > 0.0)) throw ValidationError("geometric_rule: sum must be > 0");
  ArchInfCoeffs c;
  c.tail_ = {TailClass::Kind::Geometric, ratio};
  c.tail_scale_ = total_sum * (1.0 - ratio) / ratio;
  return c;
}

ArchInfCoeffs ArchInfCoeffs::polynomial_rule(double exponent, double total_sum) {
  if (!(exponent > 1.0)) throw ValidationError("polynomial_rule: exponent must be > 1");
  if (!(total_sum > 0.0)) throw ValidationError("polynomial_rule: sum must be > 0");
  ArchInfCoeffs c;
  c.tail_ = {TailClass::Kind::Polynomial, exponent};
  c.tail_scale_ = total_sum / boost::math::zeta(exponent);
  return c;
}

ArchInfCoeffs ArchInfCoeffs::finite(std::vector<double> head) {
  for (std::size_t j = 0; j < head.size(); ++j)
    if (head[j] < 0.0)
      throw ValidationError("ArchInfCoeffs.coeffs: a_" + std::to_string(j + 1) + " is negative");
  ArchInfCoeffs c;
  c.head_ = std::move(head);
  c.finite_ = true;
  c.tail_ = {TailClass::Kind::Geometric, 0.5};  // irrelevant, tail is identically zero
  return c;
}

double ArchInfCoeffs::at(long j) const {
  if (j < 1) throw ValidationError("ArchInfCoeffs::at: index must be >= 1");
  if (j <= head_size()) return head_[static_cast<std::size_t>(j - 1)];
  if (finite_) return 0.0;
  return at_real(static_cast<double>(j));
}

double ArchInfCoeffs::at_real(double j) const {
  if (finite_) return 0.0;
  if (j <= static_cast<double>(head_size()))
    throw ValidationError("ArchInfCoeffs::at_real: argument inside explicit head");
  if (tail_.kind == TailClass::Kind::Geometric)
    return tail_scale_ * std::pow(tail_.param, j);
  return tail_scale_ * std::pow(j, -tail_.param);
}

double ArchInfCoeffs::tail_sum(long from) const {
  if (from < 1) from = 1;
  double s = 0.0;
  for (long j = from; j <= head_size(); ++j) s += head_[static_cast<std::size_t>(j - 1)];
  if (finite_) return s;
  const long u = std::max(from, head_size() + 1);
  if (tail_.kind == TailClass::Kind::Geometric)
    return s + tail_scale_ * std::pow(tail_.param, static_cast<double>(u)) / (1.0 - tail_.param);
  return s + tail_scale_ * hurwitz_tail(tail_.param, static_cast<double>(u));
}

double ArchInfCoeffs::tail_sum_real(double u) const {
  // exact integer path only where a long holds the value (huge doubles are
  // always integral, which must not route through the explicit head)
  if (u < 1e15 && std::abs(u - std::round(u)) < 1e-9) return tail_sum(std::llround(u));
  if (finite_) return tail_sum(static_cast<long>(std::ceil(u)));
  if (u <= static_cast<double>(head_size()))
    throw ValidationError("tail_sum_real: non-integer argument inside the explicit head");
  if (tail_.kind == TailClass::Kind::Geometric) return at_real(u) / (1.0 - tail_.param);
  return tail_scale_ * hurwitz_tail(tail_.param, u);
}

long ArchInfCoeffs::truncation_lag(double tol, long limit) const {
  if (finite_) return head_size();
  if (tail_sum(limit + 1) > tol) return -1;
  long lo = 0, hi = limit;  // invariant: tail_sum(lo+1) > tol >= tail_sum(hi+1)
  if (tail_sum(1) <= tol) return 0;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (tail_sum(mid + 1) <= tol ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// ArchInfSpec / assumptions

void ArchInfSpec::validate_basic() const {
  if (!(a0 > 0.0)) throw ValidationError("ArchInfSpec.a0: intercept must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("ArchInfSpec.delta: must lie in (0,1)");
  if (!(nu >= 1.0)) throw ValidationError("ArchInfSpec.nu: moment order must be >= 1");
}

bool AssumptionReport::all_pass() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const AssumptionClause& c) { return c.pass; });
}

const AssumptionClause* AssumptionReport::find(const std::string& id) const {
  for (const auto& c : clauses)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void innovation_clauses(const InnovationModel& innovation, AssumptionReport& rep) {
  const double kiii = innovation.lipschitz_iii();
  const double kiv = innovation.lipschitz_iv();
  const char* how = innovation.lipschitz_certified_analytically() ? "analytic" : "numeric-grid";
  rep.clauses.push_back({"1(iii)", kiii > 0.0 && std::isfinite(kiii),
                         "K_iii=" + fmt(kiii) + " (" + how + ")"});
  rep.clauses.push_back({"1(iv)", kiv >= kiii && std::isfinite(kiv),
                         "K_iv=" + fmt(kiv) + " (" + how + ")"});
}

}  // namespace

AssumptionReport check_assumptions(const TvArchSpec& spec, const InnovationModel& innovation,
                                   long t_lo, long t_hi) {
  spec.validate_basic();
  if (t_lo > t_hi) throw ValidationError("check_assumptions: empty t-range");

  double sup_sum = 0.0, inf_a0 = HUGE_VAL, sup_a0 = 0.0;
  long arg_sup = t_lo;
  for (long t = t_lo; t <= t_hi; ++t) {
    const double a0 = spec.a0(t);
    if (!(a0 > 0.0))
      throw ValidationError("intercept_schedule: a0(t) <= 0 at t=" + std::to_string(t));
    for (int j = 1; j <= spec.p; ++j)
      if (spec.a(j, t) < 0.0)
        throw ValidationError("coeff_schedules: a_" + std::to_string(j) +
                              "(t) < 0 at t=" + std::to_string(t));
    const double s = spec.coeff_sum(t);
    if (s > sup_sum) { sup_sum = s; arg_sup = t; }
    inf_a0 = std::min(inf_a0, a0);
    sup_a0 = std::max(sup_a0, a0);
  }

  AssumptionReport rep;
  rep.clauses.push_back({"1(i)", sup_sum <= 1.0 - spec.delta,
                         "sup_t sum_j a_j = " + fmt(sup_sum) + " at t=" + std::to_string(arg_sup) +
                             ", 1-delta = " + fmt(1.0 - spec.delta)});
  rep.clauses.push_back({"1(ii)", inf_a0 > 0.0 && std::isfinite(sup_a0),
                         "a0 range [" + fmt(inf_a0) + ", " + fmt(sup_a0) + "]"});
  innovation_clauses(innovation, rep);
  return rep;
}

AssumptionReport check_assumptions(const ArchInfSpec& spec, const InnovationModel& innovation) {
  spec.validate_basic();
  const double total = spec.coeffs.total_sum();

  AssumptionReport rep;
  rep.clauses.push_back({"2(i)", total < 1.0 - spec.delta && spec.a0 > 0.0,
                         "sum_j a_j = " + fmt(total) + ", 1-delta = " + fmt(1.0 - spec.delta)});
  const double znorm = std::pow(innovation.abs_moment(spec.nu), 1.0 / spec.nu);
  const double moment_lhs = znorm * total;
  rep.clauses.push_back({"2(ii)-moment", moment_lhs < 1.0,
                         "[E Z^nu]^{1/nu} sum_j a_j = " + fmt(moment_lhs) +
                             " (nu=" + fmt(spec.nu) + ")"});
  innovation_clauses(innovation, rep);
  return rep;
}

double stationary_mean_bound(const TvArchSpec& spec, long t_lo, long t_hi) {
  spec.validate_basic();
  double sup_sum = 0.0, sup_a0 = 0.0;
  for (long t = t_lo; t <= t_hi; ++t) {
    sup_sum = std::max(sup_sum, spec.coeff_sum(t));
    sup_a0 = std::max(sup_a0, spec.a0(t));
  }
  if (sup_sum >= 1.0)
    throw ValidationError("stationary_mean_bound: sup_t sum_j a_j(t) >= 1");
  return sup_a0 / (1.0 - sup_sum);
}

double stationary_mean_bound(const ArchInfSpec& spec) {
  spec.validate_basic();
  const double total = spec.coeffs.total_sum();
  if (total >= 1.0) throw ValidationError("stationary_mean_bound: sum_j a_j >= 1");
  return spec.a0 / (1.0 - total);
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

long default_burn_in(long p_or_lag) { return 10 * std::max<long>({p_or_lag, 50}); }

void require_pass(const AssumptionReport& rep, const char* which) {
  if (rep.all_pass()) return;
  std::string msg = std::string(which) + ": assumptions fail:";
  for (const auto& c : rep.clauses)
    if (!c.pass) msg += " " + c.id + " [" + c.witness + "]";
  throw ValidationError(msg);
}

}  // namespace

PathEnsemble simulate_tvarch(const TvArchSpec& spec, const InnovationModel& innovation,
                             long t_lo, long t_hi, const SimulateOptions& opt) {
  if (t_lo > t_hi) throw ValidationError("simulate_tvarch: empty t-range");
  if (opt.replicates < 1) throw ValidationError("simulate_tvarch: replicates must be >= 1");
  const long burn = opt.burn_in >= 0 ? opt.burn_in : default_burn_in(spec.p);
  require_pass(check_assumptions(spec, innovation, t_lo - burn, t_hi), "simulate_tvarch");

  const long t_start = t_lo - burn;
  std::vector<double> init(static_cast<std::size_t>(spec.p),
                           spec.a0(t_start) / (1.0 - spec.coeff_sum(t_start)));
  if (opt.initial_state) {
    if (static_cast<int>(opt.initial_state->size()) != spec.p)
      throw ValidationError("simulate_tvarch: initial_state must have p entries");
    init = *opt.initial_state;
  }

  PathEnsemble out;
  out.spec_id = "tvarch";
  out.master_seed = opt.master_seed;
  out.replicate_count = opt.replicates;
  out.t_lo = t_lo;
  out.burn_in = burn;
  out.paths.assign(static_cast<std::size_t>(opt.replicates), {});

  const long n_total = t_hi - t_start + 1;
  std::exception_ptr failure;
  std::mutex failure_mu;
  run_parallel(opt.replicates, opt.workers, [&](int r) {
    try {
      SplitMix64 rng = replicate_stream(opt.master_seed, static_cast<std::uint64_t>(r));
      std::vector<double> lag(init.rbegin(), init.rend());  // lag[p-1] = X_{t-1}
      std::vector<double> path;
      path.reserve(static_cast<std::size_t>(t_hi - t_lo + 1));
      for (long i = 0; i < n_total; ++i) {
        const long t = t_start + i;
        double acc = spec.a0(t);
        for (int j = 1; j <= spec.p; ++j)
          acc += spec.a(j, t) * lag[static_cast<std::size_t>(spec.p - j)];
        const double z = opt.forced_z ? *opt.forced_z : innovation.sample(rng);
        const double x = z * acc;
        if (!std::isfinite(x))
          throw SimulationDiverged("simulate_tvarch: X_t overflowed", t, r);
        lag.erase(lag.begin());
        lag.push_back(x);
        if (t >= t_lo) path.push_back(x);
      }
      out.paths[static_cast<std::size_t>(r)] = std::move(path);
    } catch (...) {
      std::scoped_lock lk(failure_mu);
      failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return out;
}

PathEnsemble simulate_archinf(const ArchInfSpec& spec, const InnovationModel& innovation,
                              long n, const SimulateOptions& opt) {
  if (n < 1) throw ValidationError("simulate_archinf: n must be >= 1");
  if (opt.replicates < 1) throw ValidationError("simulate_archinf: replicates must be >= 1");
  require_pass(check_assumptions(spec, innovation), "simulate_archinf");

  const double total = spec.coeffs.total_sum();
  const double tol_abs = opt.tail_tol * (1.0 - total);
  long trunc = opt.truncation_lag;
  if (trunc < 0) {
    trunc = spec.coeffs.truncation_lag(tol_abs);
    if (trunc < 0)
      throw TruncationError("simulate_archinf: no admissible truncation lag below limit", -1);
  } else if (spec.coeffs.tail_sum(trunc + 1) > tol_abs) {
    const long need = spec.coeffs.truncation_lag(tol_abs);
    throw TruncationError("simulate_archinf: tail mass beyond lag " + std::to_string(trunc) +
                              " exceeds tail_tol; required lag " + std::to_string(need),
                          need);
  }
  trunc = std::max<long>(trunc, 1);

  long burn = opt.burn_in >= 0 ? opt.burn_in : default_burn_in(trunc);
  burn = std::max(burn, 5 * trunc);

  std::vector<double> a(static_cast<std::size_t>(trunc));
  for (long j = 1; j <= trunc; ++j) a[static_cast<std::size_t>(j - 1)] = spec.coeffs.at(j);

  std::vector<double> init(static_cast<std::size_t>(trunc), spec.a0 / (1.0 - total));
  if (opt.initial_state) {
    if (static_cast<long>(opt.initial_state->size()) != trunc)
      throw ValidationError("simulate_archinf: initial_state must have truncation_lag entries");
    init = *opt.initial_state;
  }

  PathEnsemble out;
  out.spec_id = "archinf";
  out.master_seed = opt.master_seed;
  out.replicate_count = opt.replicates;
  out.t_lo = 1;
  out.burn_in = burn;
  out.truncation_lag = trunc;
  out.paths.assign(static_cast<std::size_t>(opt.replicates), {});

  std::exception_ptr failure;
  std::mutex failure_mu;
  run_parallel(opt.replicates, opt.workers, [&](int r) {
    try {
      SplitMix64 rng = replicate_stream(opt.master_seed, static_cast<std::uint64_t>(r));
      // hist[(pos - j) mod trunc] = X_{t-j}; rolling window of the last trunc values
      std::vector<double> hist(init.rbegin(), init.rend());
      long pos = 0;
      std::vector<double> path;
      path.reserve(static_cast<std::size_t>(n));
      for (long i = 0; i < burn + n; ++i) {
        double acc = spec.a0;
        long idx = pos - 1;
        for (long j = 0; j < trunc; ++j) {
          if (idx < 0) idx += trunc;
          acc += a[static_cast<std::size_t>(j)] * hist[static_cast<std::size_t>(idx)];
          --idx;
        }
        const double z = opt.forced_z ? *opt.forced_z : innovation.sample(rng);
        const double x = z * acc;
        if (!std::isfinite(x))
          throw SimulationDiverged("simulate_archinf: X_t overflowed", i - burn + 1, r);
        hist[static_cast<std::size_t>(pos)] = x;
        pos = (pos + 1) % trunc;
        if (i >= burn) path.push_back(x);
      }
      out.paths[static_cast<std::size_t>(r)] = std::move(path);
    } catch (...) {
      std::scoped_lock lk(failure_mu);
      failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return out;
}

CompanionMatrices companion_matrices(const TvArchSpec& spec, long t, double z) {
  spec.validate_basic();
  if (!(z > 0.0)) throw ValidationError("companion_matrices: z must be > 0");
  const int p = spec.p;
  CompanionMatrices m;
  m.p = p;
  m.A.assign(static_cast<std::size_t>(p) * p, 0.0);
  m.A_tilde.assign(static_cast<std::size_t>(p) * p, 0.0);
  m.b.assign(static_cast<std::size_t>(p), 0.0);
  for (int j = 0; j < p; ++j) {
    const double aj = spec.a(j + 1, t);
    m.A[static_cast<std::size_t>(j)] = aj * z;
    m.A_tilde[static_cast<std::size_t>(j)] = aj;
  }
  for (int i = 1; i < p; ++i) {
    m.A[static_cast<std::size_t>(i) * p + (i - 1)] = 1.0;
    m.A_tilde[static_cast<std::size_t>(i) * p + (i - 1)] = 1.0;
  }
  m.b[0] = spec.a0(t) * z;
  return m;
}

}  // namespace archmix
