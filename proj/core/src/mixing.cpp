#include "archmix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "archmix/errors.hpp"
#include "archmix/rng.hpp"

namespace archmix {

namespace {

constexpr long kSubsetLimit = 4096;  // exhaustive enumeration cap (2^12)

std::vector<double> quantile_edges(std::vector<double>& sample, int m) {
  if (static_cast<int>(sample.size()) < m)
    throw ValidationError("build_table: fewer samples than bins");
  std::sort(sample.begin(), sample.end());
  std::vector<double> edges(static_cast<std::size_t>(m) - 1);
  const std::size_t n = sample.size();
  for (int i = 1; i < m; ++i)
    edges[static_cast<std::size_t>(i) - 1] = sample[n * static_cast<std::size_t>(i) / m];
  return edges;
}

int digitize(const std::vector<double>& edges, double x) {
  return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

// exact sup over cell unions by Gray-code enumeration of the smaller side
double alpha_sup_exact(const std::vector<double>& joint, long nl, long nr,
                       const std::vector<double>& pl, const std::vector<double>& qr,
                       bool enumerate_right) {
  const long ne = enumerate_right ? nr : nl;   // enumerated side
  const long ns = enumerate_right ? nl : nr;   // scanned side
  std::vector<double> rowsum(static_cast<std::size_t>(ns), 0.0);
  auto D = [&](long scan, long enumd) {
    const long i = enumerate_right ? scan : enumd;
    const long j = enumerate_right ? enumd : scan;
    return joint[static_cast<std::size_t>(i) * nr + j] -
           pl[static_cast<std::size_t>(i)] * qr[static_cast<std::size_t>(j)];
  };
  double best = 0.0;
  std::uint64_t prev_gray = 0;
  for (std::uint64_t idx = 1; idx < (1ull << ne); ++idx) {
    const std::uint64_t gray = idx ^ (idx >> 1);
    const std::uint64_t diff = gray ^ prev_gray;
    prev_gray = gray;
    const int bit = std::countr_zero(diff);
    const double sign = (gray & diff) ? 1.0 : -1.0;
    for (long s = 0; s < ns; ++s) rowsum[static_cast<std::size_t>(s)] += sign * D(s, bit);
    double pos = 0.0, neg = 0.0;
    for (long s = 0; s < ns; ++s) {
      const double v = rowsum[static_cast<std::size_t>(s)];
      if (v > 0.0) pos += v; else neg -= v;
    }
    best = std::max({best, pos, neg});
  }
  return best;
}

// alternating threshold ascent from a random right union; exact fixpoints of
// the ascent are local optima, 64 restarts are taken and the result labeled
// heuristic
double alpha_sup_heuristic(const std::vector<double>& joint, long nl, long nr,
                           const std::vector<double>& pl, const std::vector<double>& qr) {
  SplitMix64 rng(0x9E3779B97F4A7C15ULL);
  auto D = [&](long i, long j) {
    return joint[static_cast<std::size_t>(i) * nr + j] -
           pl[static_cast<std::size_t>(i)] * qr[static_cast<std::size_t>(j)];
  };
  double best = 0.0;
  std::vector<char> inB(static_cast<std::size_t>(nr));
  std::vector<char> inA(static_cast<std::size_t>(nl));
  for (int restart = 0; restart < 64; ++restart) {
    for (long j = 0; j < nr; ++j) inB[static_cast<std::size_t>(j)] = (rng.next_u64() & 1) != 0;
    for (int side = 0; side < 2; ++side) {
      const double sign = side == 0 ? 1.0 : -1.0;  // maximize sign * sum
      double value = -1.0;
      for (int iter = 0; iter < 64; ++iter) {
        for (long i = 0; i < nl; ++i) {
          double rs = 0.0;
          for (long j = 0; j < nr; ++j)
            if (inB[static_cast<std::size_t>(j)]) rs += D(i, j);
          inA[static_cast<std::size_t>(i)] = sign * rs > 0.0;
        }
        for (long j = 0; j < nr; ++j) {
          double cs = 0.0;
          for (long i = 0; i < nl; ++i)
            if (inA[static_cast<std::size_t>(i)]) cs += D(i, j);
          inB[static_cast<std::size_t>(j)] = sign * cs > 0.0;
        }
        double v = 0.0;
        for (long i = 0; i < nl; ++i)
          if (inA[static_cast<std::size_t>(i)])
            for (long j = 0; j < nr; ++j)
              if (inB[static_cast<std::size_t>(j)]) v += D(i, j);
        v *= sign;
        if (v <= value + 1e-15) { value = std::max(value, v); break; }
        value = v;
      }
      best = std::max(best, value);
    }
  }
  return best;
}

struct AlphaParts {
  double value;
  bool exact;
};

AlphaParts alpha_from_probs(const std::vector<double>& joint, long nl, long nr) {
  std::vector<double> pl(static_cast<std::size_t>(nl), 0.0), qr(static_cast<std::size_t>(nr), 0.0);
  for (long i = 0; i < nl; ++i)
    for (long j = 0; j < nr; ++j) {
      const double v = joint[static_cast<std::size_t>(i) * nr + j];
      pl[static_cast<std::size_t>(i)] += v;
      qr[static_cast<std::size_t>(j)] += v;
    }
  const long small = std::min(nl, nr);
  if ((1L << std::min<long>(small, 62)) <= kSubsetLimit)
    return {alpha_sup_exact(joint, nl, nr, pl, qr, nr <= nl), true};
  return {alpha_sup_heuristic(joint, nl, nr, pl, qr), false};
}

double beta_from_probs(const std::vector<double>& joint, long nl, long nr) {
  std::vector<double> pl(static_cast<std::size_t>(nl), 0.0), qr(static_cast<std::size_t>(nr), 0.0);
  for (long i = 0; i < nl; ++i)
    for (long j = 0; j < nr; ++j) {
      const double v = joint[static_cast<std::size_t>(i) * nr + j];
      pl[static_cast<std::size_t>(i)] += v;
      qr[static_cast<std::size_t>(j)] += v;
    }
  double s = 0.0;
  for (long i = 0; i < nl; ++i)
    for (long j = 0; j < nr; ++j)
      s += std::abs(joint[static_cast<std::size_t>(i) * nr + j] -
                    pl[static_cast<std::size_t>(i)] * qr[static_cast<std::size_t>(j)]);
  return s;
}

double batch_se(const std::vector<double>& batch_values, double /*point*/) {
  const std::size_t b = batch_values.size();
  if (b < 2) return 0.0;
  const double mean = std::accumulate(batch_values.begin(), batch_values.end(), 0.0) /
                      static_cast<double>(b);
  double ss = 0.0;
  for (double v : batch_values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (static_cast<double>(b) - 1.0) / static_cast<double>(b));
}

}  // namespace

JointCellTable build_table(const PathEnsemble& ensemble, long t, int k, int r_left, int r_right,
                           int m, int batches) {
  if (m < 2) throw ValidationError("build_table: m must be >= 2");
  if (k < 0 || r_left < 0 || r_right < 0) throw ValidationError("build_table: negative window");
  if (ensemble.paths.empty() || ensemble.length() == 0)
    throw ValidationError("build_table: empty ensemble");
  const double lcells = std::pow(static_cast<double>(m), r_left + 1);
  const double rcells = std::pow(static_cast<double>(m), r_right + 1);
  if (lcells > static_cast<double>(kSubsetLimit) || rcells > static_cast<double>(kSubsetLimit))
    throw ValidationError("build_table: (window+1)*log2(m) exceeds the enumeration limit of 12");

  const long n = ensemble.length();
  const long span_lo = r_left;               // path offset of X_t
  const long span_hi = n - 1 - k - r_right;  // last usable offset
  long i_lo, i_hi;
  if (t >= 0) {
    const long off = t - ensemble.t_lo;
    if (off < span_lo || off > span_hi)
      throw ValidationError("build_table: window around t falls outside the simulated range");
    i_lo = i_hi = off;
  } else {
    if (span_lo > span_hi)
      throw ValidationError("build_table: path too short for the requested windows");
    i_lo = span_lo;
    i_hi = span_hi;
  }

  JointCellTable tab;
  tab.k = k;
  tab.r_left = r_left;
  tab.r_right = r_right;
  tab.m = m;
  tab.anchor_t = t;
  tab.left_cells = static_cast<long>(lcells);
  tab.right_cells = static_cast<long>(rcells);

  // marginal quantile edges, pooled across replicates (and across t when
  // sliding); per-coordinate in anchored mode where marginals may vary with t
  const int lw = r_left + 1, rw = r_right + 1;
  auto coord_sample = [&](long offset) {
    std::vector<double> s;
    s.reserve(ensemble.paths.size());
    for (const auto& path : ensemble.paths) s.push_back(path[static_cast<std::size_t>(offset)]);
    return s;
  };
  if (t >= 0) {
    for (int c = 0; c < lw; ++c) {
      auto s = coord_sample(i_lo - c);
      tab.edges_left.push_back(quantile_edges(s, m));
    }
    for (int c = 0; c < rw; ++c) {
      auto s = coord_sample(i_lo + k + c);
      tab.edges_right.push_back(quantile_edges(s, m));
    }
  } else {
    std::vector<double> pool;
    for (const auto& path : ensemble.paths) pool.insert(pool.end(), path.begin(), path.end());
    const std::vector<double> edges = quantile_edges(pool, m);
    tab.edges_left.assign(static_cast<std::size_t>(lw), edges);
    tab.edges_right.assign(static_cast<std::size_t>(rw), edges);
  }

  const long cells = tab.left_cells * tab.right_cells;
  tab.joint.assign(static_cast<std::size_t>(cells), 0.0);
  const long total_units = (i_hi - i_lo + 1) * static_cast<long>(ensemble.paths.size());
  tab.batches = static_cast<int>(std::min<long>(batches, total_units));
  tab.batch_joint.assign(static_cast<std::size_t>(tab.batches),
                         std::vector<double>(static_cast<std::size_t>(cells), 0.0));
  tab.batch_counts.assign(static_cast<std::size_t>(tab.batches), 0);

  long unit = 0;
  for (const auto& path : ensemble.paths) {
    for (long u = i_lo; u <= i_hi; ++u, ++unit) {
      long li = 0;
      for (int c = 0; c < lw; ++c)
        li = li * m + digitize(tab.edges_left[static_cast<std::size_t>(c)],
                               path[static_cast<std::size_t>(u - c)]);
      long ri = 0;
      for (int c = 0; c < rw; ++c)
        ri = ri * m + digitize(tab.edges_right[static_cast<std::size_t>(c)],
                               path[static_cast<std::size_t>(u + k + c)]);
      const std::size_t cell = static_cast<std::size_t>(li * tab.right_cells + ri);
      tab.joint[cell] += 1.0;
      const int b = static_cast<int>(unit * tab.batches / total_units);
      tab.batch_joint[static_cast<std::size_t>(b)][cell] += 1.0;
      ++tab.batch_counts[static_cast<std::size_t>(b)];
    }
  }
  tab.sample_count = total_units;
  for (auto& v : tab.joint) v /= static_cast<double>(total_units);
  for (int b = 0; b < tab.batches; ++b) {
    const double c = static_cast<double>(tab.batch_counts[static_cast<std::size_t>(b)]);
    if (c > 0)
      for (auto& v : tab.batch_joint[static_cast<std::size_t>(b)]) v /= c;
  }

  tab.left_marginal.assign(static_cast<std::size_t>(tab.left_cells), 0.0);
  tab.right_marginal.assign(static_cast<std::size_t>(tab.right_cells), 0.0);
  for (long i = 0; i < tab.left_cells; ++i)
    for (long j = 0; j < tab.right_cells; ++j) {
      const double v = tab.joint[static_cast<std::size_t>(i * tab.right_cells + j)];
      tab.left_marginal[static_cast<std::size_t>(i)] += v;
      tab.right_marginal[static_cast<std::size_t>(j)] += v;
    }
  return tab;
}

EstimatorValue alpha_hat(const JointCellTable& table) {
  const AlphaParts point = alpha_from_probs(table.joint, table.left_cells, table.right_cells);
  std::vector<double> bvals;
  for (const auto& bj : table.batch_joint)
    bvals.push_back(alpha_from_probs(bj, table.left_cells, table.right_cells).value);
  return {point.value, batch_se(bvals, point.value), point.exact};
}

EstimatorValue beta_hat(const JointCellTable& table) {
  const double point = beta_from_probs(table.joint, table.left_cells, table.right_cells);
  std::vector<double> bvals;
  for (const auto& bj : table.batch_joint)
    bvals.push_back(beta_from_probs(bj, table.left_cells, table.right_cells));
  return {point, batch_se(bvals, point), true};
}

EstimatorValue two_mix_hat(const PathEnsemble& ensemble, long t, int k, int m, int batches) {
  return alpha_hat(build_table(ensemble, t, k, 0, 0, m, batches));
}

CovarianceCurve covariance_curve(const PathEnsemble& ensemble, int k_lo, int k_hi) {
  if (k_lo < 0 || k_hi < k_lo) throw ValidationError("covariance_curve: bad lag range");
  const long n = ensemble.length();
  if (n <= k_hi + 1) throw ValidationError("covariance_curve: paths shorter than k_hi");

  CovarianceCurve out;
  const int B = static_cast<int>(std::min<std::size_t>(16, ensemble.paths.size() * 4));
  for (int k = k_lo; k <= k_hi; ++k) {
    // batch over contiguous path segments; replicate boundaries never straddle
    std::vector<double> bvals;
    for (const auto& path : ensemble.paths) {
      const int per_path = std::max(1, B / static_cast<int>(ensemble.paths.size()));
      const long seg = static_cast<long>(path.size()) / per_path;
      for (int s = 0; s < per_path; ++s) {
        const long lo = s * seg;
        const long hi = (s == per_path - 1) ? static_cast<long>(path.size()) : (s + 1) * seg;
        if (hi - lo <= k + 1) continue;
        double mean = 0.0;
        for (long u = lo; u < hi; ++u) mean += path[static_cast<std::size_t>(u)];
        mean /= static_cast<double>(hi - lo);
        double acc = 0.0;
        long cnt = 0;
        for (long u = lo; u + k < hi; ++u, ++cnt)
          acc += (path[static_cast<std::size_t>(u)] - mean) *
                 (path[static_cast<std::size_t>(u + k)] - mean);
        bvals.push_back(acc / static_cast<double>(cnt));
      }
    }
    if (bvals.empty()) throw ValidationError("covariance_curve: batches too short");
    const double point = std::accumulate(bvals.begin(), bvals.end(), 0.0) /
                         static_cast<double>(bvals.size());
    out.lags.push_back(k);
    out.cov.push_back(point);
    out.se.push_back(batch_se(bvals, point));
  }
  return out;
}

namespace {

struct Ols {
  double slope, intercept, r2;
};

Ols ols(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ssr = 0, sst = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = intercept + slope * xs[i];
    ssr += (ys[i] - fit) * (ys[i] - fit);
    sst += (ys[i] - ybar) * (ys[i] - ybar);
  }
  return {slope, intercept, sst > 0 ? 1.0 - ssr / sst : 1.0};
}

}  // namespace

DecayFit decay_fit(std::span<const int> lags, std::span<const double> values) {
  if (lags.size() != values.size() || lags.size() < 3)
    throw ValidationError("decay_fit: need >= 3 (lag, value) pairs");
  std::vector<double> lk, llk, lv;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (!(values[i] > 0.0))
      throw ValidationError("decay_fit: values must be positive for a log fit");
    if (lags[i] <= 0) throw ValidationError("decay_fit: lags must be positive");
    lk.push_back(static_cast<double>(lags[i]));
    llk.push_back(std::log(static_cast<double>(lags[i])));
    lv.push_back(std::log(values[i]));
  }
  const Ols lin = ols(lk, lv);   // log v ~ k      (geometric)
  const Ols log = ols(llk, lv);  // log v ~ log k  (polynomial)
  DecayFit fit;
  fit.slope_loglin = lin.slope;
  fit.r2_loglin = lin.r2;
  fit.slope_loglog = log.slope;
  fit.r2_loglog = log.r2;
  fit.ratio = std::exp(lin.slope);
  fit.exponent = log.slope;
  if (lin.r2 >= log.r2) {
    fit.kind = DecayFit::Kind::Geometric;
    fit.r2 = lin.r2;
  } else {
    fit.kind = DecayFit::Kind::Polynomial;
    fit.r2 = log.r2;
  }
  return fit;
}

EstimateCurve estimate_curve(const PathEnsemble& ensemble, std::span<const int> lags, int m,
                             int r_left, int r_right, int batches) {
  EstimateCurve out;
  out.m = m;
  out.r_left = r_left;
  out.r_right = r_right;
  for (int k : lags) {
    const JointCellTable tab = build_table(ensemble, -1, k, r_left, r_right, m, batches);
    const EstimatorValue a = alpha_hat(tab);
    const EstimatorValue b = beta_hat(tab);
    const EstimatorValue tm = (r_left == 0 && r_right == 0)
                                  ? a
                                  : two_mix_hat(ensemble, -1, k, m, batches);
    out.lags.push_back(k);
    out.alpha.push_back(a.value);
    out.beta.push_back(b.value);
    out.twomix.push_back(tm.value);
    out.se_alpha.push_back(a.se);
    out.se_beta.push_back(b.se);
    out.se_twomix.push_back(tm.se);
    out.exact.push_back(a.exact && tm.exact ? 1 : 0);
    out.n = tab.sample_count;
  }
  return out;
}

}  // namespace archmix
