#pragma once

#include <span>
#include <vector>

#include "archmix/process.hpp"

namespace archmix {

// Empirical joint cell probabilities of the left window (X_t, ..., X_{t-r1})
// against the right window (X_{t+k}, ..., X_{t+k+r2}) on marginal-quantile
// grids. Estimators on this table are exact suprema over the finite algebra
// the grid generates, hence lower approximations of the true coefficients.
struct JointCellTable {
  int k = 0;
  int r_left = 0, r_right = 0;
  int m = 0;  // bins per coordinate
  long anchor_t = -1;  // -1: pooled over t (stationary usage)
  std::vector<std::vector<double>> edges_left;   // per coordinate, m-1 edges
  std::vector<std::vector<double>> edges_right;
  long left_cells = 0, right_cells = 0;
  std::vector<double> joint;  // row-major [left][right], sums to 1
  std::vector<double> left_marginal, right_marginal;
  long sample_count = 0;
  int batches = 0;
  std::vector<std::vector<double>> batch_joint;
  std::vector<long> batch_counts;
};

JointCellTable build_table(const PathEnsemble& ensemble, long t, int k, int r_left, int r_right,
                           int m, int batches = 16);

struct EstimatorValue {
  double value = 0.0;
  double se = 0.0;    // batch-means standard error (0 with < 2 batches)
  bool exact = true;  // exhaustive subset enumeration vs threshold-ascent heuristic
};

// Exact restricted supremum of |P(AxB) - P(A)Q(B)| over unions of grid cells:
// for a fixed right union the optimal left union is a threshold set, so
// enumerating the smaller side's subsets is exhaustive up to 4096 subsets.
EstimatorValue alpha_hat(const JointCellTable& table);

// Finest-partition double sum  sum_{ij} |p(i,j) - p(i) q(j)|.
EstimatorValue beta_hat(const JointCellTable& table);

// alpha_hat on the single-coordinate (r_left = r_right = 0) table.
EstimatorValue two_mix_hat(const PathEnsemble& ensemble, long t, int k, int m, int batches = 16);

struct CovarianceCurve {
  std::vector<int> lags;
  std::vector<double> cov;
  std::vector<double> se;
};

// Batch-means autocovariance of the squared process, pooled over t (for
// time-varying specs this is a t-average and labeled as such by the CLI).
CovarianceCurve covariance_curve(const PathEnsemble& ensemble, int k_lo, int k_hi);

struct DecayFit {
  enum class Kind { Geometric, Polynomial };
  Kind kind = Kind::Geometric;
  double ratio = 0.0;     // geometric per-lag ratio exp(slope)
  double exponent = 0.0;  // polynomial log-log slope
  double r2 = 0.0;        // of the winning fit
  double slope_loglin = 0.0, r2_loglin = 0.0;
  double slope_loglog = 0.0, r2_loglog = 0.0;
};

DecayFit decay_fit(std::span<const int> lags, std::span<const double> values);

struct EstimateCurve {
  std::vector<int> lags;
  std::vector<double> alpha, beta, twomix;
  std::vector<double> se_alpha, se_beta, se_twomix;
  std::vector<int> exact;  // 1 if every estimator at this lag was exhaustive
  int m = 0, r_left = 0, r_right = 0;
  long n = 0;
};

EstimateCurve estimate_curve(const PathEnsemble& ensemble, std::span<const int> lags, int m,
                             int r_left, int r_right, int batches = 16);

}  // namespace archmix
