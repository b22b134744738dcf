#pragma once

#include <optional>
#include <span>
#include <vector>

#include "archmix/process.hpp"

namespace archmix {

// One split X_{t+k+s} = Z_{t+k+s} (p_term + q_term): p_term collects the
// intercept/innovation part, q_term everything reached through the
// conditioning past block. Both are nonnegative; q_term vanishes at x = 0.
struct PqTerms {
  double p_term = 0.0;
  double q_term = 0.0;
  int s = 0;
  int k = 0;
  long t = 0;
};

// tvARCH split via iterated companion-state recursion.
//   z = (Z_{t+1}, ..., Z_{t+k+s-1})   (length k-1 when s = 0)
//   x = (X_t, ..., X_{t-p+1})
PqTerms pq_tvarch(const TvArchSpec& spec, std::span<const double> z,
                  std::span<const double> x, int s, int k, long t);

struct PsiSequence {
  std::vector<double> values;         // psi_0..psi_L
  std::vector<double> source_coeffs;  // a_1..a_L actually inverted
};

// Power-series inverse of 1 - sum_j a_j z^j: psi_0 = 1,
// psi_k = sum_{j=1}^{k} a_j psi_{k-j}. Requires sum_j a_j < 1.
PsiSequence psi_coefficients(std::span<const double> coeffs, int length);
PsiSequence psi_coefficients(const ArchInfCoeffs& coeffs, int length);

// Past block (x_0, x_{-1}, ..., x_{-(L-1)}), optionally extended past the
// stored values by a declared geometric tail x_{-i} = x_{-(L-1)} ratio^{i-L+1}.
struct PastBlock {
  std::vector<double> values;
  std::optional<double> geometric_tail_ratio;

  static PastBlock finite(std::vector<double> v) { return {std::move(v), std::nullopt}; }
};

// d_k(x) = sum_{i>=0} a_{k+i} x_{-i}, with the coefficient tail summed
// analytically; d_k = 0 for k <= 0.
double d_k(const ArchInfSpec& spec, const PastBlock& x, long k);

// values[k] = d_k(x) for k = 0..k_max (values[0] = 0 by convention).
std::vector<double> d_sequence(const ArchInfSpec& spec, const PastBlock& x, int k_max);

// Q_{0,k}(1,x), computed by the d-recursion and cross-checked against the
// psi-convolution sum_{j=0}^{k-1} psi_j d_{k-j}(x) to 1e-10 relative.
double q0k_mean(const ArchInfSpec& spec, const PastBlock& x, int k);

// ARCH(inf) split; z = (Z_1, ..., Z_{k+s-1}), x finite past block.
PqTerms pq_archinf(const ArchInfSpec& spec, std::span<const double> z,
                   std::span<const double> x, int s, int k);

// Explicit multi-index chain expansion for s = 0 (exponential in k, k <= 12);
// retained purely as a small-k oracle for the linear recursion route.
PqTerms pq_archinf_multiindex(const ArchInfSpec& spec, std::span<const double> z,
                              std::span<const double> x, int k);

}  // namespace archmix
