#include "archmix/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "archmix/errors.hpp"

namespace archmix {

namespace {

// first element of A_t v where A_t has first row a_j(t) z and unit subdiagonal
double first_row_apply(const TvArchSpec& spec, long t, std::span<const double> v) {
  double acc = 0.0;
  for (int j = 1; j <= spec.p; ++j) acc += spec.a(j, t) * v[static_cast<std::size_t>(j - 1)];
  return acc;
}

void shift_in(std::vector<double>& block, double newest) {
  for (std::size_t i = block.size(); i-- > 1;) block[i] = block[i - 1];
  block[0] = newest;
}

}  // namespace

PqTerms pq_tvarch(const TvArchSpec& spec, std::span<const double> z,
                  std::span<const double> x, int s, int k, long t) {
  spec.validate_basic();
  if (k < 1) throw ValidationError("pq_tvarch: k must be >= 1");
  if (s < 0) throw ValidationError("pq_tvarch: s must be >= 0");
  if (static_cast<int>(x.size()) != spec.p)
    throw ValidationError("pq_tvarch: past block must have p = " + std::to_string(spec.p) +
                          " entries, got " + std::to_string(x.size()));
  if (static_cast<int>(z.size()) != k + s - 1)
    throw ValidationError("pq_tvarch: innovation block must have k+s-1 = " +
                          std::to_string(k + s - 1) + " entries, got " + std::to_string(z.size()));

  const int p = spec.p;
  auto z_at = [&z](long m) { return z[static_cast<std::size_t>(m - 1)]; };  // Z_{t+m}

  // State split Xblock = Pblock + Qblock with Pblock_t = 0, Qblock_t = x:
  //   Pblock_{t+m} = A_{t+m} Pblock_{t+m-1} + b_{t+m},  Qblock homogeneous.
  // This is the k-step companion-product unroll evaluated iteratively.
  std::vector<double> pblock(static_cast<std::size_t>(p), 0.0);
  std::vector<double> qblock(x.begin(), x.end());
  std::vector<double> p0(static_cast<std::size_t>(k + s), 0.0);  // P_{0,m,t}, m = 1..k+s-1
  std::vector<double> q0(static_cast<std::size_t>(k + s), 0.0);
  std::vector<double> xwin(static_cast<std::size_t>(k + s), 0.0);  // X_{t+m}
  const int horizon = k + s - 1;
  for (long m = 1; m <= horizon; ++m) {
    const double pm = spec.a0(t + m) + first_row_apply(spec, t + m, pblock);
    const double qm = first_row_apply(spec, t + m, qblock);
    p0[static_cast<std::size_t>(m)] = pm;
    q0[static_cast<std::size_t>(m)] = qm;
    const double zm = z_at(m);
    xwin[static_cast<std::size_t>(m)] = zm * (pm + qm);
    shift_in(pblock, zm * pm);
    shift_in(qblock, zm * qm);
  }

  PqTerms out;
  out.s = s;
  out.k = k;
  out.t = t;
  if (s == 0) {
    out.p_term = spec.a0(t + k) + first_row_apply(spec, t + k, pblock);
    out.q_term = first_row_apply(spec, t + k, qblock);
    return out;
  }

  const long T = t + k + s;
  double pt = spec.a0(T);
  double qt = 0.0;
  if (s > p) {
    for (int i = 1; i <= p; ++i) pt += spec.a(i, T) * xwin[static_cast<std::size_t>(k + s - i)];
    out.p_term = pt;
    out.q_term = 0.0;  // the conditioning window screens off the past entirely
    return out;
  }
  for (int i = 1; i <= s - 1; ++i)
    pt += spec.a(i, T) * xwin[static_cast<std::size_t>(k + s - i)];
  for (int i = s; i <= p; ++i) {
    const long kp = k + s - i;
    const double ai = spec.a(i, T);
    if (kp >= 1) {
      pt += ai * z_at(kp) * p0[static_cast<std::size_t>(kp)];
      qt += ai * z_at(kp) * q0[static_cast<std::size_t>(kp)];
    } else {
      qt += ai * x[static_cast<std::size_t>(-kp)];  // X_{t+kp} is past data
    }
  }
  out.p_term = pt;
  out.q_term = qt;
  return out;
}

PsiSequence psi_coefficients(std::span<const double> coeffs, int length) {
  if (length < 0) throw ValidationError("psi_coefficients: length must be >= 0");
  double total = 0.0;
  for (double a : coeffs) {
    if (a < 0.0) throw ValidationError("psi_coefficients: negative coefficient");
    total += a;
  }
  if (total >= 1.0)
    throw ValidationError("psi_coefficients: sum of coefficients is " + std::to_string(total) +
                          " >= 1, series diverges");
  PsiSequence out;
  out.source_coeffs.assign(coeffs.begin(), coeffs.end());
  out.values.assign(static_cast<std::size_t>(length) + 1, 0.0);
  out.values[0] = 1.0;
  for (int m = 1; m <= length; ++m) {
    double acc = 0.0;
    const int jmax = std::min<int>(m, static_cast<int>(coeffs.size()));
    for (int j = 1; j <= jmax; ++j)
      acc += coeffs[static_cast<std::size_t>(j - 1)] * out.values[static_cast<std::size_t>(m - j)];
    out.values[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

PsiSequence psi_coefficients(const ArchInfCoeffs& coeffs, int length) {
  std::vector<double> a(static_cast<std::size_t>(length));
  for (int j = 1; j <= length; ++j) a[static_cast<std::size_t>(j - 1)] = coeffs.at(j);
  // the inversion only sees a_1..a_length; admissibility uses the full sum
  if (coeffs.total_sum() >= 1.0)
    throw ValidationError("psi_coefficients: sum of coefficients >= 1, series diverges");
  PsiSequence out;
  out.source_coeffs = a;
  out.values.assign(static_cast<std::size_t>(length) + 1, 0.0);
  out.values[0] = 1.0;
  for (int m = 1; m <= length; ++m) {
    double acc = 0.0;
    for (int j = 1; j <= m; ++j)
      acc += a[static_cast<std::size_t>(j - 1)] * out.values[static_cast<std::size_t>(m - j)];
    out.values[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

double d_k(const ArchInfSpec& spec, const PastBlock& x, long k) {
  if (k <= 0) return 0.0;
  const auto& c = spec.coeffs;
  const long L = static_cast<long>(x.values.size());
  double s = 0.0;
  for (long i = 0; i < L; ++i) s += c.at(k + i) * x.values[static_cast<std::size_t>(i)];
  if (!x.geometric_tail_ratio || L == 0) return s;

  const double rho = *x.geometric_tail_ratio;
  if (!(rho > 0.0 && rho < 1.0))
    throw ValidationError("d_k: past-block geometric tail ratio must be in (0,1)");
  const double xl = x.values.back();
  // x_{-i} = xl * rho^{i-L+1} for i >= L; explicit part while a_{k+i} is still
  // in the stored head, analytic closed form once both factors are geometric.
  long i = L;
  double xv = xl * rho;
  while (k + i <= c.head_size()) {
    s += c.at(k + i) * xv;
    xv *= rho;
    ++i;
  }
  if (c.finite_support()) return s;
  if (c.tail().kind != TailClass::Kind::Geometric)
    throw ValidationError(
        "d_k: infinite-support past block needs a geometric coefficient tail "
        "for analytic summation");
  const double r = c.tail().param;
  // sum_{m>=0} a_{k+i+m} xv r_x^m with a in its geometric tail region
  s += c.at(k + i) * xv / (1.0 - r * rho);
  return s;
}

std::vector<double> d_sequence(const ArchInfSpec& spec, const PastBlock& x, int k_max) {
  if (k_max < 0) throw ValidationError("d_sequence: k_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int k = 1; k <= k_max; ++k) out[static_cast<std::size_t>(k)] = d_k(spec, x, k);
  return out;
}

double q0k_mean(const ArchInfSpec& spec, const PastBlock& x, int k) {
  if (k <= 0) return 0.0;
  const std::vector<double> d = d_sequence(spec, x, k);
  std::vector<double> a(static_cast<std::size_t>(k), 0.0);
  for (int j = 1; j < k; ++j) a[static_cast<std::size_t>(j)] = spec.coeffs.at(j);

  // recursion route: Q_m = sum_{j=1}^{m-1} a_j Q_{m-j} + d_m
  std::vector<double> q(static_cast<std::size_t>(k) + 1, 0.0);
  for (int m = 1; m <= k; ++m) {
    double acc = d[static_cast<std::size_t>(m)];
    for (int j = 1; j < m; ++j)
      acc += a[static_cast<std::size_t>(j)] * q[static_cast<std::size_t>(m - j)];
    q[static_cast<std::size_t>(m)] = acc;
  }
  const double recursion_value = q[static_cast<std::size_t>(k)];

  const PsiSequence psi = psi_coefficients(spec.coeffs, k - 1);
  double conv_value = 0.0;
  for (int j = 0; j < k; ++j)
    conv_value += psi.values[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(k - j)];

  const double scale = std::max({std::abs(recursion_value), std::abs(conv_value), 1e-300});
  if (std::abs(recursion_value - conv_value) > 1e-10 * scale)
    throw ConsistencyError("q0k_mean: recursion and psi-convolution disagree: " +
                           std::to_string(recursion_value) + " vs " + std::to_string(conv_value));
  return recursion_value;
}

PqTerms pq_archinf(const ArchInfSpec& spec, std::span<const double> z,
                   std::span<const double> x, int s, int k) {
  spec.validate_basic();
  if (k < 1) throw ValidationError("pq_archinf: k must be >= 1");
  if (s < 0) throw ValidationError("pq_archinf: s must be >= 0");
  if (static_cast<int>(z.size()) != k + s - 1)
    throw ValidationError("pq_archinf: innovation block must have k+s-1 entries");

  const PastBlock past = PastBlock::finite(std::vector<double>(x.begin(), x.end()));
  const int T = k + s;
  std::vector<double> a(static_cast<std::size_t>(T) + 1, 0.0);
  for (int j = 1; j <= T; ++j) a[static_cast<std::size_t>(j)] = spec.coeffs.at(j);
  const std::vector<double> d = d_sequence(spec, past, T);

  auto z_at = [&z](int m) { return z[static_cast<std::size_t>(m - 1)]; };  // Z_m

  // P_{0,m} = a0 + sum_{j=1}^{m-1} a_j Z_{m-j} P_{0,m-j};  Q_{0,m} likewise
  // seeded by d_m. z covers exactly the indices the window values need.
  std::vector<double> p0(static_cast<std::size_t>(T), 0.0), q0(static_cast<std::size_t>(T), 0.0),
      xwin(static_cast<std::size_t>(T), 0.0);
  auto pq0_step = [&](int m) {
    double pm = spec.a0;
    double qm = d[static_cast<std::size_t>(m)];
    for (int j = 1; j < m; ++j) {
      const double w = a[static_cast<std::size_t>(j)] * z_at(m - j);
      pm += w * p0[static_cast<std::size_t>(m - j)];
      qm += w * q0[static_cast<std::size_t>(m - j)];
    }
    return std::pair<double, double>(pm, qm);
  };
  for (int m = 1; m <= k + s - 1; ++m) {
    const auto [pm, qm] = pq0_step(m);
    p0[static_cast<std::size_t>(m)] = pm;
    q0[static_cast<std::size_t>(m)] = qm;
    xwin[static_cast<std::size_t>(m)] = z_at(m) * (pm + qm);
  }

  PqTerms out;
  out.s = s;
  out.k = k;
  if (s == 0) {
    const auto [pk, qk] = pq0_step(k);
    out.p_term = pk;
    out.q_term = qk;
    return out;
  }

  // s >= 1: window terms j = 1..s, expanded terms j = s+1..k+s-1, rest in d_T.
  double pt = spec.a0;
  double qt = d[static_cast<std::size_t>(T)];
  for (int j = 1; j <= s; ++j)
    pt += a[static_cast<std::size_t>(j)] * xwin[static_cast<std::size_t>(T - j)];
  for (int j = s + 1; j <= T - 1; ++j) {
    const double w = a[static_cast<std::size_t>(j)] * z_at(T - j);
    pt += w * p0[static_cast<std::size_t>(T - j)];
    qt += w * q0[static_cast<std::size_t>(T - j)];
  }
  out.p_term = pt;
  out.q_term = qt;
  return out;
}

PqTerms pq_archinf_multiindex(const ArchInfSpec& spec, std::span<const double> z,
                              std::span<const double> x, int k) {
  if (k < 1) throw ValidationError("pq_archinf_multiindex: k must be >= 1");
  if (k > 12)
    throw ValidationError("pq_archinf_multiindex: chain enumeration limited to k <= 12");
  if (static_cast<int>(z.size()) != k - 1)
    throw ValidationError("pq_archinf_multiindex: innovation block must have k-1 entries");

  const PastBlock past = PastBlock::finite(std::vector<double>(x.begin(), x.end()));
  const std::vector<double> d = d_sequence(spec, past, k);
  std::vector<double> a(static_cast<std::size_t>(k) + 1, 0.0);
  for (int j = 1; j <= k; ++j) a[static_cast<std::size_t>(j)] = spec.coeffs.at(j);

  // Chains r = j_1 < j_2 < ... < j_m = k with weight prod a_{j_{i+1}-j_i} Z_{j_i};
  // every chain feeds P with factor a0 and Q with factor d_{j_1}.
  double p_sum = 0.0, q_sum = 0.0;
  const int interior = k - 1;  // candidate chain points 1..k-1
  for (std::uint32_t mask = 0; mask < (1u << interior); ++mask) {
    double w = 1.0;
    int prev = -1;
    int lowest = k;
    for (int bit = 0; bit < interior; ++bit) {
      if (!(mask & (1u << bit))) continue;
      const int point = bit + 1;
      if (prev < 0)
        lowest = point;
      else
        w *= a[static_cast<std::size_t>(point - prev)] * z[static_cast<std::size_t>(prev - 1)];
      prev = point;
    }
    if (prev > 0) w *= a[static_cast<std::size_t>(k - prev)] * z[static_cast<std::size_t>(prev - 1)];
    p_sum += w;
    q_sum += w * d[static_cast<std::size_t>(lowest)];
  }
  PqTerms out;
  out.s = 0;
  out.k = k;
  out.p_term = spec.a0 * p_sum;
  out.q_term = q_sum;
  return out;
}

}  // namespace archmix
