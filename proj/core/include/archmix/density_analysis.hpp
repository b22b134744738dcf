#pragma once

#include <span>
#include <vector>

#include "archmix/innovation.hpp"

namespace archmix {

struct TvGridPoint {
  double a = 0.0;
  double integral = 0.0;  // total-variation integral at this a
  double ratio = 0.0;     // integral / a
};

struct LipschitzReport {
  std::vector<TvGridPoint> clause_iii;
  std::vector<TvGridPoint> clause_iv;
  double k_iii = 0.0;  // max ratio over the grid
  double k_iv = 0.0;
  int tau_subgrid_points = 16;  // resolution of the inner sup in clause (iv)
};

// Numerically certify the density Lipschitz constants: clause (iii) evaluates
// (1/a) int |f(u) - f(u(1+a))| du per grid point, clause (iv) replaces the
// integrand by its sup over a log-spaced tau-subgrid of (0, a].
LipschitzReport innovation_tv_lipschitz(const InnovationModel& innovation,
                                        std::span<const double> a_grid);

std::vector<double> default_lipschitz_grid();  // log-spaced in (0, 4]

struct ScaleMixtureTv {
  double tv = 0.0;
  double bound = 0.0;
};

// tv = int |(1/(A+B)) f(y/(A+B)) - (1/A) f(y/A)| dy  against the two-term
// scale-mixture bound K_iii B/A + B/(A+B). The inequality is asserted.
ScaleMixtureTv scale_mixture_tv(const InnovationModel& innovation, double A, double B);

// Family form: int sup_j |(1/(A+B_j)) f(y/(A+B_j)) - (1/A) f(y/A)| dy
// against K_iv max_j B_j/A + max_j B_j/(A+B_j).
ScaleMixtureTv scale_mixture_sup_tv(const InnovationModel& innovation, double A,
                                    std::span<const double> Bs);

// f(y | P, Q) = (1/(P+Q)) f_Z(y/(P+Q)); integrates to one in y.
double conditional_density(const InnovationModel& innovation, double p_term, double q_term,
                           double y);

}  // namespace archmix
