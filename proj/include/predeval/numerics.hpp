#pragma once

// Small special-function toolbox: just enough for normal-approximation
// p-values and Student-t tail probabilities (stepwise regression entry
// tests).

namespace predeval::numerics {

// Standard normal CDF.
double normal_cdf(double z) noexcept;

// Regularized incomplete beta I_x(a, b), via the textbook continued
// fraction with modified Lentz evaluation.
double incomplete_beta_reg(double a, double b, double x);

// Two-sided p-value for a t statistic with dof degrees of freedom.
double student_t_two_sided_p(double t, double dof);

}  // namespace predeval::numerics
