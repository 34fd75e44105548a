#pragma once

namespace alee {

double normal_cdf(double x);

// Inverse standard normal CDF, Wichura's AS 241 (PPND16), relative accuracy ~1e-16.
// Throws InvalidInput unless 0 < p < 1.
double normal_quantile(double p);

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

double chi2_cdf(double x, int dof);

// Chi-square quantile; Wilson-Hilferty start refined by safeguarded Newton on chi2_cdf.
// Throws InvalidInput unless 0 < p < 1 and dof >= 1.
double chi2_quantile(double p, int dof);

}  // namespace alee
