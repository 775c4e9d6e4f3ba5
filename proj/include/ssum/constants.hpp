#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

namespace ssum {

using real = long double;

/** Binary entropy in bits, H(0) = H(1) = 0. */
real entropy(real y);

/** Constants of the representation algorithm. */
struct ConstantSet {
  real eps1 = 0, eps2 = 0;
  real beta = 0;        // 1 / H((1 + eps2) / 4)
  real lambda = 0;      // couple-count exponent
  real gamma_star = 0;  // min of gamma_terms
  std::array<real, 3> gamma_terms{};
  unsigned gamma_binding = 0;  // index of the smallest term
  real delta = 0;       // unbalanced speedup exponent (1 - H((1-eps1)/2)) * beta
  std::array<real, 2> residuals{};
};

/** Parameters of the packed algorithm at density rho = log n / log ell. */
struct CaseConstants {
  real rho = 0;
  real beta = 0;        // beta(rho)
  real eps1_prime = 0;  // eps'_1(rho)
  real lambda = 0;      // lambda(rho)
  real gamma_star = 0;  // gamma*(rho)
  real alpha_star = 0;  // (1 + 2 gamma*) / (2 rho)
  // The two Case I terms and the three Case II terms of gamma*.
  std::array<real, 2> case1_terms{};
  std::array<real, 3> case2_terms{};
  unsigned case2_binding = 0;
  real residual = 0;
};

/** Unbalanced speedup exponent for a given eps and beta. */
real unbalanced_delta(real eps, real beta);

/** lambda(rho) / beta(rho); the coefficient of lambda's linear form. */
real lambda_ratio();

ConstantSet solve_base_constants();

/** Lower end of the density range, 1 / (2 - H(1/4)). */
real density_boundary();
/** Limit of alpha* at the lower end, (2 - H(1/4)) / 2. */
real max_exponent();

/** Valid for density_boundary() < rho <= 1.01; throws outside. */
CaseConstants solve_case_constants(real rho);

struct CurveRow {
  real rho, alpha_star, gamma_star, beta, eps1_prime, residual;
};

std::vector<CurveRow> emit_curves(const std::vector<real>& rho_grid);
void write_curves_csv(const std::vector<CurveRow>& rows, std::ostream& out);

/** Grid a, a+step, ..., up to b (inclusive within rounding). */
std::vector<real> parse_rho_grid(const std::string& spec);

/** log2 of sum_{i<=j} C(n, i). */
real binomial_prefix_log2(unsigned n, unsigned j);

}  // namespace ssum
