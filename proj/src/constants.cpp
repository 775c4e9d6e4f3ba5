#include "ssum/constants.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "ssum/core.hpp"

namespace ssum {

real entropy(real y) {
  if (!(y >= 0 && y <= 1)) throw Error("entropy argument outside [0, 1]");
  if (y == 0 || y == 1) return 0;
  return -y * std::log2(y) - (1 - y) * std::log2(1 - y);
}

namespace {

constexpr real kSlack = 1 - 1e-5L;

// Root of a monotone f on [lo, hi] with f(lo) and f(hi) of opposite sign.
real bisect(const std::function<real(real)>& f, real lo, real hi) {
  real flo = f(lo);
  if ((flo > 0) == (f(hi) > 0)) throw Error("bisection bracket has no sign change");
  for (int it = 0; it < 200 && hi - lo > 1e-18L; ++it) {
    const real mid = (lo + hi) / 2;
    const real fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

// 1 + e1 - 3H((1-e1)/2) + 2H((1+e2)/4); increasing in e1.
real balance_eq(real e1, real e2) {
  return 1 + e1 - 3 * entropy((1 - e1) / 2) + 2 * entropy((1 + e2) / 4);
}

// (1 - H((1-e1)/2)) / ((1-e1)/2) - (1 - H((1-e2)/2)).
real ratio_eq(real e1, real e2) {
  return (1 - entropy((1 - e1) / 2)) / ((1 - e1) / 2) -
         (1 - entropy((1 - e2) / 2));
}

real e1_given_e2(real e2) {
  return bisect([e2](real e1) { return balance_eq(e1, e2); }, 0, 1 - 1e-12L);
}

const ConstantSet& base() {
  static const ConstantSet c = solve_base_constants();
  return c;
}

}  // namespace

real unbalanced_delta(real eps, real beta) {
  return (1 - entropy((1 - eps) / 2)) * beta;
}

ConstantSet solve_base_constants() {
  ConstantSet c;
  c.eps2 = bisect([](real e2) { return ratio_eq(e1_given_e2(e2), e2); },
                  1e-6L, 0.9L);
  c.eps1 = e1_given_e2(c.eps2);
  c.residuals = {ratio_eq(c.eps1, c.eps2), balance_eq(c.eps1, c.eps2)};
  for (real r : c.residuals) {
    if (!(std::fabs(r) <= 1e-9L)) {
      throw Error("base constants did not converge (residual " +
                  std::to_string(static_cast<double>(r)) + ")");
    }
  }
  c.beta = 1 / entropy((1 + c.eps2) / 4);
  c.lambda = kSlack * ((1 - c.eps1) / 2) * c.beta *
             (1 - entropy((1 - c.eps2) / 2));
  c.gamma_terms = {c.lambda / 2,
                   (1 - entropy((1 - c.eps1) / 2)) * c.beta / 2,
                   (1 - c.eps1 / 2) * c.beta - (1 + c.lambda)};
  c.gamma_binding = 0;
  for (unsigned i = 1; i < 3; ++i) {
    if (c.gamma_terms[i] < c.gamma_terms[c.gamma_binding]) c.gamma_binding = i;
  }
  c.gamma_star = c.gamma_terms[c.gamma_binding];
  c.delta = unbalanced_delta(c.eps1, c.beta);
  return c;
}

real lambda_ratio() {
  const ConstantSet& c = base();
  return kSlack * ((1 - c.eps1) / 2) * (1 - entropy((1 - c.eps2) / 2));
}

real density_boundary() { return 1 / (2 - entropy(0.25L)); }

real max_exponent() { return (2 - entropy(0.25L)) / 2; }

CaseConstants solve_case_constants(real rho) {
  if (!(rho > density_boundary() && rho <= 1.01L)) {
    std::ostringstream os;
    os << "rho=" << static_cast<double>(rho) << " outside ("
       << static_cast<double>(density_boundary())
       << ", 1.01]; below the boundary the packed algorithm reduces to "
          "plain bit packing";
    throw Error(os.str());
  }
  const ConstantSet& b = base();
  const real kappa = lambda_ratio() / 2;  // gamma* = kappa * beta(rho)
  const real A = 4 - 2 * entropy(0.25L);
  // Second equality solved for beta.
  auto beta_of = [&](real e) { return ((A - e) * rho / 4 - 0.5L) / (kappa + 0.25L); };
  auto first_term = [&](real e) { return (1 - entropy((1 - e) / 2)) / 4 * rho; };
  const real e_max = std::min<real>(A - 2 / rho, 1);
  const real e = bisect([&](real x) { return kappa * beta_of(x) - first_term(x); },
                        0, e_max);

  CaseConstants c;
  c.rho = rho;
  c.eps1_prime = e;
  c.beta = beta_of(e);
  c.gamma_star = kappa * c.beta;
  c.lambda = lambda_ratio() * c.beta;
  c.alpha_star = (1 + 2 * c.gamma_star) / (2 * rho);
  c.case1_terms = {first_term(e), (A - e) / 4 * rho - 0.5L - c.beta / 4};
  c.case2_terms = {c.lambda / 2,
                   (1 - entropy((1 - b.eps1) / 2)) / 2 * c.beta,
                   (1 - entropy((1 + b.eps2) / 4) - b.eps1 / 2) * c.beta - c.lambda};
  c.case2_binding = 0;
  for (unsigned i = 1; i < 3; ++i) {
    if (c.case2_terms[i] < c.case2_terms[c.case2_binding]) c.case2_binding = i;
  }
  c.residual = std::max(std::fabs(c.gamma_star - c.case1_terms[0]),
                        std::fabs(c.gamma_star - c.case1_terms[1]));
  if (!(c.residual <= 1e-9L)) throw Error("case constants did not converge");
  return c;
}

std::vector<CurveRow> emit_curves(const std::vector<real>& rho_grid) {
  std::vector<CurveRow> rows;
  for (real rho : rho_grid) {
    const CaseConstants c = solve_case_constants(rho);
    rows.push_back({rho, c.alpha_star, c.gamma_star, c.beta, c.eps1_prime,
                    c.residual});
  }
  return rows;
}

void write_curves_csv(const std::vector<CurveRow>& rows, std::ostream& out) {
  out << "rho,alpha_star,gamma_star,beta,eps1_prime\n";
  char buf[256];
  for (const CurveRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9Lg,%.9Lg,%.9Lg,%.9Lg,%.9Lg\n", r.rho,
                  r.alpha_star, r.gamma_star, r.beta, r.eps1_prime);
    out << buf;
  }
}

std::vector<real> parse_rho_grid(const std::string& spec) {
  // a..b:step, or a single value.
  const auto dots = spec.find("..");
  if (dots == std::string::npos) return {std::stold(spec)};
  const auto colon = spec.find(':', dots);
  const real a = std::stold(spec.substr(0, dots));
  const real b = std::stold(spec.substr(dots + 2, colon - dots - 2));
  const real step = colon == std::string::npos ? 0.01L : std::stold(spec.substr(colon + 1));
  if (!(step > 0) || b < a) throw Error("bad rho grid '" + spec + "'");
  std::vector<real> grid;
  const long count = std::lround(std::floor((b - a) / step + 1e-9L));
  for (long i = 0; i <= count; ++i) grid.push_back(a + step * i);
  return grid;
}

real binomial_prefix_log2(unsigned n, unsigned j) {
  long double sum = 0, term = 1;  // C(n, 0)
  for (unsigned i = 0; i <= j && i <= n; ++i) {
    sum += term;
    term = term * (n - i) / (i + 1);
  }
  return std::log2(sum);
}

}  // namespace ssum
