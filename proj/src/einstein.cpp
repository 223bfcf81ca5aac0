#include "egjms/einstein.hpp"

#include <boost/rational.hpp>
#include <cmath>

#include "egjms/error.hpp"
#include "egjms/operators.hpp"

namespace egjms {

namespace {

void check_dims(int k, int level) {
  if (k < 1) throw SpecError("submanifold dimension must be positive");
  if (level < 1) throw SpecError("level must be positive");
}

}  // namespace

std::vector<Rational> c_coefficients_exact(int k, int level) {
  check_dims(k, level);
  std::vector<Rational> c;
  const Rational half_k(k, 2);
  for (int j = 1; j <= level; ++j) c.push_back((half_k + j - 1) * (half_k - j));
  return c;
}

std::vector<double> c_coefficients(int k, int level) {
  std::vector<double> out;
  for (const Rational& r : c_coefficients_exact(k, level)) out.push_back(boost::rational_cast<double>(r));
  return out;
}

Rational q_constant_exact(int k, int level) {
  check_dims(k, level);
  Rational p(1);
  const Rational base = Rational(k, 2) - level;
  for (int j = 1; j <= 2 * level - 1; ++j) p *= base + j;
  return p;
}

double q_closed_form(int k, int level, double lambda) {
  return std::pow(lambda, level) * boost::rational_cast<double>(q_constant_exact(k, level));
}

Rational sphere_eigenvalue_exact(int k, int m, int level) {
  if (m < 0) throw SpecError("harmonic degree must be non-negative");
  Rational p(1);
  const Rational mu(static_cast<long long>(m) * (m + k - 1));
  for (const Rational& c : c_coefficients_exact(k, level)) p *= mu + c;
  return p;
}

double sphere_eigenvalue(int k, int m, int level, double lambda) {
  return std::pow(lambda, level) * boost::rational_cast<double>(sphere_eigenvalue_exact(k, m, level));
}

Jet factorized_apply(const SigmaMetric& sigma, double lambda, int level, const Jet& f) {
  const auto c = c_coefficients(sigma.k, level);
  if (f.order() < 2 * level) throw OrderError("factorized operator needs a jet of order at least 2l");
  if (sigma.christoffel.order() < 2 * level - 1) throw OrderError("metric jet too short for the factorized operator");
  Jet g = f;
  for (double cj : c) g = -laplacian(sigma, g) + g.truncated(g.order() - 2) * (lambda * cj);
  return g;
}

double factorized_apply(const MetricChart& h, double lambda, int level, const Expr& f, std::span<const double> x,
                        int order) {
  if (static_cast<int>(x.size()) != h.n) throw SpecError("point dimension does not match the metric");
  const SigmaMetric sigma = sigma_metric(evaluate_metric(h, x, order));
  return factorized_apply(sigma, lambda, level, sigma_function(f, x, order)).value();
}

CanonicalFamily canonical_family_coefficients(double lambda) { return {-lambda / 2.0, lambda * lambda / 16.0}; }

std::pair<JetTensor, JetTensor> canonical_family_tensors(const SigmaMetric& sigma, double lambda) {
  const CanonicalFamily cf = canonical_family_coefficients(lambda);
  JetTensor h2 = sigma.h, h4 = sigma.h;
  for (std::size_t i = 0; i < sigma.h.size(); ++i) {
    h2.at(i) = sigma.h.at(i) * cf.h2;
    h4.at(i) = sigma.h.at(i) * cf.h4;
  }
  return {h2, h4};
}

double constant_rescaling_residual(const SigmaMetric& sigma, double lambda, int level, double omega, const Jet& f) {
  JetTensor hhat = sigma.h;
  const double s = std::exp(2.0 * omega);
  for (std::size_t i = 0; i < hhat.size(); ++i) hhat.at(i) = sigma.h.at(i) * s;
  const SigmaMetric rescaled = sigma_metric(hhat);
  const double lhs = factorized_apply(rescaled, lambda / s, level, f).value();
  const double rhs = std::exp(-2.0 * level * omega) * factorized_apply(sigma, lambda, level, f).value();
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

}  // namespace egjms
