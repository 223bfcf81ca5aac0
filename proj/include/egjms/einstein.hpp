#pragma once

// Factorized GJMS operators for minimal submanifolds of Einstein manifolds
// (Ric = lambda (n-1) g) and the spectra they predict on round spheres.

#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "egjms/expr.hpp"
#include "egjms/geometry.hpp"
#include "egjms/submanifold.hpp"

namespace egjms {

using Rational = boost::rational<long long>;

/// c_j = (k/2 + j - 1)(k/2 - j), j = 1..l.
std::vector<Rational> c_coefficients_exact(int k, int level);
std::vector<double> c_coefficients(int k, int level);

/// prod_{j=1}^{2l-1} (k/2 - l + j); Q_2l is lambda^l times this.
Rational q_constant_exact(int k, int level);
/// lambda^l prod_{j=1}^{2l-1} (k/2 - l + j); lambda^{k/2} (k-1)! when k = 2l.
double q_closed_form(int k, int level, double lambda);

/// prod_j (m(m+k-1) + c_j): the eigenvalue on degree-m harmonics of the unit sphere.
Rational sphere_eigenvalue_exact(int k, int m, int level);
/// lambda^l times the unit-sphere value.
double sphere_eigenvalue(int k, int m, int level, double lambda = 1.0);

/// prod_j (-Lap_h + lambda c_j) f; the result has 2l orders fewer than f.
Jet factorized_apply(const SigmaMetric& sigma, double lambda, int level, const Jet& f);
/// Same with h given as a chart on the k-dimensional submanifold, evaluated at x.
double factorized_apply(const MetricChart& h, double lambda, int level, const Expr& f, std::span<const double> x,
                        int order);

struct CanonicalFamily {
  double h2 = 0.0;  // multiples of h
  double h4 = 0.0;
};

/// Coefficients of r^2 and r^4 in (1 - lambda r^2 / 4)^2 h.
CanonicalFamily canonical_family_coefficients(double lambda);
/// The canonical family as tensors over sigma.
std::pair<JetTensor, JetTensor> canonical_family_tensors(const SigmaMetric& sigma, double lambda);

/// |Phat f - e^{-2 l w} P f| / (1 + |Phat f|) for hhat = e^{2w} h and lambdahat = e^{-2w} lambda, w constant.
double constant_rescaling_residual(const SigmaMetric& sigma, double lambda, int level, double omega, const Jet& f);

}  // namespace egjms
