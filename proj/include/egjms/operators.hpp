#pragma once

// The extrinsic operators P2 = -Lap + (k-2)/2 Q2 and
// P4 = Lap^2 + div(T grad) + (k-4)/2 Q4 on a submanifold, their intrinsic
// counterparts, and conformal covariance checks.

#include <optional>
#include <span>

#include "egjms/expr.hpp"
#include "egjms/geometry.hpp"
#include "egjms/submanifold.hpp"

namespace egjms {

enum class Flavor { Extrinsic, Intrinsic, Tilde, Generic };

const char* flavor_name(Flavor f);

struct OperatorCoefficients {
  int k = 0;
  int n = 0;
  Flavor flavor = Flavor::Extrinsic;
  SigmaMetric sigma;
  Jet q2;
  std::optional<JetTensor> T;  // present for level 2
  std::optional<Jet> q4;
};

/// Whether the level-l operator exists for Sigma^k in M^n.
bool admissible(int k, int n, int level);

struct OperatorOptions {
  /// The ambient metric is locally conformally flat: the Bach term is
  /// dropped, which also permits n = 4. W and C are checked against
  /// flatness_tol relative to the Schouten tensor.
  bool conformally_flat_ambient = false;
  double flatness_tol = 1e-8;
};

/// Throws AdmissibilityError unless admissible(k, n, level), or the ambient
/// is declared conformally flat and the level-2 obstruction is absent.
void require_admissible(int k, int n, int level, const OperatorOptions& opt);

/// Throws NumericError when W or C is not negligible.
void check_conformally_flat(const PointGeometry& pg, const OperatorOptions& opt);

/// W^a_{a' a b'} H^a' H^b'.
Jet weyl_mean_curvature_term(const PointGeometry& pg);
/// C^a_{a a'} H^a'.
Jet cotton_mean_curvature_term(const PointGeometry& pg);
/// -2/(n-4) B^a_a; zero for a conformally flat ambient.
Jet bach_term(const PointGeometry& pg, const OperatorOptions& opt);

/// Closed-form extrinsic coefficients; level 1 fills Q2 only.
OperatorCoefficients extrinsic_coefficients(const PointGeometry& pg, int level, const OperatorOptions& opt = {});

/// Yamabe and Paneitz coefficients of the induced metric.
OperatorCoefficients intrinsic_coefficients(const SigmaMetric& sigma, int level, int n = 0);

/// The extrinsic remainder P - Pbar in the same format (flavor Tilde).
OperatorCoefficients tilde_coefficients(const PointGeometry& pg, const FialkowPack& fp,
                                        const IntrinsicCurvature& ic, const OperatorOptions& opt = {});

struct DecompositionResidual {
  double q2 = 0.0;
  double T = 0.0;
  double q4 = 0.0;
};

DecompositionResidual decomposition_residual(const OperatorCoefficients& ext, const OperatorCoefficients& intr,
                                             const OperatorCoefficients& tilde);

/// Induced Laplace-Beltrami operator; loses two orders.
Jet laplacian(const SigmaMetric& sigma, const Jet& f);
/// nabla^a (T_ab nabla^b f); loses two orders.
Jet divergence_form(const SigmaMetric& sigma, const JetTensor& T, const Jet& f);

Jet apply_p2(const OperatorCoefficients& c, const Jet& f);
Jet apply_p4(const OperatorCoefficients& c, const Jet& f);
Jet apply_operator(const OperatorCoefficients& c, int level, const Jet& f);

/// f (an expression in x1..xk) as a jet at the submanifold point of c.
Jet sigma_function(const Expr& f, std::span<const double> x, int order);

/// Restriction of an ambient expression to the embedding, as a jet in x.
Jet restrict_to_sigma(const Expr& omega, const ExtrinsicPack& ep, const MetricChart& chart);

struct CovarianceInput {
  const MetricChart* chart = nullptr;
  const Embedding* embedding = nullptr;
  Expr omega;
  int order = 6;
  OperatorOptions options;
};

/// |P_hat f - e^{(-k/2-l) w} P (e^{(k/2-l) w} f)| / (1 + |P_hat f|) at x.
double covariance_residual(const CovarianceInput& in, int level, const Expr& f, std::span<const double> x);

/// Critical (k = 2l): e^{k w} Q_hat - Q - P w. Noncritical:
/// e^{2l w} Q_hat - Q - (k/2-l)^{-1} e^{(l-k/2) w} P0(e^{(k/2-l) w}) with
/// P0 = P - (k/2-l) Q. Relative to 1 + |Q|.
double q_covariance_residual(const CovarianceInput& in, int level, std::span<const double> x);

}  // namespace egjms
