#pragma once

// Ambient Riemannian curvature on one coordinate chart.
//
// Conventions: R_ijkl = g(R(d_k, d_l) d_j, d_i), so the unit sphere has
// R_ijkl = g_ik g_jl - g_il g_jk. Ricci R_ij = R^k_ikj. Schouten
// P = (Ric - R g / (2(n-1))) / (n-2). Cotton C_ijk = P_ij,k - P_ik,j.
// Bach B_ij = C_ijk,^k - P^kl W_kijl.

#include <optional>
#include <span>
#include <vector>

#include "egjms/expr.hpp"
#include "egjms/tensor.hpp"

namespace egjms {

struct MetricChart {
  int n = 0;
  /// Row-major n x n, symmetric.
  std::vector<Expr> components;
  /// When set, u_j in the components reads coordinate z_{u_offset + j}.
  std::optional<int> u_offset;

  const Expr& operator()(int i, int j) const { return components[static_cast<std::size_t>(i * n + j)]; }

  /// Builds a chart and checks the matrix is n x n and symmetric by structure.
  static MetricChart from_rows(const std::vector<std::vector<Expr>>& rows);
  static MetricChart conformally_flat(int n, const Expr& factor);
};

/// g_ij at the given coordinate jets (which may depend on other variables).
JetTensor evaluate_metric(const MetricChart& chart, std::span<const Jet> z);
/// g_ij as jets in z about a point.
JetTensor evaluate_metric(const MetricChart& chart, std::span<const double> point, int order);

/// e^{2 omega} g with the factor shared between components.
MetricChart conformal_metric(const MetricChart& chart, const Expr& omega);

/// Throws NumericError if the value layer is not positive definite.
void check_positive_definite(const JetTensor& g);

/// Jet-valued Gauss elimination with partial pivoting on the value layer.
JetTensor inverse_metric(const JetTensor& g);

/// Gamma(k, i, j) = Gamma^k_ij.
JetTensor christoffel(const JetTensor& g, const JetTensor& ginv);

struct CurvaturePack {
  int n = 0;
  JetTensor metric;
  JetTensor inverse;
  JetTensor christoffel;   // (k, i, j)
  JetTensor riemann;       // (i, j, k, l), all lower
  JetTensor ricci;
  Jet scalar;
  Jet J;                   // trace of Schouten; R / 2 when n = 2
  JetTensor schouten;      // empty when n = 2
  JetTensor weyl;
  JetTensor schouten_gradient;  // (i, j, k) = nabla_k P_ij
  JetTensor cotton;             // (i, j, k)
  JetTensor bach;               // empty when the metric carries fewer than 4 derivatives
};

/// Everything the jet order of g permits.
CurvaturePack curvature_pack(const JetTensor& g);
/// Expands the metric to residual_order + 4 so that B carries residual_order.
CurvaturePack curvature_pack(const MetricChart& chart, std::span<const double> point, int residual_order);

/// Largest |entry value| of a tensor.
double max_abs(const JetTensor& t);

}  // namespace egjms
