#pragma once

// Extrinsic geometry of an embedded submanifold at a point of its chart.
//
// Every field is a jet in the submanifold coordinates x. Normal indices a'
// are zero-based among the normals and refer to an orthonormal normal
// frame, so they are raised and lowered freely. Full-frame indices A run
// over the tangent vectors T_alpha = d_alpha iota (A < k) followed by the
// normals (A = k + a').

#include <span>
#include <vector>

#include "egjms/expr.hpp"
#include "egjms/geometry.hpp"
#include "egjms/tensor.hpp"

namespace egjms {

struct Embedding {
  int k = 0;
  int n = 0;
  /// iota^i(x1..xk), one per ambient coordinate.
  std::vector<Expr> components;

  /// (x, u(x)) for graph functions u of length n - k.
  static Embedding graph(int k, const std::vector<Expr>& u);
  void validate() const;
};

struct SigmaMetric {
  int k = 0;
  JetTensor h;
  JetTensor inverse;
  JetTensor christoffel;  // (gamma, alpha, beta)
};

SigmaMetric sigma_metric(const JetTensor& h);

struct ExtrinsicPack {
  int k = 0;
  int n = 0;
  std::vector<Jet> iota;
  JetTensor ambient_metric;  // g_ij(iota(x))
  JetTensor frame;           // (A, i)
  SigmaMetric sigma;
  JetTensor L;               // (a', alpha, beta)
  std::vector<Jet> H;        // (a')
  JetTensor L_trace_free;    // (a', alpha, beta)
  JetTensor normal_connection;  // (gamma, a', b') = g(nabla_gamma e_a', e_b')
};

/// Ambient curvature in the adapted frame, composed along the embedding.
struct FrameCurvature {
  JetTensor metric;     // (A, B): h on the tangent block, identity on the normal block
  JetTensor inverse;
  JetTensor schouten;   // (A, B)
  JetTensor schouten_gradient;  // (A, B, C) = (nabla_C P)(E_A, E_B)
  JetTensor riemann;    // (A, B, C, D)
  JetTensor weyl;
  JetTensor cotton;     // (A, B, C)
  JetTensor bach;       // (A, B)
};

struct PointGeometry {
  int k = 0;
  int n = 0;
  int order = 0;
  std::vector<double> x;
  std::vector<double> z;
  CurvaturePack ambient;
  ExtrinsicPack ext;
  FrameCurvature frame;
};

/// Everything at iota(x) with the ambient metric expanded to the given
/// order (at least 4; Bach then carries order - 4 in x).
PointGeometry evaluate_geometry(const MetricChart& chart, const Embedding& emb,
                                std::span<const double> x, int order);

/// Extrinsic data alone; the metric jets are only expanded along iota.
ExtrinsicPack extrinsic_pack(const MetricChart& chart, const Embedding& emb,
                             std::span<const double> x, int order);

enum class Slot { Tangent, Normal };

/// Induced covariant derivative. The result gains a leading tangent slot.
JetTensor covariant_derivative(const JetTensor& t, const std::vector<Slot>& slots, const ExtrinsicPack& ep);

/// nabla_alpha H_a' as (alpha, a').
JetTensor mean_curvature_gradient(const ExtrinsicPack& ep);

/// Squared length of a tensor with the given slots, tangent slots contracted with h^-1.
Jet norm_squared(const JetTensor& t, const std::vector<Slot>& slots, const SigmaMetric& sigma);

/// Trace over the first two (tangent) slots.
Jet trace(const JetTensor& t, const SigmaMetric& sigma);

Jet mean_curvature_squared(const ExtrinsicPack& ep);

struct FialkowPack {
  int k = 0;
  JetTensor F;  // (alpha, beta); empty when k < 3
  Jet G;
  JetTensor D;  // (alpha, a')
};

FialkowPack fialkow_pack(const PointGeometry& pg);

/// Curvature of the induced metric; J is R / (2(k-1)) for every k >= 2.
struct IntrinsicCurvature {
  CurvaturePack pack;
  Jet J;
};

IntrinsicCurvature intrinsic_curvature(const SigmaMetric& sigma);

/// nabla_alpha P_{beta a'} computed with the induced connection minus the
/// conversion to ambient derivatives; (alpha, beta, a').
JetTensor conversion_rule_residual(const PointGeometry& pg);

struct GaussCodazziResiduals {
  double gc1 = 0.0;      // zero when k < 3
  double gc2 = 0.0;
  double gc_trace = 0.0;
};

GaussCodazziResiduals gauss_codazzi_residuals(const PointGeometry& pg, const FialkowPack& fp,
                                              const IntrinsicCurvature& ic);

}  // namespace egjms
