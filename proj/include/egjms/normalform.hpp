#pragma once

// The fourth-order normal-form route to P2 and P4: boundary coefficients of
// the metric induced on the minimal extension, their normal form, and the
// generic operator formulas for an even asymptotically hyperbolic metric.

#include <span>
#include <vector>

#include "egjms/operators.hpp"

namespace egjms {

/// hbar_ab = h + D r^2 + K r^4, hbar_a0 = A r^3, hbar_00 = 1 + E r^2 + F r^4.
struct BoundaryCoefficients {
  JetTensor D;  // (alpha, beta)
  JetTensor K;
  JetTensor A;  // (alpha)
  Jet E;
  Jet F;
};

struct NormalFormCoefficients {
  JetTensor h2;
  JetTensor h4;
  Jet tr_h2;
  Jet tr_h4;
};

/// U4 is the free r^4 coefficient of the normal graph, given by its
/// components in the normal frame of pg (length n - k).
BoundaryCoefficients minimal_boundary_coefficients(const PointGeometry& pg, std::span<const Jet> u4,
                                                   const OperatorOptions& opt = {});

NormalFormCoefficients to_normal_form(const BoundaryCoefficients& bc, const SigmaMetric& sigma);

/// Q2 = -tr h2, T = -4 h2 + (k-2)(tr h2) h, Q4 = 8 tr h4 + Lap tr h2 - 4|h2|^2 + k/2 (tr h2)^2.
OperatorCoefficients general_operator_coefficients(const SigmaMetric& sigma, const JetTensor& h2,
                                                   const JetTensor& h4, int n = 0);

/// U4 = 0 in the normal frame.
std::vector<Jet> zero_u4(const PointGeometry& pg);

struct PipelineResult {
  BoundaryCoefficients boundary;
  NormalFormCoefficients normal_form;
  OperatorCoefficients coefficients;
};

PipelineResult run_pipeline(const PointGeometry& pg, std::span<const Jet> u4, const OperatorOptions& opt = {});

/// P4 f at the point of pg without the closed-form operator formulas.
double pipeline_apply_p4(const PointGeometry& pg, std::span<const Jet> u4, const Jet& f,
                         const OperatorOptions& opt = {});

struct U4Report {
  double h4_difference = 0.0;   // max |h4(a) - h4(b) + 2 Lo.(ua - ub)| over components
  double tr_h4_difference = 0.0;  // relative
  double q4_difference = 0.0;     // relative
  double p4_difference = 0.0;     // relative
};

U4Report u4_perturbation(const PointGeometry& pg, std::span<const Jet> u4a, std::span<const Jet> u4b, const Jet& f,
                         const OperatorOptions& opt = {});

/// 8 tr h4 minus its expression through |P_aa' - nabla H|^2, |h2|^2, W, C and B.
double trace_identity_residual(const PointGeometry& pg, const OperatorOptions& opt = {});

struct TraceConsistency {
  double a1_inverse = 0.0;           // normalization formula
  double a2_inverse = 0.0;
  double q2_tr_h2_coefficient = 0.0;  // measured from a perturbation h2 -> h2 + eps h
  double q4_tr_h4_coefficient = 0.0;  // measured from h4 -> h4 + eps h
};

/// (-1)^l 2^{2(l-1)} ((l-1)!)^2.
double normalization_inverse(int level);

/// Measures the coefficients of tr h2 in Q2 and of tr h4 in Q4 by linear
/// perturbation of (h2, h4) on the given metric.
TraceConsistency q_trace_consistency(const SigmaMetric& sigma, const JetTensor& h2, const JetTensor& h4);

}  // namespace egjms
