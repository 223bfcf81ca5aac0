#include "egjms/normalform.hpp"

#include <cmath>

#include "egjms/error.hpp"

namespace egjms {

namespace {

Jet sum(const Jet& acc, const Jet& term) { return acc.empty() ? term : acc + term; }

double relative(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a)); }

}  // namespace

BoundaryCoefficients minimal_boundary_coefficients(const PointGeometry& pg, std::span<const Jet> u4,
                                                   const OperatorOptions& opt) {
  const int k = pg.k, n = pg.n, nn = n - k;
  if (static_cast<int>(u4.size()) != nn) throw SpecError("U4 needs one component per normal direction");
  if (n == 4 && !opt.conformally_flat_ambient) throw AdmissibilityError("boundary coefficients need n != 4");
  if (opt.conformally_flat_ambient) check_conformally_flat(pg, opt);
  const auto& ep = pg.ext;
  const auto& s = ep.sigma;
  const JetTensor& hinv = s.inverse;
  const JetTensor& P = pg.frame.schouten;
  const JetTensor& dP = pg.frame.schouten_gradient;
  const JetTensor& R = pg.frame.riemann;
  const JetTensor& Gi = pg.frame.inverse;
  const auto& H = ep.H;
  const JetTensor dH = mean_curvature_gradient(ep);

  BoundaryCoefficients bc;
  bc.D = JetTensor(2, k, Jet());
  bc.K = JetTensor(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Jet hl;
      for (int m = 0; m < nn; ++m) hl = sum(hl, H[m] * ep.L(m, a, b));
      bc.D(a, b) = -hl - P(a, b);
    }

  // Each non-symmetric term is assembled as X_ab and symmetrized below.
  JetTensor raw(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Jet t;
      for (int m = 0; m < nn; ++m) {
        t = sum(t, ep.L(m, a, b) * u4[m] * -2.0);
        t = sum(t, dP(a, b, k + m) * H[m] * -0.5);
        t = sum(t, P(k + m, a) * dH(b, m) * -1.0);
        t = sum(t, dH(a, m) * dH(b, m) * 0.25);
        for (int p = 0; p < nn; ++p) {
          t = sum(t, R(k + m, a, b, k + p) * H[m] * H[p] * 0.25);
          for (int c = 0; c < k; ++c)
            for (int d = 0; d < k; ++d)
              t = sum(t, ep.L(m, a, c) * hinv(c, d) * ep.L(p, b, d) * H[m] * H[p] * 0.25);
        }
        for (int c = 0; c < k; ++c)
          for (int d = 0; d < k; ++d) t = sum(t, ep.L(m, c, a) * hinv(c, d) * P(b, d) * H[m]);
      }
      for (int A = 0; A < n; ++A)
        for (int B = 0; B < n; ++B) t = sum(t, P(a, A) * Gi(A, B) * P(B, b) * 0.25);
      if (!opt.conformally_flat_ambient) t = sum(t, pg.frame.bach(a, b) / (4.0 * (4.0 - n)));
      raw(a, b) = t;
    }
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) bc.K(a, b) = (raw(a, b) + raw(b, a)) * 0.5;

  bc.A = JetTensor(std::vector<int>{k}, Jet());
  for (int a = 0; a < k; ++a) {
    Jet t;
    for (int m = 0; m < nn; ++m) t = sum(t, -P(a, k + m) * H[m] + H[m] * dH(a, m) * 0.5);
    bc.A(a) = t;
  }
  bc.E = mean_curvature_squared(ep);
  Jet f;
  for (int m = 0; m < nn; ++m) {
    f = sum(f, H[m] * u4[m] * 8.0);
    for (int p = 0; p < nn; ++p) f = sum(f, -P(k + m, k + p) * H[m] * H[p]);
  }
  bc.F = f;
  return bc;
}

NormalFormCoefficients to_normal_form(const BoundaryCoefficients& bc, const SigmaMetric& s) {
  const int k = s.k;
  NormalFormCoefficients nf;
  nf.h2 = JetTensor(2, k, Jet());
  nf.h4 = JetTensor(2, k, Jet());
  std::vector<Jet> dE(k);
  for (int c = 0; c < k; ++c) dE[c] = bc.E.derivative(c);
  const Jet scalar = bc.F * 0.25 - bc.E * bc.E * (3.0 / 16.0);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      nf.h2(a, b) = bc.D(a, b) + bc.E * s.h(a, b) * 0.5;
      Jet dA = (bc.A(b).derivative(a) + bc.A(a).derivative(b)) * 0.5;
      Jet hessE = dE[a].derivative(b);
      for (int c = 0; c < k; ++c) {
        dA -= s.christoffel(c, a, b) * bc.A(c);
        hessE -= s.christoffel(c, a, b) * dE[c];
      }
      nf.h4(a, b) = bc.K(a, b) - dA * 0.5 + hessE * 0.125 + scalar * s.h(a, b);
    }
  nf.tr_h2 = trace(nf.h2, s);
  nf.tr_h4 = trace(nf.h4, s);
  return nf;
}

OperatorCoefficients general_operator_coefficients(const SigmaMetric& s, const JetTensor& h2, const JetTensor& h4,
                                                   int n) {
  const int k = s.k;
  OperatorCoefficients c;
  c.k = k;
  c.n = n;
  c.flavor = Flavor::Generic;
  c.sigma = s;
  const Jet tr2 = trace(h2, s);
  const Jet tr4 = trace(h4, s);
  c.q2 = -tr2;
  JetTensor T(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) T(a, b) = h2(a, b) * -4.0 + tr2 * s.h(a, b) * (k - 2.0);
  c.T = T;
  c.q4 = tr4 * 8.0 + laplacian(s, tr2) - norm_squared(h2, {Slot::Tangent, Slot::Tangent}, s) * 4.0 +
         tr2 * tr2 * (k / 2.0);
  return c;
}

std::vector<Jet> zero_u4(const PointGeometry& pg) {
  const Jet& proto = pg.ext.H[0];
  return std::vector<Jet>(static_cast<std::size_t>(pg.n - pg.k), Jet::constant(0.0, proto.dim(), proto.order()));
}

PipelineResult run_pipeline(const PointGeometry& pg, std::span<const Jet> u4, const OperatorOptions& opt) {
  require_admissible(pg.k, pg.n, 2, opt);
  PipelineResult r;
  r.boundary = minimal_boundary_coefficients(pg, u4, opt);
  r.normal_form = to_normal_form(r.boundary, pg.ext.sigma);
  r.coefficients = general_operator_coefficients(pg.ext.sigma, r.normal_form.h2, r.normal_form.h4, pg.n);
  return r;
}

double pipeline_apply_p4(const PointGeometry& pg, std::span<const Jet> u4, const Jet& f, const OperatorOptions& opt) {
  const PipelineResult r = run_pipeline(pg, u4, opt);
  return apply_p4(r.coefficients, f).value();
}

U4Report u4_perturbation(const PointGeometry& pg, std::span<const Jet> u4a, std::span<const Jet> u4b, const Jet& f,
                         const OperatorOptions& opt) {
  const int k = pg.k, nn = pg.n - pg.k;
  const PipelineResult a = run_pipeline(pg, u4a, opt);
  const PipelineResult b = run_pipeline(pg, u4b, opt);
  U4Report rep;
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) {
      Jet d = a.normal_form.h4(p, q) - b.normal_form.h4(p, q);
      for (int m = 0; m < nn; ++m) d += pg.ext.L_trace_free(m, p, q) * (u4a[m] - u4b[m]) * 2.0;
      rep.h4_difference = std::max(rep.h4_difference, std::abs(d.value()));
    }
  rep.tr_h4_difference = relative(a.normal_form.tr_h4.value(), b.normal_form.tr_h4.value());
  rep.q4_difference = relative(a.coefficients.q4->value(), b.coefficients.q4->value());
  rep.p4_difference = relative(apply_p4(a.coefficients, f).value(), apply_p4(b.coefficients, f).value());
  return rep;
}

double trace_identity_residual(const PointGeometry& pg, const OperatorOptions& opt) {
  const int k = pg.k, nn = pg.n - pg.k;
  const auto u4 = zero_u4(pg);
  const PipelineResult r = run_pipeline(pg, u4, opt);
  const auto& s = pg.ext.sigma;
  const JetTensor dH = mean_curvature_gradient(pg.ext);
  JetTensor Y(std::vector<int>{k, nn}, Jet());
  for (int a = 0; a < k; ++a)
    for (int m = 0; m < nn; ++m) Y(a, m) = pg.frame.schouten(a, k + m) - dH(a, m);
  const Jet rhs = norm_squared(Y, {Slot::Tangent, Slot::Normal}, s) * 2.0 +
                  norm_squared(r.normal_form.h2, {Slot::Tangent, Slot::Tangent}, s) * 2.0 -
                  weyl_mean_curvature_term(pg) * 2.0 - cotton_mean_curvature_term(pg) * 4.0 + bach_term(pg, opt);
  const double lhs = 8.0 * r.normal_form.tr_h4.value();
  return std::abs(lhs - rhs.value()) / (1.0 + std::abs(lhs));
}

double normalization_inverse(int level) {
  if (level < 1) throw SpecError("level must be positive");
  double f = 1.0;
  for (int i = 2; i < level; ++i) f *= i;
  return ((level % 2 == 0) ? 1.0 : -1.0) * std::pow(4.0, level - 1) * f * f;
}

TraceConsistency q_trace_consistency(const SigmaMetric& s, const JetTensor& h2, const JetTensor& h4) {
  const int k = s.k;
  const double eps = 0.5;
  TraceConsistency tc;
  tc.a1_inverse = normalization_inverse(1);
  tc.a2_inverse = normalization_inverse(2);
  const auto base = general_operator_coefficients(s, h2, h4);
  JetTensor h2p = h2, h4p = h4;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      h2p(a, b) = h2(a, b) + s.h(a, b) * eps;
      h4p(a, b) = h4(a, b) + s.h(a, b) * eps;
    }
  const auto p2 = general_operator_coefficients(s, h2p, h4);
  const auto p4 = general_operator_coefficients(s, h2, h4p);
  tc.q2_tr_h2_coefficient = (p2.q2.value() - base.q2.value()) / (eps * k);
  tc.q4_tr_h4_coefficient = (p4.q4->value() - base.q4->value()) / (eps * k);
  return tc;
}

}  // namespace egjms
