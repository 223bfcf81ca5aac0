#include "egjms/operators.hpp"

#include <cmath>
#include <string>

#include "egjms/error.hpp"

namespace egjms {

namespace {

Jet sum(const Jet& acc, const Jet& term) { return acc.empty() ? term : acc + term; }

JetTensor tangential_block(const JetTensor& t, int k) {
  JetTensor out(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) out(a, b) = t(a, b);
  return out;
}

Jet frobenius(const JetTensor& a, const JetTensor& b, const SigmaMetric& s) {
  const int k = s.k;
  Jet acc;
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) {
      Jet raised;
      for (int c = 0; c < k; ++c)
        for (int d = 0; d < k; ++d) raised = sum(raised, s.inverse(p, c) * s.inverse(q, d) * b(c, d));
      acc = sum(acc, a(p, q) * raised);
    }
  return acc;
}

double max_value(const JetTensor& t) {
  double m = 0.0;
  for (std::size_t p = 0; p < t.size(); ++p) m = std::max(m, std::abs(t.at(p).value()));
  return m;
}

}  // namespace

Jet weyl_mean_curvature_term(const PointGeometry& pg) {
  const int k = pg.k, nn = pg.n - pg.k;
  const auto& hinv = pg.ext.sigma.inverse;
  Jet acc;
  for (int m = 0; m < nn; ++m)
    for (int p = 0; p < nn; ++p)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          acc = sum(acc, pg.ext.H[m] * pg.ext.H[p] * hinv(a, b) * pg.frame.weyl(b, k + m, a, k + p));
  return acc;
}

Jet cotton_mean_curvature_term(const PointGeometry& pg) {
  const int k = pg.k, nn = pg.n - pg.k;
  const auto& hinv = pg.ext.sigma.inverse;
  Jet acc;
  for (int m = 0; m < nn; ++m)
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        acc = sum(acc, pg.ext.H[m] * hinv(a, b) * pg.frame.cotton(b, a, k + m));
  return acc;
}

Jet bach_term(const PointGeometry& pg, const OperatorOptions& opt) {
  const JetTensor B = tangential_block(pg.frame.bach, pg.k);
  const Jet tr = trace(B, pg.ext.sigma);
  if (opt.conformally_flat_ambient) return tr * 0.0;
  if (pg.n == 4) throw AdmissibilityError("the level-2 operator needs n != 4");
  return tr * (-2.0 / (pg.n - 4.0));
}

const char* flavor_name(Flavor f) {
  switch (f) {
    case Flavor::Extrinsic: return "extrinsic";
    case Flavor::Intrinsic: return "intrinsic";
    case Flavor::Tilde: return "tilde";
    case Flavor::Generic: return "generic";
  }
  return "?";
}

bool admissible(int k, int n, int level) {
  if (n < 3 || k < 1 || k > n - 1 || level < 1)
    throw SpecError("admissibility needs n >= 3, 1 <= k <= n-1, level >= 1");
  const bool k_odd = k % 2 == 1;
  const bool n_odd = n % 2 == 1;
  if (k_odd && n_odd) return true;
  if (k_odd) return 2 * level < n;
  if (2 * level > k + 2) return false;
  if (2 * level == k + 2 && !n_odd) return n > k + 2;
  return true;
}

void require_admissible(int k, int n, int level, const OperatorOptions& opt) {
  if (level < 1 || level > 2) throw AdmissibilityError("only levels 1 and 2 have closed forms");
  if (admissible(k, n, level)) return;
  if (opt.conformally_flat_ambient && (k % 2 == 1 || 2 * level <= k + 2)) return;
  throw AdmissibilityError("no level-" + std::to_string(level) + " operator for k=" + std::to_string(k) +
                           ", n=" + std::to_string(n));
}

void check_conformally_flat(const PointGeometry& pg, const OperatorOptions& opt) {
  const double scale = 1.0 + max_value(pg.frame.schouten);
  const double w = max_value(pg.frame.weyl);
  const double c = max_value(pg.frame.cotton);
  if (w > opt.flatness_tol * scale || c > opt.flatness_tol * scale)
    throw NumericError("ambient declared conformally flat but |W| = " + std::to_string(w) +
                       ", |C| = " + std::to_string(c));
}

OperatorCoefficients extrinsic_coefficients(const PointGeometry& pg, int level, const OperatorOptions& opt) {
  require_admissible(pg.k, pg.n, level, opt);
  if (opt.conformally_flat_ambient) check_conformally_flat(pg, opt);
  const int k = pg.k, nn = pg.n - pg.k;
  const auto& ep = pg.ext;
  const auto& s = ep.sigma;
  OperatorCoefficients c;
  c.k = k;
  c.n = pg.n;
  c.flavor = Flavor::Extrinsic;
  c.sigma = s;

  const JetTensor Ptt = tangential_block(pg.frame.schouten, k);
  const Jet trP = trace(Ptt, s);
  const Jet H2 = mean_curvature_squared(ep);
  c.q2 = trP + H2 * (k / 2.0);
  if (level == 1) return c;

  JetTensor HL(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Jet acc;
      for (int m = 0; m < nn; ++m) acc = sum(acc, ep.H[m] * ep.L(m, a, b));
      HL(a, b) = acc;
    }

  JetTensor T(2, k, Jet());
  const Jet bracket = trP * (k - 2.0) + H2 * (0.5 * (k * k - 2.0 * k + 4.0));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) T(a, b) = Ptt(a, b) * 4.0 + HL(a, b) * 4.0 - bracket * s.h(a, b);
  c.T = T;

  JetTensor X(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) X(a, b) = Ptt(a, b) + HL(a, b) - H2 * s.h(a, b) * 0.5;
  const JetTensor dH = mean_curvature_gradient(ep);
  JetTensor Y(std::vector<int>{k, nn}, Jet());
  for (int a = 0; a < k; ++a)
    for (int m = 0; m < nn; ++m) Y(a, m) = pg.frame.schouten(a, k + m) - dH(a, m);

  Jet q4 = -laplacian(s, c.q2);
  q4 -= norm_squared(X, {Slot::Tangent, Slot::Tangent}, s) * 2.0;
  q4 += norm_squared(Y, {Slot::Tangent, Slot::Normal}, s) * 2.0;
  q4 += c.q2 * c.q2 * (k / 2.0);
  q4 -= weyl_mean_curvature_term(pg) * 2.0;
  q4 -= cotton_mean_curvature_term(pg) * 4.0;
  q4 += bach_term(pg, opt);
  c.q4 = q4;
  return c;
}

OperatorCoefficients intrinsic_coefficients(const SigmaMetric& sigma, int level, int n) {
  const int k = sigma.k;
  if (level < 1 || level > 2) throw AdmissibilityError("only levels 1 and 2 have closed forms");
  if (k < 2) throw AdmissibilityError("intrinsic operators need k >= 2");
  if (level == 2 && k < 3) throw AdmissibilityError("the intrinsic level-2 operator needs k >= 3");
  const IntrinsicCurvature ic = intrinsic_curvature(sigma);
  OperatorCoefficients c;
  c.k = k;
  c.n = n;
  c.flavor = Flavor::Intrinsic;
  c.sigma = sigma;
  c.q2 = ic.J;
  if (level == 1) return c;
  const JetTensor& P = ic.pack.schouten;
  JetTensor T(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) T(a, b) = P(a, b) * 4.0 - ic.J * sigma.h(a, b) * (k - 2.0);
  c.T = T;
  c.q4 = -laplacian(sigma, ic.J) - frobenius(P, P, sigma) * 2.0 + ic.J * ic.J * (k / 2.0);
  return c;
}

OperatorCoefficients tilde_coefficients(const PointGeometry& pg, const FialkowPack& fp, const IntrinsicCurvature& ic,
                                        const OperatorOptions& opt) {
  const int k = pg.k;
  if (k < 3) throw AdmissibilityError("the decomposition needs k >= 3");
  require_admissible(pg.k, pg.n, 2, opt);
  const auto& s = pg.ext.sigma;
  OperatorCoefficients c;
  c.k = k;
  c.n = pg.n;
  c.flavor = Flavor::Tilde;
  c.sigma = s;
  c.q2 = fp.G;
  JetTensor T(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) T(a, b) = fp.F(a, b) * 4.0 - fp.G * s.h(a, b) * (k - 2.0);
  c.T = T;
  Jet q4 = -laplacian(s, fp.G);
  q4 -= frobenius(fp.F, fp.F, s) * 2.0;
  q4 += fp.G * fp.G * (k / 2.0);
  q4 -= frobenius(fp.F, ic.pack.schouten, s) * 4.0;
  q4 += fp.G * ic.J * static_cast<double>(k);
  q4 += norm_squared(fp.D, {Slot::Tangent, Slot::Normal}, s) * 2.0;
  q4 -= weyl_mean_curvature_term(pg) * 2.0;
  q4 -= cotton_mean_curvature_term(pg) * 4.0;
  q4 += bach_term(pg, opt);
  c.q4 = q4;
  return c;
}

DecompositionResidual decomposition_residual(const OperatorCoefficients& ext, const OperatorCoefficients& intr,
                                             const OperatorCoefficients& tilde) {
  DecompositionResidual r;
  const double q2 = ext.q2.value();
  r.q2 = std::abs(q2 - intr.q2.value() - tilde.q2.value()) / (1.0 + std::abs(q2));
  if (ext.T && intr.T && tilde.T) {
    const int k = ext.k;
    JetTensor d(2, k, Jet());
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) d(a, b) = (*ext.T)(a, b) - (*intr.T)(a, b) - (*tilde.T)(a, b);
    const double tn = std::sqrt(std::abs(norm_squared(*ext.T, {Slot::Tangent, Slot::Tangent}, ext.sigma).value()));
    r.T = std::sqrt(std::abs(norm_squared(d, {Slot::Tangent, Slot::Tangent}, ext.sigma).value())) / (1.0 + tn);
  }
  if (ext.q4 && intr.q4 && tilde.q4) {
    const double q4 = ext.q4->value();
    r.q4 = std::abs(q4 - intr.q4->value() - tilde.q4->value()) / (1.0 + std::abs(q4));
  }
  return r;
}

Jet laplacian(const SigmaMetric& s, const Jet& f) {
  const int k = s.k;
  std::vector<Jet> df(k);
  for (int c = 0; c < k; ++c) df[c] = f.derivative(c);
  Jet acc;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Jet hess = df[a].derivative(b);
      for (int c = 0; c < k; ++c) hess -= s.christoffel(c, a, b) * df[c];
      acc = sum(acc, s.inverse(a, b) * hess);
    }
  return acc;
}

Jet divergence_form(const SigmaMetric& s, const JetTensor& T, const Jet& f) {
  const int k = s.k;
  std::vector<Jet> df(k), grad(k), V(k);
  for (int c = 0; c < k; ++c) df[c] = f.derivative(c);
  for (int b = 0; b < k; ++b) {
    Jet acc;
    for (int c = 0; c < k; ++c) acc = sum(acc, s.inverse(b, c) * df[c]);
    grad[b] = acc;
  }
  for (int a = 0; a < k; ++a) {
    Jet acc;
    for (int b = 0; b < k; ++b) acc = sum(acc, T(a, b) * grad[b]);
    V[a] = acc;
  }
  Jet div;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Jet d = V[a].derivative(b);
      for (int c = 0; c < k; ++c) d -= s.christoffel(c, b, a) * V[c];
      div = sum(div, s.inverse(a, b) * d);
    }
  return div;
}

Jet apply_p2(const OperatorCoefficients& c, const Jet& f) {
  return -laplacian(c.sigma, f) + c.q2 * f * ((c.k - 2) / 2.0);
}

Jet apply_p4(const OperatorCoefficients& c, const Jet& f) {
  if (!c.T || !c.q4) throw AdmissibilityError("level-2 coefficients were not computed");
  const SigmaMetric& s = c.sigma;
  return laplacian(s, laplacian(s, f)) + divergence_form(s, *c.T, f) + *c.q4 * f * ((c.k - 4) / 2.0);
}

Jet apply_operator(const OperatorCoefficients& c, int level, const Jet& f) {
  if (level == 1) return apply_p2(c, f);
  if (level == 2) return apply_p4(c, f);
  throw AdmissibilityError("only levels 1 and 2 have closed forms");
}

Jet sigma_function(const Expr& f, std::span<const double> x, int order) {
  if (f.max_u_index() > 0) throw SpecError("functions on the submanifold may only use x variables");
  if (f.max_x_index() > static_cast<int>(x.size())) throw SpecError("function uses x beyond the submanifold dimension");
  return evaluate(f, x, order);
}

Jet restrict_to_sigma(const Expr& omega, const ExtrinsicPack& ep, const MetricChart& chart) {
  if (omega.max_x_index() > ep.n) throw SpecError("ambient expression uses x beyond the ambient dimension");
  std::vector<Jet> u;
  if (chart.u_offset) u.assign(ep.iota.begin() + *chart.u_offset, ep.iota.end());
  JetEvaluator ev(ep.iota, std::move(u));
  return ev(omega);
}

namespace {

struct RoutePair {
  PointGeometry g;
  PointGeometry ghat;
};

RoutePair both_routes(const CovarianceInput& in, std::span<const double> x) {
  if (!in.chart || !in.embedding) throw SpecError("covariance check needs a chart and an embedding");
  const MetricChart hat = conformal_metric(*in.chart, in.omega);
  return {evaluate_geometry(*in.chart, *in.embedding, x, in.order),
          evaluate_geometry(hat, *in.embedding, x, in.order)};
}

}  // namespace

double covariance_residual(const CovarianceInput& in, int level, const Expr& f, std::span<const double> x) {
  const RoutePair r = both_routes(in, x);
  const auto c = extrinsic_coefficients(r.g, level, in.options);
  const auto chat = extrinsic_coefficients(r.ghat, level, in.options);
  const Jet w = restrict_to_sigma(in.omega, r.g.ext, *in.chart);
  const Jet fj = sigma_function(f, x, in.order);
  const double k = r.g.k;
  const double lhs = apply_operator(chat, level, fj).value();
  const double rhs =
      (exp(w * (-k / 2.0 - level)) * apply_operator(c, level, exp(w * (k / 2.0 - level)) * fj)).value();
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

double q_covariance_residual(const CovarianceInput& in, int level, std::span<const double> x) {
  const RoutePair r = both_routes(in, x);
  const auto c = extrinsic_coefficients(r.g, level, in.options);
  const auto chat = extrinsic_coefficients(r.ghat, level, in.options);
  const Jet w = restrict_to_sigma(in.omega, r.g.ext, *in.chart);
  const int k = r.g.k;
  const Jet& Q = level == 1 ? c.q2 : *c.q4;
  const Jet& Qhat = level == 1 ? chat.q2 : *chat.q4;
  double res;
  if (k == 2 * level) {
    res = (exp(w * static_cast<double>(k)) * Qhat - Q - apply_operator(c, level, w)).value();
  } else {
    const double cc = k / 2.0 - level;
    const Jet u = exp(w * cc);
    const Jet p0 = apply_operator(c, level, u) - Q * u * cc;
    res = (exp(w * (2.0 * level)) * Qhat - Q - exp(w * (-cc)) * p0 / cc).value();
  }
  return std::abs(res) / (1.0 + std::abs(Q.value()));
}

}  // namespace egjms
