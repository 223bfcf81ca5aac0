#include "egjms/geometry.hpp"

#include <cmath>
#include <string>

#include "egjms/error.hpp"

namespace egjms {

namespace {

Jet zero_like(const Jet& j) { return Jet::constant(0.0, j.dim(), j.order()); }

}  // namespace

MetricChart MetricChart::from_rows(const std::vector<std::vector<Expr>>& rows) {
  MetricChart c;
  c.n = static_cast<int>(rows.size());
  if (c.n < 1) throw SpecError("metric must have at least one row");
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != c.n) throw SpecError("metric must be square");
  c.components.resize(static_cast<std::size_t>(c.n * c.n));
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j) c.components[static_cast<std::size_t>(i * c.n + j)] = rows[i][j];
  return c;
}

MetricChart MetricChart::conformally_flat(int n, const Expr& factor) {
  MetricChart c;
  c.n = n;
  c.components.assign(static_cast<std::size_t>(n * n), Expr::constant(0.0));
  for (int i = 0; i < n; ++i) c.components[static_cast<std::size_t>(i * n + i)] = factor;
  return c;
}

JetTensor evaluate_metric(const MetricChart& chart, std::span<const Jet> z) {
  const int n = chart.n;
  if (static_cast<int>(z.size()) != n)
    throw SpecError("metric of dimension " + std::to_string(n) + " evaluated at " +
                    std::to_string(z.size()) + " coordinates");
  std::vector<Jet> x(z.begin(), z.end());
  std::vector<Jet> u;
  if (chart.u_offset) u.assign(z.begin() + *chart.u_offset, z.end());
  JetEvaluator ev(std::move(x), std::move(u));
  JetTensor g(2, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      g(i, j) = ev(chart(i, j));
      g(j, i) = g(i, j);
    }
  return g;
}

JetTensor evaluate_metric(const MetricChart& chart, std::span<const double> point, int order) {
  const int n = chart.n;
  if (static_cast<int>(point.size()) != n) throw SpecError("point dimension does not match metric");
  std::vector<Jet> z;
  for (int i = 0; i < n; ++i) z.push_back(Jet::variable(i, point[i], n, order));
  return evaluate_metric(chart, z);
}

MetricChart conformal_metric(const MetricChart& chart, const Expr& omega) {
  MetricChart out = chart;
  const Expr factor = exp(Expr::constant(2.0) * omega);
  for (int i = 0; i < chart.n; ++i)
    for (int j = 0; j < chart.n; ++j)
      out.components[static_cast<std::size_t>(i * chart.n + j)] = factor * chart(i, j);
  return out;
}

double max_abs(const JetTensor& t) {
  double m = 0.0;
  for (std::size_t p = 0; p < t.size(); ++p) m = std::max(m, std::abs(t.at(p).value()));
  return m;
}

void check_positive_definite(const JetTensor& g) {
  const int n = g.extent(0);
  std::vector<double> a(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i * n + j)] = g(i, j).value();
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j * n + j)];
    for (int k = 0; k < j; ++k) d -= a[static_cast<std::size_t>(j * n + k)] * a[static_cast<std::size_t>(j * n + k)];
    if (!(d > 0.0)) throw NumericError("metric is not positive definite");
    const double s = std::sqrt(d);
    a[static_cast<std::size_t>(j * n + j)] = s;
    for (int i = j + 1; i < n; ++i) {
      double v = a[static_cast<std::size_t>(i * n + j)];
      for (int k = 0; k < j; ++k) v -= a[static_cast<std::size_t>(i * n + k)] * a[static_cast<std::size_t>(j * n + k)];
      a[static_cast<std::size_t>(i * n + j)] = v / s;
    }
  }
}

JetTensor inverse_metric(const JetTensor& g) {
  const int n = g.extent(0);
  const double scale = max_abs(g);
  if (!(scale > 0.0)) throw NumericError("singular metric");
  std::vector<std::vector<Jet>> a(n), inv(n);
  const Jet& proto = g(0, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a[i].push_back(g(i, j));
      inv[i].push_back(Jet::constant(i == j ? 1.0 : 0.0, proto.dim(), proto.order()));
    }
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c].value()) > std::abs(a[piv][c].value())) piv = r;
    if (std::abs(a[piv][c].value()) < 1e-12 * scale) throw NumericError("singular metric");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const Jet p = a[c][c];
    for (int j = 0; j < n; ++j) {
      a[c][j] = a[c][j] / p;
      inv[c][j] = inv[c][j] / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const Jet f = a[r][c];
      if (f.value() == 0.0) {
        bool all_zero = true;
        for (double v : f.coefficients()) all_zero = all_zero && v == 0.0;
        if (all_zero) continue;
      }
      for (int j = 0; j < n; ++j) {
        a[r][j] = a[r][j] - f * a[c][j];
        inv[r][j] = inv[r][j] - f * inv[c][j];
      }
    }
  }
  JetTensor out(2, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = inv[i][j];
  // Symmetrize away roundoff.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Jet s = (out(i, j) + out(j, i)) * 0.5;
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

JetTensor christoffel(const JetTensor& g, const JetTensor& ginv) {
  const int n = g.extent(0);
  if (g(0, 0).order() < 1) throw OrderError("Christoffel symbols need a first-order metric jet");
  JetTensor dg(3, n, Jet());  // (i, j, l) = d_l g_ij
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        dg(i, j, l) = g(i, j).derivative(l);
        dg(j, i, l) = dg(i, j, l);
      }
  JetTensor first(3, n, Jet());  // (l, i, j) = Gamma_lij
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        first(l, i, j) = (dg(j, l, i) + dg(i, l, j) - dg(i, j, l)) * 0.5;
        first(l, j, i) = first(l, i, j);
      }
  JetTensor G(3, n, Jet());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet s = ginv(k, 0) * first(0, i, j);
        for (int l = 1; l < n; ++l) s += ginv(k, l) * first(l, i, j);
        G(k, i, j) = s;
        G(k, j, i) = s;
      }
  return G;
}

CurvaturePack curvature_pack(const JetTensor& g) {
  CurvaturePack cp;
  const int n = g.extent(0);
  cp.n = n;
  check_positive_definite(g);
  cp.metric = g;
  cp.inverse = inverse_metric(g);
  const int J = g.order();
  if (J < 2) throw OrderError("curvature needs a metric jet of order at least 2");
  cp.christoffel = christoffel(g, cp.inverse);
  const JetTensor& G = cp.christoffel;

  JetTensor dG(4, n, Jet());  // (a, b, c, v) = d_v Gamma^a_bc
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c)
        for (int v = 0; v < n; ++v) {
          dG(a, b, c, v) = G(a, b, c).derivative(v);
          dG(a, c, b, v) = dG(a, b, c, v);
        }

  // Rm^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
  JetTensor Rm(4, n, Jet());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = c; d < n; ++d) {
          if (c == d) {
            Rm(a, b, c, d) = zero_like(dG(0, 0, 0, 0));
            continue;
          }
          Jet s = dG(a, d, b, c) - dG(a, c, b, d);
          for (int e = 0; e < n; ++e) s += G(a, c, e) * G(e, d, b) - G(a, d, e) * G(e, c, b);
          Rm(a, b, c, d) = s;
          Rm(a, b, d, c) = -s;
        }

  cp.riemann = JetTensor(4, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        cp.riemann(i, j, k, k) = Rm(0, j, k, k);
        for (int l = k + 1; l < n; ++l) {
          Jet s = g(i, 0) * Rm(0, j, k, l);
          for (int a = 1; a < n; ++a) s += g(i, a) * Rm(a, j, k, l);
          cp.riemann(i, j, l, k) = -s;
          cp.riemann(i, j, k, l) = std::move(s);
        }
      }

  cp.ricci = JetTensor(2, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet s = Rm(0, i, 0, j);
      for (int k = 1; k < n; ++k) s += Rm(k, i, k, j);
      cp.ricci(i, j) = s;
      cp.ricci(j, i) = s;
    }
  // Symmetrize the Ricci tensor: the algebraic identity holds only up to roundoff.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Jet s = (cp.ricci(i, j) + cp.ricci(j, i)) * 0.5;
      cp.ricci(i, j) = s;
      cp.ricci(j, i) = s;
    }

  {
    Jet s = zero_like(cp.ricci(0, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += cp.inverse(i, j) * cp.ricci(i, j);
    cp.scalar = s;
  }

  if (n == 2) {
    cp.J = cp.scalar * 0.5;
    return cp;
  }

  cp.schouten = JetTensor(2, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cp.schouten(i, j) = (cp.ricci(i, j) - cp.scalar * g(i, j) / (2.0 * (n - 1))) / (n - 2.0);
  cp.J = cp.scalar / (2.0 * (n - 1));

  const JetTensor& P = cp.schouten;
  cp.weyl = JetTensor(4, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        cp.weyl(i, j, k, k) = cp.riemann(i, j, k, k);
        for (int l = k + 1; l < n; ++l) {
          Jet w = cp.riemann(i, j, k, l) -
                  (P(i, k) * g(j, l) - P(j, k) * g(i, l) - P(i, l) * g(j, k) + P(j, l) * g(i, k));
          cp.weyl(i, j, l, k) = -w;
          cp.weyl(i, j, k, l) = std::move(w);
        }
      }

  if (J < 3) return cp;

  cp.schouten_gradient = JetTensor(3, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet s = P(i, j).derivative(k);
        for (int m = 0; m < n; ++m) s -= G(m, k, i) * P(m, j) + G(m, k, j) * P(i, m);
        cp.schouten_gradient(i, j, k) = s;
        cp.schouten_gradient(j, i, k) = s;
      }
  cp.cotton = JetTensor(3, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        cp.cotton(i, j, k) = cp.schouten_gradient(i, j, k) - cp.schouten_gradient(i, k, j);

  if (J < 4) return cp;

  const JetTensor& C = cp.cotton;
  // div C_ij = g^km nabla_m C_ijk
  // (i, j, k, m) = nabla_m C_ijk, antisymmetric in j and k
  JetTensor dC(4, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m) {
        dC(i, j, j, m) = zero_like(C(i, j, j).derivative(m));
        for (int k = j + 1; k < n; ++k) {
          Jet d = C(i, j, k).derivative(m);
          for (int p = 0; p < n; ++p)
            d -= G(p, m, i) * C(p, j, k) + G(p, m, j) * C(i, p, k) + G(p, m, k) * C(i, j, p);
          dC(i, k, j, m) = -d;
          dC(i, j, k, m) = std::move(d);
        }
      }
  JetTensor divC(2, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet acc;
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          Jet term = cp.inverse(k, m) * dC(i, j, k, m);
          acc = acc.empty() ? term : acc + term;
        }
      divC(i, j) = acc;
    }
  JetTensor Pup(2, n, Jet());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Jet s = zero_like(P(0, 0));
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) s += cp.inverse(a, c) * cp.inverse(b, d) * P(c, d);
      Pup(a, b) = s;
    }
  cp.bach = JetTensor(2, n, Jet());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet s = divC(i, j);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s -= Pup(k, l) * cp.weyl(k, i, j, l);
      cp.bach(i, j) = s;
    }
  return cp;
}

CurvaturePack curvature_pack(const MetricChart& chart, std::span<const double> point, int residual_order) {
  if (residual_order < 0) throw OrderError("residual order must be non-negative");
  return curvature_pack(evaluate_metric(chart, point, residual_order + 4));
}

}  // namespace egjms
