#include "egjms/submanifold.hpp"

#include <cmath>
#include <string>

#include "egjms/error.hpp"

namespace egjms {

namespace {

Jet zero_like(const Jet& j) { return Jet::constant(0.0, j.dim(), j.order()); }

Jet sum(const Jet& acc, const Jet& term) { return acc.empty() ? term : acc + term; }

std::vector<int> slot_extents(const std::vector<Slot>& slots, int k, int n) {
  std::vector<int> e;
  for (Slot s : slots) e.push_back(s == Slot::Tangent ? k : n - k);
  return e;
}

/// Replaces slot s of t (extent m) by contraction with rows of M (new_extent x m).
JetTensor contract_slot(const JetTensor& t, int s, const JetTensor& M) {
  std::vector<int> ext = t.extents();
  const int m = ext[s];
  const int r = M.extent(0);
  ext[s] = r;
  JetTensor out(ext, Jet());
  for (std::size_t p = 0; p < out.size(); ++p) {
    std::vector<int> idx = out.unflatten(p);
    const int A = idx[s];
    Jet acc;
    for (int i = 0; i < m; ++i) {
      idx[s] = i;
      const Jet& c = M(A, i);
      acc = sum(acc, c * t.at(t.offset(idx)));
    }
    out.at(p) = acc;
  }
  return out;
}

JetTensor to_frame(const JetTensor& composed, const JetTensor& frame) {
  JetTensor t = composed;
  for (int s = 0; s < composed.rank(); ++s) t = contract_slot(t, s, frame);
  return t;
}

/// Frame components of a tensor antisymmetric in its first and second index
/// pairs; only components with i < j and k < l are read.
JetTensor bivector_to_frame(const JetTensor& t, const JetSubstitution& sub, const JetTensor& frame) {
  const int n = t.extent(0);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const std::size_t np = pairs.size();
  std::vector<Jet> e(np * np);
  for (std::size_t a = 0; a < np; ++a) {
    const auto [A, B] = pairs[a];
    for (std::size_t p = 0; p < np; ++p) {
      const auto [i, j] = pairs[p];
      e[a * np + p] = frame(A, i) * frame(B, j) - frame(A, j) * frame(B, i);
    }
  }
  std::vector<Jet> w(np * np);
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t q = 0; q < np; ++q)
      w[p * np + q] = sub.apply(t(pairs[p].first, pairs[p].second, pairs[q].first, pairs[q].second));
  std::vector<Jet> x(np * np);
  for (std::size_t a = 0; a < np; ++a)
    for (std::size_t q = 0; q < np; ++q) {
      Jet acc;
      for (std::size_t p = 0; p < np; ++p) acc = sum(acc, e[a * np + p] * w[p * np + q]);
      x[a * np + q] = acc;
    }
  JetTensor out(4, n, Jet());
  const Jet zero = x[0] * 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) = zero;
  for (std::size_t a = 0; a < np; ++a)
    for (std::size_t b = 0; b < np; ++b) {
      Jet acc;
      for (std::size_t q = 0; q < np; ++q) acc = sum(acc, e[b * np + q] * x[a * np + q]);
      const auto [A, B] = pairs[a];
      const auto [C, D] = pairs[b];
      out(A, B, D, C) = -acc;
      out(B, A, C, D) = -acc;
      out(B, A, D, C) = acc;
      out(A, B, C, D) = std::move(acc);
    }
  return out;
}

JetTensor compose(const JetTensor& t, const JetSubstitution& sub) {
  JetTensor out(t.extents(), Jet());
  for (std::size_t p = 0; p < t.size(); ++p) out.at(p) = sub.apply(t.at(p));
  return out;
}

struct AmbientAlongSigma {
  JetTensor g;
  JetTensor ginv;
  JetTensor gamma;
};

ExtrinsicPack build_extrinsic(int k, int n, std::vector<Jet> iota, const AmbientAlongSigma& amb) {
  ExtrinsicPack ep;
  ep.k = k;
  ep.n = n;
  ep.iota = std::move(iota);
  ep.ambient_metric = amb.g;
  const JetTensor& g = amb.g;
  const JetTensor& ginv = amb.ginv;
  const JetTensor& Gam = amb.gamma;

  JetTensor T(std::vector<int>{k, n}, Jet());
  for (int a = 0; a < k; ++a)
    for (int i = 0; i < n; ++i) T(a, i) = ep.iota[i].derivative(a);

  auto inner = [&](const std::vector<Jet>& u, const std::vector<Jet>& v) {
    Jet acc;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc = sum(acc, g(i, j) * u[i] * v[j]);
    return acc;
  };
  auto row = [&](const JetTensor& t, int a) {
    std::vector<Jet> v;
    for (int i = 0; i < n; ++i) v.push_back(t(a, i));
    return v;
  };

  JetTensor h(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      h(a, b) = inner(row(T, a), row(T, b));
      h(b, a) = h(a, b);
    }
  ep.sigma = sigma_metric(h);
  const JetTensor& hinv = ep.sigma.inverse;

  // Normals: raised coordinate differentials in ascending order, projected
  // off the tangent space and earlier normals.
  std::vector<std::vector<Jet>> normals;
  for (int m = 0; m < n && static_cast<int>(normals.size()) < n - k; ++m) {
    std::vector<Jet> v;
    for (int i = 0; i < n; ++i) v.push_back(ginv(i, m));
    const double original = std::sqrt(std::abs(inner(v, v).value()));
    std::vector<Jet> tv(k);
    for (int b = 0; b < k; ++b) tv[b] = inner(row(T, b), v);
    for (int a = 0; a < k; ++a) {
      Jet coef;
      for (int b = 0; b < k; ++b) coef = sum(coef, hinv(a, b) * tv[b]);
      for (int i = 0; i < n; ++i) v[i] = v[i] - coef * T(a, i);
    }
    for (const auto& e : normals) {
      const Jet c = inner(e, v);
      for (int i = 0; i < n; ++i) v[i] = v[i] - c * e[i];
    }
    const Jet norm2 = inner(v, v);
    if (!(norm2.value() > 0.0) || std::sqrt(norm2.value()) < 1e-3 * original) continue;
    const Jet norm = sqrt(norm2);
    for (auto& c : v) c = c / norm;
    normals.push_back(std::move(v));
  }
  if (static_cast<int>(normals.size()) != n - k) throw NumericError("degenerate embedding: normal frame incomplete");

  const int nn = n - k;
  ep.frame = JetTensor(std::vector<int>{n, n}, Jet());
  for (int a = 0; a < k; ++a)
    for (int i = 0; i < n; ++i) ep.frame(a, i) = T(a, i);
  for (int a = 0; a < nn; ++a)
    for (int i = 0; i < n; ++i) ep.frame(k + a, i) = normals[a][i];

  // Lowered normals g_ij e_a^j.
  JetTensor ge(std::vector<int>{nn, n}, Jet());
  for (int a = 0; a < nn; ++a)
    for (int i = 0; i < n; ++i) {
      Jet acc;
      for (int j = 0; j < n; ++j) acc = sum(acc, g(i, j) * normals[a][j]);
      ge(a, i) = acc;
    }

  ep.L = JetTensor(std::vector<int>{nn, k, k}, Jet());
  for (int al = 0; al < k; ++al)
    for (int be = al; be < k; ++be) {
      std::vector<Jet> acc(n);
      for (int i = 0; i < n; ++i) {
        Jet s = T(al, i).derivative(be);
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) s += Gam(i, p, q) * T(al, p) * T(be, q);
        acc[i] = s;
      }
      for (int a = 0; a < nn; ++a) {
        Jet l;
        for (int i = 0; i < n; ++i) l = sum(l, acc[i] * ge(a, i));
        ep.L(a, al, be) = l;
        ep.L(a, be, al) = l;
      }
    }

  ep.H.resize(nn);
  for (int a = 0; a < nn; ++a) {
    Jet acc;
    for (int al = 0; al < k; ++al)
      for (int be = 0; be < k; ++be) acc = sum(acc, hinv(al, be) * ep.L(a, al, be));
    ep.H[a] = acc / static_cast<double>(k);
  }
  ep.L_trace_free = JetTensor(std::vector<int>{nn, k, k}, Jet());
  for (int a = 0; a < nn; ++a)
    for (int al = 0; al < k; ++al)
      for (int be = 0; be < k; ++be) ep.L_trace_free(a, al, be) = ep.L(a, al, be) - ep.H[a] * h(al, be);

  ep.normal_connection = JetTensor(std::vector<int>{k, nn, nn}, Jet());
  for (int c = 0; c < k; ++c)
    for (int a = 0; a < nn; ++a) {
      std::vector<Jet> de(n);
      for (int i = 0; i < n; ++i) {
        Jet s = normals[a][i].derivative(c);
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) s += Gam(i, p, q) * T(c, p) * normals[a][q];
        de[i] = s;
      }
      for (int b = 0; b < nn; ++b) {
        Jet w;
        for (int i = 0; i < n; ++i) w = sum(w, de[i] * ge(b, i));
        ep.normal_connection(c, a, b) = w;
      }
    }
  return ep;
}

struct Prepared {
  std::vector<double> z;
  std::vector<Jet> iota;
};

Prepared prepare(const Embedding& emb, std::span<const double> x, int order) {
  emb.validate();
  if (static_cast<int>(x.size()) != emb.k)
    throw SpecError("point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(emb.k));
  if (order < 2) throw OrderError("submanifold geometry needs jet order at least 2");
  std::vector<Jet> xj;
  for (int a = 0; a < emb.k; ++a) xj.push_back(Jet::variable(a, x[a], emb.k, order + 1));
  JetEvaluator ev(std::move(xj));
  Prepared p;
  for (const auto& c : emb.components) {
    Jet v = ev(c);
    p.z.push_back(v.value());
    p.iota.push_back(std::move(v));
  }
  return p;
}

}  // namespace

Embedding Embedding::graph(int k, const std::vector<Expr>& u) {
  Embedding e;
  e.k = k;
  e.n = k + static_cast<int>(u.size());
  for (int a = 1; a <= k; ++a) e.components.push_back(Expr::x(a));
  for (const auto& f : u) e.components.push_back(f);
  return e;
}

void Embedding::validate() const {
  if (k < 1 || k > n - 1) throw SpecError("submanifold dimension must satisfy 1 <= k <= n-1");
  if (static_cast<int>(components.size()) != n) throw SpecError("embedding needs exactly n components");
  for (const auto& c : components) {
    if (c.max_x_index() > k) throw SpecError("embedding component uses x beyond the submanifold dimension");
    if (c.max_u_index() > 0) throw SpecError("embedding components may only use x variables");
  }
}

SigmaMetric sigma_metric(const JetTensor& h) {
  SigmaMetric s;
  s.k = h.extent(0);
  check_positive_definite(h);
  s.h = h;
  s.inverse = inverse_metric(h);
  s.christoffel = christoffel(h, s.inverse);
  return s;
}

ExtrinsicPack extrinsic_pack(const MetricChart& chart, const Embedding& emb, std::span<const double> x, int order) {
  if (chart.n != emb.n) throw SpecError("metric and embedding dimensions differ");
  Prepared p = prepare(emb, x, order);
  const JetTensor gz = evaluate_metric(chart, p.z, order);
  check_positive_definite(gz);
  const JetTensor ginv = inverse_metric(gz);
  const JetTensor gam = christoffel(gz, ginv);
  JetSubstitution sub(p.iota, order);
  AmbientAlongSigma amb{compose(gz, sub), compose(ginv, sub), compose(gam, sub)};
  return build_extrinsic(emb.k, emb.n, std::move(p.iota), amb);
}

PointGeometry evaluate_geometry(const MetricChart& chart, const Embedding& emb, std::span<const double> x, int order) {
  if (chart.n != emb.n) throw SpecError("metric and embedding dimensions differ");
  if (order < 4) throw OrderError("point geometry needs jet order at least 4");
  Prepared p = prepare(emb, x, order);
  PointGeometry pg;
  pg.k = emb.k;
  pg.n = emb.n;
  pg.order = order;
  pg.x.assign(x.begin(), x.end());
  pg.z = p.z;
  if (pg.n < 3) throw SpecError("ambient dimension must be at least 3");
  pg.ambient = curvature_pack(evaluate_metric(chart, p.z, order));
  JetSubstitution sub(p.iota, order);
  AmbientAlongSigma amb{compose(pg.ambient.metric, sub), compose(pg.ambient.inverse, sub),
                        compose(pg.ambient.christoffel, sub)};
  pg.ext = build_extrinsic(emb.k, emb.n, std::move(p.iota), amb);

  const int k = pg.k, n = pg.n;
  const JetTensor& E = pg.ext.frame;
  FrameCurvature& fc = pg.frame;
  const Jet& proto = pg.ext.sigma.h(0, 0);
  fc.metric = JetTensor(2, n, Jet());
  fc.inverse = JetTensor(2, n, Jet());
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B) {
      if (A < k && B < k) {
        fc.metric(A, B) = pg.ext.sigma.h(A, B);
        fc.inverse(A, B) = pg.ext.sigma.inverse(A, B);
      } else {
        fc.metric(A, B) = Jet::constant(A == B ? 1.0 : 0.0, proto.dim(), proto.order());
        fc.inverse(A, B) = fc.metric(A, B);
      }
    }
  fc.schouten = to_frame(compose(pg.ambient.schouten, sub), E);
  fc.schouten_gradient = to_frame(compose(pg.ambient.schouten_gradient, sub), E);
  fc.weyl = bivector_to_frame(pg.ambient.weyl, sub, E);
  fc.cotton = to_frame(compose(pg.ambient.cotton, sub), E);
  fc.bach = to_frame(compose(pg.ambient.bach, sub), E);
  const JetTensor& P = fc.schouten;
  const JetTensor& G = fc.metric;
  fc.riemann = JetTensor(4, n, Jet());
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B)
      for (int C = 0; C < n; ++C)
        for (int D = 0; D < n; ++D)
          fc.riemann(A, B, C, D) = fc.weyl(A, B, C, D) + P(A, C) * G(B, D) - P(B, C) * G(A, D) -
                                   P(A, D) * G(B, C) + P(B, D) * G(A, C);
  return pg;
}

JetTensor covariant_derivative(const JetTensor& t, const std::vector<Slot>& slots, const ExtrinsicPack& ep) {
  const int k = ep.k, n = ep.n;
  if (static_cast<int>(slots.size()) != t.rank()) throw SpecError("slot list does not match tensor rank");
  const auto ext = slot_extents(slots, k, n);
  if (ext != t.extents()) throw SpecError("tensor extents do not match slot kinds");
  std::vector<int> out_ext{k};
  out_ext.insert(out_ext.end(), ext.begin(), ext.end());
  JetTensor out(out_ext, Jet());
  const JetTensor& Gb = ep.sigma.christoffel;
  const JetTensor& w = ep.normal_connection;
  for (std::size_t p = 0; p < out.size(); ++p) {
    std::vector<int> idx = out.unflatten(p);
    const int c = idx[0];
    std::vector<int> I(idx.begin() + 1, idx.end());
    Jet r = t.at(t.offset(I)).derivative(c);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const int orig = I[s];
      const int m = ext[s];
      for (int d = 0; d < m; ++d) {
        I[s] = d;
        const Jet& coef = slots[s] == Slot::Tangent ? Gb(d, c, orig) : w(c, orig, d);
        r -= coef * t.at(t.offset(I));
      }
      I[s] = orig;
    }
    out.at(p) = r;
  }
  return out;
}

JetTensor mean_curvature_gradient(const ExtrinsicPack& ep) {
  JetTensor H(std::vector<int>{ep.n - ep.k}, Jet());
  for (int a = 0; a < ep.n - ep.k; ++a) H(a) = ep.H[a];
  return covariant_derivative(H, {Slot::Normal}, ep);
}

Jet norm_squared(const JetTensor& t, const std::vector<Slot>& slots, const SigmaMetric& sigma) {
  JetTensor up = t;
  for (std::size_t s = 0; s < slots.size(); ++s)
    if (slots[s] == Slot::Tangent) up = contract_slot(up, static_cast<int>(s), sigma.inverse);
  Jet acc;
  for (std::size_t p = 0; p < t.size(); ++p) acc = sum(acc, t.at(p) * up.at(p));
  return acc;
}

Jet trace(const JetTensor& t, const SigmaMetric& sigma) {
  Jet acc;
  for (int a = 0; a < sigma.k; ++a)
    for (int b = 0; b < sigma.k; ++b) acc = sum(acc, sigma.inverse(a, b) * t(a, b));
  return acc;
}

Jet mean_curvature_squared(const ExtrinsicPack& ep) {
  Jet acc = zero_like(ep.H[0]);
  for (const auto& h : ep.H) acc += h * h;
  return acc;
}

FialkowPack fialkow_pack(const PointGeometry& pg) {
  const int k = pg.k, n = pg.n, nn = n - k;
  if (k < 2) throw AdmissibilityError("Fialkow data needs k >= 2");
  const auto& ep = pg.ext;
  const JetTensor& hinv = ep.sigma.inverse;
  const JetTensor& W = pg.frame.weyl;
  const JetTensor& Lo = ep.L_trace_free;
  FialkowPack fp;
  fp.k = k;

  Jet wtt;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c)
        for (int d = 0; d < k; ++d) wtt = sum(wtt, hinv(a, c) * hinv(b, d) * W(a, b, c, d));
  const Jet lo2 = norm_squared(Lo, {Slot::Normal, Slot::Tangent, Slot::Tangent}, ep.sigma);
  fp.G = (lo2 - wtt) / (2.0 * (k - 1));

  if (k >= 3) {
    fp.F = JetTensor(2, k, Jet());
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) {
        Jet s = -fp.G * ep.sigma.h(a, b);
        for (int c = 0; c < k; ++c)
          for (int d = 0; d < k; ++d) {
            Jet ll;
            for (int m = 0; m < nn; ++m) ll = sum(ll, Lo(m, a, c) * Lo(m, b, d));
            s += hinv(c, d) * (ll - W(a, c, b, d));
          }
        fp.F(a, b) = s / (k - 2.0);
        fp.F(b, a) = fp.F(a, b);
      }
  }

  const JetTensor dLo = covariant_derivative(Lo, {Slot::Normal, Slot::Tangent, Slot::Tangent}, ep);
  fp.D = JetTensor(std::vector<int>{k, nn}, Jet());
  for (int a = 0; a < k; ++a)
    for (int m = 0; m < nn; ++m) {
      Jet s;
      for (int b = 0; b < k; ++b)
        for (int c = 0; c < k; ++c)
          s = sum(s, hinv(b, c) * (dLo(c, m, a, b) + W(a, b, k + m, c)));
      fp.D(a, m) = s / (1.0 - k);
    }
  return fp;
}

IntrinsicCurvature intrinsic_curvature(const SigmaMetric& sigma) {
  if (sigma.k < 2) throw AdmissibilityError("intrinsic curvature needs k >= 2");
  IntrinsicCurvature ic;
  ic.pack = curvature_pack(sigma.h);
  ic.J = ic.pack.scalar / (2.0 * (sigma.k - 1));
  return ic;
}

JetTensor conversion_rule_residual(const PointGeometry& pg) {
  const int k = pg.k, nn = pg.n - pg.k;
  const auto& ep = pg.ext;
  const JetTensor& P = pg.frame.schouten;
  JetTensor mixed(std::vector<int>{k, nn}, Jet());
  for (int b = 0; b < k; ++b)
    for (int a = 0; a < nn; ++a) mixed(b, a) = P(b, k + a);
  const JetTensor induced = covariant_derivative(mixed, {Slot::Tangent, Slot::Normal}, ep);
  JetTensor out(std::vector<int>{k, k, nn}, Jet());
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be)
      for (int a = 0; a < nn; ++a) {
        Jet conv = pg.frame.schouten_gradient(be, k + a, al);
        for (int b = 0; b < nn; ++b) conv += ep.L(b, al, be) * P(k + b, k + a);
        for (int c = 0; c < k; ++c)
          for (int d = 0; d < k; ++d) conv -= ep.sigma.inverse(c, d) * ep.L(a, al, d) * P(be, c);
        out(al, be, a) = induced(al, be, a) - conv;
      }
  return out;
}

GaussCodazziResiduals gauss_codazzi_residuals(const PointGeometry& pg, const FialkowPack& fp,
                                              const IntrinsicCurvature& ic) {
  const int k = pg.k, nn = pg.n - pg.k;
  const auto& ep = pg.ext;
  const JetTensor& P = pg.frame.schouten;
  const Jet H2 = mean_curvature_squared(ep);
  GaussCodazziResiduals r;

  JetTensor Ptt(2, k, Jet());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) Ptt(a, b) = P(a, b);
  const Jet q2 = trace(Ptt, ep.sigma) + H2 * (k / 2.0);
  r.gc_trace = std::abs((q2 - ic.J - fp.G).value());

  if (k >= 3) {
    JetTensor diff(2, k, Jet());
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        Jet hl = zero_like(H2);
        for (int m = 0; m < nn; ++m) hl += ep.H[m] * ep.L(m, a, b);
        diff(a, b) = P(a, b) + hl - H2 * ep.sigma.h(a, b) * 0.5 - ic.pack.schouten(a, b) - fp.F(a, b);
      }
    r.gc1 = std::sqrt(std::abs(norm_squared(diff, {Slot::Tangent, Slot::Tangent}, ep.sigma).value()));
  }

  const JetTensor dH = mean_curvature_gradient(ep);
  JetTensor d2(std::vector<int>{k, nn}, Jet());
  for (int a = 0; a < k; ++a)
    for (int m = 0; m < nn; ++m) d2(a, m) = P(a, k + m) - dH(a, m) - fp.D(a, m);
  r.gc2 = std::sqrt(std::abs(norm_squared(d2, {Slot::Tangent, Slot::Normal}, ep.sigma).value()));
  return r;
}

}  // namespace egjms
