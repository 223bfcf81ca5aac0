#include <doctest.h>

#include <cmath>

#include "egjms/cli.hpp"
#include "egjms/error.hpp"
#include "egjms/submanifold.hpp"
#include "oracles.hpp"

using namespace egjms;

namespace {

MetricChart flat(int n) { return MetricChart::conformally_flat(n, Expr::constant(1.0)); }
MetricChart sphere(int n) { return MetricChart::conformally_flat(n, oracle::stereo_factor(n)); }

Embedding coordinate_plane(int k, int n) {
  std::vector<Expr> c;
  for (int i = 1; i <= n; ++i) c.push_back(i <= k ? Expr::x(i) : Expr::constant(0.0));
  return {k, n, c};
}

/// Radius-a sphere through inverse stereographic projection of x1..xk.
Embedding round_sphere(int k, double a) {
  Expr r2 = Expr::constant(0.0);
  for (int i = 1; i <= k; ++i) r2 = r2 + pow(Expr::x(i), 2);
  const Expr q = Expr::constant(1.0) + r2;
  std::vector<Expr> c;
  for (int i = 1; i <= k; ++i) c.push_back(Expr::constant(2.0 * a) * Expr::x(i) / q);
  c.push_back(Expr::constant(a) * (r2 - Expr::constant(1.0)) / q);
  return {k, k + 1, c};
}

double mean_curvature_norm(const ExtrinsicPack& ep) { return std::sqrt(mean_curvature_squared(ep).value()); }

}  // namespace

TEST_SUITE("submanifold") {
  TEST_CASE("extrinsic examples") {
    const std::vector<double> x2 = {0.3, -0.2};
    const ExtrinsicPack plane = extrinsic_pack(flat(3), coordinate_plane(2, 3), x2, 3);
    CHECK(max_abs(plane.L) == 0.0);
    CHECK(mean_curvature_norm(plane) == 0.0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) CHECK(plane.sigma.h(a, b).value() == (a == b ? 1.0 : 0.0));

    const Embedding circle{1, 3, {Expr::constant(2.0) * cos(Expr::x(1)), Expr::constant(2.0) * sin(Expr::x(1)), Expr::constant(0.0)}};
    const std::vector<double> t = {0.7};
    CHECK(mean_curvature_norm(extrinsic_pack(flat(3), circle, t, 3)) == doctest::Approx(0.5).epsilon(1e-12));

    const ExtrinsicPack eq = extrinsic_pack(sphere(3), round_sphere(2, 1.0), x2, 3);
    CHECK(max_abs(eq.L) <= 1e-10);

    const auto torus = builtin_geometry("clifford-torus");
    REQUIRE(torus);
    Rng rng(4);
    for (int i = 0; i < 5; ++i) {
      const auto x = sample_point(rng, torus->box);
      const ExtrinsicPack ep = extrinsic_pack(torus->metric, torus->embedding, x, 3);
      CHECK(std::abs(ep.H[0].value()) <= 1e-12);
      CHECK(norm_squared(ep.L_trace_free, {Slot::Normal, Slot::Tangent, Slot::Tangent}, ep.sigma).value() ==
            doctest::Approx(2.0).epsilon(1e-12));
    }
  }

  TEST_CASE("frame invariants") {
    const auto spec = builtin_geometry("perturbed-random");
    REQUIRE(spec);
    const std::vector<double> x = {0.2, -0.1, 0.3};
    const ExtrinsicPack ep = extrinsic_pack(spec->metric, spec->embedding, x, 3);
    const int k = ep.k, n = ep.n;
    auto inner = [&](int A, int B) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          s += ep.ambient_metric(i, j).value() * ep.frame(A, i).value() * ep.frame(B, j).value();
      return s;
    };
    for (int A = 0; A < n; ++A)
      for (int B = 0; B < n; ++B) {
        if (A >= k && B >= k) CHECK(std::abs(inner(A, B) - (A == B)) <= 1e-12);
        if (A < k && B >= k) CHECK(std::abs(inner(A, B)) <= 1e-12);
        if (A < k && B < k) CHECK(std::abs(inner(A, B) - ep.sigma.h(A, B).value()) <= 1e-12);
      }
    for (int m = 0; m < n - k; ++m) {
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) CHECK(std::abs(ep.L(m, a, b).value() - ep.L(m, b, a).value()) <= 1e-12);
      JetTensor Lo(2, k, Jet());
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) Lo(a, b) = ep.L_trace_free(m, a, b);
      CHECK(std::abs(trace(Lo, ep.sigma).value()) <= 1e-12);
    }
    CHECK(mean_curvature_squared(ep).value() > 1e-3);
  }

  TEST_CASE("mean curvature gradient") {
    const std::vector<double> x = {0.3, -0.4};
    const ExtrinsicPack s = extrinsic_pack(flat(3), round_sphere(2, 2.0), x, 4);
    CHECK(mean_curvature_norm(s) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(max_abs(mean_curvature_gradient(s)) <= 1e-12);

    const Embedding graph = Embedding::graph(2, {Expr::constant(0.1) * Expr::x(1) * Expr::x(2)});
    const std::vector<double> o = {0.0, 0.0};
    const JetTensor dH = mean_curvature_gradient(extrinsic_pack(flat(3), graph, o, 4));
    const oracle::Scalar H = [&](const std::vector<double>& y) { return extrinsic_pack(flat(3), graph, y, 2).H[0].value(); };
    for (int a = 0; a < 2; ++a) CHECK(std::abs(dH(a, 0).value() - oracle::fd_first(H, o, a)) <= 1e-5);
    const std::vector<double> y = {0.2, 0.3};
    const JetTensor dHy = mean_curvature_gradient(extrinsic_pack(flat(3), graph, y, 4));
    for (int a = 0; a < 2; ++a) CHECK(std::abs(dHy(a, 0).value() - oracle::fd_first(H, y, a)) <= 1e-5);
  }

  TEST_CASE("conversion rule") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const PerturbedGeometry g = perturbed_geometry(seed, 5, 3);
      const std::vector<double> x = {0.1, 0.2, -0.3};
      CHECK(max_abs(conversion_rule_residual(evaluate_geometry(g.chart, g.embedding, x, 5))) <= 1e-9);
    }
  }

  TEST_CASE("Fialkow examples") {
    const std::vector<double> x3 = {0.1, 0.2, -0.3};
    const PointGeometry eq = evaluate_geometry(sphere(4), round_sphere(3, 1.0), x3, 4);
    const FialkowPack fe = fialkow_pack(eq);
    CHECK(max_abs(fe.F) <= 1e-12);
    CHECK(std::abs(fe.G.value()) <= 1e-12);
    CHECK(max_abs(fe.D) <= 1e-12);

    const auto torus = builtin_geometry("clifford-torus");
    const std::vector<double> x2 = {0.3, 0.5};
    const FialkowPack ft = fialkow_pack(evaluate_geometry(torus->metric, torus->embedding, x2, 4));
    CHECK(ft.G.value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ft.F.empty());

    const FialkowPack ff = fialkow_pack(evaluate_geometry(flat(5), coordinate_plane(3, 5), x3, 4));
    CHECK(max_abs(ff.F) == 0.0);
    CHECK(ff.G.value() == 0.0);
    CHECK(max_abs(ff.D) == 0.0);

    const std::vector<double> x1 = {0.2};
    CHECK_THROWS_AS(fialkow_pack(evaluate_geometry(sphere(3), coordinate_plane(1, 3), x1, 4)), AdmissibilityError);
  }

  TEST_CASE("Fialkow tensor is symmetric with trace G") {
    const PerturbedGeometry g = perturbed_geometry(9, 5, 3);
    const std::vector<double> x = {-0.2, 0.1, 0.25};
    const PointGeometry pg = evaluate_geometry(g.chart, g.embedding, x, 4);
    const FialkowPack fp = fialkow_pack(pg);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) CHECK(std::abs(fp.F(a, b).value() - fp.F(b, a).value()) <= 1e-12);
    CHECK(std::abs(trace(fp.F, pg.ext.sigma).value() - fp.G.value()) <= 1e-12);
  }

  TEST_CASE("Gauss-Codazzi relations") {
    for (const auto& name : builtin_names()) {
      const auto spec = builtin_geometry(name);
      if (spec->k < 2) continue;
      Rng rng(12);
      for (int i = 0; i < 3; ++i) {
        const PointGeometry pg = evaluate_geometry(spec->metric, spec->embedding, sample_point(rng, spec->box), 4);
        const auto r = gauss_codazzi_residuals(pg, fialkow_pack(pg), intrinsic_curvature(pg.ext.sigma));
        CHECK(r.gc_trace <= 1e-9);
        CHECK(r.gc2 <= 1e-9);
        if (spec->k >= 3) CHECK(r.gc1 <= 1e-9);
      }
    }

    const std::vector<double> x3 = {0.1, 0.2, -0.3};
    const PointGeometry eq = evaluate_geometry(sphere(4), round_sphere(3, 1.0), x3, 4);
    const IntrinsicCurvature ic = intrinsic_curvature(eq.ext.sigma);
    JetTensor Ptt(2, 3, Jet());
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) Ptt(a, b) = eq.frame.schouten(a, b);
    CHECK(trace(Ptt, eq.ext.sigma).value() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(ic.J.value() == doctest::Approx(1.5).epsilon(1e-12));

    Rng rng(99);
    for (int i = 0; i < 10; ++i) {
      const PerturbedGeometry g = perturbed_geometry(100 + i, 5, 3);
      const PointGeometry pg = evaluate_geometry(g.chart, g.embedding, sample_point(rng, Box(3, {-0.5, 0.5})), 4);
      const auto r = gauss_codazzi_residuals(pg, fialkow_pack(pg), intrinsic_curvature(pg.ext.sigma));
      CHECK(r.gc1 <= 1e-8);
      CHECK(r.gc2 <= 1e-8);
      CHECK(r.gc_trace <= 1e-8);
    }
  }

  TEST_CASE("conformal behaviour of extrinsic data") {
    Rng rng(21);
    for (int t = 0; t < 3; ++t) {
      const PerturbedGeometry g = perturbed_geometry(40 + t, 5, 3);
      const Expr w = random_cubic(rng, 5, 0.2);
      const std::vector<double> x = sample_point(rng, Box(3, {-0.4, 0.4}));
      const PointGeometry a = evaluate_geometry(g.chart, g.embedding, x, 4);
      const PointGeometry b = evaluate_geometry(conformal_metric(g.chart, w), g.embedding, x, 4);
      const FialkowPack fa = fialkow_pack(a), fb = fialkow_pack(b);
      for (std::size_t i = 0; i < fa.F.size(); ++i) CHECK(std::abs(fa.F.at(i).value() - fb.F.at(i).value()) <= 1e-9);

      const Jet wj = evaluate(w, a.z, 1);
      const double e2w = std::exp(2.0 * wj.value());
      CHECK(std::abs(fb.G.value() - fa.G.value() / e2w) <= 1e-9);
      for (int m = 0; m < 2; ++m) {
        double dw = 0.0;
        for (int i = 0; i < 5; ++i) dw += a.ext.frame(3 + m, i).value() * wj.partial(i);
        const double lhs = e2w * std::exp(-wj.value()) * b.ext.H[m].value();
        CHECK(std::abs(lhs - (a.ext.H[m].value() - dw)) <= 1e-9);
      }
    }
  }

  TEST_CASE("graph form and errors") {
    const Embedding g = Embedding::graph(2, {Expr::constant(0.1) * Expr::x(1) * Expr::x(2)});
    REQUIRE(g.components.size() == 3);
    const std::vector<double> x = {0.5, -2.0};
    CHECK(evaluate(g.components[0], x, 0).value() == 0.5);
    CHECK(evaluate(g.components[1], x, 0).value() == -2.0);
    CHECK(evaluate(g.components[2], x, 0).value() == doctest::Approx(-0.1));

    const Embedding degenerate{2, 3, {Expr::x(1), Expr::x(1), Expr::constant(0.0)}};
    CHECK_THROWS_AS(extrinsic_pack(flat(3), degenerate, x, 3), NumericError);
    const Embedding wrong{2, 3, {Expr::x(1), Expr::x(3), Expr::constant(0.0)}};
    CHECK_THROWS_AS(wrong.validate(), SpecError);
  }
}
