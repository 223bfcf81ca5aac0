#include <doctest.h>

#include <cmath>

#include "egjms/error.hpp"
#include "egjms/geometry.hpp"
#include "egjms/sampling.hpp"
#include "oracles.hpp"

using namespace egjms;

namespace {

MetricChart flat(int n) { return MetricChart::conformally_flat(n, Expr::constant(1.0)); }
MetricChart sphere(int n) { return MetricChart::conformally_flat(n, oracle::stereo_factor(n)); }

double max_deviation(const JetTensor& t, const JetTensor& ref, double scale = 1.0) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(t.at(i).value() - scale * ref.at(i).value()));
  return m;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("christoffel examples") {
    const std::vector<double> p = {0.4, -1.2, 0.3};
    const JetTensor g = evaluate_metric(flat(3), p, 2);
    CHECK(max_abs(christoffel(g, inverse_metric(g))) == 0.0);

    const MetricChart c = MetricChart::conformally_flat(2, exp(Expr::constant(2.0) * Expr::x(1)));
    const std::vector<double> o = {0.0, 0.0};
    const JetTensor gc = evaluate_metric(c, o, 2);
    const JetTensor G = christoffel(gc, inverse_metric(gc));
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double expected = 0.0;
          if (k == 0 && i == 0 && j == 0) expected = 1.0;
          if (k == 0 && i == 1 && j == 1) expected = -1.0;
          if (k == 1 && i + j == 1) expected = 1.0;
          CHECK(G(k, i, j).value() == doctest::Approx(expected));
        }

    const std::vector<double> z = {0.0, 0.0, 0.0};
    const JetTensor gs = evaluate_metric(sphere(3), z, 2);
    CHECK(max_abs(christoffel(gs, inverse_metric(gs))) < 1e-15);
  }

  TEST_CASE("flat space has no curvature") {
    const std::vector<double> p = {0.3, -0.1, 0.7};
    const CurvaturePack cp = curvature_pack(flat(3), p, 0);
    for (const JetTensor* t : {&cp.riemann, &cp.ricci, &cp.schouten, &cp.weyl, &cp.cotton, &cp.bach})
      CHECK(max_abs(*t) == 0.0);
    CHECK(cp.scalar.value() == 0.0);
  }

  TEST_CASE("round spheres") {
    Rng rng(2);
    for (int n : {3, 4, 5}) {
      for (int t = 0; t < 3; ++t) {
        std::vector<double> z(n);
        for (auto& v : z) v = t == 0 ? 0.0 : rng.uniform(-0.8, 0.8);
        const CurvaturePack cp = curvature_pack(sphere(n), z, 0);
        CHECK(cp.scalar.value() == doctest::Approx(n * (n - 1.0)).epsilon(1e-12));
        CHECK(max_deviation(cp.schouten, cp.metric, 0.5) <= 1e-9);
        CHECK(max_abs(cp.weyl) <= 1e-9);
        CHECK(max_abs(cp.cotton) <= 1e-9);
        CHECK(max_abs(cp.bach) <= 1e-9);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              for (int l = 0; l < n; ++l) {
                const double expected = cp.metric(i, k).value() * cp.metric(j, l).value() -
                                        cp.metric(i, l).value() * cp.metric(j, k).value();
                CHECK(std::abs(cp.riemann(i, j, k, l).value() - expected) <= 1e-9);
              }
      }
    }
  }

  TEST_CASE("Einstein inputs have parallel scalar curvature") {
    const std::vector<double> z = {0.2, -0.3, 0.1, 0.4, -0.1};
    const CurvaturePack cp = curvature_pack(sphere(5), z, 1);
    for (int v = 0; v < 5; ++v) CHECK(std::abs(cp.scalar.partial(v)) <= 1e-9);
    CHECK(max_abs(cp.cotton) <= 1e-9);
  }

  TEST_CASE("scalar curvature of conformally flat metrics matches the closed form") {
    // e^{2 phi} delta: R = -e^{-2 phi} (2(n-1) Lap phi + (n-2)(n-1) |d phi|^2).
    Rng rng(31);
    for (int t = 0; t < 5; ++t) {
      const int n = 3 + t % 3;
      const Expr phi = random_cubic(rng, n, 0.3);
      const MetricChart c = MetricChart::conformally_flat(n, exp(Expr::constant(2.0) * phi));
      std::vector<double> z(n);
      for (auto& v : z) v = rng.uniform(-0.5, 0.5);
      const oracle::Scalar f = [&](const std::vector<double>& y) { return oracle::eval(phi, y); };
      double lap = 0.0, grad2 = 0.0;
      for (int i = 0; i < n; ++i) {
        lap += oracle::fd_second(f, z, i, i);
        grad2 += std::pow(oracle::fd_first(f, z, i), 2);
      }
      const double expected = -std::exp(-2.0 * f(z)) * (2.0 * (n - 1) * lap + (n - 2.0) * (n - 1) * grad2);
      CHECK(curvature_pack(c, z, 0).scalar.value() == doctest::Approx(expected).epsilon(1e-7));
    }
  }

  TEST_CASE("conformally flat metrics have vanishing Weyl tensor") {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
      const Expr w = random_cubic(rng, 4, 0.3);
      const MetricChart c = conformal_metric(flat(4), w);
      std::vector<double> z(4);
      for (auto& v : z) v = rng.uniform(-0.5, 0.5);
      const CurvaturePack cp = curvature_pack(c, z, 0);
      CHECK(max_abs(cp.weyl) <= 1e-10 * (1.0 + max_abs(cp.riemann)));
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            CHECK(std::abs(cp.cotton(i, j, k).value() - (cp.schouten_gradient(i, j, k).value() -
                                                         cp.schouten_gradient(i, k, j).value())) <= 1e-10);
    }
  }

  TEST_CASE("algebraic symmetries on a generic metric") {
    const PerturbedGeometry pg = perturbed_geometry(5, 5, 3);
    const std::vector<double> z = {0.1, -0.2, 0.3, 0.05, -0.1};
    const CurvaturePack cp = curvature_pack(pg.chart, z, 0);
    const int n = 5;
    const double scale = 1.0 + max_abs(cp.riemann);
    double sym = 0.0, bianchi = 0.0, wtrace = 0.0, ctrace = 0.0, canti = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double wt = 0.0, ct = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            wt += cp.inverse(a, b).value() * cp.weyl(a, i, b, j).value();
            ct += cp.inverse(a, b).value() * cp.cotton(a, b, i).value();
          }
        wtrace = std::max(wtrace, std::abs(wt));
        ctrace = std::max(ctrace, std::abs(ct));
        for (int k = 0; k < n; ++k) {
          canti = std::max(canti, std::abs(cp.cotton(i, j, k).value() + cp.cotton(i, k, j).value()));
          for (int l = 0; l < n; ++l) {
            const double r = cp.riemann(i, j, k, l).value();
            sym = std::max({sym, std::abs(r + cp.riemann(j, i, k, l).value()), std::abs(r + cp.riemann(i, j, l, k).value()),
                            std::abs(r - cp.riemann(k, l, i, j).value())});
            bianchi = std::max(bianchi, std::abs(r + cp.riemann(i, k, l, j).value() + cp.riemann(i, l, j, k).value()));
          }
        }
      }
    CHECK(sym <= 1e-12 * scale);
    CHECK(bianchi <= 1e-12 * scale);
    CHECK(wtrace <= 1e-10 * max_abs(cp.weyl) + 1e-12);
    CHECK(canti <= 1e-12);
    CHECK(ctrace <= 1e-10);
    CHECK(max_abs(cp.weyl) > 1e-4);

    // Lowering then raising an index.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += cp.metric(i, a).value() * cp.inverse(a, j).value();
        CHECK(std::abs(s - (i == j)) <= 1e-12);
      }
  }

  TEST_CASE("conformal rescaling") {
    const std::vector<double> z = {0.1, 0.2, -0.3};
    const MetricChart s = sphere(3);
    const JetTensor a = evaluate_metric(s, z, 2), b = evaluate_metric(conformal_metric(s, Expr::constant(0.0)), z, 2);
    CHECK(max_deviation(a, b) == 0.0);

    const MetricChart four = conformal_metric(flat(3), log(Expr::constant(2.0)));
    const CurvaturePack cp = curvature_pack(four, z, 0);
    CHECK(max_deviation(cp.metric, evaluate_metric(flat(3), z, 4), 4.0) <= 1e-14);
    CHECK(max_abs(cp.riemann) <= 1e-14);
  }

  TEST_CASE("Schouten tensor transformation law") {
    Rng rng(11);
    const PerturbedGeometry pg = perturbed_geometry(8, 4, 2);
    for (int t = 0; t < 5; ++t) {
      const Expr w = random_cubic(rng, 4, 0.3);
      std::vector<double> z(4);
      for (auto& v : z) v = rng.uniform(-0.4, 0.4);
      const CurvaturePack base = curvature_pack(pg.chart, z, 0);
      const CurvaturePack hat = curvature_pack(conformal_metric(pg.chart, w), z, 0);
      const Jet wj = evaluate(w, z, 2);
      double grad2 = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) grad2 += base.inverse(a, b).value() * wj.partial(a) * wj.partial(b);
      double dev = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double hess = wj.partial(i, j);
          for (int k = 0; k < 4; ++k) hess -= base.christoffel(k, i, j).value() * wj.partial(k);
          const double expected = base.schouten(i, j).value() - hess + wj.partial(i) * wj.partial(j) -
                                  0.5 * grad2 * base.metric(i, j).value();
          dev = std::max(dev, std::abs(hat.schouten(i, j).value() - expected));
        }
      CHECK(dev <= 1e-9);
    }
  }

  TEST_CASE("errors") {
    const MetricChart bad = MetricChart::from_rows({{Expr::x(1), Expr::constant(0.0)}, {Expr::constant(0.0), Expr::constant(1.0)}});
    const std::vector<double> z = {0.0, 0.0};
    CHECK_THROWS_AS(curvature_pack(bad, z, 0), NumericError);
    const std::vector<double> z3 = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(curvature_pack(evaluate_metric(sphere(3), z3, 1)), OrderError);
    CHECK_THROWS_AS(MetricChart::from_rows({{Expr::x(1)}, {Expr::x(1), Expr::x(2)}}), SpecError);
  }
}
