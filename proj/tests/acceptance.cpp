// Acceptance criteria: one PASS/FAIL line each. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "egjms/cli.hpp"
#include "egjms/einstein.hpp"
#include "egjms/error.hpp"
#include "egjms/normalform.hpp"
#include "oracles.hpp"

using namespace egjms;

namespace {

struct Measure {
  std::string name;
  double worst = 0.0;
  double tol = 0.0;
  bool ok() const { return worst <= tol; }
};

class Criterion {
 public:
  explicit Criterion(std::deque<Measure>& out) : out_(out) {}
  /// Starts a measurement with the given pinned tolerance.
  Measure& measure(std::string name, double tol) { return out_.emplace_back(Measure{std::move(name), 0.0, tol}); }

 private:
  std::deque<Measure>& out_;
};

void record(Measure& m, double r) {
  // NaN must fail.
  m.worst = std::isnan(r) ? INFINITY : std::max(m.worst, r);
}

GeometrySpec builtin(const char* name) { return *builtin_geometry(name); }

MetricChart sphere_chart(int n) { return MetricChart::conformally_flat(n, oracle::stereo_factor(n)); }

PointGeometry at(const GeometrySpec& s, const std::vector<double>& x) {
  return evaluate_geometry(s.metric, s.embedding, x, 6);
}

std::vector<Jet> random_u4(Rng& rng, const PointGeometry& pg) {
  std::vector<Jet> u;
  for (int m = 0; m < pg.n - pg.k; ++m) u.push_back(sigma_function(random_cubic(rng, pg.k, 1.0), pg.x, 6));
  return u;
}

void factorization_spectra(Criterion& c) {
  auto& eq = c.measure("S2 in S3, m=1..3", 1e-6);
  const GeometrySpec equator = builtin("equator-s2-in-s3");
  const std::vector<Expr> X = oracle::equator_cartesian();
  Rng rng(101);
  for (int m = 1; m <= 3; ++m) {
    const Expr y = oracle::harmonic(m, X);
    const double ev = m * (m + 1.0) * (m - 1.0) * (m + 2.0);
    for (int i = 0; i < 5; ++i) {
      const auto x = sample_point(rng, equator.box);
      const double p = apply_p4(extrinsic_coefficients(at(equator, x), 2), sigma_function(y, x, 6)).value();
      record(eq, oracle::rel(ev * oracle::eval(y, x), p));
    }
  }
  auto& gc = c.measure("S1 in S3, m=1..4", 1e-6);
  const GeometrySpec circle = builtin("great-circle-s1-in-s3");
  for (int m = 1; m <= 4; ++m) {
    const Expr f = cos(Expr::constant(m) * oracle::circle_angle());
    const double ev = (m * m - 0.25) * (m * m - 2.25);
    for (int i = 0; i < 5; ++i) {
      const auto x = sample_point(rng, circle.box);
      const double p = apply_p4(extrinsic_coefficients(at(circle, x), 2), sigma_function(f, x, 6)).value();
      record(gc, oracle::rel(ev * oracle::eval(f, x), p));
    }
  }
}

void critical_q_values(Criterion& c) {
  Rng rng(102);
  const struct {
    const char* geometry;
    int level;
    double expected;
  } cases[] = {{"equator-s2-in-s3", 1, 1.0}, {"clifford-torus", 1, 1.0}, {"sphere5", 2, 6.0}};
  for (const auto& cs : cases) {
    const GeometrySpec s = builtin(cs.geometry);
    auto& m = c.measure(std::string(cs.geometry) + (cs.level == 1 ? " Q2" : " Q4"), 1e-7);
    for (int i = 0; i < 5; ++i) {
      const OperatorCoefficients q = extrinsic_coefficients(at(s, sample_point(rng, s.box)), cs.level);
      record(m, std::abs((cs.level == 1 ? q.q2.value() : q.q4->value()) - cs.expected));
    }
  }
}

void conformal_covariance(Criterion& c) {
  const struct {
    int k, n;
    std::vector<int> levels;
    int critical;  // level of the critical Q law, 0 if none
  } cases[] = {{2, 3, {1, 2}, 1}, {3, 5, {1, 2}, 0}, {4, 6, {2}, 2}};
  for (const auto& cs : cases) {
    const PerturbedGeometry g = perturbed_geometry(1000 + cs.k, cs.n, cs.k);
    Rng rng(103 + cs.k);
    std::vector<Measure*> ms;
    for (int l : cs.levels)
      ms.push_back(&c.measure("P" + std::to_string(2 * l) + " (k=" + std::to_string(cs.k) + ",n=" +
                                  std::to_string(cs.n) + ")",
                              1e-6));
    Measure* mq = cs.critical ? &c.measure("critical Q" + std::to_string(cs.k) + " (n=" + std::to_string(cs.n) + ")", 1e-6)
                              : nullptr;
    for (int w = 0; w < 5; ++w) {
      const CovarianceInput in{&g.chart, &g.embedding, random_cubic(rng, cs.n, 0.1)};
      for (int i = 0; i < 5; ++i) {
        const auto x = sample_point(rng, Box(static_cast<std::size_t>(cs.k), {-0.5, 0.5}));
        const Expr f = random_trig_polynomial(rng, cs.k);
        for (std::size_t j = 0; j < cs.levels.size(); ++j) record(*ms[j], covariance_residual(in, cs.levels[j], f, x));
        if (mq) record(*mq, q_covariance_residual(in, cs.critical, x));
      }
    }
  }
}

void cross_route(Criterion& c) {
  auto& p4 = c.measure("P4f", 1e-8);
  auto& q4 = c.measure("Q4", 1e-8);
  auto& tt = c.measure("T", 1e-8);
  const int dims[][2] = {{3, 5}, {2, 5}, {1, 3}, {3, 6}, {2, 3}};
  Rng rng(104);
  for (int s = 0; s < 20; ++s) {
    const auto [k, n] = dims[s % 5];
    const PerturbedGeometry g = perturbed_geometry(2000 + s, n, k);
    for (int i = 0; i < 5; ++i) {
      const PointGeometry pg =
          evaluate_geometry(g.chart, g.embedding, sample_point(rng, Box(static_cast<std::size_t>(k), {-0.5, 0.5})), 6);
      const Jet f = sigma_function(random_trig_polynomial(rng, k), pg.x, 6);
      const auto u4 = random_u4(rng, pg);
      const OperatorCoefficients closed = extrinsic_coefficients(pg, 2);
      const OperatorCoefficients pipe = run_pipeline(pg, u4).coefficients;
      record(p4, oracle::rel(apply_p4(closed, f).value(), pipeline_apply_p4(pg, u4, f)));
      record(q4, oracle::rel(closed.q4->value(), pipe.q4->value()));
      double dt = 0.0;
      for (std::size_t e = 0; e < closed.T->size(); ++e)
        dt = std::max(dt, std::abs(closed.T->at(e).value() - pipe.T->at(e).value()));
      record(tt, dt / (1.0 + max_abs(*closed.T)));
    }
  }
}

void u4_independence(Criterion& c) {
  auto& q4 = c.measure("Q4", 1e-10);
  auto& p4 = c.measure("P4f", 1e-10);
  auto& h4 = c.measure("h4 + 2 Lo.dU4", 1e-10);
  Rng rng(105);
  auto run = [&](const PointGeometry& pg) {
    const Jet f = sigma_function(random_trig_polynomial(rng, pg.k), pg.x, 6);
    const auto ua = random_u4(rng, pg);
    const auto ub = random_u4(rng, pg);
    const U4Report r = u4_perturbation(pg, ua, ub, f);
    record(q4, r.q4_difference);
    record(p4, r.p4_difference);
    record(h4, r.h4_difference);
  };
  const GeometrySpec torus = builtin("clifford-torus");
  for (int i = 0; i < 5; ++i) run(at(torus, sample_point(rng, torus.box)));
  for (int s = 0; s < 6; ++s) {
    const int k = 1 + s % 3;
    const PerturbedGeometry g = perturbed_geometry(3000 + s, 5, k);
    for (int i = 0; i < 3; ++i)
      run(evaluate_geometry(g.chart, g.embedding, sample_point(rng, Box(static_cast<std::size_t>(k), {-0.5, 0.5})), 6));
  }
}

void gauss_codazzi(Criterion& c) {
  auto& gc1 = c.measure("GC1 (k>=3)", 1e-8);
  auto& gc2 = c.measure("GC2 (k>=3)", 1e-8);
  auto& gct = c.measure("GCtrace (k>=2)", 1e-8);
  auto& dq2 = c.measure("Q2 = Jbar + G", 1e-8);
  auto& dt = c.measure("T = Tbar + Ttilde", 1e-8);
  auto& dq4 = c.measure("Q4 = Q4bar + Q4tilde", 1e-8);
  Rng rng(106);
  for (const auto& name : builtin_names()) {
    const GeometrySpec s = *builtin_geometry(name);
    if (s.k < 2) continue;
    const OperatorOptions opt = s.operator_options();
    for (int i = 0; i < 5; ++i) {
      const PointGeometry pg = at(s, sample_point(rng, s.box));
      const FialkowPack fp = fialkow_pack(pg);
      const IntrinsicCurvature ic = intrinsic_curvature(pg.ext.sigma);
      const auto r = gauss_codazzi_residuals(pg, fp, ic);
      record(gct, r.gc_trace);
      if (s.k < 3) continue;
      record(gc1, r.gc1);
      record(gc2, r.gc2);
      const auto d = decomposition_residual(extrinsic_coefficients(pg, 2, opt), intrinsic_coefficients(pg.ext.sigma, 2, s.n),
                                            tilde_coefficients(pg, fp, ic, opt));
      record(dq2, d.q2);
      record(dt, d.T);
      record(dq4, d.q4);
    }
  }
}

void umbilic(Criterion& c) {
  auto& m = c.measure("P4f - P4bar f", 1e-6);
  const GeometrySpec s = builtin("small-sphere-umbilic");
  const OperatorOptions opt = s.operator_options();
  Rng rng(107);
  for (int i = 0; i < 5; ++i) {
    const auto x = sample_point(rng, s.box);
    const PointGeometry pg = at(s, x);
    const Jet f = sigma_function(random_trig_polynomial(rng, s.k), x, 6);
    const double p = apply_p4(extrinsic_coefficients(pg, 2, opt), f).value();
    const double pb = apply_p4(intrinsic_coefficients(pg.ext.sigma, 2, s.n), f).value();
    record(m, oracle::rel(p, pb));
  }
}

void normalization(Criterion& c) {
  auto& a = c.measure("a1^-1 = -1, a2^-1 = 4", 0.0);
  auto& t = c.measure("tr h2, tr h4 coefficients -1, 8", 1e-10);
  Rng rng(108);
  for (int s = 0; s < 3; ++s) {
    const int k = 2 + s;
    const PerturbedGeometry g = perturbed_geometry(4000 + s, k + 3, k);
    const PointGeometry pg =
        evaluate_geometry(g.chart, g.embedding, sample_point(rng, Box(static_cast<std::size_t>(k), {-0.5, 0.5})), 6);
    const NormalFormCoefficients nf = run_pipeline(pg, zero_u4(pg)).normal_form;
    const TraceConsistency tc = q_trace_consistency(pg.ext.sigma, nf.h2, nf.h4);
    record(a, std::abs(tc.a1_inverse + 1.0) + std::abs(tc.a2_inverse - 4.0));
    record(t, std::abs(tc.q2_tr_h2_coefficient - 1 * tc.a1_inverse));
    record(t, std::abs(tc.q4_tr_h4_coefficient - 2 * tc.a2_inverse));
  }
  auto& p1 = c.measure("P1 = (k/2 - l) Q on built-ins", 1e-9);
  for (const auto& name : builtin_names()) {
    const GeometrySpec s = *builtin_geometry(name);
    const OperatorOptions opt = s.operator_options();
    for (int i = 0; i < 5; ++i) {
      const PointGeometry pg = at(s, sample_point(rng, s.box));
      const Jet one = Jet::constant(1.0, s.k, 6);
      for (int l : {1, 2}) {
        if (!admissible(s.k, s.n, l) && !(l == 2 && opt.conformally_flat_ambient)) continue;
        const OperatorCoefficients q = extrinsic_coefficients(pg, l, opt);
        const double qv = l == 1 ? q.q2.value() : q.q4->value();
        record(p1, std::abs(apply_operator(q, l, one).value() - (s.k / 2.0 - l) * qv));
      }
    }
  }
}

void curvature_engine(Criterion& c) {
  Rng rng(109);
  for (int n : {3, 5}) {
    auto& m = c.measure("unit S" + std::to_string(n), 1e-9);
    for (int i = 0; i < 5; ++i) {
      const CurvaturePack cp = curvature_pack(sphere_chart(n), sample_point(rng, Box(static_cast<std::size_t>(n), {-0.7, 0.7})), 0);
      record(m, std::abs(cp.scalar.value() - n * (n - 1.0)));
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) record(m, std::abs(cp.schouten(a, b).value() - 0.5 * cp.metric(a, b).value()));
      record(m, max_abs(cp.weyl));
      record(m, max_abs(cp.cotton));
      record(m, max_abs(cp.bach));
    }
  }
  auto& j = c.measure("jets vs finite differences", 1e-5);
  for (int t = 0; t < 10; ++t) {
    const Expr e = oracle::random_expression(rng, 3, 3);
    const std::vector<double> x = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const Jet jet = evaluate(e, x, 2);
    const oracle::Scalar f = [&](const std::vector<double>& y) { return oracle::eval(e, y); };
    for (int a = 0; a < 3; ++a) {
      const double d1 = oracle::fd_first(f, x, a);
      record(j, std::abs(jet.partial(a) - d1) / (1.0 + std::abs(d1)));
      for (int b = 0; b < 3; ++b) {
        const double d2 = oracle::fd_second(f, x, a, b);
        record(j, std::abs(jet.partial(a, b) - d2) / (1.0 + std::abs(d2)));
      }
    }
  }
}

}  // namespace

int main() {
  const struct {
    const char* title;
    std::function<void(Criterion&)> run;
  } criteria[] = {
      {"factorization spectra", factorization_spectra},
      {"critical Q values", critical_q_values},
      {"conformal covariance", conformal_covariance},
      {"pipeline vs closed form", cross_route},
      {"U4 independence", u4_independence},
      {"Gauss-Codazzi and decomposition", gauss_codazzi},
      {"umbilic submanifold of a conformally flat ambient", umbilic},
      {"normalization bookkeeping", normalization},
      {"curvature engine", curvature_engine},
  };
  bool all = true;
  int index = 0;
  for (const auto& cr : criteria) {
    ++index;
    std::deque<Measure> ms;
    Criterion c(ms);
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = error.empty() && !ms.empty() && secs < 60.0;
    for (const auto& m : ms) ok = ok && m.ok();
    all = all && ok;
    std::printf("%s C%d %s (%.1f s)\n", ok ? "PASS" : "FAIL", index, cr.title, secs);
    for (const auto& m : ms)
      std::printf("       %-36s worst %.3e  tol %.0e\n", m.name.c_str(), m.worst, m.tol);
    if (!error.empty()) std::printf("       error: %s\n", error.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
