#include "egjms/sampling.hpp"

#include "egjms/error.hpp"

namespace egjms {

std::vector<double> sample_point(Rng& rng, const Box& box) {
  std::vector<double> x;
  x.reserve(box.size());
  for (const auto& [lo, hi] : box) x.push_back(rng.uniform(lo, hi));
  return x;
}

Expr random_monomials(Rng& rng, int nvars, int degree, int terms, double scale) {
  Expr acc = Expr::constant(0.0);
  for (int t = 0; t < terms; ++t) {
    Expr m = Expr::constant(rng.uniform(-scale, scale));
    for (int d = 0; d < degree; ++d) m = m * Expr::x(rng.integer(1, nvars));
    acc = acc + m;
  }
  return acc;
}

Expr random_cubic(Rng& rng, int nvars, double scale) {
  Expr acc = Expr::constant(rng.uniform(-scale, scale));
  for (int i = 1; i <= nvars; ++i) acc = acc + Expr::constant(rng.uniform(-scale, scale)) * Expr::x(i);
  acc = acc + random_monomials(rng, nvars, 2, 3, scale);
  return acc + random_monomials(rng, nvars, 3, 3, scale);
}

Expr random_trig_polynomial(Rng& rng, int nvars) {
  Expr acc = Expr::constant(1.0);
  for (int t = 0; t < 3; ++t) {
    Expr arg = Expr::constant(rng.uniform(-3.1, 3.1));
    for (int i = 1; i <= nvars; ++i) {
      const int p = rng.integer(-2, 2);
      if (p != 0) arg = arg + Expr::constant(p) * Expr::x(i);
    }
    acc = acc + Expr::constant(rng.uniform(0.5, 1.5)) * sin(arg);
  }
  return acc;
}

PerturbedGeometry perturbed_geometry(std::uint64_t seed, int n, int k) {
  if (k < 1 || k >= n) throw SpecError("perturbed geometry needs 1 <= k < n");
  Rng rng(seed);
  const Expr factor = exp(Expr::constant(2.0) * random_cubic(rng, n, 0.05));
  std::vector<std::vector<Expr>> rows(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Expr s = random_monomials(rng, n, 1, 1, 0.05) + random_monomials(rng, n, 2, 2, 0.05);
      if (i == j) s = Expr::constant(1.0) + s;
      rows[i][j] = factor * s;
      rows[j][i] = rows[i][j];
    }
  std::vector<Expr> u;
  for (int m = 0; m < n - k; ++m)
    u.push_back(random_monomials(rng, k, 2, 3, 0.3) + random_monomials(rng, k, 3, 2, 0.2));
  return {MetricChart::from_rows(rows), Embedding::graph(k, u)};
}

}  // namespace egjms
