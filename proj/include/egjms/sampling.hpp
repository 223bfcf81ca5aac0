#pragma once

// Seeded random inputs: sample points, test functions, conformal factors and
// perturbed geometries. Everything is a pure function of the generator state.

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "egjms/expr.hpp"
#include "egjms/geometry.hpp"
#include "egjms/submanifold.hpp"

namespace egjms {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

 private:
  std::mt19937_64 engine_;
};

using Box = std::vector<std::pair<double, double>>;

std::vector<double> sample_point(Rng& rng, const Box& box);

/// Sum of `terms` random monomials of exactly the given degree in x1..x_nvars.
Expr random_monomials(Rng& rng, int nvars, int degree, int terms, double scale);
/// c0 + linear terms in every variable + a few quadratic and cubic monomials.
Expr random_cubic(Rng& rng, int nvars, double scale);
/// 1 + sum of three sin(p.x + phi) with small integer frequencies.
Expr random_trig_polynomial(Rng& rng, int nvars);

struct PerturbedGeometry {
  MetricChart chart;
  Embedding embedding;
};

/// g = e^{2 w0} (delta + S) with |coefficients of S| <= 0.05 and a graph
/// submanifold with random quadratic and cubic terms. Not conformally flat
/// for n >= 4, not Einstein, not minimal.
PerturbedGeometry perturbed_geometry(std::uint64_t seed, int n, int k);

}  // namespace egjms
