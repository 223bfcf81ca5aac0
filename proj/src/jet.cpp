#include "egjms/jet.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <unordered_map>

#include "egjms/error.hpp"

namespace egjms {

namespace {

constexpr int kMaxDim = 32;
constexpr int kMaxOrder = 16;

std::vector<std::vector<int>> monomials_of_degree(int dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(dim, 0);
  // Lexicographically descending: the first variable carries the most weight.
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == dim - 1) {
      e[var] = remaining;
      out.push_back(e);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      e[var] = a;
      self(self, var + 1, remaining - a);
    }
    e[var] = 0;
  };
  rec(rec, 0, degree);
  return out;
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int v : entries_) {
    if (v < 0) throw OrderError("multi-index entries must be non-negative");
    degree_ += v;
  }
}

MultiIndex MultiIndex::unit(int dim, int var) {
  if (var < 0 || var >= dim) throw OrderError("multi-index variable out of range");
  std::vector<int> e(dim, 0);
  e[var] = 1;
  return MultiIndex(std::move(e));
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int v : entries_)
    for (int i = 2; i <= v; ++i) f *= i;
  return f;
}

JetLayout::JetLayout(int dim, int order) : dim_(dim), order_(order) {
  prefix_.resize(order + 1);
  for (int m = 0; m <= order; ++m) {
    for (auto& e : monomials_of_degree(dim, m)) monomials_.emplace_back(std::move(e));
    prefix_[m] = monomials_.size();
  }
  const std::size_t size = monomials_.size();

  std::unordered_map<std::uint64_t, std::uint32_t> lookup;
  lookup.reserve(size * 2);
  for (std::size_t p = 0; p < size; ++p)
    lookup.emplace(encode(monomials_[p].entries()), static_cast<std::uint32_t>(p));
  std::vector<std::pair<std::uint64_t, std::uint32_t>> sorted(lookup.begin(), lookup.end());
  std::sort(sorted.begin(), sorted.end());
  for (auto& [c, p] : sorted) {
    codes_.push_back(c);
    code_pos_.push_back(p);
  }

  std::vector<std::uint64_t> code(size);
  for (std::size_t p = 0; p < size; ++p) code[p] = encode(monomials_[p].entries());

  for (std::size_t i = 0; i < size; ++i) {
    const int di = monomials_[i].degree();
    const std::size_t limit = prefix_[order - di];
    for (std::size_t j = 0; j < limit; ++j) {
      // Base (order + 1) digits never carry when the total degree is <= order.
      const auto out = lookup.at(code[i] + code[j]);
      products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), out});
    }
  }
  std::stable_sort(products_.begin(), products_.end(),
                   [](const ProductTerm& a, const ProductTerm& b) { return a.out < b.out; });
  product_end_.resize(order + 1);
  for (int m = 0; m <= order; ++m) {
    auto it = std::lower_bound(products_.begin(), products_.end(), prefix_[m],
                               [](const ProductTerm& t, std::size_t v) { return t.out < v; });
    product_end_[m] = static_cast<std::size_t>(it - products_.begin());
  }

  raise_.assign(size * dim, 0);
  std::uint64_t unit = 1;
  std::vector<std::uint64_t> unit_code(dim);
  for (int v = dim - 1; v >= 0; --v) {
    unit_code[v] = unit;
    unit *= static_cast<std::uint64_t>(order + 1);
  }
  for (std::size_t p = 0; p < prefix_[order > 0 ? order - 1 : 0] && order > 0; ++p)
    for (int v = 0; v < dim; ++v) raise_[p * dim + v] = lookup.at(code[p] + unit_code[v]);

  parent_var_.assign(size, -1);
  parent_.assign(size, 0);
  for (std::size_t p = 1; p < size; ++p) {
    const auto& e = monomials_[p].entries();
    int v = 0;
    while (e[v] == 0) ++v;
    parent_var_[p] = v;
    parent_[p] = lookup.at(code[p] - unit_code[v]);
  }
}

std::uint64_t JetLayout::encode(const std::vector<int>& e) const {
  std::uint64_t c = 0;
  for (int v : e) c = c * static_cast<std::uint64_t>(order_ + 1) + static_cast<std::uint64_t>(v);
  return c;
}

const JetLayout& JetLayout::get(int dim, int order) {
  if (dim < 1 || dim > kMaxDim) throw OrderError("jet dimension out of range: " + std::to_string(dim));
  if (order < 0 || order > kMaxOrder) throw OrderError("jet order out of range: " + std::to_string(order));
  static std::array<std::array<std::atomic<const JetLayout*>, kMaxOrder + 1>, kMaxDim + 1> cache{};
  static std::mutex mutex;
  static std::vector<std::unique_ptr<JetLayout>> owned;
  auto& slot = cache[dim][order];
  if (const JetLayout* p = slot.load(std::memory_order_acquire)) return *p;
  std::lock_guard<std::mutex> lock(mutex);
  if (const JetLayout* p = slot.load(std::memory_order_relaxed)) return *p;
  owned.push_back(std::unique_ptr<JetLayout>(new JetLayout(dim, order)));
  slot.store(owned.back().get(), std::memory_order_release);
  return *owned.back();
}

std::size_t JetLayout::position(const MultiIndex& index) const {
  if (index.dim() != dim_) throw OrderError("multi-index dimension does not match jet");
  if (index.degree() > order_) throw OrderError("multi-index degree exceeds jet order");
  const auto c = encode(index.entries());
  auto it = std::lower_bound(codes_.begin(), codes_.end(), c);
  return code_pos_[static_cast<std::size_t>(it - codes_.begin())];
}

std::span<const JetLayout::ProductTerm> JetLayout::products(int m) const {
  return std::span<const ProductTerm>(products_.data(), product_end_[m]);
}

// ---------------------------------------------------------------------------

Jet::Jet(const JetLayout* layout, int order, std::vector<double> coeffs)
    : layout_(layout), order_(order), coeffs_(std::move(coeffs)) {}

Jet Jet::constant(double value, int dim, int order) {
  const auto& L = JetLayout::get(dim, order);
  std::vector<double> c(L.size(), 0.0);
  c[0] = value;
  Jet j(&L, order, std::move(c));
  j.check_finite("constant");
  return j;
}

Jet Jet::variable(int var, double value, int dim, int order) {
  if (var < 0 || var >= dim) throw OrderError("jet variable index out of range");
  Jet j = constant(value, dim, order);
  if (order >= 1) j.coeffs_[1 + var] = 1.0;
  return j;
}

Jet Jet::from_coefficients(std::vector<double> coeffs, int dim, int order) {
  const auto& L = JetLayout::get(dim, order);
  if (coeffs.size() != L.size()) throw OrderError("coefficient count does not match jet layout");
  Jet j(&L, order, std::move(coeffs));
  j.check_finite("from_coefficients");
  return j;
}

Jet jet_variable(int i, double value, int dim, int order) {
  if (i < 1 || i > dim) throw OrderError("jet_variable index out of range");
  return Jet::variable(i - 1, value, dim, order);
}

int Jet::dim() const {
  if (!layout_) throw OrderError("empty jet");
  return layout_->dim();
}

int Jet::order() const {
  if (!layout_) throw OrderError("empty jet");
  return order_;
}

void Jet::check_finite(const char* what) const {
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw NumericError(std::string("non-finite jet coefficient in ") + what);
}

const JetLayout* Jet::common_layout(const Jet& a, const Jet& b, int* order) {
  if (!a.layout_ || !b.layout_) throw OrderError("arithmetic on an empty jet");
  if (a.layout_->dim() != b.layout_->dim()) throw OrderError("jet dimension mismatch");
  if (a.order_ <= b.order_) {
    *order = a.order_;
    return a.layout_;
  }
  *order = b.order_;
  return b.layout_;
}

double Jet::coefficient(const MultiIndex& index) const {
  if (!layout_) throw OrderError("empty jet");
  return coeffs_[layout_->position(index)];
}

double Jet::partial(const MultiIndex& index) const {
  return coefficient(index) * index.factorial();
}

double Jet::partial(int var) const {
  return partial(MultiIndex::unit(dim(), var));
}

double Jet::partial(int var1, int var2) const {
  std::vector<int> e(dim(), 0);
  if (var1 < 0 || var1 >= dim() || var2 < 0 || var2 >= dim())
    throw OrderError("partial variable out of range");
  e[var1] += 1;
  e[var2] += 1;
  return partial(MultiIndex(std::move(e)));
}

Jet Jet::derivative(int var) const {
  if (!layout_) throw OrderError("empty jet");
  if (var < 0 || var >= layout_->dim()) throw OrderError("derivative variable out of range");
  if (order_ == 0) throw OrderError("cannot differentiate an order-0 jet");
  const auto& L = JetLayout::get(layout_->dim(), order_ - 1);
  std::vector<double> c(L.size());
  for (std::size_t p = 0; p < L.size(); ++p) {
    const auto up = layout_->raise(p, var);
    c[p] = coeffs_[up] * (L.monomial(p)[var] + 1);
  }
  return Jet(&L, order_ - 1, std::move(c));
}

Jet Jet::truncated(int order) const {
  if (!layout_) throw OrderError("empty jet");
  if (order > order_) throw OrderError("cannot raise jet order by truncation");
  if (order == order_) return *this;
  const auto& L = JetLayout::get(layout_->dim(), order);
  return Jet(&L, order, std::vector<double>(coeffs_.begin(), coeffs_.begin() + L.size()));
}

Jet& Jet::operator+=(const Jet& other) { return *this = *this + other; }
Jet& Jet::operator-=(const Jet& other) { return *this = *this - other; }
Jet& Jet::operator*=(const Jet& other) { return *this = *this * other; }
Jet& Jet::operator/=(const Jet& other) { return *this = *this / other; }

Jet& Jet::operator+=(double s) {
  if (!layout_) throw OrderError("arithmetic on an empty jet");
  coeffs_[0] += s;
  check_finite("+");
  return *this;
}
Jet& Jet::operator-=(double s) {
  if (!layout_) throw OrderError("arithmetic on an empty jet");
  coeffs_[0] -= s;
  check_finite("-");
  return *this;
}
Jet& Jet::operator*=(double s) {
  if (!layout_) throw OrderError("arithmetic on an empty jet");
  for (double& c : coeffs_) c *= s;
  check_finite("*");
  return *this;
}
Jet& Jet::operator/=(double s) {
  if (!layout_) throw OrderError("arithmetic on an empty jet");
  if (s == 0.0) throw NumericError("division of a jet by zero");
  for (double& c : coeffs_) c /= s;
  check_finite("/");
  return *this;
}

Jet operator-(const Jet& a) {
  if (a.empty()) throw OrderError("arithmetic on an empty jet");
  Jet r = a;
  for (double& c : r.coeffs_) c = -c;
  return r;
}

Jet operator+(const Jet& a, const Jet& b) {
  int m;
  const JetLayout* L = Jet::common_layout(a, b, &m);
  std::vector<double> c(L->size());
  for (std::size_t p = 0; p < c.size(); ++p) c[p] = a.coeffs_[p] + b.coeffs_[p];
  Jet r(L, m, std::move(c));
  r.check_finite("+");
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  int m;
  const JetLayout* L = Jet::common_layout(a, b, &m);
  std::vector<double> c(L->size());
  for (std::size_t p = 0; p < c.size(); ++p) c[p] = a.coeffs_[p] - b.coeffs_[p];
  Jet r(L, m, std::move(c));
  r.check_finite("-");
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  int m;
  const JetLayout* L = Jet::common_layout(a, b, &m);
  std::vector<double> c(L->size(), 0.0);
  const double* x = a.coeffs_.data();
  const double* y = b.coeffs_.data();
  const std::size_t used = L->size_for_order(m);
  auto zero = [used](const double* v) { return std::all_of(v, v + used, [](double d) { return d == 0.0; }); };
  if (zero(x) || zero(y)) return Jet(L, m, std::move(c));
  for (const auto& t : L->products(m)) c[t.out] += x[t.lhs] * y[t.rhs];
  Jet r(L, m, std::move(c));
  r.check_finite("*");
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  int m;
  const JetLayout* L = Jet::common_layout(a, b, &m);
  const double b0 = b.coeffs_[0];
  if (b0 == 0.0) throw NumericError("division by a jet with zero value");
  std::vector<double> c(L->size(), 0.0);
  const double* y = b.coeffs_.data();
  // c * b = a, solved degree by degree; terms with rhs = 0 hold c[out] itself.
  std::vector<double> acc(L->size(), 0.0);
  for (const auto& t : L->products(m)) {
    if (t.rhs == 0) {
      c[t.out] = (a.coeffs_[t.out] - acc[t.out]) / b0;
    } else {
      acc[t.out] += c[t.lhs] * y[t.rhs];
    }
  }
  Jet r(L, m, std::move(c));
  r.check_finite("/");
  return r;
}

Jet operator+(const Jet& a, double s) { Jet r = a; r += s; return r; }
Jet operator+(double s, const Jet& a) { Jet r = a; r += s; return r; }
Jet operator-(const Jet& a, double s) { Jet r = a; r -= s; return r; }
Jet operator-(double s, const Jet& a) { Jet r = -a; r += s; return r; }
Jet operator*(const Jet& a, double s) { Jet r = a; r *= s; return r; }
Jet operator*(double s, const Jet& a) { Jet r = a; r *= s; return r; }
Jet operator/(const Jet& a, double s) { Jet r = a; r /= s; return r; }
Jet operator/(double s, const Jet& a) {
  return Jet::constant(s, a.dim(), a.order()) / a;
}

Jet Jet::compose_series(std::span<const double> series) const {
  if (!layout_) throw OrderError("arithmetic on an empty jet");
  if (static_cast<int>(series.size()) < order_ + 1) throw OrderError("series shorter than jet order");
  Jet delta = *this;
  delta.coeffs_[0] = 0.0;
  Jet r = constant(series[order_], layout_->dim(), order_);
  for (int p = order_ - 1; p >= 0; --p) {
    r = r * delta;
    r.coeffs_[0] += series[p];
  }
  r.check_finite("series composition");
  return r;
}

namespace {

std::vector<double> sin_cos_series(double x, int order, bool is_sin) {
  std::vector<double> s(order + 1);
  const double sv = std::sin(x), cv = std::cos(x);
  // Derivative cycle for sin: sin, cos, -sin, -cos.
  const double cyc_sin[4] = {sv, cv, -sv, -cv};
  const double cyc_cos[4] = {cv, -sv, -cv, sv};
  double fact = 1.0;
  for (int p = 0; p <= order; ++p) {
    if (p > 0) fact *= p;
    s[p] = (is_sin ? cyc_sin[p % 4] : cyc_cos[p % 4]) / fact;
  }
  return s;
}

}  // namespace

Jet sin(const Jet& a) { return a.compose_series(sin_cos_series(a.value(), a.order(), true)); }

Jet cos(const Jet& a) { return a.compose_series(sin_cos_series(a.value(), a.order(), false)); }

Jet exp(const Jet& a) {
  const int J = a.order();
  std::vector<double> s(J + 1);
  s[0] = std::exp(a.value());
  for (int p = 1; p <= J; ++p) s[p] = s[p - 1] / p;
  return a.compose_series(s);
}

Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw NumericError("log of a non-positive jet value");
  const int J = a.order();
  std::vector<double> s(J + 1);
  s[0] = std::log(x);
  double xp = 1.0;
  for (int p = 1; p <= J; ++p) {
    xp *= x;
    s[p] = ((p % 2 == 1) ? 1.0 : -1.0) / (p * xp);
  }
  return a.compose_series(s);
}

Jet sqrt(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw NumericError("sqrt of a non-positive jet value");
  const int J = a.order();
  std::vector<double> s(J + 1);
  s[0] = std::sqrt(x);
  // Binomial series: s_p = s_{p-1} (1/2 - p + 1) / (p x).
  for (int p = 1; p <= J; ++p) s[p] = s[p - 1] * (0.5 - (p - 1)) / (p * x);
  return a.compose_series(s);
}

Jet tanh(const Jet& a) {
  const int J = a.order();
  std::vector<double> y(J + 1, 0.0);
  y[0] = std::tanh(a.value());
  for (int p = 0; p < J; ++p) {
    double sq = 0.0;
    for (int i = 0; i <= p; ++i) sq += y[i] * y[p - i];
    y[p + 1] = ((p == 0 ? 1.0 : 0.0) - sq) / (p + 1);
  }
  return a.compose_series(y);
}

Jet atan(const Jet& a) {
  const int J = a.order();
  const double x = a.value();
  // q = 1 / (1 + (x + t)^2) as a series in t, then integrate.
  const double d0 = 1.0 + x * x, d1 = 2.0 * x, d2 = 1.0;
  std::vector<double> q(J + 1, 0.0);
  for (int p = 0; p <= J; ++p) {
    double v = (p == 0) ? 1.0 : 0.0;
    if (p >= 1) v -= d1 * q[p - 1];
    if (p >= 2) v -= d2 * q[p - 2];
    q[p] = v / d0;
  }
  std::vector<double> s(J + 1);
  s[0] = std::atan(x);
  for (int p = 1; p <= J; ++p) s[p] = q[p - 1] / p;
  return a.compose_series(s);
}

Jet pow(const Jet& a, int exponent) {
  if (a.empty()) throw OrderError("arithmetic on an empty jet");
  if (exponent == 0) return Jet::constant(1.0, a.dim(), a.order());
  const int e = exponent < 0 ? -exponent : exponent;
  Jet r = a;
  for (int i = 1; i < e; ++i) r = r * a;
  if (exponent < 0) return 1.0 / r;
  return r;
}

// ---------------------------------------------------------------------------

JetSubstitution::JetSubstitution(std::span<const Jet> inner, int max_outer_order)
    : max_outer_order_(max_outer_order) {
  if (inner.empty()) throw OrderError("substitution needs at least one inner jet");
  inner_dim_ = inner[0].dim();
  inner_order_ = inner[0].order();
  for (const auto& j : inner) {
    if (j.dim() != inner_dim_) throw OrderError("inner jets must share a dimension");
    inner_order_ = std::min(inner_order_, j.order());
  }
  outer_dim_ = static_cast<int>(inner.size());
  const int m = std::min(max_outer_order, inner_order_);
  max_outer_order_ = m;
  std::vector<Jet> delta;
  for (const auto& j : inner) {
    point_.push_back(j.value());
    Jet d = j.truncated(inner_order_) - j.value();
    delta.push_back(d.truncated(m));
  }
  const auto& L = JetLayout::get(outer_dim_, m);
  monomials_.resize(L.size());
  monomials_[0] = Jet::constant(1.0, inner_dim_, m);
  for (std::size_t p = 1; p < L.size(); ++p)
    monomials_[p] = monomials_[L.parent(p)] * delta[L.parent_var(p)];
}

Jet JetSubstitution::apply(const Jet& outer) const {
  if (outer.dim() != outer_dim_) throw OrderError("outer jet dimension does not match substitution");
  const int m = std::min(outer.order(), max_outer_order_);
  const auto& Lout = JetLayout::get(outer_dim_, m);
  const auto& Lin = JetLayout::get(inner_dim_, m);
  std::vector<double> c(Lin.size(), 0.0);
  const auto oc = outer.coefficients();
  for (std::size_t p = 0; p < Lout.size(); ++p) {
    const double w = oc[p];
    if (w == 0.0) continue;
    const auto mc = monomials_[p].coefficients();
    for (std::size_t q = 0; q < c.size(); ++q) c[q] += w * mc[q];
  }
  return Jet::from_coefficients(std::move(c), inner_dim_, m);
}

}  // namespace egjms
