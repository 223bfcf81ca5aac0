#pragma once

// Truncated multivariate Taylor expansions ("jets").
//
// A jet of dimension d and order J stores c_I = (d^I f)(x0) / I! for every
// multi-index |I| <= J in graded-lexicographic order. Degree-m monomials of a
// layout of order J sit at the same positions in every layout of larger
// order, so a lower-order jet is a prefix of a higher-order one. Binary
// operations truncate to the smaller order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace egjms {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }
  static MultiIndex unit(int dim, int var);

  int dim() const { return static_cast<int>(entries_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return entries_[i]; }
  const std::vector<int>& entries() const { return entries_; }

  /// Product of factorials of the entries.
  double factorial() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
  int degree_ = 0;
};

/// Monomial bookkeeping shared by every jet of a given (dim, order).
/// Instances live for the life of the process.
class JetLayout {
 public:
  struct ProductTerm {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };

  static const JetLayout& get(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return monomials_.size(); }
  /// Number of monomials of degree <= m.
  std::size_t size_for_order(int m) const { return prefix_[m]; }

  const MultiIndex& monomial(std::size_t pos) const { return monomials_[pos]; }
  std::size_t position(const MultiIndex& index) const;

  /// Product terms whose output has degree <= m, ordered by output position.
  std::span<const ProductTerm> products(int m) const;

  /// Position of I + e_var for the monomial at pos, valid while deg(I) < order.
  std::uint32_t raise(std::size_t pos, int var) const {
    return raise_[pos * dim_ + var];
  }

  /// For pos > 0: the first variable with a nonzero exponent and the position
  /// of I - e_var. Used to build monomials incrementally.
  int parent_var(std::size_t pos) const { return parent_var_[pos]; }
  std::uint32_t parent(std::size_t pos) const { return parent_[pos]; }

 private:
  JetLayout(int dim, int order);
  std::uint64_t encode(const std::vector<int>& e) const;

  int dim_;
  int order_;
  std::vector<MultiIndex> monomials_;
  std::vector<std::size_t> prefix_;
  std::vector<std::uint64_t> codes_;  // sorted alongside code_pos_
  std::vector<std::uint32_t> code_pos_;
  std::vector<ProductTerm> products_;
  std::vector<std::size_t> product_end_;
  std::vector<std::uint32_t> raise_;
  std::vector<int> parent_var_;
  std::vector<std::uint32_t> parent_;
};

class Jet {
 public:
  /// An empty placeholder; arithmetic on it throws.
  Jet() = default;

  static Jet constant(double value, int dim, int order);
  /// The coordinate function x_var (zero-based) expanded at value.
  static Jet variable(int var, double value, int dim, int order);
  static Jet from_coefficients(std::vector<double> coeffs, int dim, int order);

  bool empty() const { return layout_ == nullptr; }
  int dim() const;
  int order() const;
  double value() const { return coeffs_.at(0); }
  std::span<const double> coefficients() const { return coeffs_; }

  double coefficient(const MultiIndex& index) const;
  /// d^I f (x0) = I! c_I.
  double partial(const MultiIndex& index) const;
  /// Shorthand for first and second partials at the expansion point.
  double partial(int var) const;
  double partial(int var1, int var2) const;

  /// d/dx_var as a jet of one order less.
  Jet derivative(int var) const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Jet& other);
  Jet& operator/=(const Jet& other);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator-(const Jet& a);
  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  friend Jet sin(const Jet& a);
  friend Jet cos(const Jet& a);
  friend Jet exp(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet sqrt(const Jet& a);
  friend Jet tanh(const Jet& a);
  friend Jet atan(const Jet& a);
  friend Jet pow(const Jet& a, int exponent);

  /// f(x0 + delta) composed with delta = inner - inner.value(): the
  /// univariate series coefficients a_p of f at the value, summed by Horner.
  Jet compose_series(std::span<const double> series) const;

 private:
  Jet(const JetLayout* layout, int order, std::vector<double> coeffs);
  void check_finite(const char* what) const;
  static const JetLayout* common_layout(const Jet& a, const Jet& b, int* order);

  const JetLayout* layout_ = nullptr;
  int order_ = 0;
  std::vector<double> coeffs_;
};

Jet operator+(const Jet& a, double s);
Jet operator+(double s, const Jet& a);
Jet operator-(const Jet& a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(const Jet& a, double s);
Jet operator*(double s, const Jet& a);
Jet operator/(const Jet& a, double s);
Jet operator/(double s, const Jet& a);

/// The coordinate jet for variable i (one-based, 1 <= i <= dim).
Jet jet_variable(int i, double value, int dim, int order);

/// Substitutes x-jets for the variables of z-jets expanded at the values of
/// those x-jets. The monomials of (inner - value) are built once and reused
/// for every outer jet.
class JetSubstitution {
 public:
  JetSubstitution(std::span<const Jet> inner, int max_outer_order);

  Jet apply(const Jet& outer) const;
  std::span<const double> point() const { return point_; }

 private:
  int outer_dim_;
  int inner_dim_;
  int inner_order_;
  int max_outer_order_;
  std::vector<double> point_;
  std::vector<Jet> monomials_;  // indexed by outer layout position
};

}  // namespace egjms
