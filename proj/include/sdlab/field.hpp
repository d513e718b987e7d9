#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sdlab {

/// Trigonometric factor of a term. `none` is the constant 1.
enum class Trig { none, cos, sin };

/// c * x^powers * trig(wave . x). Closed under differentiation and products.
struct Term {
  double coeff = 0.0;
  std::vector<int> powers;
  std::vector<double> wave;
  Trig trig = Trig::none;
};

/// Value and all partial derivatives up to order 3 at a point.
/// Arrays are dense and symmetric: d2[i*dim+j], d3[(i*dim+j)*dim+k].
struct ScalarJet {
  int dim = 0;
  double value = 0.0;
  std::vector<double> d1, d2, d3;

  explicit ScalarJet(int dim_ = 0)
      : dim(dim_), d1(dim_, 0.0), d2(dim_ * dim_, 0.0), d3(dim_ * dim_ * dim_, 0.0) {}

  double dx(int i) const { return d1[i]; }
  double dxx(int i, int j) const { return d2[i * dim + j]; }
  double dxxx(int i, int j, int k) const { return d3[(i * dim + j) * dim + k]; }
};

/// Finite sum of terms on R^dim.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(int dim) : dim_(dim) {}

  static ScalarField constant(int dim, double c);
  static ScalarField monomial(int dim, double c, std::vector<int> powers);
  static ScalarField trig(int dim, double c, std::vector<double> wave, Trig kind);

  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add_term(Term t);

  double value(std::span<const double> x) const;
  /// Exact partial derivatives up to `order` (<= 3); higher slots stay zero.
  ScalarJet jet(std::span<const double> x, int order = 3) const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator*=(double s);
  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);

  /// Merge terms with identical (powers, wave, trig) and drop zeros.
  ScalarField simplified() const;

 private:
  int dim_ = 0;
  std::vector<Term> terms_;
};

}  // namespace sdlab
