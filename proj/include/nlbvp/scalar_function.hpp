#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace nlbvp {

using Vec2 = Eigen::Vector2d;

/// Real scalar field near a vertex, evaluated in the local frame y.
///
/// Built-in forms carry analytic gradients. Tables are radial (depend on
/// |y| only) and piecewise linear in r.
class ScalarFunction {
 public:
  using ValueFn = std::function<double(const Vec2&)>;
  using GradFn = std::function<Vec2(const Vec2&)>;

  ScalarFunction() = default;  // identically zero

  static ScalarFunction zero() { return {}; }
  static ScalarFunction constant(double c);
  static ScalarFunction linear_y2(double c);
  static ScalarFunction poly(std::vector<double> coeffs);  // sum c_k r^k
  static ScalarFunction radial_power(double c, double alpha);  // c r^alpha
  static ScalarFunction table(std::vector<double> r, std::vector<double> value);
  static ScalarFunction custom(std::string label, ValueFn value, GradFn grad);

  /// Parses "zero", "const:c", "linear_y2:c", "poly:c0,c1,...", "rpow:c,alpha".
  static ScalarFunction parse(std::string_view text);

  double operator()(const Vec2& y) const;
  Vec2 gradient(const Vec2& y) const;

  /// Value and derivative along the ray y = r * dir (dir a unit vector).
  double along(double r, const Vec2& dir) const { return (*this)(r * dir); }
  /// One-sided at r = 0 for radial kinds.
  double derivative_along(double r, const Vec2& dir) const;

  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_table() const { return kind_ == Kind::Table; }
  bool is_custom() const { return kind_ == Kind::Custom; }

  /// String form accepted by parse(); tables and custom callables have none.
  std::string encode() const;

  const std::vector<double>& table_r() const { return a_; }
  const std::vector<double>& table_values() const { return b_; }

  /// Structural equality; custom functions compare by label.
  friend bool operator==(const ScalarFunction& lhs, const ScalarFunction& rhs);

 private:
  enum class Kind { Zero, Constant, LinearY2, Poly, RadialPower, Table, Custom };

  double radial_value(double r) const;
  double radial_slope(double r) const;

  Kind kind_ = Kind::Zero;
  std::vector<double> a_;
  std::vector<double> b_;
  std::string label_;
  ValueFn value_;
  GradFn grad_;
};

}  // namespace nlbvp
