#include "nlbvp/scalar_function.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "nlbvp/errors.hpp"

namespace nlbvp {
namespace {

double parse_number(std::string_view text) {
  std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v)) {
    throw StructuralError(fmt::format("bad number '{}' in scalar function", buf));
  }
  return v;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt::format("{:.17g}", v[i]);
  }
  return s;
}

}  // namespace

ScalarFunction ScalarFunction::constant(double c) {
  ScalarFunction f;
  f.kind_ = Kind::Constant;
  f.a_ = {c};
  return f;
}

ScalarFunction ScalarFunction::linear_y2(double c) {
  ScalarFunction f;
  f.kind_ = Kind::LinearY2;
  f.a_ = {c};
  return f;
}

ScalarFunction ScalarFunction::poly(std::vector<double> coeffs) {
  if (coeffs.empty()) throw StructuralError("poly: empty coefficient list");
  ScalarFunction f;
  f.kind_ = Kind::Poly;
  f.a_ = std::move(coeffs);
  return f;
}

ScalarFunction ScalarFunction::radial_power(double c, double alpha) {
  if (!(alpha >= 0.0)) throw StructuralError("rpow: exponent must be >= 0");
  ScalarFunction f;
  f.kind_ = Kind::RadialPower;
  f.a_ = {c, alpha};
  return f;
}

ScalarFunction ScalarFunction::table(std::vector<double> r, std::vector<double> value) {
  if (r.size() < 2 || r.size() != value.size()) {
    throw StructuralError("table: need >= 2 samples with matching r/value lengths");
  }
  // Accept either ordering; store ascending.
  std::vector<std::size_t> idx(r.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return r[i] < r[j]; });
  ScalarFunction f;
  f.kind_ = Kind::Table;
  for (auto i : idx) {
    if (r[i] < 0.0) throw StructuralError("table: negative radius");
    if (!f.a_.empty() && r[i] <= f.a_.back()) throw StructuralError("table: duplicate radius");
    f.a_.push_back(r[i]);
    f.b_.push_back(value[i]);
  }
  return f;
}

ScalarFunction ScalarFunction::custom(std::string label, ValueFn value, GradFn grad) {
  ScalarFunction f;
  f.kind_ = Kind::Custom;
  f.label_ = std::move(label);
  f.value_ = std::move(value);
  f.grad_ = std::move(grad);
  return f;
}

ScalarFunction ScalarFunction::parse(std::string_view text) {
  if (text == "zero") return zero();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw StructuralError(fmt::format("unknown scalar function '{}'", text));
  }
  const auto head = text.substr(0, colon);
  const auto body = text.substr(colon + 1);
  if (head == "const") return constant(parse_number(body));
  if (head == "linear_y2") return linear_y2(parse_number(body));
  if (head == "poly") return poly(parse_list(body));
  if (head == "rpow") {
    const auto v = parse_list(body);
    if (v.size() != 2) throw StructuralError("rpow expects 'rpow:c,alpha'");
    return radial_power(v[0], v[1]);
  }
  throw StructuralError(fmt::format("unknown scalar function kind '{}'", head));
}

double ScalarFunction::radial_value(double r) const {
  switch (kind_) {
    case Kind::Poly: {
      double acc = 0.0;
      for (auto it = a_.rbegin(); it != a_.rend(); ++it) acc = acc * r + *it;
      return acc;
    }
    case Kind::RadialPower:
      return a_[1] == 0.0 ? a_[0] : a_[0] * std::pow(r, a_[1]);
    case Kind::Table: {
      const auto hi = std::upper_bound(a_.begin(), a_.end(), r);
      std::size_t i = static_cast<std::size_t>(hi - a_.begin());
      i = std::clamp<std::size_t>(i, 1, a_.size() - 1);
      if (r > a_.back()) return b_.back();
      const double w = (r - a_[i - 1]) / (a_[i] - a_[i - 1]);
      return b_[i - 1] + w * (b_[i] - b_[i - 1]);
    }
    default:
      return 0.0;
  }
}

double ScalarFunction::radial_slope(double r) const {
  switch (kind_) {
    case Kind::Poly: {
      double acc = 0.0;
      for (std::size_t k = a_.size(); k-- > 1;) acc = acc * r + static_cast<double>(k) * a_[k];
      return acc;
    }
    case Kind::RadialPower:
      return a_[1] == 0.0 ? 0.0 : a_[0] * a_[1] * std::pow(r, a_[1] - 1.0);
    case Kind::Table: {
      if (r > a_.back()) return 0.0;
      const auto hi = std::upper_bound(a_.begin(), a_.end(), r);
      std::size_t i = static_cast<std::size_t>(hi - a_.begin());
      i = std::clamp<std::size_t>(i, 1, a_.size() - 1);
      return (b_[i] - b_[i - 1]) / (a_[i] - a_[i - 1]);
    }
    default:
      return 0.0;
  }
}

double ScalarFunction::operator()(const Vec2& y) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return a_[0];
    case Kind::LinearY2:
      return a_[0] * y.y();
    case Kind::Custom:
      return value_(y);
    default:
      return radial_value(y.norm());
  }
}

Vec2 ScalarFunction::gradient(const Vec2& y) const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::Constant:
      return Vec2::Zero();
    case Kind::LinearY2:
      return Vec2(0.0, a_[0]);
    case Kind::Custom:
      return grad_(y);
    default: {
      const double r = y.norm();
      if (r == 0.0) return Vec2::Zero();
      return radial_slope(r) * y / r;
    }
  }
}

double ScalarFunction::derivative_along(double r, const Vec2& dir) const {
  switch (kind_) {
    case Kind::Poly:
    case Kind::RadialPower:
    case Kind::Table:
      return radial_slope(r);
    default:
      return gradient(r * dir).dot(dir);
  }
}

std::string ScalarFunction::encode() const {
  switch (kind_) {
    case Kind::Zero:
      return "zero";
    case Kind::Constant:
      return fmt::format("const:{:.17g}", a_[0]);
    case Kind::LinearY2:
      return fmt::format("linear_y2:{:.17g}", a_[0]);
    case Kind::Poly:
      return "poly:" + join(a_);
    case Kind::RadialPower:
      return "rpow:" + join(a_);
    case Kind::Table:
      throw std::logic_error("table functions have no string form");
    case Kind::Custom:
      throw std::logic_error("custom function '" + label_ + "' has no string form");
  }
  return {};
}

bool operator==(const ScalarFunction& lhs, const ScalarFunction& rhs) {
  if (lhs.kind_ != rhs.kind_) return false;
  if (lhs.kind_ == ScalarFunction::Kind::Custom) return lhs.label_ == rhs.label_;
  return lhs.a_ == rhs.a_ && lhs.b_ == rhs.b_;
}

}  // namespace nlbvp
