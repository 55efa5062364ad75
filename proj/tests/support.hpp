#pragma once

// Small builders shared by the unit tests.

#include <cmath>
#include <random>
#include <string>

#include "nlbvp/geometry.hpp"

namespace testing_support {

inline nlbvp::ProblemSpec spec_with(const nlbvp::OrbitModel& model, std::string name = "test") {
  nlbvp::ProblemSpec s;
  s.name = std::move(name);
  s.orbits = {model};
  s.rhs.volume = nlbvp::ScalarFunction::constant(1.0);
  return s;
}

inline nlbvp::ExteriorTerm exterior_on_side1(nlbvp::ScalarFunction a, double radius = 0.5) {
  nlbvp::ExteriorTerm e;
  e.side = {0, 1};
  e.coefficient = std::move(a);
  e.radius = radius;
  return e;
}

/// c0 + c1 y1 + c2 y2 + c3 y1 y2 + c4 sin(k y2 + p) + c5 exp(q y1), with its gradient.
inline nlbvp::ScalarFunction random_smooth(std::mt19937_64& rng, const std::string& label) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c0 = u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng), c4 = u(rng), c5 = u(rng);
  const double k = 1.0 + 2.0 * std::abs(u(rng)), p = u(rng), q = u(rng);
  return nlbvp::ScalarFunction::custom(
      label,
      [=](const nlbvp::Vec2& y) {
        return c0 + c1 * y.x() + c2 * y.y() + c3 * y.x() * y.y() + c4 * std::sin(k * y.y() + p) +
               c5 * std::exp(q * y.x());
      },
      [=](const nlbvp::Vec2& y) {
        return nlbvp::Vec2(c1 + c3 * y.y() + c5 * q * std::exp(q * y.x()),
                           c2 + c3 * y.x() + c4 * k * std::cos(k * y.y() + p));
      });
}

}  // namespace testing_support
