#include <gtest/gtest.h>

#include <algorithm>

#include "nlbvp/classifier.hpp"
#include "nlbvp/errors.hpp"
#include "nlbvp/examples.hpp"
#include "support.hpp"

using namespace nlbvp;
using namespace nlbvp::classifier;
using testing_support::spec_with;

namespace {

const Obligation& find(const Verdict& v, const std::string& id, int orbit = 0) {
  const auto it = std::find_if(v.obligations.begin(), v.obligations.end(),
                               [&](const Obligation& o) { return o.id == id && o.orbit_id == orbit; });
  if (it == v.obligations.end()) throw std::runtime_error("missing obligation " + id);
  return *it;
}

ProblemSpec border_with_coefficient(ScalarFunction a) {
  auto s = examples::halfplane_spec(0.0);
  s.exterior_terms.push_back(testing_support::exterior_on_side1(std::move(a)));
  return s;
}

}  // namespace

TEST(Classify, PositiveSumPreserves) {
  const auto v = classify(examples::spec("case1"));
  EXPECT_EQ(v.kind, Kind::Preserves);
  EXPECT_TRUE(v.obligations.empty());
  EXPECT_FALSE(v.witness.has_value());
  EXPECT_FALSE(v.obligations_met.has_value());
  EXPECT_TRUE(v.per_orbit[0].eigenvalues.empty());
}

TEST(Classify, ZeroSumIsBorderWithAllObligationsMet) {
  for (const char* id : {"case2", "dirichlet", "bitsadze-border"}) {
    const auto v = classify(examples::spec(id));
    EXPECT_EQ(v.kind, Kind::Border) << id;
    ASSERT_TRUE(v.obligations_met.has_value()) << id;
    EXPECT_TRUE(*v.obligations_met) << id;
    for (const auto& o : v.obligations) {
      EXPECT_TRUE(o.status == Status::Satisfied || o.status == Status::NotChecked) << id << " " << o.id;
    }
    EXPECT_EQ(find(v, "null-vector-cross-check").status, Status::Satisfied);
    EXPECT_FALSE(v.witness.has_value());
  }
}

TEST(Classify, NegativeSumViolatesWithWitness) {
  const auto v = classify(examples::spec("case3"));
  EXPECT_EQ(v.kind, Kind::Violates);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_NEAR(v.witness->lambda0().imag(), -2.0 / 3.0, 1e-9);
  EXPECT_EQ(v.witness->log_power(), 0);
}

TEST(Classify, WitnessCanBeSkipped) {
  ClassifyOptions opt;
  opt.build_witness = false;
  EXPECT_FALSE(classify(examples::spec("case3"), opt).witness.has_value());
}

TEST(Classify, WorstOrbitDecides) {
  const auto v = classify(examples::spec("two-orbits-mixed"));
  EXPECT_EQ(v.kind, Kind::Violates);
  ASSERT_EQ(v.orbit_kinds.size(), 2u);
  EXPECT_EQ(v.orbit_kinds[0], Kind::Border);
  EXPECT_EQ(v.orbit_kinds[1], Kind::Violates);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->orbit_id(), 1);
}

TEST(Classify, LinearCoefficientFailsDerivativeObligation) {
  const auto v = classify(border_with_coefficient(ScalarFunction::linear_y2(1.0)));
  EXPECT_EQ(v.kind, Kind::Border);
  const auto& d = find(v, "a-derivative-vanishes-at-vertex");
  EXPECT_EQ(d.label, "∂a/∂y₂(0)=0");
  EXPECT_EQ(d.status, Status::Failed);
  EXPECT_EQ(find(v, "a-vanishes-at-vertex").status, Status::Satisfied);
  EXPECT_EQ(find(v, "admissible-pairs").status, Status::Failed);
  ASSERT_TRUE(v.obligations_met.has_value());
  EXPECT_FALSE(*v.obligations_met);
}

TEST(Classify, NonzeroCoefficientFailsVertexObligation) {
  const auto v = classify(border_with_coefficient(ScalarFunction::constant(1.0)));
  EXPECT_EQ(find(v, "a-vanishes-at-vertex").status, Status::Failed);
  EXPECT_FALSE(v.obligations_met.value_or(true));
}

TEST(Classify, InconsistentDataFailsDataObligation) {
  auto s = examples::spec("case2");
  s.rhs.boundary = {{0, {0, 2}, ScalarFunction::linear_y2(1.0)}};
  const auto v = classify(s);
  EXPECT_EQ(v.kind, Kind::Border);
  EXPECT_EQ(find(v, "data-consistency").status, Status::Failed);
  EXPECT_EQ(find(v, "admissible-pairs").status, Status::NotChecked);
  EXPECT_FALSE(v.obligations_met.value_or(true));
}

TEST(Classify, ObligationsCanBeSkipped) {
  ClassifyOptions opt;
  opt.check_obligations = false;
  const auto v = classify(examples::spec("case2"), opt);
  EXPECT_EQ(v.kind, Kind::Border);
  EXPECT_TRUE(v.obligations.empty());
}

TEST(Classify, KindDependsOnlyOnVertexValues) {
  // Profiles with the same value at the vertex give the same frozen model.
  for (auto [b1, b2] : {std::pair{0.5, 0.5}, std::pair{0.5, -0.5}, std::pair{-0.5, -0.5}}) {
    const auto plain = classify(spec_with(halfplane_rotation_model(b1, b2))).kind;
    OrbitModel m = halfplane_rotation_model(b1, b2);
    for (auto& t : m.terms) {
      if (t.is_identity()) continue;
      t.weight_profile = ScalarFunction::poly({t.weight_at_vertex, 0.3, -0.7});
    }
    EXPECT_EQ(classify(spec_with(m)).kind, plain) << b1 << " " << b2;
  }
}

TEST(Classify, ExteriorTermsDoNotChangeTheKind) {
  ClassifyOptions opt;
  opt.build_witness = false;
  auto s = examples::spec("case3");
  s.exterior_terms.push_back(testing_support::exterior_on_side1(ScalarFunction::constant(3.0)));
  EXPECT_EQ(classify(s, opt).kind, Kind::Violates);
  s = examples::spec("case1");
  s.exterior_terms.push_back(testing_support::exterior_on_side1(ScalarFunction::constant(3.0)));
  EXPECT_EQ(classify(s).kind, Kind::Preserves);
}

TEST(Classify, InvalidSpecIsStructural) {
  auto s = examples::spec("case1");
  s.orbits[0].half_openings[0] = -1.0;
  EXPECT_THROW(classify(s), StructuralError);
}

TEST(KindNames, AreStable) {
  EXPECT_STREQ(to_string(Kind::Preserves), "Preserves");
  EXPECT_STREQ(to_string(Kind::Border), "Border");
  EXPECT_STREQ(to_string(Kind::Violates), "Violates");
  EXPECT_STREQ(to_string(Status::Failed), "FAILED");
}
