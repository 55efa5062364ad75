#include <gtest/gtest.h>

#include <filesystem>

#include "nlbvp/errors.hpp"
#include "nlbvp/examples.hpp"
#include "nlbvp/spec_io.hpp"

using namespace nlbvp;

TEST(SpecIo, EveryShippedExampleRoundTrips) {
  for (const auto& id : examples::spec_ids()) {
    const auto spec = examples::spec(id);
    const auto once = spec_from_json(spec_to_json(spec));
    EXPECT_EQ(once, spec) << id;
    const auto twice = spec_from_json(Json::parse(spec_to_json(once).dump()));
    EXPECT_EQ(twice, once) << id;
    EXPECT_EQ(spec_to_json(twice).dump(), spec_to_json(spec).dump()) << id;
  }
}

TEST(SpecIo, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "nlbvp_spec_io" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const auto spec = examples::spec("two-orbits-mixed");
  save_spec(spec, dir / "spec.json");
  EXPECT_EQ(load_spec(dir / "spec.json"), spec);
  std::filesystem::remove_all(dir.parent_path());
}

TEST(SpecIo, TableFunctionsRoundTrip) {
  const auto f = ScalarFunction::table({0.0, 0.5, 1.0}, {1.0, 0.25, 0.0});
  EXPECT_EQ(function_from_json(function_to_json(f)), f);
  EXPECT_EQ(function_from_json(Json(2.5)), ScalarFunction::constant(2.5));
}

TEST(SpecIo, MalformedInputIsStructural) {
  auto j = spec_to_json(examples::spec("case1"));
  j.erase("orbits");
  EXPECT_THROW(spec_from_json(j), StructuralError);
  j = spec_to_json(examples::spec("case1"));
  j["orbits"][0]["half_openings"][0] = 3.5;
  EXPECT_THROW(spec_from_json(j), StructuralError);
  j = spec_to_json(examples::spec("bitsadze-border"));
  j["exterior_terms"][0]["support"] = "sideways";
  EXPECT_THROW(spec_from_json(j), StructuralError);
  EXPECT_THROW(load_spec("/nonexistent/spec.json"), StructuralError);
}

TEST(SpecIo, UnknownExampleIdThrows) {
  EXPECT_THROW(examples::spec("case4"), std::invalid_argument);
}
