#include <gtest/gtest.h>

#include "run_config.hpp"

namespace skt::cli {
namespace {

RunConfig parse_text(const std::string& text) { return parse_config(YAML::Load(text)); }

std::string error_key(const std::string& text) {
  try {
    parse_text(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

TEST(RunConfig, ParsesFamilyAndParameters) {
  const RunConfig cfg = parse_text(R"(
chart:
  family: mbeta
  beta: 1.5
point: [0, 0, 1, 1]
horizon: 12
seed: 9
integrator: {rel_tol: 1e-11}
output: {report: r.json}
)");
  ASSERT_TRUE(cfg.family.has_value());
  EXPECT_EQ(cfg.family->id(), "mbeta");
  EXPECT_EQ(*cfg.horizon, 12.0);
  EXPECT_EQ(*cfg.seed, 9u);
  EXPECT_EQ(*cfg.rel_tol, 1e-11);
  EXPECT_EQ(*cfg.report_path, "r.json");
  EXPECT_EQ(integrate_options(cfg).rel_tol, 1e-11);
}

TEST(RunConfig, UnknownKeysAreNamed) {
  EXPECT_EQ(error_key("bogus: 1"), "bogus");
  EXPECT_EQ(error_key("chart: {family: mbeta, gamma: 2}"), "chart.gamma");
  EXPECT_EQ(error_key("integrator: {rtol: 1}"), "integrator.rtol");
  EXPECT_EQ(error_key("output: {json: x}"), "output.json");
}

TEST(RunConfig, FamilyHypothesesAreCheckedEarly) {
  EXPECT_EQ(error_key("chart: {family: mbeta, beta: -1}"), "chart");
  EXPECT_EQ(error_key("chart: {family: nope}"), "chart.family");
  EXPECT_EQ(error_key("horizon: -3"), "horizon");
}

TEST(RunConfig, CustomChart) {
  const RunConfig cfg = parse_text(R"yaml(
chart:
  coordinates: [r, s]
  signature: {p: 0, q: 2}
  metric: [["1", "0"], ["0", "exp(2*r)"]]
  guards: ["r > -5"]
point: [0.5, 0]
)yaml");
  const Chart chart = make_chart(cfg);
  EXPECT_EQ(chart.dim(), 2u);
  EXPECT_NEAR(curvature_at(chart, require_point(cfg, chart)).scalar, -2.0, 1e-12);
  const std::string key = error_key("chart: {coordinates: [r], signature: {p: 0, q: 1}, metric: [[\"q\"]]}");
  EXPECT_EQ(key.rfind("chart.metric", 0), 0u) << key;
}

TEST(RunConfig, PointIsValidatedAgainstChart) {
  const RunConfig cfg = parse_text("chart: {family: mbeta}\npoint: [0, 0, -1, 1]");
  const Chart chart = make_chart(cfg);
  try {
    require_point(cfg, chart);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "point");
  }
}

TEST(RunConfig, OverlayReplacesValues) {
  RunConfig base = parse_text("horizon: 3\nseed: 1");
  RunConfig over;
  over.seed = 5;
  merge_into(base, over);
  EXPECT_EQ(*base.seed, 5u);
  EXPECT_EQ(*base.horizon, 3.0);
}

TEST(RunConfig, ListParsing) {
  EXPECT_EQ(parse_list("1, 2.5,-3", "p"), (std::vector<double>{1, 2.5, -3}));
  EXPECT_THROW(parse_list("1,,2", "p"), ConfigError);
  EXPECT_THROW(parse_list("a", "p"), ConfigError);
}

}  // namespace
}  // namespace skt::cli
