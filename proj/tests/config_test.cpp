#include "mshap/config.hpp"

#include <gtest/gtest.h>

namespace mshap {
namespace {

using Json = nlohmann::ordered_json;

TEST(Config, DefaultsEchoAndReload) {
  RunConfig c;
  c.command = "simulate";
  const Json j = to_json(c);
  const RunConfig back = merge_config(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_EQ(j["combine"]["mu_h"], "auto");
  EXPECT_EQ(j["combine"]["method"], "absolute");
}

TEST(Config, OverlayKeepsUnsetFields) {
  const RunConfig c = merge_config(Json::parse(R"({"seed": 9, "score": {"theta2": 21}})"));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.score.theta2, 21.0);
  EXPECT_EQ(c.score.theta1, 1.5);
  EXPECT_EQ(c.enum_limit, 16);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(merge_config(Json::parse(R"({"sed": 1})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse(R"({"combine": {"alpha": 1}})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse(R"({"simulate": {"n": 10, "extra": true}})")), ConfigError);
}

TEST(Config, WrongTypesRejected) {
  EXPECT_THROW(merge_config(Json::parse(R"({"seed": "nine"})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse(R"({"combine": {"mu_h": "sometimes"}})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse(R"({"combine": {"method": "cubic"}})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse(R"({"simulate": {"y1": ["Y9"]}})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse(R"({"simulate": {"covariates": [[1]]}})")), ConfigError);
}

TEST(Config, MuHAcceptsNumberOrAuto) {
  EXPECT_EQ(*merge_config(Json::parse(R"({"combine": {"mu_h": 2.5}})")).combine.mu_h, 2.5);
  RunConfig base;
  base.combine.mu_h = 1.0;
  EXPECT_FALSE(merge_config(Json::parse(R"({"combine": {"mu_h": "auto"}})"), base).combine.mu_h);
}

TEST(Config, GridCarriesSeedAndLimit) {
  RunConfig c = merge_config(Json::parse(R"({"seed": 77, "enum_limit": 12, "simulate": {"n": 40}})"));
  const GridSpec g = c.grid();
  EXPECT_EQ(g.seed, 77u);
  EXPECT_EQ(g.enumeration_limit, 12);
  EXPECT_EQ(g.n, 40);
  EXPECT_EQ(c.bench_config().enumeration_limit, 12);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), Error);
}

}  // namespace
}  // namespace mshap
