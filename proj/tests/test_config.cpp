#include <gtest/gtest.h>

#include "mactl/config.hpp"

using namespace mactl;

TEST(Config, EmptyTextWithScenarioGivesDefaults) {
  const auto c = parse_config("", "admire");
  EXPECT_EQ(c.scenario, "admire");
  EXPECT_EQ(c.h, 5);
  EXPECT_EQ(c.m, 5);
  EXPECT_EQ(c.lr_num, 0.001);
  EXPECT_EQ(c.lr_schedule, "inv_t");
  EXPECT_EQ(c.burn_in(), 10);
  EXPECT_EQ(c.T, 2000);
}

TEST(Config, ParsesKeysCommentsAndWhitespace) {
  const auto c = parse_config(
      "# comment\n"
      "scenario = two_agent\n"
      "  T=123  \n"
      "\n"
      "profile = random_walk\n"
      "controller = gpc\n"
      "failure_agent = 2\n"
      "lr_num = 2.5e-3\n"
      "regret = true\n");
  EXPECT_EQ(c.scenario, "two_agent");
  EXPECT_EQ(c.T, 123);
  EXPECT_EQ(c.profile, DisturbanceProfile::random_walk);
  EXPECT_EQ(c.controller, ControllerKind::gpc);
  EXPECT_EQ(c.failure_agent, 2);
  EXPECT_EQ(c.lr_num, 2.5e-3);
  EXPECT_TRUE(c.regret);
}

TEST(Config, SerializeRoundTrips) {
  ExperimentConfig c;
  c.scenario = "random";
  c.T = 77;
  c.seed = 18446744073709551615ULL;
  c.lr_num = 0.1 + 0.2;
  c.Tb = 3;
  c.controller = ControllerKind::hinf;
  c.profile = DisturbanceProfile::sinusoidal;
  c.regret = true;
  const auto back = parse_config(serialize_config(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize_config(back), serialize_config(c));
  for (const auto& k : config_keys()) EXPECT_NE(serialize_config(c).find(k + " = "), std::string::npos) << k;
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("T = -1", "admire"), ConfigError);
  EXPECT_THROW(parse_config("T = 10"), ConfigError);  // missing scenario
  EXPECT_THROW(parse_config("bogus = 1", "admire"), ConfigError);
  EXPECT_THROW(parse_config("h = 0", "admire"), ConfigError);
  EXPECT_THROW(parse_config("m = 5000", "admire"), ConfigError);
  EXPECT_THROW(parse_config("T = 12x", "admire"), ConfigError);
  EXPECT_THROW(parse_config("lr_num = fast", "admire"), ConfigError);
  EXPECT_THROW(parse_config("just words", "admire"), ConfigError);
  EXPECT_THROW(parse_config("scenario = mars"), ConfigError);
  EXPECT_THROW(parse_config("profile = custom", "admire"), ConfigError);
  EXPECT_THROW(parse_config("controller = pid", "admire"), ConfigError);
  EXPECT_THROW(parse_config("regret = maybe", "admire"), ConfigError);
}
