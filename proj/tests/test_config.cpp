#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "plap/config.hpp"

using namespace plap;

TEST(Config, DefaultsRoundTrip) {
  const RunConfig a;
  EXPECT_EQ(parse_config(serialize_config(a)), a);
}

TEST(Config, EditedConfigRoundTripsLosslessly) {
  RunConfig a;
  set_config_value(a, "p", "1.7");
  set_config_value(a, "T", "6.283185307179586");
  set_config_value(a, "m.kind", "piecewise");
  set_config_value(a, "m.params", "1,2.5,-0.3");
  set_config_value(a, "f.family", "a7");
  set_config_value(a, "f.params", "t2:-2,t1:-1,s1:1,s2:2");
  set_config_value(a, "cont.lambda_hi", "0.1");
  set_config_value(a, "sweep.p_list", "1.5,2,3");
  set_config_value(a, "verify.checks", "eigen.residual,sturm.comparison");
  set_config_value(a, "q.samples", "1,2,3,4");
  set_config_value(a, "rng_seed", "42");
  const RunConfig b = parse_config(serialize_config(a));
  EXPECT_EQ(b, a);
  EXPECT_EQ(serialize_config(b), serialize_config(a));
  EXPECT_EQ(b.q.kind, "samples");
  EXPECT_EQ(b.verify_checks.size(), 2u);
}

TEST(Config, RealFormattingIsShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    EXPECT_EQ(std::stod(format_real(x)), x);
  }
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(2.0), "2");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Config, UnknownKeysAreRejectedByName) {
  RunConfig c;
  try {
    set_config_value(c, "solver.tolerance", "1");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("solver.tolerance"), std::string::npos);
  }
  EXPECT_THROW(parse_config("p = 2\nbogus = 1\n"), ConfigError);
}

TEST(Config, MalformedValuesAreRejected) {
  RunConfig c;
  EXPECT_THROW(set_config_value(c, "p", "two"), ConfigError);
  EXPECT_THROW(set_config_value(c, "N", "12.5"), ConfigError);
  EXPECT_THROW(parse_config("p 2\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/plap.conf"), ConfigError);
}

TEST(Config, CommentsAndBlankLinesAreIgnored) {
  const RunConfig c = parse_config("# comment\n\n  p = 3  \nN=64\n");
  EXPECT_EQ(c.p, 3.0);
  EXPECT_EQ(c.N, 64u);
}

TEST(Config, BuildersValidate) {
  RunConfig c;
  c.p = 1.0;
  EXPECT_THROW(c.problem(), ConfigError);
  c = RunConfig{};
  c.cont_from = "middle";
  EXPECT_THROW(c.seed_kind(), ConfigError);
  c = RunConfig{};
  c.count_signs = "odd";
  EXPECT_THROW(c.count_options(1), ConfigError);
  c = RunConfig{};
  c.f_family = "rational";
  c.f_params = {{"a", 1.0}, {"b", 2.0}};
  EXPECT_EQ(c.nonlinearity().finf(), 2.0);
}

TEST(Config, CoefficientKinds) {
  RunConfig c;
  set_config_value(c, "m.kind", "cosine");
  set_config_value(c, "m.params", "0,1,1");
  c.N = 8;
  const ProblemSpec spec = c.problem();
  EXPECT_NEAR(spec.m()[0], 1.0, 1e-15);
  EXPECT_NEAR(spec.m()[4], -1.0, 1e-15);
  set_config_value(c, "m.kind", "wavy");
  EXPECT_THROW(c.problem(), ConfigError);
}
