#include <gtest/gtest.h>

#include <charconv>
#include <random>
#include <sstream>

#include "ppme/config.hpp"
#include "ppme/csv.hpp"

using namespace ppme;

namespace {

bool mentions(const ConfigResult& r, const std::string& key, const std::string& text = "") {
  for (const auto& i : r.issues)
    if (i.key == key && i.message.find(text) != std::string::npos) return true;
  return false;
}

const char* kCustom = R"(
# moderate memory
experiment.preset = custom
system.omega = 1
bath.a = 0.2
bath.gamma = 0.2   # 1/memory time
bath.Omega = 0
grid.t_end = 2
grid.dt = 0.01
run.methods = pp_me, reference
)";

}  // namespace

TEST(Config, PresetDefaults) {
  const auto r = validate_config("experiment.preset = fig1\n");
  ASSERT_TRUE(r.ok()) << format_issue(r.issues.front());
  const auto& c = *r.config;
  EXPECT_EQ(c.omega, 1.0);
  EXPECT_EQ(c.a, 0.8);
  EXPECT_EQ(c.gamma, 0.05);
  EXPECT_EQ(c.center_frequency, 0.0);
  EXPECT_EQ(c.n_trajectories, 5000u);
  EXPECT_EQ(c.t_end, 25.0);
  EXPECT_EQ(c.dt, 0.005);
  EXPECT_EQ(c.initial_state, "2");
  EXPECT_TRUE(c.runs(Method::qsd));
  EXPECT_TRUE(c.runs(Method::pp_me));

  const auto f3 = preset_config("fig3");
  EXPECT_EQ(f3.a, 0.2);
  EXPECT_EQ(f3.gamma, 0.2);
  EXPECT_TRUE(f3.runs(Method::reference));
  EXPECT_EQ(preset_config("fig2").a, 0.8);
  EXPECT_THROW(preset_config("fig4"), InvalidParameterError);
}

TEST(Config, CustomParses) {
  const auto r = validate_config(kCustom);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config->methods, (std::vector{Method::pp_me, Method::reference}));
  EXPECT_EQ(r.config->grid().n_steps(), 200u);
  EXPECT_EQ(r.config->bath().gamma, 0.2);
}

TEST(Config, NegativeGamma) {
  const auto r = validate_config("experiment.preset = custom\nsystem.omega = 1\nbath.a = 0.2\n"
                                 "bath.gamma = -0.2\nbath.Omega = 0\ngrid.t_end = 1\ngrid.dt = 0.1\n"
                                 "run.methods = pp_me\n");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r, "bath.gamma", "> 0"));
  EXPECT_TRUE(mentions(r, "bath.gamma", "frequency units"));
}

TEST(Config, EmptyMethods) {
  const auto r = validate_config("experiment.preset = fig1\nrun.methods = \n");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r, "run.methods", "at least one"));
  EXPECT_TRUE(mentions(validate_config("experiment.preset = fig1\nrun.methods = qsd, magic\n"), "run.methods",
                       "magic"));
}

TEST(Config, UnknownAndMalformed) {
  auto r = validate_config("experiment.preset = fig1\nbath.temperature = 3\n");
  EXPECT_TRUE(mentions(r, "bath.temperature", "unknown key"));
  EXPECT_EQ(r.issues.front().line, 2u);
  r = validate_config("experiment.preset = fig1\njust some words\n");
  EXPECT_FALSE(r.ok());
  r = validate_config("experiment.preset = fig1\nrun.seed = 1\nrun.seed = 2\n");
  EXPECT_TRUE(mentions(r, "run.seed", "duplicate"));
  r = validate_config("experiment.preset = fig9\n");
  EXPECT_TRUE(mentions(r, "experiment.preset", "fig9"));
  r = validate_config("experiment.preset = fig1\ngrid.dt = abc\n");
  EXPECT_TRUE(mentions(r, "grid.dt", "abc"));
  r = validate_config("experiment.preset = fig1\ngrid.t_end = 1\ngrid.dt = 0.3\n");
  EXPECT_TRUE(mentions(r, "grid.dt", "integer"));
}

TEST(Config, PresetFixesPhysics) {
  auto r = validate_config("experiment.preset = fig1\nbath.a = 0.5\n");
  EXPECT_TRUE(mentions(r, "bath.a", "fixed"));
  r = validate_config("experiment.preset = fig1\nbath.a = 0.8\ngrid.t_end = 10\nrun.trajectories = 100\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config->t_end, 10.0);
  EXPECT_EQ(r.config->n_trajectories, 100u);
}

TEST(Config, CustomRequiresEverything) {
  const auto r = validate_config("experiment.preset = custom\nbath.a = 0.1\n");
  EXPECT_FALSE(r.ok());
  for (const char* key : {"system.omega", "bath.gamma", "bath.Omega", "grid.t_end", "grid.dt", "run.methods"}) {
    EXPECT_TRUE(mentions(r, key, "required")) << key;
  }
  EXPECT_FALSE(mentions(r, "bath.a"));
}

TEST(Config, CrossFieldChecks) {
  auto r = validate_config("experiment.preset = fig1\nstate.initial = mixed\n");
  EXPECT_TRUE(mentions(r, "state.initial", "pure"));
  r = validate_config("experiment.preset = fig3\nstate.initial = mixed\n");
  EXPECT_TRUE(r.ok());
  r = validate_config("experiment.preset = fig3\nreference.fock_dim = 5\nreference.check_fock_dim = 5\n");
  EXPECT_TRUE(mentions(r, "reference.check_fock_dim"));
}

TEST(Config, ManifestRoundTrip) {
  auto c = *validate_config(kCustom).config;
  c.seed = 18446744073709551615ull;
  c.workers = 3;
  c.thresholds.negativity_report = 3.3e-7;
  c.dt = 0.1 / 3.0 * 0.3;
  c.t_end = c.dt * 77;
  std::ostringstream out;
  write_config(out, c);
  const auto back = validate_config(out.str());
  ASSERT_TRUE(back.ok()) << format_issue(back.issues.front());
  EXPECT_EQ(*back.config, c);

  const auto preset = preset_config("fig2");
  std::ostringstream out2;
  write_config(out2, preset);
  const auto back2 = validate_config(out2.str());
  ASSERT_TRUE(back2.ok());
  EXPECT_EQ(*back2.config, preset);
}

TEST(Config, OverridesReplaceEntries) {
  RawConfig raw;
  ASSERT_TRUE(parse_config_text("experiment.preset = fig1\nrun.seed = 4\n", raw).issues.empty());
  raw.set("run.seed", "9");
  raw.set("run.methods", "pp_me");
  const auto r = build_config(raw);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config->seed, 9u);
  EXPECT_EQ(r.config->methods, std::vector{Method::pp_me});
}

TEST(Config, ReferenceListsEveryKey) {
  const auto doc = config_reference();
  for (const char* key : {"experiment.preset", "system.omega", "bath.a", "bath.gamma", "bath.Omega", "grid.t_end",
                          "grid.dt", "run.trajectories", "run.seed", "run.output_dir", "run.methods",
                          "run.workers", "state.initial", "reference.fock_dim"}) {
    EXPECT_NE(doc.find(key), std::string::npos) << key;
  }
}

TEST(Csv, Quoting) {
  EXPECT_EQ(quote_csv("plain"), "plain");
  EXPECT_EQ(quote_csv("a,b"), "\"a,b\"");
  EXPECT_EQ(quote_csv("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(quote_csv("two\nlines"), "\"two\nlines\"");
  std::ostringstream out;
  CsvWriter w(out);
  w.row(std::vector<CsvWriter::Field>{1.5, 7LL, std::string("x,y")});
  EXPECT_EQ(out.str(), "1.5,7,\"x,y\"\n");
}

TEST(Csv, DoublesRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, (i % 40) - 20);
    const auto s = format_double(x);
    double y = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), y);
    EXPECT_EQ(x, y) << s;
    EXPECT_EQ(s.find(','), std::string::npos);
  }
}
