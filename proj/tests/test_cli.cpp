#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdw/cli/run.hpp"

using namespace sdw;
using namespace sdw::cli;

namespace {

RunConfig config(const std::string& sub, const std::string& metric, const std::string& grid = "") {
  RunConfig c;
  c.subcommand = sub;
  c.metric = metric;
  if (!grid.empty()) c.grid = parse_grid(grid);
  return c;
}

template <class F>
void expect_config_error(F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected ConfigParseError";
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParseError) << e.what();
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

// ------------------------------------------------------------ parsing

TEST(Config, GridAxes) {
  const auto g = parse_grid("r=3:20:5, theta=1.1");
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].coord, "r");
  EXPECT_EQ(g[0].lo, 3.0);
  EXPECT_EQ(g[0].hi, 20.0);
  EXPECT_EQ(g[0].count, 5);
  EXPECT_EQ(g[1].count, 1);
  EXPECT_EQ(g[1].lo, 1.1);
  expect_config_error([] { parse_grid(""); });
  expect_config_error([] { parse_grid("r=1:2"); });
  expect_config_error([] { parse_grid("r=1:2:0"); });
  expect_config_error([] { parse_grid("r=1:2:2.5"); });
  expect_config_error([] { parse_grid("r"); });
}

TEST(Config, RadiiAreLogSpaced) {
  const auto r = parse_radii("10:1000:3");
  ASSERT_EQ(r.size(), 3u);
  EXPECT_DOUBLE_EQ(r[1], 100.0);
  EXPECT_EQ(r.front(), 10.0);
  expect_config_error([] { parse_radii("10:5:3"); });
  expect_config_error([] { parse_radii("0:5:3"); });
  expect_config_error([] { parse_radii("1:5:1"); });
}

TEST(Config, ScalarsAndFormat) {
  expect_config_error([] { parse_double("1.5x", "tol"); });
  expect_config_error([] { parse_double("abc", "tol"); });
  EXPECT_EQ(parse_format("csv"), Format::Csv);
  expect_config_error([] { parse_format("xml"); });
  expect_config_error([] { parse_param("m"); });
  EXPECT_EQ(parse_param(" m = 2 ").second, 2.0);
}

TEST(Config, TextAppliesKeysAndComments) {
  RunConfig c;
  apply_config_text(c,
                    "# comment\n"
                    "subcommand = norms\n"
                    "metric = TaubNUT   # trailing\n"
                    "param = n=2\n"
                    "param = orientation=-1\n"
                    "\n"
                    "tol = 1e-9\n"
                    "format = csv\n");
  EXPECT_EQ(c.subcommand, "norms");
  EXPECT_EQ(c.metric, "TaubNUT");
  EXPECT_EQ(c.params.at("orientation"), -1.0);
  EXPECT_EQ(*c.tol, 1e-9);
  EXPECT_EQ(c.format, Format::Csv);
  expect_config_error([&] { apply_config_text(c, "bogus = 1\n"); });
  expect_config_error([&] { apply_config_text(c, "no equals sign\n"); });
}

TEST(Config, ValidationRejectsBadValues) {
  RunConfig c = config("norms", "EuclideanSchwarzschild");
  c.tol = -1.0;
  expect_config_error([&] { validate(c); });
  c.tol.reset();
  c.fd_step = 0.0;
  expect_config_error([&] { validate(c); });
  c = config("nope", "EuclideanSchwarzschild");
  expect_config_error([&] { validate(c); });
}

TEST(Config, MetricConstruction) {
  RunConfig c = config("norms", "EguchiHanson");
  const int hf = chart_info(CatalogId::EguchiHanson).half_flat_orientation;
  EXPECT_EQ(make_metric(c).orientation, -hf);
  c.params["orientation"] = hf;
  EXPECT_EQ(make_metric(c).orientation, hf);
  c.params["orientation"] = 0.5;
  expect_config_error([&] { make_metric(c); });
  c = config("norms", "EuclideanSchwarzschild");
  c.params["bogus"] = 1.0;
  expect_config_error([&] { make_metric(c); });
  expect_config_error([] { make_metric(config("norms", "Nowhere")); });
}

TEST(Config, GridPointsFollowAxisOrder) {
  const MetricSpec spec = make_spec(CatalogId::EuclideanSchwarzschild, {1.0});
  const auto pts = grid_points(spec, parse_grid("r=3:5:3,theta=0.5:1.5:2"));
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[0][1], 3.0);
  EXPECT_EQ(pts[1][1], 3.0);
  EXPECT_EQ(pts[1][2], 1.5);
  EXPECT_EQ(pts[2][1], 4.0);
  expect_config_error([&] { grid_points(spec, parse_grid("x9=1")); });
  EXPECT_FALSE(grid_points(spec, {}).empty());
}

// ------------------------------------------------------------ serialization

TEST(Serialize, JsonSchemaAndNullForNonFinite) {
  Report r;
  r.config_echo = Json{{"subcommand", "norms"}};
  r.results.push_back(Json{{"a", num(std::nan(""))}, {"b", num(1.5)}});
  r.residual(std::nan(""));
  r.residual(0.25);
  const Json j = Json::parse(to_json(r));
  EXPECT_TRUE(j["results"][0]["a"].is_null());
  EXPECT_EQ(j["summary"]["max_residual"], 0.25);
  EXPECT_TRUE(j["summary"]["pass"].get<bool>());
  EXPECT_EQ(j.begin().key(), "config_echo");
}

TEST(Serialize, CsvFlattensAndQuotes) {
  Report r;
  r.results.push_back(Json{{"point", Json::array({1.0, 2.0})}, {"x", Json{{"y", 0.5}}}, {"s", "a,b"}});
  r.results.push_back(Json{{"point", Json::array({3.0, 4.0})}, {"z", num(INFINITY)}});
  EXPECT_EQ(to_csv(r), "point,x.y,s,z\n1;2,0.5,\"a,b\",\n3;4,,,\n");
}

TEST(Serialize, FailureRecord) {
  Report r;
  r.failure = Failure{"ZeroLambda3", "msg"};
  EXPECT_EQ(exit_code(r), kExitPrecondition);
  EXPECT_EQ(to_csv(r), "error,message\nZeroLambda3,msg\n");
  const Json j = Json::parse(to_json(r));
  EXPECT_FALSE(j["summary"]["pass"].get<bool>());
  EXPECT_EQ(j["summary"]["failure"]["error"], "ZeroLambda3");
}

// ------------------------------------------------------------ subcommands

TEST(Execute, VerifyIdentitySchwarzschildPasses) {
  const Report r = execute(config("verify-identity", "EuclideanSchwarzschild", "r=3:20:3,theta=0.7:2.1:2"));
  EXPECT_EQ(exit_code(r), kExitPass);
  ASSERT_EQ(r.results.size(), 6u);
  EXPECT_LE(r.max_residual, 1e-6);
  EXPECT_TRUE(r.results[0].contains("divV"));
}

TEST(Execute, VerifyIdentityFlatIsPreconditionFailure) {
  const Report r = execute(config("verify-identity", "Flat"));
  EXPECT_EQ(exit_code(r), kExitPrecondition);
  ASSERT_TRUE(r.failure.has_value());
  EXPECT_EQ(r.failure->code, "ZeroLambda3");
  EXPECT_TRUE(r.results.empty());
}

TEST(Execute, DetectKahlerVerdicts) {
  Report r = execute(config("detect-kahler", "AsymmetricBump"));
  ASSERT_EQ(exit_code(r), kExitPass);
  EXPECT_EQ(r.results[0]["verdict"], "Generic");
  r = execute(config("detect-kahler", "EuclideanSchwarzschild"));
  EXPECT_EQ(r.results[0]["verdict"], "ConformallyKahler");
  // a conformal bump over Flat is conformally flat
  r = execute(config("detect-kahler", "ConformalBump"));
  ASSERT_TRUE(r.failure.has_value());
  EXPECT_EQ(r.failure->code, "ZeroLambda3");
}

TEST(Execute, ToleranceFailureGivesExitOne) {
  RunConfig c = config("decay-fit", "EuclideanSchwarzschild");
  c.field = "Omega";
  c.radii = "10:100:4";
  c.expect = -1.0;
  EXPECT_EQ(exit_code(execute(c)), kExitPass);
  c.expect = -3.0;
  EXPECT_EQ(exit_code(execute(c)), kExitTolerance);
  c.field = "bogus";
  EXPECT_EQ(exit_code(execute(c)), kExitPrecondition);
}

TEST(Execute, NormsAndListCatalog) {
  Report r = execute(config("norms", "EuclideanSchwarzschild", "r=4:9:2,theta=1.1"));
  EXPECT_EQ(exit_code(r), kExitPass);
  EXPECT_EQ(r.results.size(), 2u);
  r = execute(config("list-catalog", ""));
  EXPECT_EQ(exit_code(r), kExitPass);
  EXPECT_EQ(r.results.size(), 8u);
}

TEST(Execute, OutputIsDeterministic) {
  RunConfig c = config("verify-identity", "EuclideanSchwarzschild", "r=4:8:2,theta=1.1");
  c.threads = 3;
  const std::string a = to_json(execute(c));
  c.threads = 1;
  EXPECT_EQ(a, to_json(execute(c)));
}

TEST(Execute, RunWritesOutFile) {
  const auto path = std::filesystem::temp_directory_path() / "sdw_cli_test_out.csv";
  RunConfig c = config("norms", "EuclideanSchwarzschild", "r=5,theta=1.1");
  c.format = Format::Csv;
  c.out = path.string();
  EXPECT_EQ(run(c), kExitPass);
  const std::string text = read_file(path);
  EXPECT_EQ(text.rfind("point,Omega,", 0), 0u) << text;
  std::filesystem::remove(path);
}

// ------------------------------------------------------------ binary

#ifdef SDW_CLI_PATH
namespace {
int run_binary(const std::string& args) {
  const std::string cmd = std::string("\"") + SDW_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_binary("list-catalog"), 0);
  EXPECT_EQ(run_binary("verify-identity --metric Flat"), 2);
  EXPECT_EQ(run_binary("norms --grid r=1:2"), 2);
  EXPECT_EQ(run_binary("nonsense"), 2);
  EXPECT_EQ(run_binary("decay-fit --field Omega --radii 10:100:4 --expect -3"), 1);
}

TEST(Binary, FlagsOverrideConfigFile) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto cfg = dir / "sdw_cli_test.cfg";
  const auto out = dir / "sdw_cli_test.json";
  std::ofstream(cfg) << "metric = Flat\ngrid = r=5,theta=1.1\n";
  EXPECT_EQ(run_binary("norms --config " + cfg.string() + " --metric EuclideanSchwarzschild --out " + out.string()), 0);
  const Json j = Json::parse(read_file(out));
  EXPECT_EQ(j["config_echo"]["metric"], "EuclideanSchwarzschild");
  EXPECT_EQ(j["results"].size(), 1u);
  std::filesystem::remove(cfg);
  std::filesystem::remove(out);
}
#endif
