// Command-line front end: sdw <subcommand> [options]

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdw/cli/run.hpp"

int main(int argc, char** argv) {
  using namespace sdw::cli;
  CLI::App app{"Self-dual Weyl identity and conformally Kaehler checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> flags;
  std::vector<std::string> params;
  auto add_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value file; flags override it");
    for (const char* key : {"metric", "grid", "tol", "fd-step", "format", "out", "threads", "field", "expect", "radii",
                            "family", "quantity", "resolution"}) {
      sub->add_option_function<std::string>(std::string("--") + key,
                                            [&flags, key](const std::string& v) { flags[key] = v; });
    }
    sub->add_option("--param", params, "metric parameter key=value (repeatable)");
  };
  for (const std::string& name : subcommands()) add_options(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitPrecondition;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    for (const auto& [k, v] : flags) apply_key(cfg, k, v);
    for (const auto& p : params) apply_key(cfg, "param", p);
  } catch (const sdw::GeometryError& e) {
    // report the parse failure through the normal serializer
    cfg.subcommand = app.get_subcommands().front()->get_name();
    Report rep;
    rep.config_echo = config_echo(cfg);
    rep.failure = Failure{std::string(sdw::to_string(e.code())), e.what()};
    std::cout << serialize(rep, cfg.format);
    return kExitPrecondition;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  return run(cfg);
}
