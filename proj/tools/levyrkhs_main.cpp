#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "levyrkhs/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"levyrkhs: jump-density estimation from density data"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run = app.add_subcommand("run", "execute the experiment in a JSON config");
  run->add_option("config", run_config, "path to config.json")->required();

  std::string check_config;
  auto* validate = app.add_subcommand("validate", "check a JSON config without running it");
  validate->add_option("config", check_config, "path to config.json")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return levyrkhs::run_config_file(run_config);
  }
  const auto errors = levyrkhs::validate_config_file(check_config);
  if (errors.empty()) {
    std::printf("ok\n");
    return 0;
  }
  for (const auto& e : errors) std::fprintf(stderr, "config error: %s\n", e.c_str());
  return 2;
}
