#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "nlfp/app.hpp"
#include "nlfp/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal fully nonlinear Dirichlet solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string report_path, field_path;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "Solve the configured problem and dump the field"},
      {"verify-ball", "Solve the ball benchmark and compare with the closed form"},
      {"study", "Convergence study over study.h"},
      {"diagnose", "Flat regions, boundary gradient and barrier check on a field dump"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "Run configuration file")->required();
    sub->add_option("-s,--set", sets, "Override a key: section.key=value");
    sub->add_option("-r,--report", report_path, "Report path (overrides output.report)");
    sub->add_option("-f,--field", field_path, "Field dump path (overrides output.field)");
  }
  app.add_subcommand("keys", "List the accepted configuration keys");

  CLI11_PARSE(app, argc, argv);
  const CLI::App* chosen = app.get_subcommands().front();
  if (chosen->get_name() == "keys") {
    for (const auto& k : nlfp::config_keys()) std::cout << k << "\n";
    return nlfp::kExitOk;
  }

  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "--set expects key=value, got '" << s << "'\n";
      return nlfp::kExitUsage;
    }
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!report_path.empty()) overrides.emplace_back("output.report", report_path);
  if (!field_path.empty()) overrides.emplace_back("output.field", field_path);

  std::string text;
  try {
    text = nlfp::read_file(config_path);
  } catch (const nlfp::IoError& e) {
    std::cerr << e.what() << "\n";
    return nlfp::kExitIo;
  }
  nlfp::RunConfig cfg;
  try {
    cfg = nlfp::parse_config(text, overrides);
  } catch (const nlfp::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return nlfp::kExitUsage;
  }
  return nlfp::run(chosen->get_name(), cfg, std::cout, std::cerr);
}
