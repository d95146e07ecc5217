// qdcav_cli.cpp — Command-line front end over the C API.
#include <clocale>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "qdcav/qdcav.h"

namespace {

struct ScenarioHandle {
  qdcav_scenario* p{nullptr};
  ~ScenarioHandle() { qdcav_scenario_free(p); }
};

struct OwnedString {
  char* p{nullptr};
  ~OwnedString() { qdcav_string_free(p); }
};

// Status codes double as exit codes; print the reason on the way out.
int fail(qdcav_status status) {
  std::fprintf(stderr, "qdcav: %s: %s\n", qdcav_status_name(status),
               qdcav_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");

  CLI::App app{
      "absorption and emission spectra of a quantum dot in a cavity with "
      "non-perturbative phonon coupling"};
  app.set_version_flag("--version", std::string("qdcav ") + qdcav_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  bool dump_config = false;

  auto* run_cmd = app.add_subcommand(
      "run", "compute spectra and reports from a config file");
  run_cmd->add_option("config", config_path, "scenario config file (JSON)")
      ->required();
  run_cmd->add_option("-o,--output-dir", out_dir,
                      "override the output directory");

  auto* preset_cmd = app.add_subcommand(
      "preset", "run a compiled-in scenario preset (or dump its config)");
  preset_cmd->add_option("name", preset_name, "preset name")->required();
  preset_cmd->add_flag("--dump-config", dump_config,
                       "print the preset's config instead of running it");
  preset_cmd->add_option("-o,--output-dir", out_dir,
                         "override the output directory");

  auto* validate_cmd = app.add_subcommand(
      "validate",
      "check a config and print derived scalars without running spectra");
  validate_cmd->add_option("config", config_path, "scenario config file")
      ->required();

  auto* oracle_cmd = app.add_subcommand(
      "oracle", "cross-check the lineshape against an independent oracle");
  oracle_cmd->add_option("config", config_path, "scenario config file")
      ->required();
  oracle_cmd->add_option("-o,--output-dir", out_dir,
                         "override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(QDCAV_ERR_CONFIG);
  }

  ScenarioHandle scenario;
  qdcav_status status;
  if (preset_cmd->parsed()) {
    status = qdcav_scenario_from_preset(preset_name.c_str(), &scenario.p);
    if (status == QDCAV_ERR_CONFIG) {
      OwnedString names;
      std::fprintf(stderr, "qdcav: %s\n", qdcav_last_error());
      if (qdcav_preset_names(&names.p) == QDCAV_OK)
        std::fprintf(stderr, "available presets:\n%s", names.p);
      return static_cast<int>(status);
    }
  } else {
    status = qdcav_scenario_from_file(config_path.c_str(), &scenario.p);
  }
  if (status != QDCAV_OK) return fail(status);

  if (!out_dir.empty()) {
    status = qdcav_scenario_set_output_dir(scenario.p, out_dir.c_str());
    if (status != QDCAV_OK) return fail(status);
  }

  if (validate_cmd->parsed()) {
    OwnedString text;
    status = qdcav_scenario_validate(scenario.p, nullptr, &text.p);
    if (status != QDCAV_OK) return fail(status);
    std::fputs(text.p, stdout);
    return 0;  // diagnostics only, warnings included
  }

  if (preset_cmd->parsed() && dump_config) {
    OwnedString text;
    status = qdcav_scenario_to_json(scenario.p, &text.p);
    if (status != QDCAV_OK) return fail(status);
    std::fputs(text.p, stdout);
    return 0;
  }

  if (oracle_cmd->parsed()) {
    OwnedString summary;
    status = qdcav_scenario_oracle(scenario.p, &summary.p);
    if (summary.p) std::fputs(summary.p, stdout);
    if (status != QDCAV_OK) return fail(status);
    return 0;
  }

  OwnedString summary;
  status = qdcav_scenario_run(scenario.p, &summary.p, nullptr);
  if (status != QDCAV_OK) return fail(status);
  std::fputs(summary.p, stdout);
  return 0;
}
