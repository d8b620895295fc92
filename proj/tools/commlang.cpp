// commlang: command-line driver for the community language pipeline.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "commlang/pipeline.hpp"

namespace {

const char* const kDefaultStopwords =
#include "default_stopwords.inc"
    ;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Style and topic characterization of online communities"};
  app.require_subcommand(1);
  std::string config_path;
  std::string workspace;
  std::optional<std::uint64_t> seed_override;
  unsigned threads = 0;
  app.add_option("--config", config_path, "Pipeline configuration (JSON)")->required();
  app.add_option("--workspace", workspace, "Workspace directory (overrides paths.workspace)");
  app.add_option("--seed-override", seed_override, "Replace every seed in the configuration");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  std::string command;
  for (const auto& name : commlang::stage_names())
    app.add_subcommand(name)->callback([&command, name] { command = name; });
  app.add_subcommand("all", "Run every stage in order")->callback([&command] { command = "all"; });

  CLI11_PARSE(app, argc, argv);

  commlang::PipelineConfig config;
  try {
    config = commlang::load_config(config_path);
    if (seed_override) config.set_all_seeds(*seed_override);
  } catch (const commlang::ConfigError& e) {
    std::cerr << "commlang: invalid config: " << e.what() << "\n";
    return 1;
  }

  commlang::thread_count() = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  commlang::Pipeline::default_stopwords_text() = kDefaultStopwords;
  const auto ws = workspace.empty() ? config.resolve(config.workspace) : std::filesystem::path(workspace);
  try {
    commlang::Pipeline pipeline(config, ws);
    pipeline.run(command);
  } catch (const commlang::StageError& e) {
    std::cerr << "commlang: " << command << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "commlang: " << command << ": " << e.what() << "\n";
    return 3;
  }
  return 0;
}
