#include <algorithm>
#include <cstdint>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "vers/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "coded computing with inconsistent data owners: simulation, "
      "threshold sweeps, matrix exports, tag collision measurement"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
  std::uint64_t field = 0;
  std::string tag_mode;
  bool reveal = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config JSON file")
        ->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--jobs", jobs,
                    "worker threads (default: available parallelism)");
    sub->add_option("--out", out_dir, "output directory (default: .)");
    sub->add_option("--field", field, "override the field modulus p");
    sub->add_option("--tag-mode", tag_mode,
                    "override the tag mode (oracle|fingerprint)");
  };

  CLI::App* sim =
      app.add_subcommand("simulate", "run one round and decode it");
  add_common(sim);
  sim->add_flag("--reveal-tag-key", reveal,
                "include the fingerprint key in the transcript");
  CLI::App* thr = app.add_subcommand(
      "threshold", "sweep report-subset sizes for the recovery cutoff");
  add_common(thr);
  CLI::App* mat = app.add_subcommand(
      "matrix", "export characteristic/relation matrices and the "
                "permutation report");
  add_common(mat);
  CLI::App* col = app.add_subcommand("tag-collision",
                                     "measure the tag collision rate");
  add_common(col);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  vers::CliOverrides ov;
  if (chosen->count("--seed")) ov.seed = seed;
  if (chosen->count("--field")) ov.field = field;
  if (chosen->count("--tag-mode")) ov.tag_mode = tag_mode;
  ov.reveal_tag_key = reveal;

  const std::string& name = chosen->get_name();
  if (name == "simulate") return vers::cmd_simulate(config_path, ov, out_dir);
  if (name == "threshold") {
    return vers::cmd_threshold(config_path, ov, out_dir, jobs);
  }
  if (name == "matrix") return vers::cmd_matrix(config_path, ov, out_dir);
  return vers::cmd_tag_collision(config_path, ov, out_dir, jobs);
}
