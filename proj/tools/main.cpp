#include <algorithm>
#include <cctype>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "panomatch/errors.hpp"

namespace {

using panomatch::cli::RunConfig;

std::string trim_copy(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

/// Expands --config <file> into the equivalent command-line flags. CLI11 only
/// applies config files attached to the top-level command, so the file is
/// folded in here instead: each "key = value" line becomes --key=value unless
/// that flag was already given explicitly, which keeps the flags-win rule.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw panomatch::ValidationError("--config requires a file path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw panomatch::ValidationError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim_copy(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw panomatch::ValidationError("config file " + path + " line " + std::to_string(line_no) +
                                       ": expected key = value");
    const std::string key = trim_copy(stripped.substr(0, eq));
    const std::string value = trim_copy(stripped.substr(eq + 1));
    if (key.empty())
      throw panomatch::ValidationError("config file " + path + " line " + std::to_string(line_no) +
                                       ": empty key");
    bool replaced = false;
    for (auto& entry : entries) {
      if (entry.first == key) {
        entry.second = value;
        replaced = true;
        break;
      }
    }
    if (!replaced) entries.emplace_back(key, value);
  }

  std::unordered_set<std::string> given;
  for (const auto& arg : args) {
    if (arg.rfind("--", 0) != 0) continue;
    const std::size_t eq = arg.find('=');
    given.insert(arg.substr(2, eq == std::string::npos ? std::string::npos : eq - 2));
  }
  for (const auto& [key, value] : entries)
    if (!given.contains(key)) args.push_back("--" + key + "=" + value);
  return args;
}

void add_out(CLI::App* cmd, RunConfig& config, const char* description) {
  cmd->add_option("--out", config.out, description)->required();
}

void add_ridge(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--ridge", config.ridge, "Ridge policy: off, auto, or a nonnegative value");
}

void add_eval_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--n-values", config.n_values, "Recall cutoffs N (comma separated)")->delimiter(',');
  cmd->add_option("--threshold-m", config.threshold_m, "Ground-truth distance threshold in meters");
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const panomatch::ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const panomatch::SingularityError*>(&e)) return "singularity";
  if (dynamic_cast<const panomatch::FormatError*>(&e)) return "format";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Panorama-to-panorama location matching with memory vectors"};
  app.require_subcommand(1);
  RunConfig config;
  std::function<std::string(const RunConfig&)> run;

  // The --config value is consumed by expand_config_args before parsing; the
  // option is registered so every subcommand documents it.
  std::string config_file_shown;
  const auto attach = [&](CLI::App* cmd, std::string (*fn)(const RunConfig&)) {
    cmd->add_option("--config", config_file_shown,
                    "Config file (key = value per line); flags win over file values");
    cmd->callback([&run, fn] { run = fn; });
    return cmd;
  };

  CLI::App* synth = attach(app.add_subcommand("synth", "Generate the synthetic benchmark corpora"),
                           panomatch::cli::cmd_synth);
  synth->add_option("--locations", config.locations, "Number of locations");
  synth->add_option("--views", config.views, "Views per location");
  synth->add_option("--dim", config.dim, "Descriptor dimension");
  synth->add_option("--noise", config.noise, "Per-coordinate view noise scale");
  synth->add_option("--overlap", config.overlap, "Adjacent-view overlap in [0, 1]");
  synth->add_option("--seed", config.seed, "Generator seed");
  add_out(synth, config, "Output directory");

  CLI::App* build = attach(app.add_subcommand("build", "Aggregate a corpus into a memory index"),
                           panomatch::cli::cmd_build);
  build->add_option("--descriptors", config.descriptors, "Dataset descriptor file (PMDV)")->required();
  build->add_option("--metadata", config.metadata, "Dataset metadata CSV");
  build->add_option("--agg", config.agg, "Aggregation: sum, pinv, precomputed");
  build->add_option("--pca", config.pca_model, "PCA model to apply before aggregation (PMPC)");
  add_ridge(build, config);
  add_out(build, config, "Index output path (PMIX)");

  CLI::App* query = attach(app.add_subcommand("query", "Run a matching mode and write ranked lists"),
                           panomatch::cli::cmd_query);
  query->add_option("--mode", config.mode, "Matching mode: im2im, im2pan, pan2im, pan2pan");
  query->add_option("--agg", config.agg, "Aggregation method for panorama sides");
  query->add_option("--query-descriptors", config.query_descriptors, "Query descriptor file")->required();
  query->add_option("--query-metadata", config.query_metadata, "Query metadata CSV")->required();
  query->add_option("--index", config.index_path, "Memory index (PMIX), for *2pan modes");
  query->add_option("--descriptors", config.descriptors, "Dataset descriptors, for *2im modes");
  query->add_option("--metadata", config.metadata, "Dataset metadata CSV, for *2im modes");
  query->add_option("--pca", config.pca_model, "PCA model applied to both sides' descriptors");
  query->add_option("--top", config.top_n, "Ranked-list length per query");
  query->add_flag("--cosine", config.cosine, "L2-normalize both sides before scoring (ablation)");
  add_ridge(query, config);
  add_out(query, config, "Ranked-list CSV output path");

  CLI::App* eval = attach(app.add_subcommand("eval", "Score ranked lists as recall@N"),
                          panomatch::cli::cmd_eval);
  eval->add_option("--ranked", config.ranked_csv, "Ranked-list CSV from the query command")->required();
  eval->add_option("--query-metadata", config.query_metadata, "Query metadata CSV")->required();
  eval->add_option("--metadata", config.metadata, "Dataset metadata CSV")->required();
  add_eval_options(eval, config);
  add_out(eval, config, "Recall CSV output path");

  CLI::App* sample = attach(app.add_subcommand("sample-eval", "Sparse-panorama sampling evaluation"),
                            panomatch::cli::cmd_sample_eval);
  sample->add_option("--query-descriptors", config.query_descriptors, "Query descriptor file")->required();
  sample->add_option("--query-metadata", config.query_metadata, "Query metadata CSV")->required();
  sample->add_option("--index", config.index_path, "Memory index (PMIX)")->required();
  sample->add_option("--metadata", config.metadata, "Dataset metadata CSV")->required();
  sample->add_option("--agg", config.agg, "Aggregation method (must match the index)");
  sample->add_option("--l", config.l_values, "Views sampled per query (comma separated)")->delimiter(',');
  sample->add_option("--reps", config.repetitions, "Sampling repetitions");
  sample->add_option("--seed", config.seed, "Sampling seed");
  sample->add_option("--pca", config.pca_model, "PCA model applied to query descriptors");
  add_eval_options(sample, config);
  add_ridge(sample, config);
  add_out(sample, config, "Sparse-eval CSV output path");

  CLI::App* pca = attach(app.add_subcommand("pca-fit", "Fit a PCA reduction model on descriptors"),
                         panomatch::cli::cmd_pca_fit);
  pca->add_option("--descriptors", config.descriptors, "Training descriptor file (PMDV)")->required();
  pca->add_option("--dim-out", config.dim_out, "Output dimension")->required();
  pca->add_flag("--whiten", config.whiten, "Scale components by inverse singular values");
  add_out(pca, config, "Model output path (PMPC)");

  CLI::App* toy = attach(app.add_subcommand("toy", "Democratization toy demo on the 2D layout"),
                         panomatch::cli::cmd_toy);
  toy->add_option("--bandwidth", config.bandwidth, "Display kernel bandwidth");
  add_ridge(toy, config);
  add_out(toy, config, "Output directory");

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // the vector overload takes reversed args
    app.parse(std::move(args));
    const std::string manifest = run(config);
    std::fprintf(stderr, "wrote %s\n", manifest.c_str());
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = {{"kind", error_kind(e)}, {"message", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
}
