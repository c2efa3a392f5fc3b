#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace panomatch::cli {

/// Everything a command run can be configured with. Commands read the
/// subset they need; unused fields are ignored.
struct RunConfig {
  // input paths
  std::string descriptors;        // dataset descriptor file (PMDV)
  std::string metadata;           // dataset metadata CSV
  std::string query_descriptors;  // query descriptor file (PMDV)
  std::string query_metadata;     // query metadata CSV
  std::string index_path;         // memory index file (PMIX)
  std::string pca_model;          // PCA model to apply before matching (PMPC)
  std::string ranked_csv;         // ranked-list CSV (input of eval)

  // output location: a directory for multi-file commands, a file otherwise
  std::string out;

  // matching setup
  std::string mode = "pan2pan";
  std::string agg = "pinv";
  std::string ridge = "auto";  // "off", "auto", or a nonnegative number
  std::size_t top_n = 20;
  bool cosine = false;

  // evaluation
  std::vector<std::size_t> n_values = {1, 5, 10, 20};
  double threshold_m = 25.0;

  // sparse sampling
  std::vector<std::size_t> l_values = {2, 4, 6, 8};
  std::size_t repetitions = 10;

  // pca
  std::size_t dim_out = 0;
  bool whiten = false;
  bool no_renormalize = false;

  // synth generator
  std::size_t locations = 200;
  std::size_t views = 8;
  std::size_t dim = 64;
  double noise = 0.1;
  double overlap = 0.5;

  // toy demo
  double bandwidth = 25.0;

  std::uint64_t seed = 1;
};

/// Each command returns the manifest path it wrote. Errors propagate as
/// exceptions; main() renders them as JSON on stderr.
std::string cmd_synth(const RunConfig& config);
std::string cmd_build(const RunConfig& config);
std::string cmd_query(const RunConfig& config);
std::string cmd_eval(const RunConfig& config);
std::string cmd_sample_eval(const RunConfig& config);
std::string cmd_pca_fit(const RunConfig& config);
std::string cmd_toy(const RunConfig& config);

/// SHA-256 of a file's bytes, hex encoded. Exposed for tests.
std::string sha256_file(const std::string& path);

}  // namespace panomatch::cli
