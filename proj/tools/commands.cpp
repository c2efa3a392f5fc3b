#include "commands.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "panomatch/panomatch.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace panomatch::cli {

namespace {

std::string sha256_bytes(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest computation failed");
  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RidgePolicy parse_ridge(const std::string& s) {
  if (s == "off") return RidgePolicy::off();
  if (s == "auto") return RidgePolicy::automatic();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size())
    throw ValidationError("ridge must be 'off', 'auto', or a nonnegative number, got '" + s + "'");
  return RidgePolicy::fixed(v);
}

json config_json(const RunConfig& c) {
  json j;
  j["descriptors"] = c.descriptors;
  j["metadata"] = c.metadata;
  j["query_descriptors"] = c.query_descriptors;
  j["query_metadata"] = c.query_metadata;
  j["index_path"] = c.index_path;
  j["pca_model"] = c.pca_model;
  j["ranked_csv"] = c.ranked_csv;
  j["out"] = c.out;
  j["mode"] = c.mode;
  j["agg"] = c.agg;
  j["ridge"] = c.ridge;
  j["top_n"] = c.top_n;
  j["cosine"] = c.cosine;
  j["n_values"] = c.n_values;
  j["threshold_m"] = c.threshold_m;
  j["l_values"] = c.l_values;
  j["repetitions"] = c.repetitions;
  j["dim_out"] = c.dim_out;
  j["whiten"] = c.whiten;
  j["no_renormalize"] = c.no_renormalize;
  j["locations"] = c.locations;
  j["views"] = c.views;
  j["dim"] = c.dim;
  j["noise"] = c.noise;
  j["overlap"] = c.overlap;
  j["bandwidth"] = c.bandwidth;
  j["seed"] = c.seed;
  return j;
}

json hash_object(const std::vector<std::string>& paths) {
  json j = json::object();
  for (const auto& path : paths)
    if (!path.empty()) j[path] = sha256_bytes(io::read_file(path));
  return j;
}

/// Writes `<name>` for directory outputs or `<out>.manifest.json` next to a
/// single-file output, and returns the manifest path.
std::string write_manifest(const std::string& manifest_path, const char* command, const RunConfig& config,
                           const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                           const json& report) {
  json manifest;
  manifest["command"] = command;
  manifest["created_utc"] = utc_timestamp();
  manifest["config"] = config_json(config);
  manifest["inputs"] = hash_object(inputs);
  manifest["outputs"] = hash_object(outputs);
  manifest["report"] = report;
  io::write_file(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw ValidationError(std::string("missing required option --") + flag);
  return value;
}

std::string dir_out(const RunConfig& config) {
  const std::string out = require(config.out, "out");
  fs::create_directories(out);
  return out;
}

std::string file_out(const RunConfig& config) {
  const std::string out = require(config.out, "out");
  const fs::path parent = fs::path(out).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  return out;
}

void apply_pca_to_corpus(Corpus& corpus, const PcaModel& model, bool renormalize) {
  for (auto& group : corpus.groups) {
    group.matrix = pca_apply_matrix(model, group.matrix, renormalize);
    for (std::size_t i = 0; i < group.members.size(); ++i)
      group.members[i].descriptor = group.matrix.column(i);
  }
  corpus.d = model.components.rows;
}

Corpus load_side(const RunConfig& config, const std::string& descriptors, const std::string& metadata,
                 CorpusSide side, std::vector<std::string>* warnings) {
  Corpus corpus = load_corpus(descriptors, metadata, side, warnings);
  if (!config.pca_model.empty())
    apply_pca_to_corpus(corpus, load_pca(config.pca_model), !config.no_renormalize);
  return corpus;
}

}  // namespace

std::string sha256_file(const std::string& path) { return sha256_bytes(io::read_file(path)); }

std::string cmd_synth(const RunConfig& config) {
  SynthConfig scfg;
  scfg.num_locations = config.locations;
  scfg.views_per_location = config.views;
  scfg.d = config.dim;
  scfg.scene_noise = config.noise;
  scfg.view_overlap = config.overlap;
  scfg.seed = config.seed;
  const SynthBenchmark bench = synth_benchmark(scfg);

  const fs::path out = dir_out(config);
  std::vector<std::string> outputs;
  const auto dump_side = [&](const Corpus& corpus, const char* name) {
    std::vector<std::string> ids;
    Matrix matrix;
    std::vector<MetadataRow> rows;
    corpus_to_files(corpus, ids, matrix, rows);
    const std::string pmdv = (out / (std::string(name) + ".pmdv")).string();
    const std::string meta = (out / (std::string(name) + "_meta.csv")).string();
    save_descriptors(pmdv, ids, matrix);
    io::write_file(meta, metadata_to_csv(rows));
    outputs.push_back(pmdv);
    outputs.push_back(meta);
  };
  dump_side(bench.dataset, "dataset");
  dump_side(bench.query, "query");

  json report;
  report["locations"] = bench.dataset.groups.size();
  report["views_per_location"] = config.views;
  report["d"] = bench.dataset.d;
  report["dataset_images"] = bench.dataset.total_images();
  report["query_images"] = bench.query.total_images();
  return write_manifest((out / "manifest.json").string(), "synth", config, {}, outputs, report);
}

std::string cmd_build(const RunConfig& config) {
  const AggMethod method = parse_agg_method(config.agg);
  const std::string out = file_out(config);

  MemoryIndex index;
  BuildReport build_report;
  std::vector<std::string> warnings;
  std::vector<std::string> inputs = {require(config.descriptors, "descriptors")};
  if (method == AggMethod::Precomputed) {
    index = index_from_precomputed(load_descriptors(config.descriptors));
  } else {
    inputs.push_back(require(config.metadata, "metadata"));
    if (!config.pca_model.empty()) inputs.push_back(config.pca_model);
    const Corpus corpus = load_side(config, config.descriptors, config.metadata, CorpusSide::Dataset,
                                    &warnings);
    index = build_index(corpus, method, parse_ridge(config.ridge), &build_report);
  }
  save_index(out, index);

  json report;
  report["entries"] = index.entries.size();
  report["d"] = index.d;
  report["method"] = to_string(index.method);
  report["wall_ms"] = build_report.wall_ms;
  if (!build_report.group_sizes.empty()) {
    std::size_t min_n = build_report.group_sizes.front();
    std::size_t max_n = 0;
    std::size_t total = 0;
    for (const std::size_t n : build_report.group_sizes) {
      min_n = std::min(min_n, n);
      max_n = std::max(max_n, n);
      total += n;
    }
    report["group_size_min"] = min_n;
    report["group_size_max"] = max_n;
    report["images"] = total;
  }
  json ridge_groups = json::object();
  for (const auto& [id, value] : build_report.ridge_used) ridge_groups[id] = value;
  report["ridge_groups"] = ridge_groups;
  report["overcomplete_groups"] = build_report.overcomplete_groups;
  report["warnings"] = warnings;
  return write_manifest(out + ".manifest.json", "build", config, inputs, {out}, report);
}

std::string cmd_query(const RunConfig& config) {
  const Mode mode = parse_mode(config.mode);
  const AggMethod method = parse_agg_method(config.agg);
  const std::string out = file_out(config);

  std::vector<std::string> inputs = {require(config.query_descriptors, "query-descriptors"),
                                     require(config.query_metadata, "query-metadata")};
  if (!config.pca_model.empty()) inputs.push_back(config.pca_model);
  const Corpus queries =
      load_side(config, config.query_descriptors, config.query_metadata, CorpusSide::Query, nullptr);

  DatasetRef ref;
  MemoryIndex index;
  Corpus dataset;
  if (dataset_side_aggregates(mode)) {
    inputs.push_back(require(config.index_path, "index"));
    index = load_index(config.index_path);
    ref.index = &index;
  } else {
    inputs.push_back(require(config.descriptors, "descriptors"));
    inputs.push_back(require(config.metadata, "metadata"));
    dataset = load_side(config, config.descriptors, config.metadata, CorpusSide::Dataset, nullptr);
    ref.corpus = &dataset;
  }

  RunOptions options;
  options.top_n = config.top_n;
  options.ridge = parse_ridge(config.ridge);
  options.cosine = config.cosine;
  const std::vector<RankedList> ranked = run_mode(mode, queries, ref, method, options);
  io::write_file(out, ranked_to_csv(ranked));

  std::size_t comparisons_total = 0;
  for (const auto& list : ranked) comparisons_total += list.comparisons;
  json report;
  report["mode"] = to_string(mode);
  report["agg"] = to_string(method);
  report["query_count"] = ranked.size();
  report["comparisons_per_query"] = ranked.empty() ? 0 : ranked.front().comparisons;
  report["comparisons_total"] = comparisons_total;
  return write_manifest(out + ".manifest.json", "query", config, inputs, {out}, report);
}

std::string cmd_eval(const RunConfig& config) {
  const std::string out = file_out(config);
  const std::vector<std::string> inputs = {require(config.ranked_csv, "ranked"),
                                           require(config.query_metadata, "query-metadata"),
                                           require(config.metadata, "metadata")};
  const auto ranked = ranked_from_csv(io::read_file(config.ranked_csv));
  const PositionTable query_positions = positions_of(load_metadata(config.query_metadata));
  const PositionTable target_positions = positions_of(load_metadata(config.metadata));
  const RecallCurve curve =
      recall_at_n(ranked, query_positions, target_positions, config.n_values, config.threshold_m);
  io::write_file(out, recall_to_csv(curve));

  json report;
  report["query_count"] = curve.query_count;
  json recalls = json::object();
  for (std::size_t i = 0; i < curve.n_values.size(); ++i)
    recalls[std::to_string(curve.n_values[i])] = curve.recall[i];
  report["recall"] = recalls;
  return write_manifest(out + ".manifest.json", "eval", config, inputs, {out}, report);
}

std::string cmd_sample_eval(const RunConfig& config) {
  const AggMethod method = parse_agg_method(config.agg);
  const std::string out = file_out(config);

  std::vector<std::string> inputs = {require(config.query_descriptors, "query-descriptors"),
                                     require(config.query_metadata, "query-metadata"),
                                     require(config.index_path, "index"),
                                     require(config.metadata, "metadata")};
  if (!config.pca_model.empty()) inputs.push_back(config.pca_model);
  const Corpus queries =
      load_side(config, config.query_descriptors, config.query_metadata, CorpusSide::Query, nullptr);
  const MemoryIndex index = load_index(config.index_path);
  const PositionTable target_positions = positions_of(load_metadata(config.metadata));

  SampleEvalConfig scfg;
  scfg.l_values = config.l_values;
  scfg.repetitions = config.repetitions;
  scfg.seed = config.seed;
  scfg.n_values = config.n_values;
  scfg.threshold_m = config.threshold_m;
  scfg.ridge = parse_ridge(config.ridge);
  const auto results = sparse_eval(queries, index, target_positions, scfg, method);
  io::write_file(out, sparse_to_csv(results));

  json report;
  report["query_count"] = queries.groups.size();
  report["repetitions"] = config.repetitions;
  json by_l = json::object();
  for (const auto& result : results) {
    json recalls = json::object();
    for (std::size_t i = 0; i < result.n_values.size(); ++i)
      recalls[std::to_string(result.n_values[i])] = result.mean_recall[i];
    by_l[std::to_string(result.l)] = recalls;
  }
  report["mean_recall_by_l"] = by_l;
  return write_manifest(out + ".manifest.json", "sample-eval", config, inputs, {out}, report);
}

std::string cmd_pca_fit(const RunConfig& config) {
  const std::string out = file_out(config);
  const std::vector<std::string> inputs = {require(config.descriptors, "descriptors")};
  if (config.dim_out < 1) throw ValidationError("pca-fit: --dim-out must be at least 1");
  const DescriptorSet set = load_descriptors(config.descriptors);
  PcaOptions options;
  options.whiten = config.whiten;
  const PcaModel model = pca_fit(set.matrix, config.dim_out, options);
  save_pca(out, model);

  json report;
  report["d"] = set.matrix.rows;
  report["d_out"] = config.dim_out;
  report["samples"] = set.matrix.cols;
  double explained = 0.0;
  for (const double v : model.explained_variance) explained += v;
  report["explained_variance_fraction"] =
      model.total_variance > 0.0 ? explained / model.total_variance : 1.0;
  return write_manifest(out + ".manifest.json", "pca-fit", config, inputs, {out}, report);
}

std::string cmd_toy(const RunConfig& config) {
  const fs::path out = dir_out(config);
  const ToyResult result = toy_demo(default_toy_layout(), config.bandwidth, parse_ridge(config.ridge));
  const std::string pairs_csv = (out / "toy.csv").string();
  const std::string display_csv = (out / "toy_display.csv").string();
  io::write_file(pairs_csv, toy_to_csv(result));
  io::write_file(display_csv, toy_display_to_csv(result));

  const Matrix x = detail::points_to_matrix(result.layout.x_points);
  const Matrix y = detail::points_to_matrix(result.layout.y_points);
  const RidgePolicy policy = parse_ridge(config.ridge);
  const MemoryVector mx = pinv_vector(x, policy);
  const MemoryVector my = pinv_vector(y, policy);
  const auto [unweighted_mean, weighted_mean] = matched_cluster_means(result);

  json report;
  report["grand_sum_weighted"] = grand_sum(result.weighted);
  report["similarity_pinv"] = similarity_pinv(mx, my);
  report["similarity_sum"] = grand_sum(result.unweighted);
  report["matched_cluster_mean_unweighted"] = unweighted_mean;
  report["matched_cluster_mean_weighted"] = weighted_mean;
  report["bandwidth"] = config.bandwidth;
  return write_manifest((out / "manifest.json").string(), "toy", config, {}, {pairs_csv, display_csv},
                        report);
}

}  // namespace panomatch::cli
