#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "panomatch/corpus.hpp"
#include "panomatch/errors.hpp"
#include "panomatch/eval.hpp"
#include "panomatch/index.hpp"
#include "panomatch/memvec.hpp"
#include "panomatch/rng.hpp"
#include "panomatch/search.hpp"

namespace panomatch {

/// Sparse-panorama evaluation protocol: sample l of each query location's
/// views, aggregate only those, and measure recall, averaged over repetitions.
struct SampleEvalConfig {
  std::vector<std::size_t> l_values;
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  std::vector<std::size_t> n_values = {1, 5, 10, 20};
  double threshold_m = kDefaultThresholdMeters;
  RidgePolicy ridge = RidgePolicy::automatic();
};

/// Result for one l: mean and sample standard deviation of recall@N over the
/// repetitions, plus the per-repetition curves for inspection.
struct SparseResult {
  std::size_t l = 0;
  std::vector<std::size_t> n_values;
  std::vector<double> mean_recall;
  std::vector<double> std_recall;
  std::size_t repetitions = 0;
  std::vector<RecallCurve> per_repetition;
};

namespace detail {

/// Indices of the sampled views: the first l entries of a keyed permutation,
/// returned in ascending order. Sampling the whole group therefore yields
/// 0..n-1 exactly, so l = n reproduces the full-panorama evaluation bit for
/// bit, and for fixed (seed, repetition) the samples are nested in l.
inline std::vector<std::size_t> sample_view_indices(std::uint64_t seed, std::size_t repetition,
                                                    const std::string& location_id, std::size_t group_size,
                                                    std::size_t l) {
  CounterRng rng(rng_key(seed, repetition, location_id));
  std::vector<std::size_t> indices = rng.permutation(group_size);
  indices.resize(l);
  std::sort(indices.begin(), indices.end());
  return indices;
}

inline Matrix select_columns(const Matrix& m, const std::vector<std::size_t>& cols) {
  Matrix out(m.rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) out.set_column(c, m.column(cols[c]));
  return out;
}

}  // namespace detail

/// Runs the sampled-query protocol for every l in config.l_values against an
/// aggregated dataset index. Sampling is without replacement, keyed by
/// (seed, repetition, location_id), so results do not depend on evaluation
/// order or threading.
inline std::vector<SparseResult> sparse_eval(const Corpus& queries, const MemoryIndex& index,
                                             const PositionTable& target_positions,
                                             const SampleEvalConfig& config, AggMethod agg_method) {
  if (config.l_values.empty()) throw ValidationError("sparse_eval: no l values");
  if (config.repetitions < 1) throw ValidationError("sparse_eval: repetitions must be at least 1");
  if (config.n_values.empty()) throw ValidationError("sparse_eval: no N values");
  if (index.method != agg_method)
    throw ValidationError("sparse_eval: index method '" + to_string(index.method) +
                          "' does not match requested '" + to_string(agg_method) + "'");
  for (const std::size_t l : config.l_values) {
    if (l < 1) throw ValidationError("sparse_eval: l must be at least 1");
    for (const auto& group : queries.groups)
      if (l > group.members.size())
        throw ValidationError("sparse_eval: l = " + std::to_string(l) + " exceeds group '" +
                              group.location_id + "' size " + std::to_string(group.members.size()));
  }

  const PositionTable query_positions = positions_of(queries);
  const std::size_t top_n = *std::max_element(config.n_values.begin(), config.n_values.end());

  std::vector<SparseResult> results;
  results.reserve(config.l_values.size());
  for (const std::size_t l : config.l_values) {
    SparseResult result;
    result.l = l;
    result.n_values = config.n_values;
    result.repetitions = config.repetitions;
    result.per_repetition.reserve(config.repetitions);

    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
      std::vector<RankedList> ranked;
      ranked.reserve(queries.groups.size());
      for (const auto& group : queries.groups) {
        const auto indices =
            detail::sample_view_indices(config.seed, rep, group.location_id, group.members.size(), l);
        const Matrix sampled = detail::select_columns(group.matrix, indices);
        MemoryVector aggregated = aggregate(sampled, agg_method, config.ridge);
        RankedList list = search(aggregated.values, index, top_n);
        list.query_id = group.location_id;
        ranked.push_back(std::move(list));
      }
      result.per_repetition.push_back(
          recall_at_n(ranked, query_positions, target_positions, config.n_values, config.threshold_m));
    }

    const double reps = static_cast<double>(config.repetitions);
    result.mean_recall.resize(config.n_values.size(), 0.0);
    result.std_recall.resize(config.n_values.size(), 0.0);
    for (std::size_t i = 0; i < config.n_values.size(); ++i) {
      bool constant = true;
      for (const auto& curve : result.per_repetition)
        if (curve.recall[i] != result.per_repetition.front().recall[i]) constant = false;
      if (constant) {
        // A constant series has that value as its exact mean; summing and
        // dividing would round. Matters when l covers the whole group and
        // every repetition reproduces the full evaluation bit for bit.
        result.mean_recall[i] = result.per_repetition.front().recall[i];
        continue;
      }
      double sum = 0.0;
      for (const auto& curve : result.per_repetition) sum += curve.recall[i];
      const double mean = sum / reps;
      result.mean_recall[i] = mean;
      if (config.repetitions > 1) {
        double sq = 0.0;
        for (const auto& curve : result.per_repetition) {
          const double delta = curve.recall[i] - mean;
          sq += delta * delta;
        }
        result.std_recall[i] = std::sqrt(sq / (reps - 1.0));
      }
    }
    results.push_back(std::move(result));
  }
  return results;
}

inline std::string sparse_to_csv(const std::vector<SparseResult>& results) {
  std::string csv = "l,N,mean_recall,std_recall,repetitions\n";
  for (const auto& result : results)
    for (std::size_t i = 0; i < result.n_values.size(); ++i) {
      csv += std::to_string(result.l);
      csv += ',';
      csv += std::to_string(result.n_values[i]);
      csv += ',';
      csv += io::format_g(result.mean_recall[i], 10);
      csv += ',';
      csv += io::format_g(result.std_recall[i], 10);
      csv += ',';
      csv += std::to_string(result.repetitions);
      csv += '\n';
    }
  return csv;
}

}  // namespace panomatch
