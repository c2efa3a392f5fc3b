#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "panomatch/corpus.hpp"
#include "panomatch/errors.hpp"
#include "panomatch/index.hpp"
#include "panomatch/memvec.hpp"

namespace panomatch {

/// One ranked retrieval result. `comparisons` counts similarity evaluations
/// actually performed for this query.
struct RankedList {
  std::string query_id;
  std::vector<std::pair<std::string, double>> items;  // (target_id, score), score descending
  std::size_t comparisons = 0;
};

namespace detail {

/// Exhaustive scoring over (id, values) targets. Ties break by ascending
/// target id so rankings are deterministic across runs and platforms.
template <typename TargetRange, typename GetId, typename GetValues>
RankedList search_targets(const std::vector<double>& query, const TargetRange& targets, GetId get_id,
                          GetValues get_values, std::size_t top_n) {
  if (top_n < 1) throw ValidationError("search: top_n must be at least 1");
  RankedList result;
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(targets.size());
  std::size_t i = 0;
  for (const auto& target : targets) {
    const auto& values = get_values(target);
    if (values.size() != query.size())
      throw ValidationError("search: query dimension " + std::to_string(query.size()) +
                            " does not match target dimension " + std::to_string(values.size()));
    scored.emplace_back(dot(query, values), i);
    ++i;
  }
  result.comparisons = scored.size();
  const auto better = [&](const std::pair<double, std::size_t>& a, const std::pair<double, std::size_t>& b) {
    if (a.first != b.first) return a.first > b.first;
    return get_id(targets[a.second]) < get_id(targets[b.second]);
  };
  const std::size_t keep = std::min(top_n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
  scored.resize(keep);
  result.items.reserve(keep);
  for (const auto& [score, idx] : scored) result.items.emplace_back(get_id(targets[idx]), score);
  return result;
}

}  // namespace detail

/// Exhaustive inner-product search over an aggregated index.
inline RankedList search(const std::vector<double>& query, const MemoryIndex& index, std::size_t top_n) {
  return detail::search_targets(
      query, index.entries, [](const IndexEntry& e) -> const std::string& { return e.location_id; },
      [](const IndexEntry& e) -> const std::vector<double>& { return e.vector.values; }, top_n);
}

/// Exhaustive inner-product search over every image of a corpus.
inline RankedList search(const std::vector<double>& query, const Corpus& corpus, std::size_t top_n) {
  std::vector<const ImageRecord*> flat;
  flat.reserve(corpus.total_images());
  for (const auto& group : corpus.groups)
    for (const auto& member : group.members) flat.push_back(&member);
  return detail::search_targets(
      query, flat, [](const ImageRecord* r) -> const std::string& { return r->image_id; },
      [](const ImageRecord* r) -> const std::vector<double>& { return r->descriptor; }, top_n);
}

/// The four matching regimes: which side, if any, aggregates per location.
enum class Mode { Im2Im, Im2Pan, Pan2Im, Pan2Pan };

inline std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Im2Im: return "im2im";
    case Mode::Im2Pan: return "im2pan";
    case Mode::Pan2Im: return "pan2im";
    case Mode::Pan2Pan: return "pan2pan";
  }
  return "unknown";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "im2im") return Mode::Im2Im;
  if (s == "im2pan") return Mode::Im2Pan;
  if (s == "pan2im") return Mode::Pan2Im;
  if (s == "pan2pan") return Mode::Pan2Pan;
  throw ValidationError("unknown mode '" + s + "'");
}

inline bool query_side_aggregates(Mode mode) { return mode == Mode::Pan2Im || mode == Mode::Pan2Pan; }
inline bool dataset_side_aggregates(Mode mode) { return mode == Mode::Im2Pan || mode == Mode::Pan2Pan; }

/// Dataset side of a run: image modes need the corpus, panorama modes the
/// memory index.
struct DatasetRef {
  const Corpus* corpus = nullptr;
  const MemoryIndex* index = nullptr;
};

struct RunOptions {
  std::size_t top_n = 20;
  RidgePolicy ridge = RidgePolicy::automatic();
  bool cosine = false;  // ablation: L2-normalize both sides before scoring
};

/// Executes one matching regime over all query units: one RankedList per
/// query image (im2im, im2pan) or per query location (pan2im, pan2pan).
inline std::vector<RankedList> run_mode(Mode mode, const Corpus& queries, const DatasetRef& dataset,
                                        AggMethod agg_method, const RunOptions& options = {}) {
  const bool agg_queries = query_side_aggregates(mode);
  const bool agg_dataset = dataset_side_aggregates(mode);
  if (agg_dataset) {
    if (!dataset.index) throw ValidationError(to_string(mode) + " needs an aggregated dataset index");
    if (dataset.index->method != agg_method)
      throw ValidationError("aggregation method mismatch: index is '" + to_string(dataset.index->method) +
                            "', requested '" + to_string(agg_method) + "'");
  } else if (!dataset.corpus) {
    throw ValidationError(to_string(mode) + " needs the dataset image corpus");
  }

  const MemoryIndex* index = dataset.index;
  MemoryIndex cosine_index;
  if (agg_dataset && options.cosine) {
    cosine_index = *index;
    for (auto& entry : cosine_index.entries) entry.vector.values = l2_normalized(entry.vector.values);
    index = &cosine_index;
  }
  Corpus cosine_corpus;
  const Corpus* images = dataset.corpus;
  if (!agg_dataset && options.cosine) {
    cosine_corpus = *images;
    for (auto& group : cosine_corpus.groups)
      for (auto& member : group.members) member.descriptor = l2_normalized(member.descriptor);
    images = &cosine_corpus;
  }

  std::vector<RankedList> results;
  const auto run_query = [&](const std::string& id, std::vector<double> values) {
    if (options.cosine) values = l2_normalized(std::move(values));
    RankedList ranked = agg_dataset ? search(values, *index, options.top_n)
                                    : search(values, *images, options.top_n);
    ranked.query_id = id;
    results.push_back(std::move(ranked));
  };

  for (const auto& group : queries.groups) {
    if (agg_queries) {
      MemoryVector aggregated = aggregate(group.matrix, agg_method, options.ridge);
      if (agg_dataset && aggregated.method != index->method)
        throw ValidationError("aggregation method mismatch between query and dataset sides");
      run_query(group.location_id, std::move(aggregated.values));
    } else {
      for (const auto& member : group.members) run_query(member.image_id, member.descriptor);
    }
  }
  return results;
}

}  // namespace panomatch
