#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "panomatch/corpus.hpp"
#include "panomatch/errors.hpp"
#include "panomatch/geo.hpp"
#include "panomatch/io.hpp"
#include "panomatch/search.hpp"

namespace panomatch {

constexpr double kDefaultThresholdMeters = 25.0;

struct RecallCurve {
  std::vector<std::size_t> n_values;
  std::vector<double> recall;
  std::size_t query_count = 0;
};

namespace detail {

constexpr std::size_t kNoHit = std::numeric_limits<std::size_t>::max();

/// 1-based rank of the first target within threshold_m of the query, or
/// kNoHit if none qualifies.
inline std::size_t first_hit_rank(const RankedList& ranked, const PositionTable& query_positions,
                                  const PositionTable& target_positions, double threshold_m) {
  const GeoPosition* query_pos = query_positions.find(ranked.query_id);
  if (!query_pos) throw ValidationError("query id '" + ranked.query_id + "' has no known position");
  for (std::size_t r = 0; r < ranked.items.size(); ++r) {
    const GeoPosition* target_pos = target_positions.find(ranked.items[r].first);
    if (!target_pos)
      throw ValidationError("target id '" + ranked.items[r].first + "' has no known position");
    if (geo_distance(*query_pos, *target_pos) <= threshold_m) return r + 1;
  }
  return kNoHit;
}

}  // namespace detail

/// Recall@N over a set of ranked lists: a query scores 1 at N if any of its
/// top-N targets lies within threshold_m of the query position. Computed from
/// each query's first hit rank, so recall is non-decreasing in N.
inline RecallCurve recall_at_n(const std::vector<RankedList>& ranked, const PositionTable& query_positions,
                               const PositionTable& target_positions, const std::vector<std::size_t>& n_values,
                               double threshold_m = kDefaultThresholdMeters) {
  if (ranked.empty()) throw ValidationError("recall_at_n: no ranked lists");
  if (n_values.empty()) throw ValidationError("recall_at_n: no N values");
  for (const std::size_t n : n_values)
    if (n < 1) throw ValidationError("recall_at_n: N values must be at least 1");
  if (threshold_m < 0.0) throw ValidationError("recall_at_n: threshold must be nonnegative");

  std::vector<std::size_t> first_hits;
  first_hits.reserve(ranked.size());
  for (const auto& list : ranked)
    first_hits.push_back(detail::first_hit_rank(list, query_positions, target_positions, threshold_m));

  RecallCurve curve;
  curve.n_values = n_values;
  curve.query_count = ranked.size();
  curve.recall.reserve(n_values.size());
  for (const std::size_t n : n_values) {
    std::size_t hits = 0;
    for (const std::size_t rank : first_hits)
      if (rank <= n) ++hits;
    curve.recall.push_back(static_cast<double>(hits) / static_cast<double>(ranked.size()));
  }
  return curve;
}

/// Convenience overload resolving positions from the two corpora. Target ids
/// may be image ids (im2im, pan2im) or location ids (im2pan, pan2pan).
inline RecallCurve recall_at_n(const std::vector<RankedList>& ranked, const Corpus& queries,
                               const Corpus& dataset, const std::vector<std::size_t>& n_values,
                               double threshold_m = kDefaultThresholdMeters) {
  return recall_at_n(ranked, positions_of(queries), positions_of(dataset), n_values, threshold_m);
}

// ---------------------------------------------------------------------------
// CSV emission. Doubles are formatted with fixed significant-digit counts so
// repeated runs produce identical bytes: 17 digits for scores (lossless for
// binary64), 10 for recall fractions.
// ---------------------------------------------------------------------------

inline std::string ranked_to_csv(const std::vector<RankedList>& ranked) {
  std::string csv = "query_id,rank,target_id,score\n";
  for (const auto& list : ranked)
    for (std::size_t r = 0; r < list.items.size(); ++r) {
      csv += list.query_id;
      csv += ',';
      csv += std::to_string(r + 1);
      csv += ',';
      csv += list.items[r].first;
      csv += ',';
      csv += io::format_g(list.items[r].second, 17);
      csv += '\n';
    }
  return csv;
}

/// Parses a ranked-list CSV back into RankedLists. Rows for one query must be
/// contiguous with ranks 1, 2, ... in order, which is how ranked_to_csv
/// writes them. The comparisons count is not stored in the CSV and comes
/// back as zero.
inline std::vector<RankedList> ranked_from_csv(const std::string& text) {
  std::size_t start = 0;
  std::size_t line_no = 0;
  std::vector<RankedList> lists;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(start, nl - start);
    start = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (line_no == 1) {
      if (line != "query_id,rank,target_id,score")
        throw FormatError("ranked CSV: unexpected header '" + line + "'");
      continue;
    }
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    const std::size_t c3 = c2 == std::string::npos ? std::string::npos : line.find(',', c2 + 1);
    if (c3 == std::string::npos)
      throw FormatError("ranked CSV line " + std::to_string(line_no) + ": expected 4 fields");
    const std::string query_id = line.substr(0, c1);
    const std::string rank_str = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string target_id = line.substr(c2 + 1, c3 - c2 - 1);
    const std::string score_str = line.substr(c3 + 1);
    std::size_t pos = 0;
    std::size_t rank = 0;
    double score = 0.0;
    try {
      rank = std::stoul(rank_str, &pos);
      if (pos != rank_str.size()) throw std::invalid_argument("trailing");
      score = std::stod(score_str, &pos);
      if (pos != score_str.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError("ranked CSV line " + std::to_string(line_no) + ": bad number");
    }
    if (query_id.empty() || target_id.empty())
      throw FormatError("ranked CSV line " + std::to_string(line_no) + ": empty id");
    if (lists.empty() || lists.back().query_id != query_id) {
      lists.push_back(RankedList{query_id, {}, 0});
    }
    if (rank != lists.back().items.size() + 1)
      throw FormatError("ranked CSV line " + std::to_string(line_no) + ": rank " + std::to_string(rank) +
                        " out of sequence");
    lists.back().items.emplace_back(target_id, score);
  }
  if (lists.empty()) throw FormatError("ranked CSV: no data rows");
  return lists;
}

inline std::string recall_to_csv(const RecallCurve& curve) {
  std::string csv = "N,recall,query_count\n";
  for (std::size_t i = 0; i < curve.n_values.size(); ++i) {
    csv += std::to_string(curve.n_values[i]);
    csv += ',';
    csv += io::format_g(curve.recall[i], 10);
    csv += ',';
    csv += std::to_string(curve.query_count);
    csv += '\n';
  }
  return csv;
}

}  // namespace panomatch
