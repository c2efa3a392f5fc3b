#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "panomatch/corpus.hpp"
#include "panomatch/errors.hpp"
#include "panomatch/io.hpp"
#include "panomatch/memvec.hpp"

namespace panomatch {

struct IndexEntry {
  std::string location_id;
  MemoryVector vector;
};

/// Per-location aggregated vectors, one entry per location, in corpus order.
struct MemoryIndex {
  AggMethod method = AggMethod::Sum;
  std::size_t d = 0;
  std::vector<IndexEntry> entries;
};

/// Aggregation telemetry from an index build.
struct BuildReport {
  std::vector<std::size_t> group_sizes;
  std::vector<std::pair<std::string, double>> ridge_used;  // groups aggregated with ridge > 0
  std::vector<std::string> overcomplete_groups;            // groups with n >= d
  double wall_ms = 0.0;
};

inline MemoryIndex build_index(const Corpus& corpus, AggMethod method,
                               const RidgePolicy& policy = RidgePolicy::automatic(),
                               BuildReport* report = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  MemoryIndex index;
  index.method = method;
  index.d = corpus.d;
  index.entries.reserve(corpus.groups.size());
  for (const auto& group : corpus.groups) {
    if (report) {
      report->group_sizes.push_back(group.size());
      if (group.size() >= corpus.d) report->overcomplete_groups.push_back(group.location_id);
    }
    MemoryVector vector;
    try {
      vector = aggregate(group.matrix, method, policy);
    } catch (const SingularityError& e) {
      throw SingularityError("location '" + group.location_id + "': " + e.what(), e.pivot_index);
    }
    if (report && vector.ridge_used > 0.0) report->ridge_used.emplace_back(group.location_id, vector.ridge_used);
    index.entries.push_back({group.location_id, std::move(vector)});
  }
  if (report)
    report->wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return index;
}

// ---------------------------------------------------------------------------
// Index file (PMIX): magic "PMIX", u32 version=1, u8 method, u32 d, u64 count,
// then per entry [u16 id_len, utf8 id, u32 source_count, f32 ridge_used,
// d f32 values]. Little-endian.
// ---------------------------------------------------------------------------

inline std::string serialize_index(const MemoryIndex& index) {
  io::ByteWriter w;
  w.magic("PMIX");
  w.u32(1);
  w.u8(static_cast<std::uint8_t>(index.method));
  w.u32(static_cast<std::uint32_t>(index.d));
  w.u64(index.entries.size());
  for (const auto& entry : index.entries) {
    if (entry.vector.values.size() != index.d)
      throw ValidationError("serialize_index: entry '" + entry.location_id + "' has wrong dimension");
    w.string16(entry.location_id);
    w.u32(static_cast<std::uint32_t>(entry.vector.source_count));
    w.f32(static_cast<float>(entry.vector.ridge_used));
    for (double v : entry.vector.values) w.f32(static_cast<float>(v));
  }
  return w.buffer();
}

inline MemoryIndex deserialize_index(const std::string& bytes) {
  io::ByteReader r(bytes);
  r.expect_magic("PMIX");
  const std::uint32_t version = r.u32();
  if (version != 1) throw FormatError("unsupported PMIX version " + std::to_string(version), r.offset() - 4);
  const std::uint8_t method_raw = r.u8();
  if (method_raw > 2) throw FormatError("unknown aggregation method id " + std::to_string(method_raw), r.offset() - 1);
  MemoryIndex index;
  index.method = static_cast<AggMethod>(method_raw);
  index.d = r.u32();
  const std::uint64_t count = r.u64();
  index.entries.reserve(count);
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    IndexEntry entry;
    entry.location_id = r.string16();
    if (!seen.insert(entry.location_id).second)
      throw FormatError("duplicate location id '" + entry.location_id + "'", r.offset());
    entry.vector.method = index.method;
    entry.vector.source_count = r.u32();
    entry.vector.ridge_used = static_cast<double>(r.f32());
    if (index.method == AggMethod::Precomputed && entry.vector.source_count != 1)
      throw FormatError("precomputed entry '" + entry.location_id + "' must have source_count 1", r.offset());
    entry.vector.values.resize(index.d);
    for (auto& v : entry.vector.values) {
      const std::size_t at = r.offset();
      v = static_cast<double>(r.f32());
      if (!std::isfinite(v)) throw FormatError("non-finite index entry value", at);
    }
    index.entries.push_back(std::move(entry));
  }
  return index;
}

inline void save_index(const std::string& path, const MemoryIndex& index) {
  io::write_file(path, serialize_index(index));
}

inline MemoryIndex load_index(const std::string& path) { return deserialize_index(io::read_file(path)); }

/// Reads a descriptor file holding one precomputed panorama vector per
/// location (ids are location ids) into a Precomputed index.
inline MemoryIndex index_from_precomputed(const DescriptorSet& set) {
  MemoryIndex index;
  index.method = AggMethod::Precomputed;
  index.d = set.matrix.rows;
  std::unordered_set<std::string> seen;
  for (std::size_t c = 0; c < set.ids.size(); ++c) {
    if (!seen.insert(set.ids[c]).second)
      throw ValidationError("precomputed ingestion: duplicate location id '" + set.ids[c] + "'");
    MemoryVector v;
    v.values = set.matrix.column(c);
    v.method = AggMethod::Precomputed;
    v.source_count = 1;
    index.entries.push_back({set.ids[c], std::move(v)});
  }
  return index;
}

}  // namespace panomatch
