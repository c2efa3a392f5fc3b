#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <unordered_map>
#include <vector>

#include "panomatch/errors.hpp"
#include "panomatch/geo.hpp"
#include "panomatch/io.hpp"
#include "panomatch/matrix.hpp"

namespace panomatch {

/// One image view: its descriptor plus identity and geo metadata.
struct ImageRecord {
  std::string image_id;
  std::string location_id;
  GeoPosition position;
  std::vector<double> descriptor;
};

/// All views of one location. `matrix` keeps the members' descriptors as
/// columns, in member order.
struct LocationGroup {
  std::string location_id;
  GeoPosition position;
  std::vector<ImageRecord> members;
  Matrix matrix;  // d x n

  std::size_t size() const { return members.size(); }
};

enum class CorpusSide { Dataset, Query };

/// Immutable collection of location groups with uniform descriptor dimension.
struct Corpus {
  std::vector<LocationGroup> groups;
  std::size_t d = 0;
  CorpusSide side = CorpusSide::Dataset;

  std::size_t total_images() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();
    return n;
  }
};

// ---------------------------------------------------------------------------
// Descriptor file (PMDV): magic "PMDV", u32 version=1, u32 d, u64 count, then
// count records of [u16 id_len, utf8 id, d f32]. Little-endian.
// ---------------------------------------------------------------------------

struct DescriptorSet {
  std::vector<std::string> ids;
  Matrix matrix;  // d x count, ids aligned with columns
};

inline std::string serialize_descriptors(const std::vector<std::string>& ids, const Matrix& matrix) {
  if (ids.size() != matrix.cols) throw ValidationError("serialize_descriptors: ids do not match columns");
  io::ByteWriter w;
  w.magic("PMDV");
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(matrix.rows));
  w.u64(ids.size());
  for (std::size_t c = 0; c < ids.size(); ++c) {
    w.string16(ids[c]);
    for (std::size_t r = 0; r < matrix.rows; ++r) w.f32(static_cast<float>(matrix.at(r, c)));
  }
  return w.buffer();
}

inline DescriptorSet deserialize_descriptors(const std::string& bytes) {
  io::ByteReader r(bytes);
  r.expect_magic("PMDV");
  const std::uint32_t version = r.u32();
  if (version != 1) throw FormatError("unsupported PMDV version " + std::to_string(version), r.offset() - 4);
  const std::uint32_t d = r.u32();
  const std::uint64_t count = r.u64();
  if (count == 0) throw FormatError("descriptor file contains no vectors", r.offset() - 8);
  DescriptorSet set;
  set.ids.reserve(count);
  set.matrix = Matrix(d, count);
  for (std::uint64_t c = 0; c < count; ++c) {
    std::string id = r.string16();
    if (id.empty()) throw FormatError("empty image id in record " + std::to_string(c), r.offset());
    set.ids.push_back(std::move(id));
    for (std::uint32_t row = 0; row < d; ++row) {
      const std::size_t at = r.offset();
      const float v = r.f32();
      if (!std::isfinite(v))
        throw FormatError("non-finite descriptor entry in record " + std::to_string(c), at);
      set.matrix.at(row, c) = static_cast<double>(v);
    }
  }
  return set;
}

inline void save_descriptors(const std::string& path, const std::vector<std::string>& ids,
                             const Matrix& matrix) {
  io::write_file(path, serialize_descriptors(ids, matrix));
}

inline DescriptorSet load_descriptors(const std::string& path) {
  return deserialize_descriptors(io::read_file(path));
}

// ---------------------------------------------------------------------------
// Metadata file: UTF-8 CSV, header `image_id,location_id,lat,lon` or
// `image_id,location_id,x,y`. Plain fields, no quoting.
// ---------------------------------------------------------------------------

struct MetadataRow {
  std::string image_id;
  std::string location_id;
  GeoPosition position;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline double parse_double_field(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw FormatError("metadata line " + std::to_string(line_no) + ": bad number '" + field + "'");
  return v;
}

}  // namespace detail

inline std::vector<MetadataRow> parse_metadata_csv(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw FormatError("metadata file is empty");

  bool latlon;
  if (lines[0] == "image_id,location_id,lat,lon")
    latlon = true;
  else if (lines[0] == "image_id,location_id,x,y")
    latlon = false;
  else
    throw FormatError("metadata header must name exactly one position pair, got '" + lines[0] + "'");

  std::vector<MetadataRow> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = detail::split_csv_line(lines[i]);
    if (fields.size() != 4)
      throw FormatError("metadata line " + std::to_string(i + 1) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty())
      throw FormatError("metadata line " + std::to_string(i + 1) + ": empty id");
    const double pa = detail::parse_double_field(fields[2], i + 1);
    const double pb = detail::parse_double_field(fields[3], i + 1);
    rows.push_back({fields[0], fields[1],
                    latlon ? GeoPosition::lat_lon(pa, pb) : GeoPosition::planar(pa, pb)});
  }
  if (rows.empty()) throw FormatError("metadata file has a header but no rows");
  return rows;
}

inline std::vector<MetadataRow> load_metadata(const std::string& path) {
  return parse_metadata_csv(io::read_file(path));
}

inline std::string metadata_to_csv(const std::vector<MetadataRow>& rows) {
  if (rows.empty()) throw ValidationError("metadata_to_csv: no rows");
  const bool latlon = rows.front().position.kind == GeoPosition::Kind::LatLon;
  std::string out = latlon ? "image_id,location_id,lat,lon\n" : "image_id,location_id,x,y\n";
  char buf[64];
  for (const auto& row : rows) {
    out += row.image_id;
    out += ',';
    out += row.location_id;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", row.position.a, row.position.b);
    out += buf;
  }
  return out;
}

/// Joins a descriptor set with metadata rows by image id. Record order
/// follows the descriptor file; every descriptor id must have metadata.
inline std::vector<ImageRecord> join_records(const DescriptorSet& set,
                                             const std::vector<MetadataRow>& metadata) {
  std::unordered_map<std::string, const MetadataRow*> by_id;
  by_id.reserve(metadata.size());
  for (const auto& row : metadata) by_id.emplace(row.image_id, &row);
  std::vector<ImageRecord> records;
  records.reserve(set.ids.size());
  for (std::size_t c = 0; c < set.ids.size(); ++c) {
    const auto it = by_id.find(set.ids[c]);
    if (it == by_id.end())
      throw ValidationError("descriptor id '" + set.ids[c] + "' has no metadata row");
    records.push_back({set.ids[c], it->second->location_id, it->second->position, set.matrix.column(c)});
  }
  return records;
}

/// Partitions records into location groups, keeping input order both across
/// and within groups. The group position is the first member's; members
/// spread more than 1 m from it are reported as warnings, not errors.
inline Corpus group_by_location(const std::vector<ImageRecord>& records, CorpusSide side,
                                std::vector<std::string>* warnings = nullptr) {
  if (records.empty()) throw ValidationError("group_by_location: no records");
  Corpus corpus;
  corpus.side = side;
  corpus.d = records.front().descriptor.size();

  std::unordered_map<std::string, std::size_t> index_of;
  for (const auto& record : records) {
    if (record.image_id.empty() || record.location_id.empty())
      throw ValidationError("group_by_location: empty identifier");
    if (record.descriptor.size() != corpus.d)
      throw ValidationError("group_by_location: descriptor dimension " +
                            std::to_string(record.descriptor.size()) + " for '" + record.image_id +
                            "', expected " + std::to_string(corpus.d));
    const auto [it, inserted] = index_of.emplace(record.location_id, corpus.groups.size());
    if (inserted)
      corpus.groups.push_back({record.location_id, record.position, {}, Matrix()});
    LocationGroup& group = corpus.groups[it->second];
    if (warnings) {
      const double spread = geo_distance(group.position, record.position);
      if (spread > 1.0)
        warnings->push_back("location '" + group.location_id + "': member '" + record.image_id +
                            "' lies " + std::to_string(spread) + " m from the group position");
    }
    group.members.push_back(record);
  }
  for (auto& group : corpus.groups) {
    group.matrix = Matrix(corpus.d, group.members.size());
    for (std::size_t c = 0; c < group.members.size(); ++c)
      group.matrix.set_column(c, group.members[c].descriptor);
  }
  return corpus;
}

/// Convenience: load descriptor + metadata files and group them.
inline Corpus load_corpus(const std::string& descriptor_path, const std::string& metadata_path,
                          CorpusSide side, std::vector<std::string>* warnings = nullptr) {
  const DescriptorSet set = load_descriptors(descriptor_path);
  const auto metadata = load_metadata(metadata_path);
  return group_by_location(join_records(set, metadata), side, warnings);
}

// ---------------------------------------------------------------------------
// Position lookup used by evaluation: image ids take precedence, location ids
// resolve to the group position.
// ---------------------------------------------------------------------------

struct PositionTable {
  std::unordered_map<std::string, GeoPosition> image_positions;
  std::unordered_map<std::string, GeoPosition> location_positions;

  const GeoPosition* find(const std::string& id) const {
    if (const auto it = image_positions.find(id); it != image_positions.end()) return &it->second;
    if (const auto it = location_positions.find(id); it != location_positions.end()) return &it->second;
    return nullptr;
  }
};

inline PositionTable positions_of(const Corpus& corpus) {
  PositionTable table;
  for (const auto& group : corpus.groups) {
    table.location_positions.emplace(group.location_id, group.position);
    for (const auto& member : group.members) table.image_positions.emplace(member.image_id, member.position);
  }
  return table;
}

inline PositionTable positions_of(const std::vector<MetadataRow>& rows) {
  PositionTable table;
  for (const auto& row : rows) {
    table.image_positions.emplace(row.image_id, row.position);
    table.location_positions.emplace(row.location_id, row.position);
  }
  return table;
}

}  // namespace panomatch
