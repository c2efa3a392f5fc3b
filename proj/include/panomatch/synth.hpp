#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "panomatch/corpus.hpp"
#include "panomatch/errors.hpp"
#include "panomatch/rng.hpp"

namespace panomatch {

/// Synthetic benchmark layout: locations on a planar grid with 50 m spacing,
/// one query location co-located (offset ~2.2 m) with each dataset location.
/// Each view mixes two adjacent latent scene directions and adds isotropic
/// noise, so consecutive views overlap like a swept panorama.
struct SynthConfig {
  std::size_t num_locations = 200;
  std::size_t views_per_location = 8;
  std::size_t d = 64;
  double scene_noise = 0.1;
  double view_overlap = 0.5;  // fraction of the next aspect blended in, [0, 1]
  std::uint64_t seed = 1;
};

struct SynthBenchmark {
  Corpus dataset;
  Corpus query;
};

namespace detail {

inline std::string synth_location_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix, i);
  return buf;
}

inline std::string synth_image_id(const std::string& location_id, std::size_t view) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_v%02zu", view);
  return location_id + buf;
}

}  // namespace detail

inline SynthBenchmark synth_benchmark(const SynthConfig& config) {
  if (config.num_locations < 1 || config.views_per_location < 1 || config.d < 1)
    throw ValidationError("synth_benchmark: counts must be at least 1");
  if (!(config.scene_noise >= 0.0)) throw ValidationError("synth_benchmark: scene_noise must be >= 0");
  if (!(config.view_overlap >= 0.0 && config.view_overlap <= 1.0))
    throw ValidationError("synth_benchmark: view_overlap must lie in [0, 1]");

  const std::size_t views = config.views_per_location;
  const std::size_t grid = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(config.num_locations))));
  const double alpha = 0.5 * config.view_overlap;

  std::vector<ImageRecord> dataset_records;
  std::vector<ImageRecord> query_records;
  dataset_records.reserve(config.num_locations * views);
  query_records.reserve(config.num_locations * views);

  for (std::size_t loc = 0; loc < config.num_locations; ++loc) {
    const double gx = 50.0 * static_cast<double>(loc % grid);
    const double gy = 50.0 * static_cast<double>(loc / grid);
    const GeoPosition dataset_pos = GeoPosition::planar(gx, gy);
    const GeoPosition query_pos = GeoPosition::planar(gx + 2.0, gy + 1.0);

    std::vector<std::vector<double>> latents(views);
    for (std::size_t aspect = 0; aspect < views; ++aspect) {
      CounterRng rng(rng_key(config.seed, "latent", loc, aspect));
      latents[aspect] = l2_normalized(rng.gaussian_vector(config.d));
    }

    const std::string dataset_id = detail::synth_location_id("loc", loc);
    const std::string query_id = detail::synth_location_id("qry", loc);
    for (std::size_t side = 0; side < 2; ++side) {
      for (std::size_t view = 0; view < views; ++view) {
        const std::vector<double>& a = latents[view];
        const std::vector<double>& b = latents[(view + 1) % views];
        std::vector<double> descriptor(config.d);
        for (std::size_t r = 0; r < config.d; ++r)
          descriptor[r] = (1.0 - alpha) * a[r] + alpha * b[r];
        if (config.scene_noise > 0.0) {
          CounterRng rng(rng_key(config.seed, "noise", side, loc, view));
          for (std::size_t r = 0; r < config.d; ++r)
            descriptor[r] += config.scene_noise * rng.next_gaussian();
        }
        descriptor = l2_normalized(std::move(descriptor));
        if (side == 0)
          dataset_records.push_back(
              {detail::synth_image_id(dataset_id, view), dataset_id, dataset_pos, std::move(descriptor)});
        else
          query_records.push_back(
              {detail::synth_image_id(query_id, view), query_id, query_pos, std::move(descriptor)});
      }
    }
  }

  SynthBenchmark bench;
  bench.dataset = group_by_location(dataset_records, CorpusSide::Dataset);
  bench.query = group_by_location(query_records, CorpusSide::Query);
  return bench;
}

/// Flattens a corpus back into aligned descriptor/metadata outputs.
inline void corpus_to_files(const Corpus& corpus, std::vector<std::string>& ids, Matrix& matrix,
                            std::vector<MetadataRow>& metadata) {
  ids.clear();
  metadata.clear();
  const std::size_t total = corpus.total_images();
  matrix = Matrix(corpus.d, total);
  std::size_t c = 0;
  for (const auto& group : corpus.groups)
    for (const auto& member : group.members) {
      ids.push_back(member.image_id);
      metadata.push_back({member.image_id, member.location_id, member.position});
      matrix.set_column(c++, member.descriptor);
    }
}

}  // namespace panomatch
