#pragma once

#include <cstdint>
#include <random>

#include "sparse_ocp/grid.hpp"

namespace sparse_ocp {

/// Independent generator for sample `index` of a campaign seeded with `seed`.
/// The stream depends only on (seed, index), never on the worker count.
std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index);

struct RandomFieldOptions {
  int space_modes = 6;       ///< sine modes per axis
  int time_modes = 4;        ///< cosine modes in t
  double decay = 2.0;        ///< coefficient decay exponent
  double noise_fraction = 0.1;
};

/// Smooth random field: sum of a_{m,l} prod_j sin(m_j pi x_j) cos(l pi t / T)
/// with a ~ N(0,1) / (|m| + l)^decay, normalized to unit Linf; with
/// probability noise_fraction a pointwise N(0,1) noise field instead.
Field random_field(const SpaceTimeGrid& grid, std::mt19937_64& rng, const RandomFieldOptions& opts = {});

}  // namespace sparse_ocp
