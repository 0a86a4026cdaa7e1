#include "sparse_ocp/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace sparse_ocp {

std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x5eedu};
  return std::mt19937_64(seq);
}

Field random_field(const SpaceTimeGrid& grid, std::mt19937_64& rng, const RandomFieldOptions& opts) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Field f = Field::space_time(grid);

  if (unit(rng) < opts.noise_fraction) {
    for (double& v : f.values()) v = normal(rng);
    return f;
  }

  const int M = opts.space_modes;
  const int L = opts.time_modes;
  const int d = grid.dim();
  const int my = d == 2 ? M : 1;
  // coeff[(l * my + m1) * M + m0]
  std::vector<double> coeff(static_cast<std::size_t>(L) * my * M);
  for (int l = 0; l < L; ++l)
    for (int m1 = 0; m1 < my; ++m1)
      for (int m0 = 0; m0 < M; ++m0) {
        const double order = (m0 + 1) + (d == 2 ? m1 + 1 : 0) + l;
        coeff[(static_cast<std::size_t>(l) * my + m1) * M + m0] = normal(rng) / std::pow(order, opts.decay);
      }

  const std::size_t nodes = grid.nodes();
  const int nx = grid.nx();
  // Separable tables of basis values.
  std::vector<double> sx(static_cast<std::size_t>(M) * nx);
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < nx; ++i) sx[static_cast<std::size_t>(m) * nx + i] = std::sin((m + 1) * std::numbers::pi * grid.coord(i));
  std::vector<double> spatial(static_cast<std::size_t>(L) * nodes, 0.0);
  for (int l = 0; l < L; ++l)
    for (std::size_t n = 0; n < nodes; ++n) {
      const int i0 = grid.axis_index(n, 0), i1 = grid.axis_index(n, 1);
      double s = 0.0;
      for (int m1 = 0; m1 < my; ++m1) {
        const double b1 = d == 2 ? sx[static_cast<std::size_t>(m1) * nx + i1] : 1.0;
        for (int m0 = 0; m0 < M; ++m0)
          s += coeff[(static_cast<std::size_t>(l) * my + m1) * M + m0] * sx[static_cast<std::size_t>(m0) * nx + i0] * b1;
      }
      spatial[static_cast<std::size_t>(l) * nodes + n] = s;
    }
  for (int k = 1; k <= grid.nt(); ++k) {
    auto lvl = f.level(k);
    for (int l = 0; l < L; ++l) {
      const double c = std::cos(l * std::numbers::pi * grid.time(k) / grid.final_time());
      for (std::size_t n = 0; n < nodes; ++n) lvl[n] += c * spatial[static_cast<std::size_t>(l) * nodes + n];
    }
  }
  double peak = 0.0;
  for (double v : f.values()) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) f *= 1.0 / peak;
  return f;
}

}  // namespace sparse_ocp
