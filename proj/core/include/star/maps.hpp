#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "star/terrain.hpp"

namespace star::maps {

/// Builds a grid from a text picture: '.' floor (0 m), '#' wall (non-traversable),
/// 'o' pit (traversable, below ground), '^' low ridge (traversable).
TerrainGrid from_picture(const std::vector<std::string>& rows, double cell_size = 60.0,
                         double wall_height = 8.0);

/// 16x16 grid of one-cell corridors every fifth row and column between 4x4 wall blocks.
TerrainGrid corridor16();

/// 8x8 flat grid with one deep pit cell ringed by high non-traversable walls.
TerrainGrid pit_and_wall8();

/// Uniform random heights in [0, relief) meters, optionally box-smoothed.
TerrainGrid random_dem(int rows, int cols, std::uint64_t seed, double relief = 20.0,
                       int smoothing_passes = 1, double cell_size = 60.0);

/// "flat<N>", "corridor16", "pit8" or "random<N>:<seed>". Throws ConfigError
/// for anything else.
TerrainGrid builtin(const std::string& name);

}  // namespace star::maps
