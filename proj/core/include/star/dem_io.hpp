#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "star/terrain.hpp"

namespace star {

enum class DemFormat { kAsciiGrid, kPgm16 };

struct DemOptions {
  /// Overrides the ascii header's cell size; required meaning for PGM input.
  std::optional<double> cell_size;
  /// Meters per PGM unit.
  double pgm_scale = 1.0;
  double eye_height = 1.5;
};

/// Ascii grid: "<rows> <cols> <cell_size_m>" header, then rows of heights,
/// row 0 = north. PGM: binary P5, 16-bit big-endian samples when maxval > 255.
/// Traversability defaults to true everywhere.
TerrainGrid load_dem(std::istream& in, DemFormat format, const DemOptions& options = {});
TerrainGrid load_dem_file(const std::string& path, DemFormat format,
                          const DemOptions& options = {});

/// Writes heights with round-trip precision (max_digits10).
void write_dem_ascii(std::ostream& out, const TerrainGrid& grid);
/// Quantizes elevation / scale to 16-bit units; throws DomainError when a
/// height does not fit.
void write_dem_pgm16(std::ostream& out, const TerrainGrid& grid, double scale);

/// Same-shape 0/1 ascii grid with no header. Throws StructuralError on shape mismatch.
void load_traversability(std::istream& in, TerrainGrid& grid);
void write_traversability(std::ostream& out, const TerrainGrid& grid);

}  // namespace star
