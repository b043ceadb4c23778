#include "star/maps.hpp"

#include <random>
#include <string>

#include "star/errors.hpp"

namespace star::maps {

TerrainGrid from_picture(const std::vector<std::string>& rows, double cell_size,
                         double wall_height) {
  if (rows.empty() || rows.front().empty()) throw StructuralError("empty map picture");
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(rows.front().size());
  std::vector<double> heights;
  std::vector<std::uint8_t> open;
  for (int r = 0; r < nr; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != nc) {
      throw StructuralError("map picture row " + std::to_string(r) + " has the wrong width");
    }
    for (char ch : rows[static_cast<std::size_t>(r)]) {
      switch (ch) {
        case '.':
          heights.push_back(0.0);
          open.push_back(1);
          break;
        case '#':
          heights.push_back(wall_height);
          open.push_back(0);
          break;
        case 'o':
          heights.push_back(-wall_height);
          open.push_back(1);
          break;
        case '^':
          heights.push_back(0.5 * wall_height);
          open.push_back(1);
          break;
        default:
          throw StructuralError(std::string("unknown map picture symbol '") + ch + "'");
      }
    }
  }
  TerrainGrid grid(nr, nc, cell_size, std::move(heights));
  grid.set_traversable(open);
  return grid;
}

TerrainGrid corridor16() {
  return from_picture({
      "................",
      ".####.####.####.",
      ".####.####.####.",
      ".####.####.####.",
      ".####.####.####.",
      "................",
      ".####.####.####.",
      ".####.####.####.",
      ".####.####.####.",
      ".####.####.####.",
      "................",
      ".####.####.####.",
      ".####.####.####.",
      ".####.####.####.",
      ".####.####.####.",
      "................",
  });
}

TerrainGrid pit_and_wall8() {
  return from_picture({
      "........",
      "........",
      "..###...",
      "..#o#...",
      "..###...",
      "........",
      "........",
      "........",
  });
}

TerrainGrid random_dem(int rows, int cols, std::uint64_t seed, double relief,
                       int smoothing_passes, double cell_size) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> height(0.0, relief);
  std::vector<double> h(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (double& v : h) v = height(rng);
  for (int pass = 0; pass < smoothing_passes; ++pass) {
    std::vector<double> next(h.size());
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        double sum = 0.0;
        int n = 0;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = r + dr;
            const int cc = c + dc;
            if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
            sum += h[static_cast<std::size_t>(rr * cols + cc)];
            ++n;
          }
        }
        next[static_cast<std::size_t>(r * cols + c)] = sum / n;
      }
    }
    h = std::move(next);
  }
  return TerrainGrid(rows, cols, cell_size, std::move(h));
}

TerrainGrid builtin(const std::string& name) {
  if (name == "corridor16") return corridor16();
  if (name == "pit8") return pit_and_wall8();
  try {
    if (name.rfind("flat", 0) == 0) {
      const int n = std::stoi(name.substr(4));
      if (n >= 1) return TerrainGrid::flat(n, n);
    }
    if (name.rfind("random", 0) == 0) {
      const auto colon = name.find(':');
      if (colon != std::string::npos) {
        const int n = std::stoi(name.substr(6, colon - 6));
        const auto seed = std::stoull(name.substr(colon + 1));
        if (n >= 1) return random_dem(n, n, seed);
      }
    }
  } catch (const std::logic_error&) {
    // fall through to the error below
  }
  throw ConfigError("unknown builtin terrain '" + name +
                    "' (expected flat<N>, corridor16, pit8 or random<N>:<seed>)");
}

}  // namespace star::maps
