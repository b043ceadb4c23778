#include "star/dem_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "star/errors.hpp"

namespace star {
namespace {

// Splits the stream into whitespace-separated tokens, tracking 1-based
// line/column of each token start.
class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  bool next(std::string& token) {
    token.clear();
    int ch;
    while ((ch = in_.get()) != EOF) {
      advance(ch);
      if (!std::isspace(ch)) break;
    }
    if (ch == EOF) return false;
    token_line_ = line_;
    token_col_ = col_;
    token.push_back(static_cast<char>(ch));
    while ((ch = in_.peek()) != EOF && !std::isspace(ch)) {
      in_.get();
      advance(ch);
      token.push_back(static_cast<char>(ch));
    }
    return true;
  }

  std::size_t line() const { return token_line_; }
  std::size_t column() const { return token_col_; }
  std::size_t current_line() const { return line_; }

 private:
  void advance(int ch) {
    if (pending_newline_) {
      ++line_;
      col_ = 0;
      pending_newline_ = false;
    }
    ++col_;
    if (ch == '\n') pending_newline_ = true;
  }

  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t col_ = 0;
  bool pending_newline_ = false;
  std::size_t token_line_ = 0;
  std::size_t token_col_ = 0;
};

double parse_double(const std::string& token, const Tokenizer& tok) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size()) {
    throw ParseError("expected a number, got '" + token + "'", tok.line(), tok.column());
  }
  if (!std::isfinite(v)) {
    throw ParseError("non-finite value '" + token + "'", tok.line(), tok.column());
  }
  return v;
}

long parse_int(const std::string& token, const Tokenizer& tok) {
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (token.empty() || end != token.c_str() + token.size()) {
    throw ParseError("expected an integer, got '" + token + "'", tok.line(), tok.column());
  }
  return v;
}

// Reads a grid body of rows x cols numbers, one text line per grid row.
std::vector<double> read_body(Tokenizer& tok, long rows, long cols) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(rows * cols));
  std::string token;
  std::size_t first_line = 0;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!tok.next(token)) {
        throw StructuralError("grid ended after " + std::to_string(values.size()) +
                              " values, expected " + std::to_string(rows * cols));
      }
      if (c == 0) {
        first_line = tok.line();
      } else if (tok.line() != first_line) {
        throw StructuralError("grid row " + std::to_string(r) + " has " + std::to_string(c) +
                              " values, expected " + std::to_string(cols));
      }
      values.push_back(parse_double(token, tok));
    }
  }
  if (tok.next(token)) {
    throw StructuralError("trailing data after " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " grid at line " +
                          std::to_string(tok.line()));
  }
  return values;
}

TerrainGrid load_ascii(std::istream& in, const DemOptions& options) {
  Tokenizer tok(in);
  std::string token;
  if (!tok.next(token)) throw StructuralError("empty DEM stream");
  const long rows = parse_int(token, tok);
  if (!tok.next(token)) throw ParseError("missing column count", tok.current_line(), 1);
  const long cols = parse_int(token, tok);
  if (!tok.next(token)) throw ParseError("missing cell size", tok.current_line(), 1);
  const double header_cell = parse_double(token, tok);
  if (rows < 1 || cols < 1) {
    throw StructuralError("DEM dimensions must be at least 1x1");
  }
  auto values = read_body(tok, rows, cols);
  return TerrainGrid(static_cast<int>(rows), static_cast<int>(cols),
                     options.cell_size.value_or(header_cell), std::move(values),
                     options.eye_height);
}

// PGM header fields are separated by whitespace and may carry '#' comments.
long read_pgm_field(std::istream& in, std::size_t& offset) {
  int ch;
  while ((ch = in.peek()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') ++offset;
      ++offset;
    } else if (std::isspace(ch)) {
      in.get();
      ++offset;
    } else {
      break;
    }
  }
  std::string digits;
  while ((ch = in.peek()) != EOF && std::isdigit(ch)) {
    digits.push_back(static_cast<char>(in.get()));
  }
  if (digits.empty()) throw ParseError("malformed PGM header", 1, offset + 1);
  offset += digits.size();
  return std::strtol(digits.c_str(), nullptr, 10);
}

TerrainGrid load_pgm(std::istream& in, const DemOptions& options) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5') {
    throw ParseError("expected binary PGM magic 'P5'", 1, 1);
  }
  std::size_t offset = 2;
  const long cols = read_pgm_field(in, offset);
  const long rows = read_pgm_field(in, offset);
  const long maxval = read_pgm_field(in, offset);
  if (rows < 1 || cols < 1) throw StructuralError("PGM dimensions must be at least 1x1");
  if (maxval < 1 || maxval > 65535) throw ParseError("PGM maxval out of range", 1, offset);
  if (!std::isspace(in.get())) throw ParseError("missing whitespace after PGM header", 1, offset);

  const bool wide = maxval > 255;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(rows * cols));
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      unsigned value;
      if (wide) {
        const int hi = in.get();
        const int lo = in.get();
        if (lo == EOF || hi == EOF) {
          throw StructuralError("PGM pixel data truncated at row " + std::to_string(r + 1) +
                                ", column " + std::to_string(c + 1));
        }
        value = (static_cast<unsigned>(hi) << 8) | static_cast<unsigned>(lo);
      } else {
        const int b = in.get();
        if (b == EOF) {
          throw StructuralError("PGM pixel data truncated at row " + std::to_string(r + 1) +
                                ", column " + std::to_string(c + 1));
        }
        value = static_cast<unsigned>(b);
      }
      if (value > static_cast<unsigned>(maxval)) {
        throw ParseError("PGM sample exceeds maxval", static_cast<std::size_t>(r + 1),
                         static_cast<std::size_t>(c + 1));
      }
      values.push_back(static_cast<double>(value) * options.pgm_scale);
    }
  }
  return TerrainGrid(static_cast<int>(rows), static_cast<int>(cols),
                     options.cell_size.value_or(60.0), std::move(values), options.eye_height);
}

}  // namespace

TerrainGrid load_dem(std::istream& in, DemFormat format, const DemOptions& options) {
  if (format == DemFormat::kAsciiGrid) return load_ascii(in, options);
  return load_pgm(in, options);
}

TerrainGrid load_dem_file(const std::string& path, DemFormat format, const DemOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open DEM file '" + path + "'");
  return load_dem(in, format, options);
}

void write_dem_ascii(std::ostream& out, const TerrainGrid& grid) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << grid.rows() << ' ' << grid.cols() << ' ' << grid.cell_size() << '\n';
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (c) out << ' ';
      out << grid.elevation(Cell{r, c});
    }
    out << '\n';
  }
  out.precision(old_precision);
}

void write_dem_pgm16(std::ostream& out, const TerrainGrid& grid, double scale) {
  if (!(scale > 0.0)) throw DomainError("PGM scale must be positive");
  out << "P5\n" << grid.cols() << ' ' << grid.rows() << "\n65535\n";
  for (CellIndex i = 0; i < static_cast<CellIndex>(grid.size()); ++i) {
    const double units = std::round(grid.elevation(i) / scale);
    if (units < 0.0 || units > 65535.0) {
      throw DomainError("elevation does not fit a 16-bit PGM at this scale");
    }
    const auto v = static_cast<unsigned>(units);
    out.put(static_cast<char>((v >> 8) & 0xff));
    out.put(static_cast<char>(v & 0xff));
  }
}

void load_traversability(std::istream& in, TerrainGrid& grid) {
  Tokenizer tok(in);
  const auto values = read_body(tok, grid.rows(), grid.cols());
  std::vector<std::uint8_t> mask(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0 && values[i] != 1.0) {
      throw ParseError("traversability values must be 0 or 1",
                       i / static_cast<std::size_t>(grid.cols()) + 1,
                       i % static_cast<std::size_t>(grid.cols()) + 1);
    }
    mask[i] = values[i] != 0.0 ? 1 : 0;
  }
  grid.set_traversable(mask);
}

void write_traversability(std::ostream& out, const TerrainGrid& grid) {
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (c) out << ' ';
      out << (grid.traversable(Cell{r, c}) ? 1 : 0);
    }
    out << '\n';
  }
}

}  // namespace star
