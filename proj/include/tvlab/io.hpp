#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvlab/grid.hpp"

namespace tvlab {

// Raw grid dump: self-describing text header followed by row-major float64
// payload. Indicator sets are written as 0/1 fields in the same format.
//
//   tvgrid 1
//   dim 2
//   shape 128 128
//   spacing 0.03125
//   origin -2 -2
//   data float64 row-major
//   <binary doubles, little-endian>

inline void write_grid_dump(std::ostream& os, const ScalarField& u) {
  const Grid& g = u.grid;
  os << "tvgrid 1\n";
  os << "dim " << g.dim() << "\n";
  os << "shape";
  for (long n : g.shape()) os << " " << n;
  os << "\n";
  os << std::setprecision(17);
  os << "spacing " << g.spacing() << "\n";
  os << "origin";
  for (double o : g.origin()) os << " " << o;
  os << "\n";
  os << "data float64 row-major\n";
  os.write(reinterpret_cast<const char*>(u.values.data()),
           static_cast<std::streamsize>(u.values.size() * sizeof(double)));
}

inline void write_grid_dump(const std::string& path, const ScalarField& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_grid_dump: cannot open " + path);
  write_grid_dump(os, u);
}

inline void write_grid_dump(const std::string& path, const IndicatorSet& e) {
  write_grid_dump(path, e.to_field());
}

inline ScalarField read_grid_dump(std::istream& is) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "tvgrid" || version != 1) throw std::runtime_error("read_grid_dump: bad header");
  std::string key;
  int dim = 0;
  is >> key >> dim;
  if (key != "dim" || dim < 1) throw std::runtime_error("read_grid_dump: bad dim");
  is >> key;
  if (key != "shape") throw std::runtime_error("read_grid_dump: bad shape");
  std::vector<long> shape(dim);
  for (auto& n : shape) is >> n;
  double spacing = 0.0;
  is >> key >> spacing;
  if (key != "spacing") throw std::runtime_error("read_grid_dump: bad spacing");
  is >> key;
  if (key != "origin") throw std::runtime_error("read_grid_dump: bad origin");
  std::vector<double> origin(dim);
  for (auto& o : origin) is >> o;
  std::string fmt, layout;
  is >> key >> fmt >> layout;
  if (key != "data" || fmt != "float64" || layout != "row-major")
    throw std::runtime_error("read_grid_dump: bad data line");
  is.get();  // newline before payload

  Grid g(shape, spacing, origin);
  ScalarField u(g);
  is.read(reinterpret_cast<char*>(u.values.data()),
          static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_grid_dump: truncated payload");
  return u;
}

inline ScalarField read_grid_dump(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_grid_dump: cannot open " + path);
  return read_grid_dump(is);
}

// Minimal CSV writer; formats doubles with enough digits to round-trip so
// that fixed-seed reruns are byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : os_(path) {
    if (!os_) throw std::runtime_error("CsvWriter: cannot open " + path);
  }

  void header(const std::vector<std::string>& cols) { row_of_strings(cols); }

  void row_of_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ",";
      os_ << cells[i];
    }
    os_ << "\n";
  }

  static std::string num(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
  }
  static std::string num(long v) { return std::to_string(v); }
  static std::string num(int v) { return std::to_string(v); }

 private:
  std::ofstream os_;
};

// (threshold, perimeter, volume) table for a field's level-sets.
inline void write_threshold_table(const std::string& path, const std::vector<double>& thresholds,
                                  const std::vector<double>& perimeters,
                                  const std::vector<double>& volumes) {
  CsvWriter csv(path);
  csv.header({"threshold", "perimeter", "volume"});
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    csv.row_of_strings({CsvWriter::num(thresholds[i]), CsvWriter::num(perimeters[i]),
                        CsvWriter::num(volumes[i])});
}

}  // namespace tvlab
