#include "ninput/measure_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ninput/errors.hpp"

namespace ninput {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  return cells;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("csv line " + std::to_string(line_no) + ": bad number '" + cell + "'");
  }
}

struct ParsedCsv {
  bool has_weights = false;
  std::vector<UnitVector> atoms;
  std::vector<double> weights;
};

ParsedCsv parse(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw InvalidArgument("csv: missing header");

  ParsedCsv out;
  out.has_weights = header.front() == "w";
  const std::size_t first_coord = out.has_weights ? 1 : 0;
  const std::size_t d = header.size() - first_coord;
  for (std::size_t k = 0; k < d; ++k) {
    if (header[first_coord + k] != "x" + std::to_string(k + 1)) {
      throw InvalidArgument("csv: header must be w,x1,...,xd or x1,...,xd");
    }
  }
  if (d < 2) throw InvalidArgument("csv: need at least two coordinates");

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw InvalidArgument("csv line " + std::to_string(line_no) + ": wrong column count");
    }
    Vector x(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) x[k] = parse_number(cells[first_coord + k], line_no);
    const double norm = x.norm();
    if (!(std::abs(norm - 1.0) <= 1e-6)) {
      throw InvalidArgument("csv line " + std::to_string(line_no) + ": point is not on the unit sphere");
    }
    out.atoms.push_back(UnitVector::normalized(x));
    out.weights.push_back(out.has_weights ? parse_number(cells[0], line_no) : 0.0);
  }
  if (out.atoms.empty()) throw InvalidArgument("csv: no rows");
  if (!out.has_weights) {
    const double w = 1.0 / static_cast<double>(out.atoms.size());
    for (double& x : out.weights) x = w;
  }
  return out;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return in;
}

void write_header(std::ostream& out, int d, bool weights) {
  if (weights) out << "w,";
  for (int k = 1; k <= d; ++k) out << (k > 1 ? "," : "") << 'x' << k;
  out << '\n';
}

}  // namespace

DiscreteMeasure read_measure_csv(std::istream& in) {
  auto parsed = parse(in);
  return DiscreteMeasure(std::move(parsed.atoms), std::move(parsed.weights));
}

DiscreteMeasure read_measure_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_measure_csv(in);
}

PointConfiguration read_points_csv(std::istream& in) {
  return PointConfiguration(parse(in).atoms);
}

PointConfiguration read_points_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_points_csv(in);
}

void write_measure_csv(std::ostream& out, const DiscreteMeasure& measure) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  write_header(out, measure.dim(), true);
  for (std::size_t i = 0; i < measure.size(); ++i) {
    out << measure.weight(i);
    for (int k = 0; k < measure.dim(); ++k) out << ',' << measure.atom(i)[k];
    out << '\n';
  }
  out.precision(old);
}

void write_points_csv(std::ostream& out, const PointConfiguration& config) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  write_header(out, config.dim(), false);
  for (const auto& p : config) {
    for (int k = 0; k < config.dim(); ++k) out << (k ? "," : "") << p[k];
    out << '\n';
  }
  out.precision(old);
}

}  // namespace ninput
