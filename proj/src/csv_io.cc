#include "ldpsurvey/csv_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "ldpsurvey/errors.h"

namespace ldpsurvey {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string cell = trim(raw);
  if (cell.empty()) throw ParseError("missing value", row, col);
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("non-numeric cell '" + cell + "'", row, col);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite cell '" + cell + "'", row, col);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Dataset parse_csv(std::istream& in, const ModelBounds& bounds) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1, 0);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_line(trim(line));
  if (header.size() < 2) throw ParseError("header needs x1..xd and y", 1, 0);
  const std::size_t d = header.size() - 1;
  for (std::size_t c = 0; c < d; ++c) {
    if (trim(header[c]) != "x" + std::to_string(c + 1)) {
      throw ParseError("expected header 'x" + std::to_string(c + 1) + "', got '" +
                           trim(header[c]) + "'",
                       1, c + 1);
    }
  }
  if (trim(header[d]) != "y") {
    throw ParseError("expected header 'y', got '" + trim(header[d]) + "'", 1, d + 1);
  }

  std::vector<double> x;
  std::vector<double> y;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != d + 1) {
      throw ParseError("expected " + std::to_string(d + 1) + " cells, found " +
                           std::to_string(cells.size()),
                       row, 0);
    }
    for (std::size_t c = 0; c < d; ++c) x.push_back(parse_cell(cells[c], row, c + 1));
    y.push_back(parse_cell(cells[d], row, d + 1));
  }
  if (y.empty()) throw StructuralError("CSV has a header but no data rows");
  return Dataset(d, std::move(x), std::move(y), bounds);
}

Dataset load_csv(const std::string& path, const ModelBounds& bounds) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_csv(in, bounds);
}

void write_csv(std::ostream& out, const Dataset& ds) {
  for (std::size_t c = 0; c < ds.dim(); ++c) out << 'x' << (c + 1) << ',';
  out << "y\n";
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t c = 0; c < ds.dim(); ++c) out << format_double(ds.x(r, c)) << ',';
    out << format_double(ds.y(r)) << '\n';
  }
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_csv(out, ds);
}

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".json"; }

nlohmann::json private_sidecar(const PrivateDataset& pds) {
  nlohmann::json j;
  j["rows"] = pds.size();
  j["dim"] = pds.dim();
  j["noise"] = {{"kind", to_string(pds.noise.kind)},
                {"scale", pds.noise.scale},
                {"per_coordinate_variance", pds.noise.per_coordinate_variance}};
  j["sigma_w_diagonal"] = pds.sigma_w_diagonal;
  if (pds.privacy) {
    j["privacy"] = {{"alpha", pds.privacy->alpha()},
                    {"beta", pds.privacy->beta()},
                    {"accounting", to_string(pds.privacy->accounting())}};
  } else {
    j["privacy"] = nullptr;
  }
  j["rng"] = {{"seed", pds.rng.seed}, {"stream", pds.rng.stream}};
  return j;
}

void save_private(const PrivateDataset& pds, const std::string& path,
                  const nlohmann::json& extra) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  const auto d = pds.z.cols();
  for (Eigen::Index c = 0; c < d; ++c) out << 'x' << (c + 1) << ',';
  out << "y\n";
  for (Eigen::Index r = 0; r < pds.z.rows(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c) out << format_double(pds.z(r, c)) << ',';
    out << format_double(pds.y[r]) << '\n';
  }
  nlohmann::json sidecar = private_sidecar(pds);
  sidecar.update(extra);
  write_json_file(sidecar, sidecar_path(path));
}

PrivateDataset load_private(const std::string& path) {
  const nlohmann::json side = read_json_file(sidecar_path(path));
  // Published covariates are unbounded, so only a placeholder bound applies.
  const ModelBounds open(1.0, 1.0, 1.0);
  const Dataset raw = load_csv(path, open);
  PrivateDataset pds;
  pds.z = raw.design_matrix();
  pds.y = raw.response_vector();
  try {
    pds.sigma_w_diagonal = side.at("sigma_w_diagonal").get<double>();
    const auto& noise = side.at("noise");
    const double scale = noise.at("scale").get<double>();
    pds.noise = noise.at("kind").get<std::string>() == "gaussian"
                    ? NoiseSpec::gaussian(scale)
                    : NoiseSpec::laplace(scale);
    pds.noise.per_coordinate_variance =
        noise.at("per_coordinate_variance").get<double>();
    if (side.contains("privacy") && !side.at("privacy").is_null()) {
      const auto& p = side.at("privacy");
      pds.privacy = PrivacyParams(p.at("alpha").get<double>(),
                                  p.at("beta").get<double>(),
                                  parse_accounting(p.at("accounting").get<std::string>()));
    }
    pds.rng.seed = side.at("rng").at("seed").get<std::uint64_t>();
    pds.rng.stream = side.at("rng").at("stream").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed sidecar: ") + e.what(), 0, 0);
  }
  return pds;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what(), 0, 0);
  }
}

}  // namespace ldpsurvey
