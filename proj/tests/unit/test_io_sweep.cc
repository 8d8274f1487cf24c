#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ldpsurvey/csv_io.h"
#include "ldpsurvey/errors.h"
#include "ldpsurvey/rng.h"
#include "ldpsurvey/sweep.h"

using namespace ldpsurvey;
namespace fs = std::filesystem;

namespace {

const ModelBounds kWide(1e9, 1e9, 1e9);

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("ldpsurvey_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void expect_parse_error(const std::string& text, std::size_t row, std::size_t col) {
  std::istringstream in(text);
  try {
    parse_csv(in, kWide);
    FAIL() << "expected ParseError for: " << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), row) << e.what();
    EXPECT_EQ(e.column(), col) << e.what();
  }
}

}  // namespace

TEST(CsvTest, SingleRowRoundTrip) {
  Dataset ds(2, {0.1, -1.0 / 3.0}, {2.5e-300}, kWide);
  std::stringstream buf;
  write_csv(buf, ds);
  EXPECT_EQ(buf.str().substr(0, 8), "x1,x2,y\n");
  const Dataset back = parse_csv(buf, kWide);
  EXPECT_EQ(back.covariates_row_major(), ds.covariates_row_major());
  EXPECT_EQ(back.responses(), ds.responses());
}

TEST(CsvTest, LargeRoundTripBitwise) {
  RandomStream rng(RngSpec{42, 0});
  std::vector<double> x, y;
  for (int i = 0; i < 10000; ++i) {
    for (int c = 0; c < 5; ++c) x.push_back(rng.normal(0, 1) * std::pow(10.0, rng.uniform(-8, 8)));
    y.push_back(rng.laplace(3.0));
  }
  Dataset ds(5, x, y, kWide);
  const fs::path dir = scratch("large");
  save_csv(ds, (dir / "d.csv").string());
  const Dataset back = load_csv((dir / "d.csv").string(), kWide);
  ASSERT_EQ(back.size(), 10000u);
  EXPECT_EQ(std::memcmp(back.covariates_row_major().data(), x.data(), x.size() * sizeof(double)),
            0);
  EXPECT_EQ(back.responses(), y);
}

TEST(CsvTest, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(CsvTest, ErrorsCarryLocation) {
  expect_parse_error("x1,x2,y\n1,2,3\n4,5\n", 3, 0);
  expect_parse_error("x1,x2,y\n1,abc,3\n", 2, 2);
  expect_parse_error("x1,z,y\n1,2,3\n", 1, 2);
  expect_parse_error("x1,x2,y\n1,2,\n", 2, 3);
  expect_parse_error("", 1, 0);
}

TEST(CsvTest, EmptyDataIsStructural) {
  std::istringstream in("x1,y\n");
  EXPECT_THROW(parse_csv(in, kWide), StructuralError);
}

TEST(CsvTest, BomAndCrlf) {
  std::istringstream in("\xEF\xBB\xBFx1,y\r\n1.5,2\r\n");
  const Dataset ds = parse_csv(in, kWide);
  EXPECT_DOUBLE_EQ(ds.x(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(ds.y(0), 2.0);
}

TEST(CsvTest, PrivateRoundTrip) {
  Dataset ds(2, {0.1, 0.2, -0.3, 0.4}, {1.0, -1.0}, ModelBounds(1, 1, 1));
  validate_dataset(ds);
  const auto pds = privatize(ds, NoiseSpec::laplace(0.5), PrivacyParams(4.0, 0.0), RngSpec{3, 1});
  const fs::path dir = scratch("private");
  const std::string path = (dir / "p.csv").string();
  save_private(pds, path, {{"note", "x"}});
  EXPECT_TRUE(fs::exists(sidecar_path(path)));
  const PrivateDataset back = load_private(path);
  EXPECT_EQ(back.z, pds.z);
  EXPECT_EQ(back.y, pds.y);
  EXPECT_DOUBLE_EQ(back.sigma_w_diagonal, 0.5);
  EXPECT_EQ(back.noise.kind, NoiseSpec::Kind::Laplace);
  ASSERT_TRUE(back.privacy.has_value());
  EXPECT_DOUBLE_EQ(back.privacy->alpha(), 4.0);
  EXPECT_EQ(read_json_file(sidecar_path(path)).at("note"), "x");
}

TEST(CsvTest, MissingFile) {
  EXPECT_THROW(load_csv("/nonexistent/file.csv", kWide), Error);
}

TEST(OlsSlopeTest, Exact) {
  EXPECT_DOUBLE_EQ(ols_slope({0, 1, 2, 3}, {1, 3, 5, 7}), 2.0);
  EXPECT_NEAR(ols_slope({1, 2, 3}, {1, 0, 1}), 0.0, 1e-15);
  EXPECT_THROW(ols_slope({1}, {1}), PreconditionError);
}

TEST(SweepSpecTest, Check) {
  SweepSpec s;
  EXPECT_NO_THROW(s.check());
  s.trials = 0;
  EXPECT_THROW(s.check(), PreconditionError);
  s.trials = 1;
  s.mu_grid.clear();
  EXPECT_THROW(s.check(), PreconditionError);
  EXPECT_EQ(parse_experiment(to_string(SweepSpec::Experiment::NoiseComparison)),
            SweepSpec::Experiment::NoiseComparison);
}

TEST(SweepTest, ModelDistanceDeterministicAcrossWorkers) {
  SweepSpec s;
  s.trials = 3;
  s.seed = 11;
  s.d = 5;
  s.m_survey = 1000;
  s.mu_grid = {0.0, 2.0};
  s.tol_grid = {0.2, 0.5};
  s.workers = 1;
  const auto a = run_sweep(s);
  s.workers = 4;
  const auto b = run_sweep(s);
  EXPECT_EQ(a.csv(), b.csv());
  EXPECT_EQ(a.summary.dump(), b.summary.dump());
  EXPECT_EQ(a.rows.size(), 12u);
  EXPECT_EQ(a.rows.front()[0], "0");
  EXPECT_EQ(a.rows.back()[0], "2");
}

TEST(SweepTest, ErrorVsSamplesShape) {
  SweepSpec s;
  s.experiment = SweepSpec::Experiment::ErrorVsSamples;
  s.trials = 2;
  s.d = 5;
  s.m_grid = {500, 5000};
  s.alpha_grid = {2.0, 8.0};
  const auto out = run_sweep(s);
  EXPECT_EQ(out.rows.size(), 8u);
  EXPECT_TRUE(out.summary.contains("slopes"));
  EXPECT_EQ(out.summary.at("slopes").size(), 2u);
}

TEST(SweepTest, AbortedPointRecorded) {
  SweepSpec s;
  s.experiment = SweepSpec::Experiment::ErrorVsSamples;
  s.trials = 2;
  s.d = 4;
  s.m_grid = {200};
  s.alpha_grid = {2.0, -1.0};
  const auto out = run_sweep(s);
  EXPECT_EQ(out.rows.size(), 4u);
  int aborted = 0;
  for (const auto& point : out.summary.at("grid")) {
    if (point.at("aborted").get<bool>()) {
      ++aborted;
      EXPECT_EQ(point.at("errors").size(), 2u);
    }
  }
  EXPECT_EQ(aborted, 1);
}

TEST(SweepTest, WriteFiles) {
  SweepSpec s;
  s.experiment = SweepSpec::Experiment::NoiseComparison;
  s.trials = 1;
  s.d = 4;
  s.m_grid = {300};
  const auto out = run_sweep(s);
  const fs::path dir = scratch("sweep");
  write_sweep(out, dir.string(), {{"manifest", {{"seed", 0}}}});
  EXPECT_TRUE(fs::exists(dir / "trials.csv"));
  const auto summary = read_json_file((dir / "summary.json").string());
  EXPECT_TRUE(summary.contains("manifest"));
  std::ifstream in(dir / "trials.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, out.csv().substr(0, header.size()));
  EXPECT_EQ(out.rows.size(), 2u);
}
