// Command-line pipeline: tensor ingest -> autocovariance features -> k-means
// clustering / cluster-count selection -> sweeps and reports.
//
// Exit codes: 0 ok, 2 malformed input, 3 invalid or degenerate
// configuration, 4 infeasible clustering (k > n).

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spdkm/manifest.hpp"
#include "spdkm/spdkm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw spdkm::IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw spdkm::IoError("failed writing " + path.string());
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& flag) {
  std::vector<int> out;
  for (const std::string& tok : split(s, ',')) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw spdkm::InvalidConfig(flag + ": cannot parse integer list element \"" + tok + "\"");
    }
  }
  if (out.empty()) throw spdkm::InvalidConfig(flag + ": empty list");
  return out;
}

spdkm::BorderPolicy parse_border(const std::string& s) {
  if (s == "drop") return spdkm::BorderPolicy::drop_partial;
  if (s == "avg") return spdkm::BorderPolicy::average_partial;
  throw spdkm::InvalidConfig("--border must be drop or avg, got \"" + s + "\"");
}

spdkm::RasterStack stack_from_file(const fs::path& path, const std::string& band) {
  spdkm::Tensor t = spdkm::read_tensor(path);
  if (t.dims.size() != 3) {
    throw spdkm::DimensionMismatch(path.string() + ": expected a 3-D (time, height, width) tensor, got rank " +
                                   std::to_string(t.dims.size()));
  }
  return spdkm::make_stack(band, static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]),
                           static_cast<int>(t.dims[2]), std::move(t.data));
}

spdkm::LabelRaster truth_from_file(const fs::path& path) {
  spdkm::Tensor t = spdkm::read_tensor(path);
  if (t.dims.size() != 2) {
    throw spdkm::DimensionMismatch(path.string() + ": expected a 2-D truth raster, got rank " +
                                   std::to_string(t.dims.size()));
  }
  for (double v : t.data) {
    if (std::isfinite(v) && v != std::floor(v)) {
      throw spdkm::InvalidArgument(path.string() + ": truth raster must be integer-valued");
    }
  }
  spdkm::LabelRaster r;
  r.h = static_cast<int>(t.dims[0]);
  r.w = static_cast<int>(t.dims[1]);
  r.values = std::move(t.data);
  return r;
}

std::vector<spdkm::EmbeddedPoint> points_from_file(const fs::path& path) {
  spdkm::Tensor t = spdkm::read_tensor(path);
  if (t.dims.size() != 2) {
    throw spdkm::DimensionMismatch(path.string() + ": expected a 2-D feature tensor, got rank " +
                                   std::to_string(t.dims.size()));
  }
  const auto n = static_cast<std::size_t>(t.dims[0]);
  const auto d = static_cast<Eigen::Index>(t.dims[1]);
  std::vector<spdkm::EmbeddedPoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    spdkm::Vector coords(d);
    for (Eigen::Index c = 0; c < d; ++c) coords[c] = t.data[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
    points.push_back(spdkm::EmbeddedPoint::from_coords(std::move(coords)));
  }
  if (points.empty()) throw spdkm::EmptyInput(path.string() + ": feature tensor holds no points");
  return points;
}

struct LabelRow {
  long long point_index = 0;
  int row = 0;
  int col = 0;
  int label = 0;
};

std::vector<std::pair<int, int>> read_index_csv(const fs::path& path, std::size_t expect_n) {
  std::ifstream in(path);
  if (!in) throw spdkm::IoError("cannot open index sidecar " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "point_index,row,col") {
    throw spdkm::IoError(path.string() + ": expected header point_index,row,col");
  }
  std::vector<std::pair<int, int>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 3) throw spdkm::IoError(path.string() + ": malformed row \"" + line + "\"");
    try {
      out.emplace_back(std::stoi(parts[1]), std::stoi(parts[2]));
    } catch (const std::exception&) {
      throw spdkm::IoError(path.string() + ": malformed row \"" + line + "\"");
    }
  }
  if (out.size() != expect_n) {
    throw spdkm::IoError(path.string() + ": index rows (" + std::to_string(out.size()) +
                         ") do not match feature rows (" + std::to_string(expect_n) + ")");
  }
  return out;
}

std::vector<LabelRow> read_labels_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw spdkm::IoError("cannot open labels file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "point_index,row,col,label") {
    throw spdkm::IoError(path.string() + ": expected header point_index,row,col,label");
  }
  std::vector<LabelRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 4) throw spdkm::IoError(path.string() + ": malformed row \"" + line + "\"");
    try {
      rows.push_back({std::stoll(parts[0]), std::stoi(parts[1]), std::stoi(parts[2]),
                      std::stoi(parts[3])});
    } catch (const std::exception&) {
      throw spdkm::IoError(path.string() + ": malformed row \"" + line + "\"");
    }
  }
  if (rows.empty()) throw spdkm::IoError(path.string() + ": no label rows");
  return rows;
}

// ---------------------------------------------------------------------------
// subcommands

struct FeaturesArgs {
  std::string band_file;
  int lag = 0;
  int patch = 1;
  double jitter = 1e-10;
  std::string border = "drop";
  std::string out;
};

int run_features(const FeaturesArgs& a) {
  const fs::path band_path = a.band_file;
  spdkm::RasterStack stack = stack_from_file(band_path, band_path.stem().string());

  spdkm::FeatureConfig cfg;
  cfg.lag = a.lag;
  cfg.patch = a.patch;
  cfg.jitter = a.jitter;
  cfg.border = parse_border(a.border);
  const spdkm::FeatureSet fset = spdkm::build_features(stack, cfg);

  spdkm::Tensor out;
  const auto d = static_cast<std::size_t>(spdkm::EmbeddedPoint::embedded_size(fset.m));
  out.dims = {static_cast<std::uint64_t>(fset.points.size()), static_cast<std::uint64_t>(d)};
  out.data.resize(fset.points.size() * d);
  for (std::size_t i = 0; i < fset.points.size(); ++i) {
    const spdkm::Vector& c = fset.points[i].coords();
    for (std::size_t j = 0; j < d; ++j) out.data[i * d + j] = c[static_cast<Eigen::Index>(j)];
  }
  spdkm::write_tensor(a.out, out);

  std::string csv = "point_index,row,col\n";
  for (std::size_t i = 0; i < fset.pixel_index.size(); ++i) {
    csv += std::to_string(i) + "," + std::to_string(fset.pixel_index[i].first) + "," +
           std::to_string(fset.pixel_index[i].second) + "\n";
  }
  write_text(a.out + ".index.csv", csv);

  spdkm::RunManifest man;
  man.command = "features";
  man.parameters = {{"band", a.band_file}, {"lag", a.lag},    {"patch", a.patch},
                    {"jitter", a.jitter},  {"border", a.border}, {"out", a.out}};
  man.input_digests[a.band_file] = spdkm::file_digest(band_path);
  spdkm::write_manifest(a.out, man);

  std::cout << "points=" << fset.points.size() << "\n";
  return 0;
}

struct ClusterArgs {
  std::string features;
  int k = 1;
  int restarts = 8;
  std::uint64_t seed = 0;
  std::string out;
  std::string centroids;
};

int run_cluster(const ClusterArgs& a) {
  const std::vector<spdkm::EmbeddedPoint> points = points_from_file(a.features);
  const auto index = read_index_csv(a.features + ".index.csv", points.size());

  spdkm::KmeansConfig cfg;
  cfg.k = a.k;
  cfg.restarts = a.restarts;
  cfg.seed = a.seed;
  const spdkm::ClusterModel model = spdkm::fit(points, cfg);

  std::string labels_csv = "point_index,row,col,label\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    labels_csv += std::to_string(i) + "," + std::to_string(index[i].first) + "," +
                  std::to_string(index[i].second) + "," + std::to_string(model.labels[i]) + "\n";
  }
  write_text(a.out, labels_csv);

  const int m = points.front().dim_m();
  const auto d = static_cast<Eigen::Index>(spdkm::EmbeddedPoint::embedded_size(m));
  std::string cent_csv = "label";
  for (Eigen::Index j = 0; j < d; ++j) cent_csv += ",coord_" + std::to_string(j);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) cent_csv += ",spd_" + std::to_string(i) + "_" + std::to_string(j);
  }
  cent_csv += "\n";
  for (std::size_t c = 0; c < model.centroids.size(); ++c) {
    cent_csv += std::to_string(c);
    const spdkm::Vector& v = model.centroids[c].coords();
    for (Eigen::Index j = 0; j < d; ++j) cent_csv += "," + g17(v[j]);
    const spdkm::SpdMatrix s = spdkm::unembed(model.centroids[c]);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) cent_csv += "," + g17(s(i, j));
    }
    cent_csv += "\n";
  }
  write_text(a.centroids, cent_csv);

  spdkm::RunManifest man;
  man.command = "cluster";
  man.parameters = {{"features", a.features}, {"k", a.k},       {"restarts", a.restarts},
                    {"seed", a.seed},         {"out", a.out},   {"centroids", a.centroids}};
  man.seed = a.seed;
  man.input_digests[a.features] = spdkm::file_digest(a.features);
  man.input_digests[a.features + ".index.csv"] = spdkm::file_digest(a.features + ".index.csv");
  spdkm::write_manifest(a.out, man);

  std::cout << "objective=" << g17(model.objective) << "\n";
  return 0;
}

struct SelectKArgs {
  std::string features;
  int kmin = 1;
  int kmax = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_select_k(const SelectKArgs& a) {
  if (a.kmin < 1 || a.kmax < a.kmin) {
    throw spdkm::InvalidConfig("need 1 <= kmin <= kmax, got kmin=" + std::to_string(a.kmin) +
                               " kmax=" + std::to_string(a.kmax));
  }
  const std::vector<spdkm::EmbeddedPoint> points = points_from_file(a.features);
  if (static_cast<std::size_t>(a.kmax) > points.size()) {
    throw spdkm::KExceedsN("kmax=" + std::to_string(a.kmax) + " exceeds n=" +
                           std::to_string(points.size()));
  }

  // select_k over embedded points: mirror the library routine so features
  // files can be scored without re-reading the matrices.
  const int m = points.front().dim_m();
  spdkm::KSelectionReport report;
  report.m = m;
  report.n = points.size();
  for (int k = a.kmin; k <= a.kmax; ++k) {
    spdkm::KmeansConfig cfg;
    cfg.k = k;
    cfg.seed = spdkm::derive_seed(a.seed, static_cast<std::uint64_t>(k));
    const spdkm::ClusterModel model = spdkm::fit(points, cfg);
    spdkm::KCandidate c;
    c.k = k;
    c.objective = model.objective;
    c.penalty = spdkm::bic_penalty(m, k, report.n);
    c.score = c.objective + c.penalty;
    report.candidates.push_back(c);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.candidates.size(); ++i) {
    if (report.candidates[i].score < report.candidates[best].score) best = i;
  }
  report.chosen_k = report.candidates[best].k;

  std::string csv = "k,objective,penalty,score,chosen\n";
  for (const spdkm::KCandidate& c : report.candidates) {
    csv += std::to_string(c.k) + "," + g17(c.objective) + "," + g17(c.penalty) + "," +
           g17(c.score) + "," + (c.k == report.chosen_k ? "1" : "0") + "\n";
  }
  write_text(a.out, csv);

  spdkm::RunManifest man;
  man.command = "select-k";
  man.parameters = {{"features", a.features}, {"kmin", a.kmin}, {"kmax", a.kmax},
                    {"seed", a.seed},         {"out", a.out}};
  man.seed = a.seed;
  man.input_digests[a.features] = spdkm::file_digest(a.features);
  spdkm::write_manifest(a.out, man);

  std::cout << "k_star=" << report.chosen_k << "\n";
  return 0;
}

struct SweepArgs {
  std::vector<std::string> bands;
  std::string truth;
  std::string lags;
  std::string patches;
  std::string ks;
  std::uint64_t seed = 0;
  std::string out;
};

int run_sweep(const SweepArgs& a) {
  std::map<std::string, spdkm::RasterStack> stacks;
  std::map<std::string, std::string> band_files;
  for (const std::string& spec : a.bands) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw spdkm::InvalidConfig("--bands entries must look like NAME=FILE, got \"" + spec + "\"");
    }
    const std::string name = spec.substr(0, eq);
    const std::string file = spec.substr(eq + 1);
    if (stacks.count(name) != 0) {
      throw spdkm::InvalidConfig("--bands names a band twice: " + name);
    }
    stacks.emplace(name, stack_from_file(file, name));
    band_files[name] = file;
  }
  const spdkm::LabelRaster truth = truth_from_file(a.truth);
  const std::vector<int> lags = parse_int_list(a.lags, "--lags");
  const std::vector<int> patches = parse_int_list(a.patches, "--patches");
  const std::vector<int> ks = parse_int_list(a.ks, "--ks");

  spdkm::KmeansConfig tmpl;
  tmpl.seed = a.seed;
  const spdkm::SweepResult result = spdkm::sweep(stacks, truth, lags, patches, ks, tmpl);

  std::string csv = "band,lag,patch,k,ari\n";
  for (const spdkm::SweepCell& cell : result.grid) {
    csv += cell.band + "," + std::to_string(cell.lag) + "," + std::to_string(cell.patch) + "," +
           std::to_string(cell.k) + "," + g17(cell.ari) + "\n";
  }
  write_text(a.out, csv);

  spdkm::RunManifest man;
  man.command = "sweep";
  man.parameters = {{"bands", a.bands},     {"truth", a.truth}, {"lags", a.lags},
                    {"patches", a.patches}, {"ks", a.ks},       {"seed", a.seed},
                    {"out", a.out}};
  man.seed = a.seed;
  for (const auto& [name, file] : band_files) man.input_digests[file] = spdkm::file_digest(file);
  man.input_digests[a.truth] = spdkm::file_digest(a.truth);
  spdkm::write_manifest(a.out, man);

  std::cout << "best=" << result.best.band << "," << result.best.lag << "," << result.best.patch
            << "," << result.best.k << "," << g17(result.best.ari) << "\n";
  return 0;
}

struct ReportArgs {
  std::string labels;
  std::string truth;
  std::string sargde;  // "CC=FILE,VH=FILE" or empty
  double threshold = 0.05;
  std::string out;
};

int run_report(const ReportArgs& a) {
  const std::vector<LabelRow> rows = read_labels_csv(a.labels);
  const spdkm::LabelRaster truth = truth_from_file(a.truth);

  std::vector<int> model_labels;
  std::vector<int> truth_labels;
  for (const LabelRow& r : rows) {
    if (r.row < 0 || r.row >= truth.h || r.col < 0 || r.col >= truth.w) {
      throw spdkm::DimensionMismatch("labels row (" + std::to_string(r.row) + "," +
                                     std::to_string(r.col) + ") falls outside the " +
                                     std::to_string(truth.h) + "x" + std::to_string(truth.w) +
                                     " truth raster");
    }
    const double tv = truth.at(r.row, r.col);
    if (!std::isfinite(tv)) continue;  // nodata truth: excluded from overlap
    model_labels.push_back(r.label);
    truth_labels.push_back(static_cast<int>(std::llround(tv)));
  }
  if (model_labels.empty()) {
    throw spdkm::EmptyInput("no labeled pixel has valid truth data");
  }
  const auto overlap = spdkm::overlap_report(model_labels, truth_labels, a.threshold);

  std::string csv = "cluster,overlap_fraction,flagged\n";
  for (const spdkm::OverlapRow& r : overlap) {
    csv += std::to_string(r.cluster) + "," + g17(r.overlap_fraction) + "," +
           (r.flagged ? "1" : "0") + "\n";
  }
  write_text(a.out, csv);

  spdkm::RunManifest man;
  man.command = "report";
  man.parameters = {{"labels", a.labels},       {"truth", a.truth},
                    {"sargde", a.sargde},       {"threshold", a.threshold},
                    {"out", a.out}};
  man.input_digests[a.labels] = spdkm::file_digest(a.labels);
  man.input_digests[a.truth] = spdkm::file_digest(a.truth);

  if (!a.sargde.empty()) {
    std::map<std::string, std::string> files;
    for (const std::string& part : split(a.sargde, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) {
        throw spdkm::InvalidConfig("--sargde must look like CC=FILE,VH=FILE");
      }
      files[part.substr(0, eq)] = part.substr(eq + 1);
    }
    if (files.count("CC") == 0 || files.count("VH") == 0) {
      throw spdkm::InvalidConfig("--sargde needs both CC= and VH= entries");
    }
    const spdkm::RasterStack cc = stack_from_file(files.at("CC"), "CC");
    const spdkm::RasterStack vh = stack_from_file(files.at("VH"), "VH");

    std::string sargde_csv = "point_index,row,col,sargde\n";
    std::vector<double> values;
    std::vector<int> value_labels;
    std::vector<double> cc_series(static_cast<std::size_t>(cc.t));
    std::vector<double> vh_series(static_cast<std::size_t>(vh.t));
    for (const LabelRow& r : rows) {
      if (r.row >= cc.h || r.col >= cc.w || r.row >= vh.h || r.col >= vh.w) {
        throw spdkm::DimensionMismatch("labels row (" + std::to_string(r.row) + "," +
                                       std::to_string(r.col) +
                                       ") falls outside a SARGDE stack");
      }
      if (cc.masked(r.row, r.col) || vh.masked(r.row, r.col)) continue;
      for (int t = 0; t < cc.t; ++t) cc_series[static_cast<std::size_t>(t)] = cc.at(t, r.row, r.col);
      for (int t = 0; t < vh.t; ++t) vh_series[static_cast<std::size_t>(t)] = vh.at(t, r.row, r.col);
      double v = 0.0;
      try {
        v = spdkm::sargde_v1(cc_series, vh_series);
      } catch (const spdkm::DegenerateSeries&) {
        continue;  // constant series: no index for this pixel
      }
      sargde_csv += std::to_string(r.point_index) + "," + std::to_string(r.row) + "," +
                    std::to_string(r.col) + "," + g17(v) + "\n";
      values.push_back(v);
      value_labels.push_back(r.label);
    }
    write_text(a.out + ".sargde.csv", sargde_csv);

    const spdkm::AnovaResult anova = spdkm::anova_r2(values, value_labels);
    write_text(a.out + ".anova.csv",
               "r2,r2_adjusted\n" + g17(anova.r2) + "," + g17(anova.r2_adjusted) + "\n");
    std::cout << "r2=" << g17(anova.r2) << "\n";
    std::cout << "r2_adjusted=" << g17(anova.r2_adjusted) << "\n";

    man.input_digests[files.at("CC")] = spdkm::file_digest(files.at("CC"));
    man.input_digests[files.at("VH")] = spdkm::file_digest(files.at("VH"));
  }

  spdkm::write_manifest(a.out, man);
  return 0;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const spdkm::KExceedsN& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const spdkm::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const spdkm::DegenerateOutput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const spdkm::ConstantSeries& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const spdkm::DegenerateGroups& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const spdkm::DegenerateSeries& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-means clustering of SPD matrices under the log-Cholesky metric"};
  app.require_subcommand(1);

  FeaturesArgs fa;
  CLI::App* features = app.add_subcommand(
      "features", "Build embedded autocovariance features from a raster stack");
  features->add_option("--band", fa.band_file, "input 3-D tensor (time x height x width)")
      ->required();
  features->add_option("--lag", fa.lag, "autocovariance lag (matrix dimension is lag+1)")
      ->required();
  features->add_option("--patch", fa.patch, "patch size for local averaging")->required();
  features->add_option("--jitter", fa.jitter, "relative diagonal regularisation");
  features->add_option("--border", fa.border, "partial border blocks: drop or avg");
  features->add_option("--out", fa.out, "output 2-D feature tensor")->required();

  ClusterArgs ca;
  CLI::App* cluster = app.add_subcommand("cluster", "k-means over an embedded feature tensor");
  cluster->add_option("--features", ca.features, "input 2-D feature tensor")->required();
  cluster->add_option("--k", ca.k, "number of clusters")->required();
  cluster->add_option("--restarts", ca.restarts, "independent seeded restarts");
  cluster->add_option("--seed", ca.seed, "base seed");
  cluster->add_option("--out", ca.out, "labels CSV")->required();
  cluster->add_option("--centroids", ca.centroids, "centroids CSV")->required();

  SelectKArgs sa;
  CLI::App* select = app.add_subcommand("select-k", "choose the cluster count by penalised objective");
  select->add_option("--features", sa.features, "input 2-D feature tensor")->required();
  select->add_option("--kmin", sa.kmin, "smallest candidate k")->required();
  select->add_option("--kmax", sa.kmax, "largest candidate k")->required();
  select->add_option("--seed", sa.seed, "base seed");
  select->add_option("--out", sa.out, "report CSV")->required();

  SweepArgs wa;
  CLI::App* sweep = app.add_subcommand("sweep", "ARI grid over bands, lags, patches and ks");
  sweep->add_option("--bands", wa.bands, "band inputs as NAME=FILE")->required()->expected(-1);
  sweep->add_option("--truth", wa.truth, "2-D ground-truth raster")->required();
  sweep->add_option("--lags", wa.lags, "comma-separated lag list")->required();
  sweep->add_option("--patches", wa.patches, "comma-separated patch list")->required();
  sweep->add_option("--ks", wa.ks, "comma-separated k list")->required();
  sweep->add_option("--seed", wa.seed, "base seed");
  sweep->add_option("--out", wa.out, "grid CSV")->required();

  ReportArgs ra;
  CLI::App* report = app.add_subcommand("report", "per-cluster truth overlap, SARGDE and ANOVA");
  report->add_option("--labels", ra.labels, "labels CSV from cluster")->required();
  report->add_option("--truth", ra.truth, "2-D ground-truth raster")->required();
  report->add_option("--sargde", ra.sargde, "SARGDE inputs as CC=FILE,VH=FILE");
  report->add_option("--threshold", ra.threshold, "overlap flag threshold");
  report->add_option("--out", ra.out, "overlap report CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  if (features->parsed()) return guarded([&] { return run_features(fa); });
  if (cluster->parsed()) return guarded([&] { return run_cluster(ca); });
  if (select->parsed()) return guarded([&] { return run_select_k(sa); });
  if (sweep->parsed()) return guarded([&] { return run_sweep(wa); });
  if (report->parsed()) return guarded([&] { return run_report(ra); });
  return 3;
}
