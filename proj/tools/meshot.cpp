#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>

#include "meshot/errors.hpp"
#include "meshot/io.hpp"
#include "meshot/metrics.hpp"
#include "meshot/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace meshot;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string cube;
  std::string method;
  std::string snapshots;
  bool no_compensation = false;
  std::optional<std::uint64_t> seed;
  std::string baseline;
  std::vector<std::string> reports;
};

ScenarioConfig load(const Options& o) {
  ScenarioConfig cfg = load_scenario(o.config);
  if (o.seed) {
    cfg.noise_seed = *o.seed;
    if (cfg.scene.cloud) cfg.scene.cloud->seed = *o.seed;
  }
  if (!o.method.empty()) cfg.imaging.method.kind = parse_method(o.method);
  if (!o.snapshots.empty()) {
    if (o.snapshots == "max") {
      cfg.snapshots.extra_max = true;
    } else {
      try {
        std::size_t used = 0;
        const int n = std::stoi(o.snapshots, &used);
        if (used != o.snapshots.size() || n < 0) throw std::invalid_argument("");
        cfg.snapshots.extra = n;
        cfg.snapshots.extra_max = false;
      } catch (const std::exception&) {
        throw ConfigError("--snapshots: expected a non-negative integer or 'max'");
      }
    }
  }
  if (o.no_compensation) cfg.imaging.compensate = false;
  if (!o.baseline.empty()) {
    if (o.baseline != "mimo-only") throw ConfigError("--baseline: only 'mimo-only' is supported");
    // The physical array alone, with every chirp of the frame as a snapshot.
    cfg.snapshots.extra = 0;
    cfg.snapshots.extra_max = false;
    cfg.snapshots.length = cfg.radar.num_chirps - cfg.snapshots.l0;
  }
  if (!o.out.empty()) cfg.output = o.out;
  validate_scenario(cfg);
  return cfg;
}

struct Manifest {
  json files = json::object();
  void add(const fs::path& p, const std::string& bytes) { files[p.filename().string()] = fnv1a64_hex(bytes); }
};

void emit(const fs::path& p, const std::string& bytes, Manifest& m) {
  write_file_atomic(p, bytes);
  m.add(p, bytes);
}

void write_manifest(const fs::path& dir, const std::string& name, const ScenarioConfig& cfg, Manifest& m,
                    json extra) {
  const std::string echo = scenario_json(cfg);
  extra["config_hash"] = fnv1a64_hex(echo);
  extra["config"] = json::parse(echo);
  extra["noise_seed"] = cfg.noise_seed;
  extra["files"] = m.files;
  write_file_atomic(dir / name, extra.dump(2) + "\n");
}

int run_simulate(const Options& o) {
  const auto cfg = load(o);
  const fs::path dir = cfg.output;
  const auto raw = simulate_scenario(cfg);
  Manifest m;
  emit(dir / "raw.cube", encode_raw_cube(raw.samples), m);
  const auto d = derived_params(cfg.radar);
  write_manifest(dir, "simulate.manifest.json", cfg, m,
                 {{"command", "simulate"},
                  {"dims", {raw.samples.dim(0), raw.samples.dim(1), raw.samples.dim(2)}},
                  {"derived",
                   {{"mu", d.mu},
                    {"lambda", d.lambda},
                    {"samples_per_chirp", d.samples_per_chirp},
                    {"range_res", d.range_res},
                    {"unambiguous_range", d.unambiguous_range}}},
                  {"speed_class", to_string(validate_speed(cfg.radar, cfg.motion))}});
  std::cout << "wrote " << (dir / "raw.cube").string() << " [" << raw.samples.dim(0) << " x "
            << raw.samples.dim(1) << " x " << raw.samples.dim(2) << "]\n";
  return 0;
}

int run_image(const Options& o) {
  const auto cfg = load(o);
  const fs::path dir = cfg.output;
  const fs::path cube_path = o.cube.empty() ? dir / "raw.cube" : fs::path(o.cube);
  RawDataCube raw{read_raw_cube(cube_path), cfg.radar, cfg.motion};
  const auto res = image_scenario(raw, cfg);
  if (res.detections.bins.empty()) std::cerr << "warning: no range bins detected; power cube is empty\n";

  Manifest m;
  emit(dir / "power.cube", encode_power_cube(res.cube), m);
  const auto& g = res.cube.grid;
  auto deg = [](std::vector<double> v) {
    for (auto& x : v) x *= 180.0 / std::numbers::pi;
    return v;
  };
  struct View {
    Projection p;
    const char* name;
    std::vector<double> rows, cols;
  };
  for (const View& v : {View{Projection::range_azimuth, "range_azimuth", g.range, deg(g.azimuth)},
                        View{Projection::range_elevation, "range_elevation", g.range, deg(g.elevation)},
                        View{Projection::azimuth_elevation, "azimuth_elevation", deg(g.azimuth), deg(g.elevation)}}) {
    const auto map = max_projection(res.cube, v.p);
    emit(dir / (std::string(v.name) + ".csv"), matrix_csv(map, v.rows, v.cols), m);
    emit(dir / (std::string(v.name) + ".pgm"), matrix_pgm(map, cfg.heatmap_window_db), m);
  }
  write_manifest(dir, "image.manifest.json", cfg, m,
                 {{"command", "image"},
                  {"input", cube_path.string()},
                  {"input_hash", fnv1a64_hex(read_file(cube_path))},
                  {"detected_bins", res.detections.bins},
                  {"heatmap_window_db", cfg.heatmap_window_db},
                  {"scan", json::parse(res.cube.meta)}});
  std::cout << "imaged " << res.detections.bins.size() << " range bins with " << res.cube.method << ", "
            << res.plan.positions() << " aperture positions -> " << (dir / "power.cube").string() << "\n";
  return 0;
}

int run_metrics(const Options& o) {
  const auto cfg = load(o);
  const fs::path dir = cfg.output;
  const fs::path cube_path = o.cube.empty() ? dir / "power.cube" : fs::path(o.cube);
  const auto cube = read_power_cube(cube_path);
  const auto expected = ImagingGrid::make(cfg.azimuth, cfg.elevation, cfg.radar);
  auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, std::abs(b[i]))) return false;
    return true;
  };
  if (!same(cube.grid.range, expected.range) || !same(cube.grid.azimuth, expected.azimuth) ||
      !same(cube.grid.elevation, expected.elevation)) {
    throw DimensionError("metrics: power cube grid does not match the config grid");
  }
  const auto r = evaluate(cube, build_scene(cfg), cfg.metrics_threshold_db);
  Manifest m;
  emit(dir / "metrics.json", to_json(r), m);
  emit(dir / "contrast.csv", contrast_csv(r), m);
  write_manifest(dir, "metrics.manifest.json", cfg, m,
                 {{"command", "metrics"}, {"input", cube_path.string()}, {"input_hash", fnv1a64_hex(read_file(cube_path))}});
  std::printf("accuracy %.4f  precision %.4f  sensitivity %.4f  specificity %.4f  auc %.4f  f-score %.4f\n",
              r.accuracy, r.precision, r.sensitivity, r.specificity, r.auc, r.f_score);
  return 0;
}

int run_compare(const Options& o) {
  if (o.reports.size() != 2) throw ConfigError("compare: expected two report files");
  MetricsReport a, b;
  try {
    a = report_from_json(read_file(o.reports[0]));
    b = report_from_json(read_file(o.reports[1]));
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  struct Row {
    const char* name;
    double a, b;
  };
  const Row rows[] = {{"accuracy", a.accuracy, b.accuracy},
                      {"precision", a.precision, b.precision},
                      {"sensitivity", a.sensitivity, b.sensitivity},
                      {"specificity", a.specificity, b.specificity},
                      {"auc", a.auc, b.auc},
                      {"f_score", a.f_score, b.f_score},
                      {"contrast_range_azimuth", a.contrast.range_azimuth, b.contrast.range_azimuth},
                      {"contrast_range_elevation", a.contrast.range_elevation, b.contrast.range_elevation},
                      {"contrast_azimuth_elevation", a.contrast.azimuth_elevation, b.contrast.azimuth_elevation},
                      {"dynamic_range_db", a.dynamic_range_db, b.dynamic_range_db}};
  std::string csv = "metric,a,b,ratio\n";
  std::printf("%-28s %12s %12s %10s\n", "metric", a.method.c_str(), b.method.c_str(), "b/a");
  for (const auto& r : rows) {
    const double ratio = r.a == r.b ? 1.0 : r.b / r.a;
    std::printf("%-28s %12.6g %12.6g %10.4g\n", r.name, r.a, r.b, ratio);
    char line[160];
    std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g\n", r.name, r.a, r.b, ratio);
    csv += line;
  }
  if (!o.out.empty()) write_file_atomic(fs::path(o.out) / "compare.csv", csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motion-enhanced snapshot imaging for side-looking FMCW radar"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides the config)");
    sub->add_option("--seed", o.seed, "noise and resampling seed");
  };
  auto imaging = [&](CLI::App* sub) {
    sub->add_option("--method", o.method, "beamformer")->check(CLI::IsMember({"dbf", "mvdr", "music"}));
    sub->add_option("--snapshots", o.snapshots, "extra motion snapshots, N or max");
    sub->add_flag("--no-compensation", o.no_compensation, "plain steering vector");
    sub->add_option("--baseline", o.baseline, "mimo-only images the physical array alone")
        ->check(CLI::IsMember({"mimo-only"}));
  };

  auto* sim = app.add_subcommand("simulate", "simulate a raw data cube");
  common(sim);
  imaging(sim);
  auto* img = app.add_subcommand("image", "range processing and 3D beamscan");
  common(img);
  imaging(img);
  img->add_option("--cube", o.cube, "raw cube (default OUT/raw.cube)");
  auto* met = app.add_subcommand("metrics", "evaluate a power cube against the scene");
  common(met);
  imaging(met);
  met->add_option("--cube", o.cube, "power cube (default OUT/power.cube)");
  auto* cmp = app.add_subcommand("compare", "side-by-side table of two metrics reports");
  cmp->add_option("reports", o.reports, "two metrics.json files")->expected(2)->required();
  cmp->add_option("--out", o.out, "directory for compare.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) return run_simulate(o);
    if (*img) return run_image(o);
    if (*met) return run_metrics(o);
    if (*cmp) return run_compare(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
