#include "meshot/scenario.hpp"

#include <cmath>
#include <json.hpp>
#include <numbers>
#include <set>

#include "meshot/errors.hpp"
#include "meshot/io.hpp"
#include "meshot/snapshot.hpp"
#include "meshot/steering.hpp"

namespace meshot {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

// Object reader that remembers which keys were read and rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  T get(const std::string& key, T fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    return convert<T>(*v, at(key));
  }

  template <typename T>
  T require(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(at(key), "missing");
    return convert<T>(*v, at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw ConfigError((path.empty() ? std::string("config") : path) + ": " + msg);
  }

  template <typename T>
  static T convert(const json& v, const std::string& path) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(path, "expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) fail(path, "expected an integer");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(path, "expected true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(path, "expected a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      fail(path, e.what());
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Eigen::Vector3d vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) Fields::fail(path, "expected [x, y, z]");
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) out(i) = Fields::convert<double>(v[static_cast<std::size_t>(i)], path);
  return out;
}

AngleAxis parse_axis(const json& v, const std::string& path) {
  Fields f(v, path);
  AngleAxis a;
  a.min_deg = f.require<double>("min_deg");
  a.max_deg = f.require<double>("max_deg");
  a.step_deg = f.get<double>("step_deg", 1.0);
  f.finish();
  if (!(a.step_deg > 0.0)) Fields::fail(path + ".step_deg", "must be > 0");
  if (!(a.max_deg >= a.min_deg)) Fields::fail(path + ".max_deg", "must be >= min_deg");
  if (a.min_deg < -90.0 || a.max_deg > 90.0) Fields::fail(path, "angles must lie in [-90, 90] degrees");
  return a;
}

RadarConfig parse_radar(const json& v) {
  Fields f(v, "radar");
  RadarConfig r;
  r.f0 = f.get("f0", r.f0);
  r.bandwidth = f.get("bandwidth", r.bandwidth);
  r.chirp_duration = f.get("chirp_duration", r.chirp_duration);
  r.sample_rate = f.get("sample_rate", r.sample_rate);
  r.prt = f.get("prt", r.prt);
  r.num_chirps = f.get("num_chirps", r.num_chirps);
  r.num_elev = f.get("num_elev", r.num_elev);
  r.elem_spacing = f.get("elem_spacing", r.elem_spacing);
  r.complex_baseband = f.get("complex_baseband", r.complex_baseband);
  r.range_attenuation = f.get("range_attenuation", r.range_attenuation);
  r.num_azimuth = f.get("num_azimuth", r.num_azimuth);
  f.finish();
  r.validate();
  return r;
}

PointSpec parse_point(const json& v, const std::string& path) {
  Fields f(v, path);
  PointSpec p;
  if (const json* pos = f.find("position")) {
    p.cartesian = true;
    p.position = vec3(*pos, f.at("position"));
    if (f.find("range") || f.find("azimuth_deg") || f.find("elevation_deg")) {
      Fields::fail(path, "give either position or range/azimuth_deg/elevation_deg");
    }
  } else {
    p.range = f.require<double>("range");
    p.azimuth_deg = f.get("azimuth_deg", 0.0);
    p.elevation_deg = f.get("elevation_deg", 0.0);
    if (!(p.range > 0.0)) Fields::fail(f.at("range"), "must be > 0");
  }
  p.amplitude = f.get("amplitude", 1.0);
  if (!(p.amplitude > 0.0)) Fields::fail(f.at("amplitude"), "must be > 0");
  f.finish();
  return p;
}

CloudSpec parse_cloud(const json& v, const std::filesystem::path& base_dir) {
  Fields f(v, "scene.cloud");
  CloudSpec c;
  std::filesystem::path p = f.require<std::string>("path");
  c.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  try {
    c.format = parse_cloud_format(f.get<std::string>("format", "xyz-text"));
  } catch (const ConfigError& e) {
    Fields::fail(f.at("format"), e.what());
  }
  const auto resample = f.get<std::int64_t>("resample", 0);
  if (resample < 0) Fields::fail(f.at("resample"), "must be >= 0");
  c.resample = static_cast<std::size_t>(resample);
  if (const json* a = f.find("amplitude")) {
    if (!a->is_array() || a->size() != 2) Fields::fail(f.at("amplitude"), "expected [lo, hi]");
    const double lo = Fields::convert<double>((*a)[0], f.at("amplitude"));
    const double hi = Fields::convert<double>((*a)[1], f.at("amplitude"));
    if (!(lo > 0.0 && lo < hi)) Fields::fail(f.at("amplitude"), "need 0 < lo < hi");
    c.amplitude = std::pair{lo, hi};
  }
  if (const json* o = f.find("offset")) c.offset = vec3(*o, f.at("offset"));
  c.seed = f.get<std::uint64_t>("seed", 1);
  f.finish();
  return c;
}

SceneSpec parse_scene_spec(const json& v, const std::filesystem::path& base_dir) {
  Fields f(v, "scene");
  SceneSpec s;
  s.label = f.get<std::string>("label", "");
  if (const json* pts = f.find("points")) {
    if (!pts->is_array()) Fields::fail("scene.points", "expected an array");
    for (std::size_t i = 0; i < pts->size(); ++i) {
      s.points.push_back(parse_point((*pts)[i], "scene.points[" + std::to_string(i) + "]"));
    }
  }
  if (const json* c = f.find("cloud")) s.cloud = parse_cloud(*c, base_dir);
  f.finish();
  if (s.points.empty() && !s.cloud) Fields::fail("scene", "needs points or a cloud");
  return s;
}

SnapshotSpec parse_snapshots(const json& v) {
  Fields f(v, "snapshots");
  SnapshotSpec s;
  s.l0 = f.get("l0", 0);
  if (const json* e = f.find("extra")) {
    if (e->is_string() && e->get<std::string>() == "max") {
      s.extra_max = true;
    } else {
      s.extra = Fields::convert<int>(*e, "snapshots.extra");
    }
  }
  s.length = f.get("length", 0);
  f.finish();
  if (s.l0 < 0) Fields::fail("snapshots.l0", "must be >= 0");
  if (s.extra < 0) Fields::fail("snapshots.extra", "must be >= 0 or \"max\"");
  if (s.length < 0) Fields::fail("snapshots.length", "must be >= 0");
  return s;
}

ImagingSpec parse_imaging(const json& v) {
  Fields f(v, "imaging");
  ImagingSpec s;
  try {
    s.method.kind = parse_method(f.get<std::string>("method", "dbf"));
  } catch (const ConfigError& e) {
    Fields::fail("imaging.method", e.what());
  }
  s.method.sources = f.get("sources", 1);
  s.method.loading = f.get("loading", 0.0);
  s.compensate = f.get("compensate", true);
  try {
    s.window = parse_window(f.get<std::string>("window", "hann"));
  } catch (const ConfigError& e) {
    Fields::fail("imaging.window", e.what());
  }
  s.detect_threshold_db = f.get("detect_threshold_db", 20.0);
  s.range_bins = f.get("range_bins", std::vector<int>{});
  f.finish();
  if (s.method.loading < 0.0) Fields::fail("imaging.loading", "must be >= 0");
  if (s.method.sources < 1) Fields::fail("imaging.sources", "must be >= 1");
  return s;
}

std::string window_name(Window w) {
  switch (w) {
    case Window::rect: return "rect";
    case Window::hann: return "hann";
    case Window::hamming: return "hamming";
  }
  return "?";
}

const char* method_name(Method m) {
  switch (m) {
    case Method::dbf: return "dbf";
    case Method::mvdr: return "mvdr";
    case Method::music: return "music";
  }
  return "?";
}

json axis_json(const AngleAxis& a) {
  return {{"min_deg", a.min_deg}, {"max_deg", a.max_deg}, {"step_deg", a.step_deg}};
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  Fields f(j, "");
  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  if (const json* r = f.find("radar")) cfg.radar = parse_radar(*r);
  if (const json* m = f.find("motion")) {
    Fields mf(*m, "motion");
    if (const json* v = mf.find("velocity")) cfg.motion.velocity = vec3(*v, "motion.velocity");
    mf.finish();
  }
  const json* scene = f.find("scene");
  if (!scene) Fields::fail("scene", "missing");
  cfg.scene = parse_scene_spec(*scene, base_dir);
  if (const json* s = f.find("snapshots")) cfg.snapshots = parse_snapshots(*s);
  if (const json* g = f.find("grid")) {
    Fields gf(*g, "grid");
    if (const json* a = gf.find("azimuth")) cfg.azimuth = parse_axis(*a, "grid.azimuth");
    if (const json* e = gf.find("elevation")) cfg.elevation = parse_axis(*e, "grid.elevation");
    gf.finish();
  }
  if (const json* i = f.find("imaging")) cfg.imaging = parse_imaging(*i);
  if (const json* n = f.find("noise")) {
    Fields nf(*n, "noise");
    if (const json* s = nf.find("snr_db"); s && !s->is_null()) cfg.snr_db = Fields::convert<double>(*s, "noise.snr_db");
    cfg.noise_seed = nf.get<std::uint64_t>("seed", 1);
    nf.finish();
  }
  if (const json* m = f.find("metrics")) {
    Fields mf(*m, "metrics");
    cfg.metrics_threshold_db = mf.get("threshold_db", 20.0);
    cfg.heatmap_window_db = mf.get("heatmap_window_db", 40.0);
    mf.finish();
    if (!(cfg.heatmap_window_db > 0.0)) Fields::fail("metrics.heatmap_window_db", "must be > 0");
  }
  if (const json* o = f.find("output")) cfg.output = Fields::convert<std::string>(*o, "output");
  f.finish();
  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_scenario(text, path.parent_path());
}

void validate_scenario(const ScenarioConfig& cfg) {
  cfg.radar.validate();
  if (cfg.scene.points.empty() && !cfg.scene.cloud) throw ConfigError("scene: needs points or a cloud");
  if (cfg.imaging.method.kind == Method::music && cfg.imaging.method.sources < 1) {
    throw ConfigError("imaging.sources: must be >= 1");
  }
  const int bins = usable_range_bins(cfg.radar);
  for (int b : cfg.imaging.range_bins) {
    if (b < 0 || b >= bins) {
      throw ConfigError("imaging.range_bins: bin " + std::to_string(b) + " outside [0, " + std::to_string(bins) + ")");
    }
  }
  try {
    const auto plan = resolve_plan(cfg);
    const int m = cfg.radar.num_channels() * plan.positions();
    if (cfg.imaging.method.kind == Method::mvdr && cfg.imaging.method.loading <= 0.0 && plan.length < m) {
      throw ConfigError("imaging.loading: mvdr needs loading > 0 when the snapshot length (" +
                        std::to_string(plan.length) + ") is below the array size (" + std::to_string(m) + ")");
    }
  } catch (const SpeedOutOfRangeError& e) {
    throw ConfigError(std::string("motion.velocity: ") + e.what());
  } catch (const FrameTooShortError& e) {
    throw ConfigError(std::string("snapshots.extra: ") + e.what());
  }
}

std::string scenario_json(const ScenarioConfig& cfg) {
  const auto& r = cfg.radar;
  json points = json::array();
  for (const auto& p : cfg.scene.points) {
    json o = {{"amplitude", p.amplitude}};
    if (p.cartesian) {
      o["position"] = {p.position.x(), p.position.y(), p.position.z()};
    } else {
      o["range"] = p.range;
      o["azimuth_deg"] = p.azimuth_deg;
      o["elevation_deg"] = p.elevation_deg;
    }
    points.push_back(o);
  }
  json scene = {{"label", cfg.scene.label}, {"points", points}};
  if (cfg.scene.cloud) {
    const auto& c = *cfg.scene.cloud;
    json cloud = {{"path", c.path.string()},
                  {"format", c.format == CloudFormat::ply_ascii ? "ply-ascii" : "xyz-text"},
                  {"resample", c.resample},
                  {"offset", {c.offset.x(), c.offset.y(), c.offset.z()}},
                  {"seed", c.seed}};
    if (c.amplitude) cloud["amplitude"] = {c.amplitude->first, c.amplitude->second};
    scene["cloud"] = cloud;
  }
  json j = {
      {"radar",
       {{"f0", r.f0}, {"bandwidth", r.bandwidth}, {"chirp_duration", r.chirp_duration},
        {"sample_rate", r.sample_rate}, {"prt", r.prt}, {"num_chirps", r.num_chirps},
        {"num_elev", r.num_elev}, {"elem_spacing", r.elem_spacing},
        {"complex_baseband", r.complex_baseband}, {"range_attenuation", r.range_attenuation},
        {"num_azimuth", r.num_azimuth}}},
      {"motion", {{"velocity", {cfg.motion.velocity.x(), cfg.motion.velocity.y(), cfg.motion.velocity.z()}}}},
      {"scene", scene},
      {"snapshots",
       {{"l0", cfg.snapshots.l0},
        {"extra", cfg.snapshots.extra_max ? json("max") : json(cfg.snapshots.extra)},
        {"length", cfg.snapshots.length}}},
      {"grid", {{"azimuth", axis_json(cfg.azimuth)}, {"elevation", axis_json(cfg.elevation)}}},
      {"imaging",
       {{"method", method_name(cfg.imaging.method.kind)}, {"sources", cfg.imaging.method.sources},
        {"loading", cfg.imaging.method.loading}, {"compensate", cfg.imaging.compensate},
        {"window", window_name(cfg.imaging.window)}, {"detect_threshold_db", cfg.imaging.detect_threshold_db},
        {"range_bins", cfg.imaging.range_bins}}},
      {"noise", {{"snr_db", cfg.snr_db ? json(*cfg.snr_db) : json(nullptr)}, {"seed", cfg.noise_seed}}},
      {"metrics", {{"threshold_db", cfg.metrics_threshold_db}, {"heatmap_window_db", cfg.heatmap_window_db}}},
      {"output", cfg.output.string()}};
  return j.dump(2) + "\n";
}

Scene build_scene(const ScenarioConfig& cfg) {
  Scene scene;
  scene.label = cfg.scene.label;
  for (const auto& p : cfg.scene.points) {
    Scatterer s;
    s.position = p.cartesian ? p.position
                             : spherical_to_cartesian(p.range, p.azimuth_deg * kDeg, p.elevation_deg * kDeg);
    s.amplitude = p.amplitude;
    scene.scatterers.push_back(s);
  }
  if (cfg.scene.cloud) {
    const auto& c = *cfg.scene.cloud;
    Scene cloud = load_point_cloud(c.path, c.format);
    if (c.resample > 0) cloud = resample_uniform(cloud, c.resample, c.seed);
    if (c.amplitude) cloud = assign_swerling3_amplitudes(cloud, c.amplitude->first, c.amplitude->second, c.seed + 1);
    for (auto& s : cloud.scatterers) {
      s.position += c.offset;
      scene.scatterers.push_back(s);
    }
  }
  if (scene.empty()) throw EmptySceneError("scene: no scatterers");
  return scene;
}

RawDataCube simulate_scenario(const ScenarioConfig& cfg) {
  const Scene scene = build_scene(cfg);
  RawDataCube cube = simulate_frame(scene, cfg.radar, cfg.motion);
  if (cfg.snr_db) cube = add_noise(cube, *cfg.snr_db, cfg.noise_seed);
  return cube;
}

SnapshotPlan resolve_plan(const ScenarioConfig& cfg) {
  const auto& s = cfg.snapshots;
  int extra = s.extra;
  if (s.extra_max) {
    const int interval = compute_snapshot_interval(cfg.radar, cfg.motion);
    const int length = s.length > 0 ? s.length : interval;
    extra = max_feasible_extra(cfg.radar.num_chirps, interval, s.l0, length);
    if (extra < 0) {
      throw FrameTooShortError("snapshots: l0 + L_s exceeds the frame", extra);
    }
  }
  return build_plan(cfg.radar, cfg.motion, s.l0, extra, s.length);
}

ImageResult image_scenario(const RawDataCube& raw, const ScenarioConfig& cfg) {
  const auto& radar = cfg.radar;
  if (raw.samples.dim(0) != static_cast<std::size_t>(radar.num_channels()) ||
      raw.samples.dim(1) != static_cast<std::size_t>(radar.num_chirps) ||
      raw.samples.dim(2) != static_cast<std::size_t>(radar.samples_per_chirp())) {
    throw DimensionError("image: raw cube dims do not match the radar config");
  }
  RawDataCube cube = raw;
  cube.cfg = radar;
  cube.motion = cfg.motion;

  ImageResult out;
  out.plan = resolve_plan(cfg);
  const auto spec = range_fft(cube, cfg.imaging.window);
  if (cfg.imaging.range_bins.empty()) {
    out.detections = detect_range_bins(spec, cfg.imaging.detect_threshold_db);
  } else {
    out.detections.bins = cfg.imaging.range_bins;
    std::sort(out.detections.bins.begin(), out.detections.bins.end());
    out.detections.bins.erase(std::unique(out.detections.bins.begin(), out.detections.bins.end()),
                              out.detections.bins.end());
  }

  const auto grid = ImagingGrid::make(cfg.azimuth, cfg.elevation, radar);
  const auto ctx = SteeringContext::make(radar, out.plan, cfg.motion, cfg.imaging.compensate);
  std::vector<SnapshotTensor> tensors;
  tensors.reserve(out.detections.bins.size());
  for (int b : out.detections.bins) tensors.push_back(form_tensor(extract_slice(spec, b), out.plan, b));
  out.cube = scan(tensors, grid, cfg.imaging.method, ctx);
  return out;
}

}  // namespace meshot
