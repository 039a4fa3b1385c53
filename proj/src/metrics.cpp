#include "meshot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "meshot/errors.hpp"

namespace meshot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio(double num, double den) { return den > 0.0 ? num / den : kNaN; }

std::size_t nearest_index(const std::vector<double>& axis, double v) {
  const auto it = std::lower_bound(axis.begin(), axis.end(), v);
  if (it == axis.begin()) return 0;
  if (it == axis.end()) return axis.size() - 1;
  const auto i = static_cast<std::size_t>(it - axis.begin());
  return (v - axis[i - 1] <= axis[i] - v) ? i - 1 : i;
}

bool inside(const std::vector<double>& axis, double v) {
  if (axis.empty()) return false;
  const double half = axis.size() > 1 ? 0.5 * (axis[1] - axis[0]) : 0.0;
  return v >= axis.front() - half && v <= axis.back() + half;
}

nlohmann::json number(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }
double number(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

Mask voxelise(const PowerCube& cube, double threshold_db) {
  std::vector<double> positive;
  for (double v : cube.values.flat())
    if (v > 0.0) positive.push_back(v);
  if (positive.empty()) throw DegenerateInputError("voxelise: cube has no positive cells");
  const auto mid = positive.begin() + static_cast<std::ptrdiff_t>(positive.size() / 2);
  std::nth_element(positive.begin(), mid, positive.end());
  double floor = *mid;
  if (positive.size() % 2 == 0) {
    floor = 0.5 * (floor + *std::max_element(positive.begin(), mid));
  }
  Mask m(cube.bins(), cube.azimuths(), cube.elevations(), 0);
  auto src = cube.values.flat();
  auto dst = m.flat();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] > 0.0 && 10.0 * std::log10(src[i] / floor) > threshold_db;
  }
  return m;
}

Mask truth_voxels(const Scene& scene, const ImagingGrid& grid) {
  Mask m(grid.range.size(), grid.azimuth.size(), grid.elevation.size(), 0);
  for (const auto& s : scene.scatterers) {
    const auto sph = cartesian_to_spherical(s.position);
    if (!inside(grid.range, sph.range) || !inside(grid.azimuth, sph.azimuth) ||
        !inside(grid.elevation, sph.elevation)) {
      continue;
    }
    m(nearest_index(grid.range, sph.range), nearest_index(grid.azimuth, sph.azimuth),
      nearest_index(grid.elevation, sph.elevation)) = 1;
  }
  return m;
}

ConfusionCounts confusion(const Mask& detected, const Mask& truth) {
  if (detected.dims() != truth.dims()) throw DimensionError("confusion: mask shapes differ");
  ConfusionCounts c;
  auto d = detected.flat();
  auto t = truth.flat();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] && t[i]) ++c.tp;
    else if (d[i]) ++c.fp;
    else if (t[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

const char* to_string(Plane p) {
  switch (p) {
    case Plane::range_azimuth: return "range-azimuth";
    case Plane::range_elevation: return "range-elevation";
    case Plane::azimuth_elevation: return "azimuth-elevation";
  }
  return "?";
}

MetricsReport report(const ConfusionCounts& c) {
  MetricsReport r;
  r.counts = c;
  const double tp = double(c.tp), fp = double(c.fp), tn = double(c.tn), fn = double(c.fn);
  r.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  r.precision = ratio(tp, tp + fp);
  r.sensitivity = ratio(tp, tp + fn);
  r.specificity = ratio(tn, tn + fp);
  r.auc = 0.5 * (r.sensitivity + r.specificity);
  // Same as the harmonic mean of precision and sensitivity, but still defined
  // when nothing was detected.
  r.f_score = ratio(2.0 * tp, 2.0 * tp + fp + fn);
  return r;
}

double image_contrast(const Eigen::MatrixXd& power_slice, ContrastMode mode) {
  if (power_slice.size() == 0) throw DimensionError("image_contrast: empty slice");
  Eigen::ArrayXXd v = power_slice.array().max(0.0);
  if (mode == ContrastMode::amplitude) v = v.sqrt();
  const double mean = v.mean();
  if (!(mean > 0.0)) throw DegenerateInputError("image_contrast: zero-mean slice");
  const double var = (v - mean).square().mean();
  return std::sqrt(var) / mean;
}

double plane_contrast(const PowerCube& cube, Plane plane, ContrastMode mode) {
  // Range bins that were never imaged hold no pixels.
  std::vector<std::size_t> bins;
  for (std::size_t r = 0; r < cube.bins(); ++r) {
    bool any = false;
    for (std::size_t a = 0; a < cube.azimuths() && !any; ++a)
      for (std::size_t e = 0; e < cube.elevations() && !any; ++e) any = cube.values(r, a, e) > 0.0;
    if (any) bins.push_back(r);
  }
  const auto nr = bins.size(), na = cube.azimuths(), ne = cube.elevations();
  std::size_t slices = 0, rows = 0, cols = 0;
  switch (plane) {
    case Plane::range_azimuth: slices = ne; rows = nr; cols = na; break;
    case Plane::range_elevation: slices = na; rows = nr; cols = ne; break;
    case Plane::azimuth_elevation: slices = nr; rows = na; cols = ne; break;
  }
  double acc = 0.0;
  std::size_t used = 0;
  Eigen::MatrixXd s(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t k = 0; k < slices; ++k) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        double v = 0.0;
        switch (plane) {
          case Plane::range_azimuth: v = cube.values(bins[i], j, k); break;
          case Plane::range_elevation: v = cube.values(bins[i], k, j); break;
          case Plane::azimuth_elevation: v = cube.values(bins[k], i, j); break;
        }
        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      }
    if (s.size() == 0 || !(s.maxCoeff() > 0.0)) continue;
    acc += image_contrast(s, mode);
    ++used;
  }
  return used ? acc / static_cast<double>(used) : 0.0;
}

double dynamic_range_db(const PowerCube& cube) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : cube.values.flat()) {
    if (v > 0.0) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > 0.0)) throw DegenerateInputError("dynamic range: cube has no positive cells");
  return 10.0 * std::log10(hi / lo);
}

double dynamic_range_ratio(const PowerCube& a, const PowerCube& b) {
  const double den = dynamic_range_db(b);
  if (!(den > 0.0)) throw DegenerateInputError("dynamic range ratio: second cube is flat");
  return dynamic_range_db(a) / den;
}

MetricsReport evaluate(const PowerCube& cube, const Scene& truth, double threshold_db, ContrastMode mode) {
  auto r = report(confusion(voxelise(cube, threshold_db), truth_voxels(truth, cube.grid)));
  r.contrast.range_azimuth = plane_contrast(cube, Plane::range_azimuth, mode);
  r.contrast.range_elevation = plane_contrast(cube, Plane::range_elevation, mode);
  r.contrast.azimuth_elevation = plane_contrast(cube, Plane::azimuth_elevation, mode);
  r.dynamic_range_db = dynamic_range_db(cube);
  r.threshold_db = threshold_db;
  r.method = cube.method;
  return r;
}

std::string to_json(const MetricsReport& r) {
  nlohmann::json j = {
      {"method", r.method},
      {"threshold_db", r.threshold_db},
      {"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}}},
      {"accuracy", number(r.accuracy)},
      {"precision", number(r.precision)},
      {"sensitivity", number(r.sensitivity)},
      {"specificity", number(r.specificity)},
      {"auc", number(r.auc)},
      {"f_score", number(r.f_score)},
      {"contrast",
       {{"range-azimuth", r.contrast.range_azimuth},
        {"range-elevation", r.contrast.range_elevation},
        {"azimuth-elevation", r.contrast.azimuth_elevation}}},
      {"dynamic_range_db", r.dynamic_range_db}};
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(std::string("metrics report: ") + e.what(), 0);
  }
  try {
    MetricsReport r;
    r.method = j.value("method", "");
    r.threshold_db = j.at("threshold_db").get<double>();
    const auto& c = j.at("counts");
    r.counts = {c.at("tp").get<std::uint64_t>(), c.at("fp").get<std::uint64_t>(),
                c.at("tn").get<std::uint64_t>(), c.at("fn").get<std::uint64_t>()};
    r.accuracy = number(j.at("accuracy"));
    r.precision = number(j.at("precision"));
    r.sensitivity = number(j.at("sensitivity"));
    r.specificity = number(j.at("specificity"));
    r.auc = number(j.at("auc"));
    r.f_score = number(j.at("f_score"));
    const auto& k = j.at("contrast");
    r.contrast = {k.at("range-azimuth").get<double>(), k.at("range-elevation").get<double>(),
                  k.at("azimuth-elevation").get<double>()};
    r.dynamic_range_db = j.at("dynamic_range_db").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(std::string("metrics report: ") + e.what(), 0);
  }
}

std::string contrast_csv(const MetricsReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "plane,contrast\n";
  os << "range-azimuth," << r.contrast.range_azimuth << "\n";
  os << "range-elevation," << r.contrast.range_elevation << "\n";
  os << "azimuth-elevation," << r.contrast.azimuth_elevation << "\n";
  return os.str();
}

}  // namespace meshot
