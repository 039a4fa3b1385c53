#include "meshot/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "meshot/errors.hpp"

namespace meshot {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_number(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw MalformedInputError("non-numeric token '" + std::string(tok) + "'", line_no);
  }
  return v;
}

Scene parse_xyz(std::istream& in, std::string label) {
  Scene scene;
  scene.label = std::move(label);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    if (toks.size() != 3) {
      throw MalformedInputError("expected 3 coordinates, got " + std::to_string(toks.size()), line_no);
    }
    Scatterer s;
    s.position = {parse_number(toks[0], line_no), parse_number(toks[1], line_no),
                  parse_number(toks[2], line_no)};
    scene.scatterers.push_back(s);
  }
  return scene;
}

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> properties;
};

Scene parse_ply(std::istream& in, std::string label) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") throw MalformedInputError("missing 'ply' magic", line_no);
  std::vector<PlyElement> elements;
  bool ascii = false;
  for (;;) {
    if (!next_line()) throw MalformedInputError("unterminated PLY header", line_no);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "end_header") break;
    if (toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii") {
        throw MalformedInputError("only ascii PLY is supported", line_no);
      }
      ascii = true;
    } else if (toks[0] == "element") {
      if (toks.size() != 3) throw MalformedInputError("bad element line", line_no);
      PlyElement e;
      e.name = std::string(toks[1]);
      const double n = parse_number(toks[2], line_no);
      if (n < 0 || n != std::floor(n)) throw MalformedInputError("bad element count", line_no);
      e.count = static_cast<std::size_t>(n);
      elements.push_back(std::move(e));
    } else if (toks[0] == "property") {
      if (elements.empty() || toks.size() < 3) {
        throw MalformedInputError("property outside element", line_no);
      }
      elements.back().properties.emplace_back(toks.back());
    } else {
      throw MalformedInputError("unknown header keyword '" + std::string(toks[0]) + "'", line_no);
    }
  }
  if (!ascii) throw MalformedInputError("missing format line", line_no);

  Scene scene;
  scene.label = std::move(label);
  for (const auto& e : elements) {
    int ix = -1, iy = -1, iz = -1;
    if (e.name == "vertex") {
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        if (e.properties[k] == "x") ix = static_cast<int>(k);
        if (e.properties[k] == "y") iy = static_cast<int>(k);
        if (e.properties[k] == "z") iz = static_cast<int>(k);
      }
      if (ix < 0 || iy < 0 || iz < 0) {
        throw MalformedInputError("vertex element lacks x/y/z", line_no);
      }
      scene.scatterers.reserve(e.count);
    }
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!next_line()) throw MalformedInputError("unexpected end of data", line_no);
      if (e.name != "vertex") continue;
      auto toks = split_ws(line);
      if (toks.size() < e.properties.size()) {
        throw MalformedInputError("too few vertex properties", line_no);
      }
      for (const auto& t : toks) parse_number(t, line_no);
      Scatterer s;
      s.position = {parse_number(toks[static_cast<std::size_t>(ix)], line_no),
                    parse_number(toks[static_cast<std::size_t>(iy)], line_no),
                    parse_number(toks[static_cast<std::size_t>(iz)], line_no)};
      scene.scatterers.push_back(s);
    }
  }
  return scene;
}

// Bounding box split into k cells per non-degenerate axis.
struct VoxelPartition {
  Eigen::Vector3d lo;
  Eigen::Vector3d extent;
  int k = 1;

  std::int64_t key(const Eigen::Vector3d& p) const {
    std::int64_t idx = 0;
    for (int a = 0; a < 3; ++a) {
      int c = 0;
      if (extent[a] > 0.0) {
        c = static_cast<int>(std::floor((p[a] - lo[a]) / extent[a] * k));
        c = std::clamp(c, 0, k - 1);
      }
      idx = idx * k + c;
    }
    return idx;
  }
};

std::size_t occupied(const Scene& scene, const VoxelPartition& part) {
  std::unordered_map<std::int64_t, int> seen;
  seen.reserve(scene.size());
  for (const auto& s : scene.scatterers) seen.emplace(part.key(s.position), 0);
  return seen.size();
}

}  // namespace

CloudFormat parse_cloud_format(const std::string& name) {
  if (name == "xyz-text" || name == "xyz") return CloudFormat::xyz_text;
  if (name == "ply-ascii" || name == "ply") return CloudFormat::ply_ascii;
  throw ConfigError("unknown point-cloud format '" + name + "'");
}

Scene parse_point_cloud(std::istream& in, CloudFormat format, std::string label) {
  Scene scene = format == CloudFormat::xyz_text ? parse_xyz(in, std::move(label))
                                                : parse_ply(in, std::move(label));
  if (scene.empty()) throw EmptySceneError("point cloud contains no points");
  return scene;
}

Scene load_point_cloud(const std::filesystem::path& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open point cloud " + path.string());
  return parse_point_cloud(in, format, path.stem().string());
}

Scene resample_uniform(const Scene& scene, std::size_t target_count, std::uint64_t seed) {
  if (target_count < 1) throw ConfigError("resample: target_count must be >= 1");
  if (scene.empty()) throw EmptySceneError("resample: empty scene");

  VoxelPartition part;
  Eigen::Vector3d hi = scene.scatterers.front().position;
  part.lo = hi;
  for (const auto& s : scene.scatterers) {
    part.lo = part.lo.cwiseMin(s.position);
    hi = hi.cwiseMax(s.position);
  }
  part.extent = hi - part.lo;

  // Finest grid whose occupied voxels still hold >= 4 points on average.
  const double n = static_cast<double>(scene.size());
  int best = 1;
  for (int k = 2; k <= 1024 && part.extent.maxCoeff() > 0.0; ++k) {
    part.k = k;
    if (n / static_cast<double>(occupied(scene, part)) < 4.0) break;
    best = k;
  }
  part.k = best;

  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
  std::vector<std::int64_t> order;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    auto key = part.key(scene.scatterers[i].position);
    auto [it, fresh] = buckets.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(i);
  }
  std::sort(order.begin(), order.end());

  std::mt19937_64 rng(seed);
  auto uniform_index = [&rng](std::size_t n_items) {
    return static_cast<std::size_t>(unit_double(rng()) * static_cast<double>(n_items));
  };
  auto shuffle = [&](auto& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(i)]);
  };

  // Equal quota per occupied voxel; the remainder goes to a random subset.
  const std::size_t voxels = order.size();
  std::vector<std::size_t> quota(voxels, target_count / voxels);
  std::vector<std::size_t> perm(voxels);
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(perm);
  for (std::size_t i = 0; i < target_count % voxels; ++i) ++quota[perm[i]];

  Scene out;
  out.label = scene.label;
  out.scatterers.reserve(target_count);
  for (std::size_t v = 0; v < voxels; ++v) {
    auto members = buckets[order[v]];
    shuffle(members);
    for (std::size_t j = 0; j < quota[v]; ++j) {
      if (j < members.size()) {
        out.scatterers.push_back(scene.scatterers[members[j]]);
      } else {
        // Densify: a random point on the segment between two members stays
        // inside the voxel's hull.
        const auto& a = scene.scatterers[members[uniform_index(members.size())]];
        const auto& b = scene.scatterers[members[uniform_index(members.size())]];
        const double t = unit_double(rng());
        Scatterer s = a;
        s.position = a.position + t * (b.position - a.position);
        out.scatterers.push_back(s);
      }
    }
  }
  shuffle(out.scatterers);
  return out;
}

Scene assign_swerling3_amplitudes(const Scene& scene, double lo, double hi, std::uint64_t seed) {
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("amplitudes: require 0 < lo < hi");
  Scene out = scene;
  std::mt19937_64 rng(seed);
  for (auto& s : out.scatterers) {
    double mag = lo + (hi - lo) * unit_double(rng());
    if (mag <= 0.0) mag = lo;
    s.amplitude = {mag, 0.0};
  }
  return out;
}

Eigen::Vector3d spherical_to_cartesian(double range, double azimuth, double elevation) {
  return {range * std::cos(azimuth) * std::cos(elevation),
          range * std::sin(azimuth) * std::cos(elevation), range * std::sin(elevation)};
}

SphericalCoords cartesian_to_spherical(const Eigen::Vector3d& p) {
  const double r = p.norm();
  if (r == 0.0) return {0.0, 0.0, 0.0};
  return {r, std::atan2(p.y(), p.x()), std::asin(std::clamp(p.z() / r, -1.0, 1.0))};
}

}  // namespace meshot
