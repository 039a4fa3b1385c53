#include "meshot/imaging.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "meshot/errors.hpp"

namespace meshot {

namespace {

// Smallest MUSIC denominator; keeps exact nulls finite.
constexpr double kMusicFloor = 1e-12;

bool vertical_only(const SteeringContext& ctx) {
  return std::all_of(ctx.channels.begin(), ctx.channels.end(),
                     [](const ChannelOffset& c) { return c.y == 0.0; });
}

void check_tensor(const SnapshotTensor& t, const SteeringContext& ctx) {
  if (t.z.dim(0) != static_cast<std::size_t>(ctx.plan.positions()) ||
      t.z.dim(1) != ctx.channels.size()) {
    throw DimensionError("scan: snapshot tensor does not match the steering context");
  }
  if (t.z.dim(2) == 0) throw DimensionError("scan: snapshot tensor has no slow-time samples");
}

enum class Post { dbf, mvdr_woodbury, mvdr_direct, music };

// Per-bin data the angle loop needs, computed once and shared read-only.
struct BinKernel {
  Post post = Post::dbf;
  Array3<cplx> basis;           // [n][c][k]
  double samples = 1.0;         // L_s
  double delta = 0.0;           // absolute diagonal load
  Eigen::MatrixXcd gram_inv;    // (delta I + U^H U)^-1, Woodbury route
  Eigen::MatrixXcd r_inv;       // R^-1, direct route
};

Array3<cplx> subspace_basis(const Eigen::MatrixXcd& es, std::size_t positions, std::size_t channels) {
  Array3<cplx> b(positions, channels, static_cast<std::size_t>(es.cols()));
  for (std::size_t n = 0; n < positions; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      for (Eigen::Index k = 0; k < es.cols(); ++k) {
        b(n, c, static_cast<std::size_t>(k)) = es(static_cast<Eigen::Index>(n * channels + c), k);
      }
    }
  }
  return b;
}

BinKernel prepare(const SnapshotTensor& t, const ScanMethod& method) {
  BinKernel k;
  const auto positions = t.z.dim(0), channels = t.z.dim(1);
  const auto m = static_cast<double>(positions * channels);
  k.samples = static_cast<double>(t.z.dim(2));
  const double trace = [&] {
    double acc = 0.0;
    for (const auto& v : t.z.flat()) acc += std::norm(v);
    return acc / k.samples;
  }();
  k.delta = method.loading * trace / m;

  switch (method.kind) {
    case Method::dbf:
      k.post = Post::dbf;
      k.basis = t.z;
      break;
    case Method::mvdr: {
      const auto x = stack(t);
      if (static_cast<double>(x.x.rows()) > k.samples) {
        if (!(k.delta > 0.0)) {
          throw SolverError("mvdr: covariance is rank deficient (L_s < M); set diagonal loading > 0");
        }
        k.post = Post::mvdr_woodbury;
        k.basis = t.z;
        const Eigen::MatrixXcd gram = x.x.adjoint() * x.x / k.samples;
        Eigen::MatrixXcd g = gram + k.delta * Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
        k.gram_inv = g.llt().solve(Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()));
      } else {
        k.post = Post::mvdr_direct;
        const auto r = sample_covariance(x, method.loading);
        Eigen::LLT<Eigen::MatrixXcd> llt(r);
        if (llt.info() != Eigen::Success) {
          throw SolverError("mvdr: covariance is singular; set diagonal loading > 0");
        }
        k.r_inv = llt.solve(Eigen::MatrixXcd::Identity(r.rows(), r.cols()));
      }
      break;
    }
    case Method::music: {
      k.post = Post::music;
      const auto es = signal_subspace(stack(t), method.sources);
      k.basis = subspace_basis(es, positions, channels);
      break;
    }
  }
  return k;
}

// Y[n][k] = sum_c conj(a_c) B[n][c][k]
void channel_contract(const Array3<cplx>& basis, const Eigen::VectorXcd& ach, std::vector<cplx>& y) {
  const auto np = basis.dim(0), nc = basis.dim(1), nk = basis.dim(2);
  y.assign(np * nk, cplx{});
  for (std::size_t n = 0; n < np; ++n) {
    cplx* yn = y.data() + n * nk;
    for (std::size_t c = 0; c < nc; ++c) {
      const cplx w = std::conj(ach(static_cast<Eigen::Index>(c)));
      auto row = basis.row(n, c);
      for (std::size_t k = 0; k < nk; ++k) yn[k] += w * row[k];
    }
  }
}

double cell_power(const BinKernel& k, const std::vector<cplx>& y, const Eigen::VectorXcd& az,
                  const Eigen::VectorXcd& ach, std::vector<cplx>& g) {
  const auto np = static_cast<std::size_t>(az.size());
  const auto nk = y.size() / np;
  const double m = static_cast<double>(np) * static_cast<double>(ach.size());
  const double norm = 1.0 / std::sqrt(m);

  if (k.post == Post::mvdr_direct) {
    Eigen::VectorXcd w(static_cast<Eigen::Index>(m));
    for (Eigen::Index n = 0; n < az.size(); ++n) w.segment(n * ach.size(), ach.size()) = az(n) * ach * norm;
    const double q = (w.adjoint() * k.r_inv * w)(0, 0).real();
    return q > 0.0 ? 1.0 / q : std::numeric_limits<double>::infinity();
  }

  g.assign(nk, cplx{});
  for (std::size_t n = 0; n < np; ++n) {
    const cplx w = std::conj(az(static_cast<Eigen::Index>(n))) * norm;
    const cplx* yn = y.data() + n * nk;
    for (std::size_t j = 0; j < nk; ++j) g[j] += w * yn[j];
  }

  switch (k.post) {
    case Post::dbf: {
      double acc = 0.0;
      for (const auto& v : g) acc += std::norm(v);
      return acc / k.samples + k.delta;
    }
    case Post::mvdr_woodbury: {
      // w^H R^-1 w = (1 - u^H G u) / delta with u = U^H w = conj(g) / sqrt(L).
      Eigen::VectorXcd u(static_cast<Eigen::Index>(nk));
      const double s = 1.0 / std::sqrt(k.samples);
      for (std::size_t j = 0; j < nk; ++j) u(static_cast<Eigen::Index>(j)) = std::conj(g[j]) * s;
      const double q = (u.adjoint() * k.gram_inv * u)(0, 0).real();
      const double inv = (1.0 - q) / k.delta;
      return inv > 0.0 ? 1.0 / inv : std::numeric_limits<double>::infinity();
    }
    case Post::music: {
      double captured = 0.0;
      for (const auto& v : g) captured += std::norm(v);
      return 1.0 / std::max(1.0 - captured, kMusicFloor);
    }
    case Post::mvdr_direct:
      break;
  }
  return 0.0;
}

PowerCube empty_cube(const ImagingGrid& grid, const ScanMethod& method, const SteeringContext& ctx) {
  grid.validate();
  PowerCube cube;
  cube.values = Array3<double>(grid.range.size(), grid.azimuth.size(), grid.elevation.size(), 0.0);
  cube.grid = grid;
  cube.method = method.tag();
  nlohmann::json meta = {{"method", method.tag()},
                         {"sources", method.sources},
                         {"loading", method.loading},
                         {"compensated", ctx.compensate},
                         {"interval", ctx.plan.interval},
                         {"l0", ctx.plan.l0},
                         {"extra_snapshots", ctx.plan.num_extra},
                         {"snapshot_length", ctx.plan.length},
                         {"channels", ctx.channels.size()}};
  cube.meta = meta.dump();
  return cube;
}

void check_bin(const SnapshotTensor& t, const PowerCube& cube) {
  if (t.range_bin < 0 || static_cast<std::size_t>(t.range_bin) >= cube.bins()) {
    throw BoundsError("scan: range bin " + std::to_string(t.range_bin) + " outside the grid");
  }
}

}  // namespace

std::string ScanMethod::tag() const {
  switch (kind) {
    case Method::dbf: return "dbf";
    case Method::mvdr: return "mvdr";
    case Method::music: return "music(" + std::to_string(sources) + ")";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "dbf") return Method::dbf;
  if (name == "mvdr") return Method::mvdr;
  if (name == "music") return Method::music;
  throw ConfigError("unknown method '" + name + "' (expected dbf, mvdr or music)");
}

Eigen::MatrixXcd sample_covariance(const StackedMatrix& x, double diagonal_loading) {
  const auto samples = x.x.cols();
  if (samples < 1) throw DimensionError("sample_covariance: need at least one slow-time sample");
  Eigen::MatrixXcd r = x.x * x.x.adjoint() / static_cast<double>(samples);
  if (diagonal_loading > 0.0) {
    const double load = diagonal_loading * r.trace().real() / static_cast<double>(r.rows());
    r.diagonal().array() += load;
  }
  return r;
}

double dbf_power(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& w) {
  if (r.rows() != r.cols() || r.rows() != w.size()) {
    throw DimensionError("dbf_power: covariance is " + std::to_string(r.rows()) + "x" +
                         std::to_string(r.cols()) + ", weight has " + std::to_string(w.size()));
  }
  const double p = (w.adjoint() * r * w)(0, 0).real() / w.squaredNorm();
  return std::max(p, 0.0);
}

double mvdr_power(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& w) {
  if (r.rows() != r.cols() || r.rows() != w.size()) throw DimensionError("mvdr_power: size mismatch");
  Eigen::LLT<Eigen::MatrixXcd> llt(r);
  if (llt.info() != Eigen::Success) throw SolverError("mvdr: covariance is singular; set diagonal loading > 0");
  const Eigen::VectorXcd u = w / w.norm();
  return 1.0 / (u.adjoint() * llt.solve(u))(0, 0).real();
}

Eigen::MatrixXcd signal_subspace(const StackedMatrix& x, int sources) {
  const auto m = x.x.rows();
  const auto l = x.x.cols();
  if (sources < 1) throw RankError("music: number of sources must be >= 1");
  if (sources >= m) {
    throw RankError("music: K = " + std::to_string(sources) + " must be smaller than M = " + std::to_string(m));
  }
  if (m <= l) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sample_covariance(x));
    // Eigenvalues ascend; the signal subspace is the top K.
    return eig.eigenvectors().rightCols(sources);
  }
  if (sources > l) {
    throw RankError("music: K = " + std::to_string(sources) + " exceeds the " + std::to_string(l) +
                    " slow-time samples spanning the covariance");
  }
  // Same eigenvectors from the small Gram matrix: X^H X v = s v  =>  R (X v) = (s / L) (X v).
  const Eigen::MatrixXcd gram = x.x.adjoint() * x.x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  const double top = std::max(eig.eigenvalues()(l - 1), 0.0);
  Eigen::MatrixXcd es(m, sources);
  for (int k = 0; k < sources; ++k) {
    const auto idx = l - 1 - k;
    const double s = eig.eigenvalues()(idx);
    if (!(s > 1e-13 * top) || !(s > 0.0)) {
      throw RankError("music: covariance rank is below K = " + std::to_string(sources));
    }
    es.col(k) = x.x * eig.eigenvectors().col(idx) / std::sqrt(s);
  }
  return es;
}

PowerCube scan(const std::vector<SnapshotTensor>& inputs, const ImagingGrid& grid,
               const ScanMethod& method, const SteeringContext& ctx) {
  PowerCube cube = empty_cube(grid, method, ctx);
  const bool vertical = vertical_only(ctx);
  const auto naz = grid.azimuth.size();
  const auto nel = static_cast<std::int64_t>(grid.elevation.size());

  for (const auto& t : inputs) {
    check_tensor(t, ctx);
    check_bin(t, cube);
    const BinKernel kernel = prepare(t, method);
    const auto r = static_cast<std::size_t>(t.range_bin);

#pragma omp parallel
    {
      std::vector<cplx> y, g;
#pragma omp for schedule(static)
      for (std::int64_t e = 0; e < nel; ++e) {
        const double phi = grid.elevation[static_cast<std::size_t>(e)];
        Eigen::VectorXcd ach;
        if (vertical) {
          ach = channel_factor(ctx, 0.0, phi);
          if (kernel.post != Post::mvdr_direct) channel_contract(kernel.basis, ach, y);
        }
        for (std::size_t a = 0; a < naz; ++a) {
          const double theta = grid.azimuth[a];
          if (!vertical) {
            ach = channel_factor(ctx, theta, phi);
            if (kernel.post != Post::mvdr_direct) channel_contract(kernel.basis, ach, y);
          }
          const auto az = azimuth_factor(ctx, theta, phi);
          if (kernel.post == Post::mvdr_direct) y.assign(static_cast<std::size_t>(az.size()), cplx{});
          cube.values(r, a, static_cast<std::size_t>(e)) = cell_power(kernel, y, az, ach, g);
        }
      }
    }
  }
  return cube;
}

PowerCube scan_reference(const std::vector<SnapshotTensor>& inputs, const ImagingGrid& grid,
                         const ScanMethod& method, const SteeringContext& ctx) {
  PowerCube cube = empty_cube(grid, method, ctx);
  for (const auto& t : inputs) {
    check_tensor(t, ctx);
    check_bin(t, cube);
    const auto x = stack(t);
    const auto r = sample_covariance(x, method.loading);
    Eigen::MatrixXcd noise;
    Eigen::LLT<Eigen::MatrixXcd> llt;
    if (method.kind == Method::music) {
      if (method.sources >= r.rows()) throw RankError("music: K must be smaller than M");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r);
      noise = eig.eigenvectors().leftCols(r.rows() - method.sources);
    } else if (method.kind == Method::mvdr) {
      llt.compute(r);
      if (llt.info() != Eigen::Success) throw SolverError("mvdr: covariance is singular; set diagonal loading > 0");
    }
    for (std::size_t a = 0; a < grid.azimuth.size(); ++a) {
      for (std::size_t e = 0; e < grid.elevation.size(); ++e) {
        const auto w = dbf_weight(steering_vector(grid.azimuth[a], grid.elevation[e], ctx));
        double p = 0.0;
        switch (method.kind) {
          case Method::dbf: p = dbf_power(r, w); break;
          case Method::mvdr: p = 1.0 / (w.adjoint() * llt.solve(w))(0, 0).real(); break;
          case Method::music:
            p = 1.0 / std::max((noise.adjoint() * w).squaredNorm(), kMusicFloor);
            break;
        }
        cube.values(static_cast<std::size_t>(t.range_bin), a, e) = p;
      }
    }
  }
  return cube;
}

double measure_snr(const PowerCube& cube, const Cell& truth, const std::vector<CellBox>& noise) {
  const auto nr = static_cast<int>(cube.bins()), na = static_cast<int>(cube.azimuths()),
             ne = static_cast<int>(cube.elevations());
  if (truth.r < 0 || truth.r >= nr || truth.az < 0 || truth.az >= na || truth.el < 0 || truth.el >= ne) {
    throw BoundsError("measure_snr: truth cell outside the grid");
  }
  double peak = 0.0;
  for (int r = std::max(0, truth.r - 1); r <= std::min(nr - 1, truth.r + 1); ++r)
    for (int a = std::max(0, truth.az - 1); a <= std::min(na - 1, truth.az + 1); ++a)
      for (int e = std::max(0, truth.el - 1); e <= std::min(ne - 1, truth.el + 1); ++e)
        peak = std::max(peak, cube.values(static_cast<std::size_t>(r), static_cast<std::size_t>(a),
                                          static_cast<std::size_t>(e)));
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& b : noise) {
    for (int r = std::max(0, b.r0); r <= std::min(nr - 1, b.r1); ++r)
      for (int a = std::max(0, b.az0); a <= std::min(na - 1, b.az1); ++a)
        for (int e = std::max(0, b.el0); e <= std::min(ne - 1, b.el1); ++e) {
          sum += cube.values(static_cast<std::size_t>(r), static_cast<std::size_t>(a),
                             static_cast<std::size_t>(e));
          ++count;
        }
  }
  if (count == 0) throw BoundsError("measure_snr: empty noise region");
  const double floor = sum / static_cast<double>(count);
  if (!(floor > 0.0)) return kSnrCapDb;
  return std::min(10.0 * std::log10(peak / floor), kSnrCapDb);
}

Eigen::MatrixXd max_over_range(const PowerCube& cube) {
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cube.azimuths()),
                                              static_cast<Eigen::Index>(cube.elevations()));
  for (std::size_t r = 0; r < cube.bins(); ++r)
    for (std::size_t a = 0; a < cube.azimuths(); ++a)
      for (std::size_t e = 0; e < cube.elevations(); ++e) {
        auto& v = map(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(e));
        v = std::max(v, cube.values(r, a, e));
      }
  return map;
}

std::vector<Peak> local_maxima(const Eigen::MatrixXd& map, double floor_db) {
  std::vector<Peak> peaks;
  if (map.size() == 0) return peaks;
  const double threshold = map.maxCoeff() * std::pow(10.0, -floor_db / 10.0);
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    for (Eigen::Index j = 0; j < map.cols(); ++j) {
      const double v = map(i, j);
      if (!(v > threshold)) continue;
      bool is_max = true;
      for (Eigen::Index di = -1; di <= 1 && is_max; ++di) {
        for (Eigen::Index dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const auto ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= map.rows() || jj >= map.cols()) continue;
          // Ties resolve toward the lower index so plateaus give one peak.
          const double u = map(ii, jj);
          if (u > v || (u == v && (di < 0 || (di == 0 && dj < 0)))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({static_cast<int>(i), static_cast<int>(j), v});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
  return peaks;
}

std::vector<int> prominent_peaks(const std::vector<double>& profile, double prominence_db) {
  std::vector<int> out;
  const auto n = static_cast<int>(profile.size());
  auto db = [&](int i) { return 10.0 * std::log10(std::max(profile[static_cast<std::size_t>(i)], 1e-300)); };
  for (int i = 0; i < n; ++i) {
    const double v = db(i);
    const bool left_ok = i == 0 || db(i - 1) < v;
    const bool right_ok = i == n - 1 || db(i + 1) <= v;
    if (!left_ok || !right_ok || n < 3) continue;
    // Walk outward until a higher sample, tracking the lowest point passed.
    double left_min = v, right_min = v;
    bool left_bounded = false, right_bounded = false;
    for (int j = i - 1; j >= 0; --j) {
      if (db(j) > v) { left_bounded = true; break; }
      left_min = std::min(left_min, db(j));
    }
    for (int j = i + 1; j < n; ++j) {
      if (db(j) > v) { right_bounded = true; break; }
      right_min = std::min(right_min, db(j));
    }
    double base;
    if (left_bounded && right_bounded) base = std::max(left_min, right_min);
    else if (left_bounded) base = left_min;
    else if (right_bounded) base = right_min;
    else base = std::min(left_min, right_min);
    if (v - base >= prominence_db) out.push_back(i);
  }
  return out;
}

double half_power_width(const std::vector<double>& profile, int peak) {
  const auto n = static_cast<int>(profile.size());
  const double half = 0.5 * profile[static_cast<std::size_t>(peak)];
  auto at = [&](int i) { return profile[static_cast<std::size_t>(i)]; };
  double left = 0.0, right = static_cast<double>(n - 1);
  for (int i = peak; i > 0; --i) {
    if (at(i - 1) < half) {
      left = (i - 1) + (half - at(i - 1)) / (at(i) - at(i - 1));
      break;
    }
  }
  for (int i = peak; i < n - 1; ++i) {
    if (at(i + 1) < half) {
      right = i + (at(i) - half) / (at(i) - at(i + 1));
      break;
    }
  }
  return right - left;
}

}  // namespace meshot
