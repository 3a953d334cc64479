#include "sohr/ibm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sohr {

namespace rng {

namespace {
std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  const std::uint64_t z = splitmix(seed ^ splitmix(a ^ splitmix(b ^ splitmix(c))));
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double normal(std::uint64_t seed, std::uint64_t particle, std::uint64_t step) {
  const double u1 = std::max(uniform(seed, particle, step, 1), 0x1.0p-53);
  const double u2 = uniform(seed, particle, step, 2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace rng

double PsiInterpolant::operator()(double wq) const {
  if (w.empty()) throw std::runtime_error("PsiInterpolant: empty table");
  if (wq < w.front() || wq > w.back()) {
    throw std::domain_error("PsiInterpolant: w = " + std::to_string(wq) +
                            " outside tabulated range");
  }
  size_t hi = 1;
  while (hi + 1 < w.size() && w[hi] < wq) ++hi;
  const double t = (wq - w[hi - 1]) / (w[hi] - w[hi - 1]);
  return (1.0 - t) * psi[hi - 1] + t * psi[hi];
}

PsiInterpolant make_psi_interpolant(const CoefficientTable& table) {
  PsiInterpolant out;
  for (const auto& r : table.rows) {
    out.w.push_back(r.w);
    out.psi.push_back(r.psi);
  }
  return out;
}

ParticleSystem make_uniform_system(const IbmParams& params, int n, double w_value,
                                   std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("make_uniform_system: n must be positive");
  ParticleSystem sys;
  sys.params = params;
  sys.n = n;
  sys.seed = seed;
  sys.x.resize(n);
  sys.y.resize(n);
  sys.theta.resize(n);
  sys.w.assign(n, w_value);
  constexpr std::uint64_t kInitTag = 0xA11C0DEULL;
  for (int k = 0; k < n; ++k) {
    sys.x[k] = params.box * rng::uniform(seed, kInitTag, k, 10);
    sys.y[k] = params.box * rng::uniform(seed, kInitTag, k, 11);
    sys.theta[k] = kTwoPi * rng::uniform(seed, kInitTag, k, 12);
  }
  validate(sys);
  return sys;
}

void validate(const ParticleSystem& sys) {
  const auto& p = sys.params;
  if (sys.n <= 0 || static_cast<int>(sys.x.size()) != sys.n ||
      static_cast<int>(sys.y.size()) != sys.n || static_cast<int>(sys.theta.size()) != sys.n ||
      static_cast<int>(sys.w.size()) != sys.n) {
    throw std::invalid_argument("ParticleSystem: inconsistent array sizes");
  }
  if (!(p.box > 0.0) || !(p.radius > 0.0) || !(p.dt > 0.0) || !(p.nu > 0.0) || p.diff < 0.0) {
    throw std::invalid_argument("ParticleSystem: invalid parameters");
  }
  if (p.dt * p.nu > 0.05) throw std::invalid_argument("ParticleSystem: dt * nu > 0.05");
  double wmax = 0.0;
  for (double v : sys.w) wmax = std::max(wmax, std::abs(v));
  if (p.dt * wmax > 0.05) throw std::invalid_argument("ParticleSystem: dt * max|w| > 0.05");
  for (int k = 0; k < sys.n; ++k) {
    if (!(sys.x[k] >= 0.0 && sys.x[k] < p.box && sys.y[k] >= 0.0 && sys.y[k] < p.box)) {
      throw std::invalid_argument("ParticleSystem: position outside the box");
    }
  }
  if (p.law == IbmLaw::large) {
    if (!sys.psi_table.has_value()) {
      throw std::invalid_argument("ParticleSystem: law `large` requires a psi table");
    }
    for (double v : sys.w) (void)(*sys.psi_table)(v / p.nu);  // range check
  }
}

namespace {

// Cell-sorted snapshot in compressed layout: contiguous per-bucket ranges of
// positions and heading components, rebuilt every step.
struct BucketGrid {
  int ncell = 1;
  double cell = 0.0;
  std::vector<int> start;  // bucket offsets, size ncell^2 + 1
  std::vector<double> px, py, pcs, psn;

  static BucketGrid build(const ParticleSystem& sys) {
    BucketGrid g;
    g.ncell = std::max(1, static_cast<int>(sys.params.box / sys.params.radius));
    g.cell = sys.params.box / g.ncell;
    const int nb = g.ncell * g.ncell;
    std::vector<int> bucket_of(sys.n);
    g.start.assign(nb + 1, 0);
    for (int k = 0; k < sys.n; ++k) {
      const int b = g.index_of(sys.x[k], sys.y[k]);
      bucket_of[k] = b;
      ++g.start[b + 1];
    }
    for (int b = 0; b < nb; ++b) g.start[b + 1] += g.start[b];
    g.px.resize(sys.n);
    g.py.resize(sys.n);
    g.pcs.resize(sys.n);
    g.psn.resize(sys.n);
    std::vector<int> cursor(g.start.begin(), g.start.end() - 1);
    for (int k = 0; k < sys.n; ++k) {
      const int slot = cursor[bucket_of[k]]++;
      g.px[slot] = sys.x[k];
      g.py[slot] = sys.y[k];
      g.pcs[slot] = std::cos(sys.theta[k]);
      g.psn[slot] = std::sin(sys.theta[k]);
    }
    return g;
  }

  int index_of(double x, double y) const {
    int ix = std::min(static_cast<int>(x / cell), ncell - 1);
    int iy = std::min(static_cast<int>(y / cell), ncell - 1);
    return iy * ncell + ix;
  }
};

// Nearest periodic image of a coordinate difference; valid for |delta| < 1.5 L.
inline double min_image(double delta, double box) {
  if (delta > 0.5 * box) return delta - box;
  if (delta < -0.5 * box) return delta + box;
  return delta;
}

Vec2 flux_from_grid(const ParticleSystem& sys, const BucketGrid& grid, int k, int* count_out) {
  const double box = sys.params.box;
  const double r2 = sys.params.radius * sys.params.radius;
  Vec2 acc{0.0, 0.0};
  double hits = 0.0;
  const int ncell = grid.ncell;
  const double inv_box = 1.0 / box;
  const double xk = sys.x[k], yk = sys.y[k];
  const double* px = grid.px.data();
  const double* py = grid.py.data();
  const double* pcs = grid.pcs.data();
  const double* psn = grid.psn.data();
  // Branchless bodies so the candidate scans vectorize.
  auto scan_wrapped = [&](int lo, int hi) {
    for (int s = lo; s < hi; ++s) {
      double dx = px[s] - xk;
      dx -= box * std::nearbyint(dx * inv_box);
      double dy = py[s] - yk;
      dy -= box * std::nearbyint(dy * inv_box);
      const double inside = (dx * dx + dy * dy <= r2) ? 1.0 : 0.0;
      acc.x += inside * pcs[s];
      acc.y += inside * psn[s];
      hits += inside;
    }
  };
  if (ncell < 3) {
    // Wrapped 3x3 neighborhoods would revisit buckets; just scan them all.
    scan_wrapped(0, grid.start[ncell * ncell]);
  } else {
    const int cx = std::min(static_cast<int>(xk / grid.cell), ncell - 1);
    const int cy = std::min(static_cast<int>(yk / grid.cell), ncell - 1);
    if (cx >= 1 && cx <= ncell - 2 && cy >= 1 && cy <= ncell - 2) {
      // Interior: every candidate sits well inside half a box length, so the
      // periodic wrap is the identity and each cell row is one contiguous run.
      for (int oy = -1; oy <= 1; ++oy) {
        const int row = (cy + oy) * ncell + cx;
        const int lo = grid.start[row - 1], hi = grid.start[row + 2];
        for (int s = lo; s < hi; ++s) {
          const double dx = px[s] - xk;
          const double dy = py[s] - yk;
          const double inside = (dx * dx + dy * dy <= r2) ? 1.0 : 0.0;
          acc.x += inside * pcs[s];
          acc.y += inside * psn[s];
          hits += inside;
        }
      }
    } else {
      for (int oy = -1; oy <= 1; ++oy) {
        const int by = (cy + oy + ncell) % ncell;
        for (int ox = -1; ox <= 1; ++ox) {
          const int bx = (cx + ox + ncell) % ncell;
          scan_wrapped(grid.start[by * ncell + bx], grid.start[by * ncell + bx + 1]);
        }
      }
    }
  }
  acc.x /= sys.n;
  acc.y /= sys.n;
  if (count_out != nullptr) *count_out = static_cast<int>(hits);
  return acc;
}

void parallel_for(int n, int threads, const std::function<void(int, int)>& body) {
  if (threads <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

Vec2 neighbor_flux(const ParticleSystem& sys, int k, int* neighbor_count) {
  if (k < 0 || k >= sys.n) throw std::out_of_range("neighbor_flux: bad index");
  const auto grid = BucketGrid::build(sys);
  return flux_from_grid(sys, grid, k, neighbor_count);
}

Vec2 neighbor_flux_brute(const ParticleSystem& sys, int k, int* neighbor_count) {
  if (k < 0 || k >= sys.n) throw std::out_of_range("neighbor_flux_brute: bad index");
  const double box = sys.params.box;
  const double r2 = sys.params.radius * sys.params.radius;
  Vec2 acc{0.0, 0.0};
  int count = 0;
  for (int j = 0; j < sys.n; ++j) {
    const double dx = min_image(sys.x[j] - sys.x[k], box);
    const double dy = min_image(sys.y[j] - sys.y[k], box);
    if (dx * dx + dy * dy <= r2) {
      acc.x += std::cos(sys.theta[j]);
      acc.y += std::sin(sys.theta[j]);
      ++count;
    }
  }
  acc.x /= sys.n;
  acc.y /= sys.n;
  if (neighbor_count != nullptr) *neighbor_count = count;
  return acc;
}

void step(ParticleSystem& sys) {
  const auto& p = sys.params;
  const auto grid = BucketGrid::build(sys);

  // Phase 1: deterministic per-particle drift from the frozen snapshot.
  std::vector<double> dtheta(sys.n);
  parallel_for(sys.n, sys.threads, [&](int lo, int hi) {
    for (int k = lo; k < hi; ++k) {
      int count = 0;
      const Vec2 flux = flux_from_grid(sys, grid, k, &count);
      double drift = 0.0;
      const double flux_floor = p.zero_flux_factor * (static_cast<double>(count) / sys.n);
      if (norm(flux) >= flux_floor && count > 0) {
        double target = std::atan2(flux.y, flux.x);
        if (p.law == IbmLaw::large) target -= (*sys.psi_table)(sys.w[k] / p.nu);
        drift = p.nu * std::sin(target - sys.theta[k]);
      }
      dtheta[k] = (drift + sys.w[k]) * p.dt;
    }
  });

  // Phase 2: state write, noise, transport along the new headings.
  const double noise_scale = std::sqrt(2.0 * p.diff * p.dt);
  parallel_for(sys.n, sys.threads, [&](int lo, int hi) {
    for (int k = lo; k < hi; ++k) {
      double th = sys.theta[k] + dtheta[k];
      if (noise_scale > 0.0) {
        th += noise_scale * rng::normal(sys.seed, static_cast<std::uint64_t>(k),
                                        static_cast<std::uint64_t>(sys.step_index));
      }
      th = wrap_angle(th);
      sys.theta[k] = th;
      double nx = sys.x[k] + p.speed * p.dt * std::cos(th);
      double ny = sys.y[k] + p.speed * p.dt * std::sin(th);
      nx -= p.box * std::floor(nx / p.box);
      ny -= p.box * std::floor(ny / p.box);
      sys.x[k] = nx;
      sys.y[k] = ny;
    }
  });
  ++sys.step_index;
}

Observables observables(const ParticleSystem& sys, const std::vector<double>& w_edges,
                        int n_theta_bins, int nx, int ny) {
  if (sys.n == 0) throw std::invalid_argument("observables: empty system");
  if (n_theta_bins <= 0 || nx <= 0 || ny <= 0) {
    throw std::invalid_argument("observables: invalid bin counts");
  }
  for (size_t i = 1; i < w_edges.size(); ++i) {
    if (!(w_edges[i] > w_edges[i - 1])) {
      throw std::invalid_argument("observables: w_edges must increase");
    }
  }
  Observables obs;
  obs.w_edges = w_edges;
  obs.n_theta_bins = n_theta_bins;
  const int n_w_bins = std::max<int>(1, static_cast<int>(w_edges.size()) - 1);
  obs.theta_hist.assign(n_w_bins, std::vector<std::int64_t>(n_theta_bins, 0));
  obs.nx = nx;
  obs.ny = ny;
  obs.density.assign(static_cast<size_t>(nx) * ny, 0.0);
  obs.flux_x.assign(static_cast<size_t>(nx) * ny, 0.0);
  obs.flux_y.assign(static_cast<size_t>(nx) * ny, 0.0);

  const double box = sys.params.box;
  const double cell_area = (box / nx) * (box / ny);
  for (int k = 0; k < sys.n; ++k) {
    const double cs = std::cos(sys.theta[k]);
    const double sn = std::sin(sys.theta[k]);
    obs.flux.x += cs;
    obs.flux.y += sn;
    int wb = 0;
    if (w_edges.size() >= 2) {
      const auto it = std::upper_bound(w_edges.begin(), w_edges.end(), sys.w[k]);
      wb = std::clamp(static_cast<int>(it - w_edges.begin()) - 1, 0, n_w_bins - 1);
    }
    const int tb = std::min(n_theta_bins - 1,
                            static_cast<int>(sys.theta[k] / (kTwoPi / n_theta_bins)));
    obs.theta_hist[wb][tb]++;
    const int ix = std::min(nx - 1, static_cast<int>(sys.x[k] / (box / nx)));
    const int iy = std::min(ny - 1, static_cast<int>(sys.y[k] / (box / ny)));
    obs.density[iy * nx + ix] += 1.0 / cell_area;
    obs.flux_x[iy * nx + ix] += cs / sys.n;
    obs.flux_y[iy * nx + ix] += sn / sys.n;
  }
  obs.flux.x /= sys.n;
  obs.flux.y /= sys.n;
  obs.order = norm(obs.flux);
  obs.mean_direction = std::atan2(obs.flux.y, obs.flux.x);
  return obs;
}

void save_particles_csv(const ParticleSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_particles_csv: cannot open " + path);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "# n=%d nu=%.17g diff=%.17g speed=%.17g radius=%.17g dt=%.17g box=%.17g "
                "law=%s seed=%llu step=%lld",
                sys.n, sys.params.nu, sys.params.diff, sys.params.speed, sys.params.radius,
                sys.params.dt, sys.params.box,
                sys.params.law == IbmLaw::small ? "small" : "large",
                static_cast<unsigned long long>(sys.seed),
                static_cast<long long>(sys.step_index));
  out << buf << "\nx,y,theta,w\n";
  for (int k = 0; k < sys.n; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", sys.x[k], sys.y[k], sys.theta[k],
                  sys.w[k]);
    out << buf;
  }
}

ParticleSystem load_particles_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_particles_csv: cannot open " + path);
  ParticleSystem sys;
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') {
    throw std::runtime_error("load_particles_csv: missing parameter header");
  }
  {
    std::istringstream meta(line.substr(1));
    std::string tok;
    while (meta >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "n") sys.n = std::atoi(val.c_str());
      else if (key == "nu") sys.params.nu = std::strtod(val.c_str(), nullptr);
      else if (key == "diff") sys.params.diff = std::strtod(val.c_str(), nullptr);
      else if (key == "speed") sys.params.speed = std::strtod(val.c_str(), nullptr);
      else if (key == "radius") sys.params.radius = std::strtod(val.c_str(), nullptr);
      else if (key == "dt") sys.params.dt = std::strtod(val.c_str(), nullptr);
      else if (key == "box") sys.params.box = std::strtod(val.c_str(), nullptr);
      else if (key == "law") sys.params.law = (val == "large") ? IbmLaw::large : IbmLaw::small;
      else if (key == "seed") sys.seed = std::strtoull(val.c_str(), nullptr, 10);
      else if (key == "step") sys.step_index = std::strtoll(val.c_str(), nullptr, 10);
    }
  }
  std::getline(in, line);  // column names
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    double vals[4];
    for (double& v : vals) {
      if (!std::getline(ss, field, ',')) {
        throw std::runtime_error("load_particles_csv: malformed row");
      }
      v = std::strtod(field.c_str(), nullptr);
    }
    sys.x.push_back(vals[0]);
    sys.y.push_back(vals[1]);
    sys.theta.push_back(vals[2]);
    sys.w.push_back(vals[3]);
  }
  if (static_cast<int>(sys.x.size()) != sys.n) {
    throw std::runtime_error("load_particles_csv: row count disagrees with header");
  }
  return sys;
}

}  // namespace sohr
