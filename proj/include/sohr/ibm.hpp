#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sohr/coefficients.hpp"
#include "sohr/geometry.hpp"

// Stochastic particle simulator: self-propelled particles in a periodic box
// aligning to the mean heading of their neighbors, each carrying a fixed
// intrinsic angular velocity. Euler-Maruyama on the heading angle (the
// projected circle noise is additive there):
//
//   dtheta_k = nu sin(target_k - theta_k) dt + w_k dt + sqrt(2 D) dB_k.
//
// Law `small` aims at the neighborhood mean direction itself; law `large`
// compensates self-rotation by aiming at that direction rotated by
// -psi(w_k/nu) from the tabulated equilibrium tilt.

namespace sohr {

enum class IbmLaw { small, large };

struct IbmParams {
  double nu = 1.0;      // alignment rate [1/time]
  double diff = 0.0;    // angular diffusivity D [rad^2/time]
  double speed = 1.0;   // propulsion speed c [length/time]
  double radius = 0.1;  // interaction radius R [length]
  double dt = 0.01;
  double box = 1.0;  // periodic square side L
  IbmLaw law = IbmLaw::small;
  double zero_flux_factor = 1e-12;  // |J_k| < factor * (neighbors/N) disables alignment
};

// Linear interpolant of the equilibrium tilt psi(w); rejects w outside the
// tabulated range.
struct PsiInterpolant {
  std::vector<double> w;
  std::vector<double> psi;
  double operator()(double wq) const;
};

PsiInterpolant make_psi_interpolant(const CoefficientTable& table);

struct ParticleSystem {
  IbmParams params;
  int n = 0;
  std::vector<double> x, y;    // positions in [0, box)^2
  std::vector<double> theta;   // headings in [0, 2 pi)
  std::vector<double> w;       // intrinsic angular velocities, never mutated
  std::optional<PsiInterpolant> psi_table;
  std::uint64_t seed = 0;
  std::int64_t step_index = 0;
  int threads = 1;  // phase-1 parallelism; results are thread-count invariant
};

// Uniformly scattered positions, headings and a single intrinsic velocity.
ParticleSystem make_uniform_system(const IbmParams& params, int n, double w_value,
                                   std::uint64_t seed);

// Validates invariants: wrapped coordinates, dt guards, psi table coverage
// for law `large`. Throws on violation.
void validate(const ParticleSystem& sys);

// Mean heading of all particles within distance R of particle k (periodic
// metric, particle k included), normalized by the global count N.
// neighbor_count, when given, receives the number of participants.
Vec2 neighbor_flux(const ParticleSystem& sys, int k, int* neighbor_count = nullptr);

// O(N^2) reference used by the validation suite.
Vec2 neighbor_flux_brute(const ParticleSystem& sys, int k, int* neighbor_count = nullptr);

// Advances the system by params.dt (two-phase: all fluxes from the frozen
// snapshot, then the state write). Deterministic for a given seed; the noise
// stream of a particle depends only on (seed, particle, step).
void step(ParticleSystem& sys);

struct Observables {
  Vec2 flux;              // (1/N) sum of headings
  double order = 0.0;     // |flux|, in [0, 1]
  double mean_direction = 0.0;
  std::vector<double> w_edges;
  int n_theta_bins = 0;
  std::vector<std::vector<std::int64_t>> theta_hist;  // per w-bin heading histogram
  int nx = 0, ny = 0;
  std::vector<double> density;        // particles per cell area
  std::vector<double> flux_x, flux_y; // per-cell mean heading sums / N
};

Observables observables(const ParticleSystem& sys, const std::vector<double>& w_edges,
                        int n_theta_bins, int nx, int ny);

// Checkpoint as CSV (x,y,theta,w) with a parameter header line.
void save_particles_csv(const ParticleSystem& sys, const std::string& path);
ParticleSystem load_particles_csv(const std::string& path);

namespace rng {
// Counter-based stream: splitmix64 finalizer over (seed, a, b, c).
double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);
double normal(std::uint64_t seed, std::uint64_t particle, std::uint64_t step);
}  // namespace rng

}  // namespace sohr
