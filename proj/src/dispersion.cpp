#include "sohr/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sohr {

namespace {

using cplx = std::complex<double>;

struct EvalParts {
  cplx value{0.0, 0.0};
  double scale = 0.0;  // sum of term magnitudes, for relative residuals
};

EvalParts eval_parts(const DispersionProblem& p, cplx mu) {
  const auto& table = *p.table;
  const auto m = moments(table, p.rho0);
  const double cs = std::cos(p.theta);
  const double sn = std::sin(p.theta);
  const double dw = table.dw();

  // Both bracket terms carry a factor xi*sin(theta); when that vanishes they
  // drop out exactly and the transport poles never enter.
  cplx m5b(0.0, 0.0), m6b(0.0, 0.0);
  if (p.xi * sn != 0.0) {
    for (int j = 0; j < table.n_w; ++j) {
      const auto& r = table.rows[j];
      const cplx den = -mu + r.c1_tilde * p.xi * cs;
      const cplx b = r.c1_tilde * p.rho0.values[j] / den * dw;
      m5b += r.a[4] * b;
      m6b += r.a[5] * b;
    }
  }

  const cplx t1 = -mu * m[0];
  const cplx t2 = m[1] * p.xi * cs;
  const cplx t3 = -(m[2] + m[3]) * p.xi * sn;
  const cplx t4 = -m5b * p.xi * p.xi * sn * sn;
  const cplx t5 = m6b * p.xi * p.xi * cs * sn;
  EvalParts out;
  out.value = t1 + t2 + t3 + t4 + t5;
  out.scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4) + std::abs(t5) +
              m[0] * (1.0 + std::abs(mu));
  return out;
}

double min_pole_distance(const DispersionProblem& p, double mu_re) {
  const auto& table = *p.table;
  const double cs = std::cos(p.theta);
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& r : table.rows) {
    dist = std::min(dist, std::abs(mu_re - r.c1_tilde * p.xi * cs));
  }
  return dist;
}

std::pair<double, double> pole_range(const DispersionProblem& p) {
  const auto& table = *p.table;
  const double cs = std::cos(p.theta);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& r : table.rows) {
    const double q = r.c1_tilde * p.xi * cs;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return {lo, hi};
}

// Muller iteration; returns true on convergence.
bool muller(const DispersionProblem& p, cplx seed, cplx& root, double& residual) {
  const double h = 1e-4 * (1.0 + std::abs(seed));
  cplx x0 = seed - h, x1 = seed + h, x2 = seed;
  cplx f0 = eval_parts(p, x0).value;
  cplx f1 = eval_parts(p, x1).value;
  cplx f2 = eval_parts(p, x2).value;
  for (int it = 0; it < 100; ++it) {
    const cplx q = (x2 - x1) / (x1 - x0);
    const cplx a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
    const cplx b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
    const cplx c = (1.0 + q) * f2;
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    const cplx den1 = b + disc;
    const cplx den2 = b - disc;
    const cplx den = (std::abs(den1) > std::abs(den2)) ? den1 : den2;
    if (den == cplx(0.0, 0.0)) return false;
    const cplx x3 = x2 - (x2 - x1) * (2.0 * c / den);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    x2 = x3;
    const auto e = eval_parts(p, x2);
    f2 = e.value;
    if (std::abs(f2) <= 1e-12 * e.scale) {
      root = x2;
      residual = std::abs(f2) / e.scale;
      return true;
    }
  }
  return false;
}

}  // namespace

std::complex<double> dispersion_eval(const DispersionProblem& p, std::complex<double> mu) {
  if (p.table == nullptr) throw std::invalid_argument("dispersion_eval: missing table");
  if (!(p.rho0.mass() > 0.0)) throw std::invalid_argument("dispersion_eval: empty density");
  const bool has_poles = p.xi * std::sin(p.theta) != 0.0;
  if (has_poles && std::abs(mu.imag()) < 1e-12 &&
      min_pole_distance(p, mu.real()) < p.resonance_eps) {
    throw std::domain_error("dispersion_eval: trial frequency within resonance guard of a "
                            "transport pole");
  }
  return eval_parts(p, mu).value;
}

std::vector<DispersionRoot> find_roots(const DispersionProblem& p) {
  if (p.table == nullptr) throw std::invalid_argument("find_roots: missing table");
  const auto m = moments(*p.table, p.rho0);
  if (!(m[0] > 0.0)) throw std::runtime_error("find_roots: m1 must be positive");
  const double cs = std::cos(p.theta);
  const double sn = std::sin(p.theta);

  // Closed-form seeds: the convection root and the acoustic pair.
  std::vector<cplx> seeds;
  seeds.emplace_back(m[1] / m[0] * p.xi * cs, 0.0);
  WDensity weighted = p.rho0;
  for (int j = 0; j < p.table->n_w; ++j) weighted.values[j] *= p.table->rows[j].c1_tilde;
  const auto mw = moments(*p.table, weighted);
  if (mw[4] / m[0] > 0.0) {
    const double ac = std::sqrt(mw[4] / m[0]) * std::abs(p.xi * sn);
    const double shift = m[1] / m[0] * p.xi * cs;
    seeds.emplace_back(shift + ac, 0.0);
    seeds.emplace_back(shift - ac, 0.0);
  }
  seeds.emplace_back(0.0, 0.0);

  // Coarse real-axis scan outside the pole band for extra sign-change seeds.
  const auto [qlo, qhi] = pole_range(p);
  const double span = std::max({1.0, std::abs(qlo), std::abs(qhi),
                                2.0 * std::sqrt(std::max(0.0, mw[4] / m[0])) * std::abs(p.xi)});
  const double lo = qlo - 2.0 * span, hi = qhi + 2.0 * span;
  constexpr int kScan = 400;
  double prev_mu = 0.0;
  cplx prev_val(0.0, 0.0);
  bool have_prev = false;
  for (int i = 0; i <= kScan; ++i) {
    const double mu = lo + (hi - lo) * i / kScan;
    if (min_pole_distance(p, mu) < p.resonance_eps) {
      have_prev = false;
      continue;
    }
    const cplx val = eval_parts(p, {mu, 0.0}).value;
    if (have_prev && val.real() * prev_val.real() < 0.0 &&
        std::abs(val.imag()) < 1e-9 * (1.0 + std::abs(val))) {
      seeds.emplace_back(0.5 * (prev_mu + mu), 0.0);
    }
    prev_mu = mu;
    prev_val = val;
    have_prev = true;
  }

  std::vector<DispersionRoot> roots;
  for (const cplx seed : seeds) {
    cplx root;
    double residual;
    if (!muller(p, seed, root, residual)) continue;  // per-seed non-convergence is not fatal
    bool dup = false;
    for (const auto& r : roots) {
      if (std::abs(r.mu - root) < 1e-8) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    DispersionRoot out;
    out.mu = root;
    out.residual = residual;
    const bool has_poles = p.xi * sn != 0.0;
    out.resonant = has_poles && std::abs(root.imag()) < p.resonance_eps &&
                   root.real() >= qlo - p.resonance_eps && root.real() <= qhi + p.resonance_eps;
    roots.push_back(out);
  }
  std::sort(roots.begin(), roots.end(),
            [](const DispersionRoot& a, const DispersionRoot& b) {
              return a.mu.real() < b.mu.real();
            });
  return roots;
}

StabilityScanReport stability_scan(const CoefficientTable& table, const WDensity& rho0,
                                   const std::vector<double>& xi_grid,
                                   const std::vector<double>& theta_grid) {
  if (!rho0.is_even()) {
    throw std::invalid_argument("stability_scan: rho0 must be even in W");
  }
  StabilityScanReport rep;
  for (double xi : xi_grid) {
    for (double theta : theta_grid) {
      DispersionProblem p{&table, rho0, xi, theta, 1e-6};
      for (const auto& r : find_roots(p)) {
        rep.rows.push_back({xi, theta, r.mu, r.residual, r.resonant});
        if (!r.resonant) rep.max_im_abs = std::max(rep.max_im_abs, std::abs(r.mu.imag()));
      }
    }
  }
  rep.pass = rep.max_im_abs < 1e-7;
  return rep;
}

}  // namespace sohr
