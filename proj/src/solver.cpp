#include "nsv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fft.hpp"
#include "nsv/fraccalc.hpp"
#include "nsv/projection.hpp"

namespace nsv {

std::string to_string(SignConvention s) {
  return s == SignConvention::standard ? "standard" : "paper";
}

SignConvention parse_sign_convention(const std::string& s) {
  if (s == "standard") return SignConvention::standard;
  if (s == "paper") return SignConvention::paper;
  throw std::invalid_argument("unknown sign convention '" + s + "' (standard|paper)");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::diverged: return "diverged";
  }
  return "unknown";
}

std::string to_string(ManufacturedFamily f) {
  return f == ManufacturedFamily::cyclic_decay ? "cyclic_decay" : "cyclic_ramp";
}

ManufacturedFamily parse_manufactured_family(const std::string& s) {
  if (s == "cyclic_decay") return ManufacturedFamily::cyclic_decay;
  if (s == "cyclic_ramp") return ManufacturedFamily::cyclic_ramp;
  throw std::invalid_argument("unknown manufactured family '" + s + "'");
}

void SolveConfig::validate() const {
  HeatParams{rho}.validate();
  time.validate();
  domain.validate();
  if (!(tolerance > 0)) throw std::invalid_argument("Picard tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(relaxation > 0 && relaxation <= 1))
    throw std::invalid_argument("relaxation factor must lie in (0, 1]");
  if (block_steps < 0) throw std::invalid_argument("block length must be >= 0");
  if (time.steps % block_length() != 0)
    throw std::invalid_argument("block length must divide the step count");
  FracOrder(mu).require_solver_range();
}

int SolveConfig::block_length() const {
  return block_steps > 0 ? block_steps : std::gcd(time.steps, 16);
}

// --- convection -----------------------------------------------------------------

namespace {

int wrap(int k, int m) { return k < 0 ? k + m : k; }

struct Padded {
  std::array<int, 3> dims;
  std::size_t total;
  explicit Padded(const DomainSpec& d)
      : dims(d.product_grid()),
        total(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]) {}
  std::size_t slot(int a, int b, int c) const {
    return (static_cast<std::size_t>(wrap(a, dims[0])) * dims[1] + wrap(b, dims[1])) * dims[2] +
           wrap(c, dims[2]);
  }
};

// Physical samples of two real fields at once: re = a(x), im = b(x).
void load_pair(std::vector<Complex>& buf, const Padded& pg, const SpectralField& a,
               const SpectralField& b) {
  std::fill(buf.begin(), buf.end(), Complex{});
  const auto& n = a.domain().modes;
  const Complex i(0, 1);
  for (int k1 = -n[0]; k1 <= n[0]; ++k1)
    for (int k2 = -n[1]; k2 <= n[1]; ++k2)
      for (int k3 = -n[2]; k3 <= n[2]; ++k3)
        buf[pg.slot(k1, k2, k3)] = a.at(k1, k2, k3) + i * b.at(k1, k2, k3);
  detail::fft3d(buf.data(), pg.dims, +1);
}

// Inverse of load_pair restricted to the cutoff.
void unload_pair(std::vector<Complex>& buf, const Padded& pg, SpectralField& a,
                 SpectralField* b) {
  detail::fft3d(buf.data(), pg.dims, -1);
  const double scale = 1.0 / static_cast<double>(pg.total);
  const auto& n = a.domain().modes;
  for (int k1 = -n[0]; k1 <= n[0]; ++k1)
    for (int k2 = -n[1]; k2 <= n[1]; ++k2)
      for (int k3 = -n[2]; k3 <= n[2]; ++k3) {
        const Complex c = buf[pg.slot(k1, k2, k3)] * scale;
        const Complex cm = std::conj(buf[pg.slot(-k1, -k2, -k3)] * scale);
        a.at(k1, k2, k3) = 0.5 * (c + cm);
        if (b) b->at(k1, k2, k3) = Complex(0, -0.5) * (c - cm);
      }
}

}  // namespace

SpectralVectorField convection(const SpectralVectorField& a, const SpectralVectorField& b) {
  const DomainSpec& d = a.domain();
  if (!(d == b.domain())) throw std::invalid_argument("fields live on different domains");
  const Padded pg(d);
  // 12 real inputs: a_0..a_2, d_j b_i for j, i in 0..2.
  std::array<SpectralField, 12> in;
  for (int j = 0; j < 3; ++j) in[j] = a[j];
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) in[3 + 3 * j + i] = derivative(b[i], static_cast<Axis>(j));
  std::array<std::vector<double>, 12> phys;
  std::vector<Complex> buf(pg.total);
  for (int p = 0; p < 6; ++p) {
    load_pair(buf, pg, in[2 * p], in[2 * p + 1]);
    phys[2 * p].resize(pg.total);
    phys[2 * p + 1].resize(pg.total);
    for (std::size_t x = 0; x < pg.total; ++x) {
      phys[2 * p][x] = buf[x].real();
      phys[2 * p + 1][x] = buf[x].imag();
    }
  }
  std::array<std::vector<double>, 3> out_phys;
  for (int i = 0; i < 3; ++i) {
    out_phys[i].assign(pg.total, 0.0);
    for (int j = 0; j < 3; ++j) {
      const auto& aj = phys[j];
      const auto& dji = phys[3 + 3 * j + i];
      for (std::size_t x = 0; x < pg.total; ++x) out_phys[i][x] += aj[x] * dji[x];
    }
  }
  SpectralVectorField out(d);
  for (std::size_t x = 0; x < pg.total; ++x) buf[x] = Complex(out_phys[0][x], out_phys[1][x]);
  unload_pair(buf, pg, out[0], &out[1]);
  for (std::size_t x = 0; x < pg.total; ++x) buf[x] = Complex(out_phys[2][x], 0.0);
  unload_pair(buf, pg, out[2], nullptr);
  return out;
}

SpectralVectorField convection(const SpectralVectorField& u) { return convection(u, u); }

SpaceTimeField nonlinear_term(const SpaceTimeField& u, Exec exec) {
  u.validate();
  SpaceTimeField out(u.grid, u.domain());
  const int nodes = u.grid.nodes();
  if (exec == Exec::serial) {
    for (int n = 0; n < nodes; ++n)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          out[n][i] += pointwise_product(u[n][j], derivative(u[n][i], static_cast<Axis>(j)));
    return out;
  }
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < nodes; ++n) out[n] = convection(u[n]);
  return out;
}

namespace {

SpaceTimeField leray_series(const SpaceTimeField& w) {
  SpaceTimeField out = pressure_gradient_from_w(w);
  out += w;
  return out;
}

void check_grids(const SpaceTimeField& f, const SolveConfig& cfg) {
  f.validate();
  if (!(f.grid == cfg.time)) throw std::invalid_argument("forcing time grid differs from config");
  if (!(f.domain() == cfg.domain)) throw std::invalid_argument("forcing domain differs from config");
}

double sq_norm(const SpectralVectorField& v) { return l2_inner(v, v); }

}  // namespace

SpaceTimeField recover_velocity(const SpaceTimeField& w, const SolveConfig& cfg) {
  return heat_solve(leray_series(w), cfg.heat(), cfg.exec);
}

SpaceTimeField apply_Kp(const SpaceTimeField& w, const SolveConfig& cfg) {
  return nonlinear_term(recover_velocity(w, cfg), cfg.exec);
}

SpaceTimeField apply_K1(const SpaceTimeField& w, const SpaceTimeField& u0, const SolveConfig& cfg) {
  const SpaceTimeField v = recover_velocity(w, cfg);
  SpaceTimeField out(w.grid, w.domain());
  const int nodes = w.grid.nodes();
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < nodes; ++n) out[n] = convection(u0[n], v[n]) + convection(v[n], u0[n]);
  return out;
}

// --- Picard ------------------------------------------------------------------------

namespace {

SolutionBundle solve_core(const SpaceTimeField& f, const SpaceTimeField& background,
                          const SolveConfig& cfg) {
  cfg.validate();
  check_grids(f, cfg);
  const double s = convection_sign(cfg.sign);
  const int nt = cfg.time.steps;
  const int block = cfg.block_length();
  const HeatParams hp = cfg.heat();

  SolutionBundle b;
  b.config = cfg;
  b.background = background;
  b.w = f;
  SpaceTimeField lw(cfg.time, cfg.domain);
  SpaceTimeField v(cfg.time, cfg.domain);
  std::vector<SpectralVectorField> target(nt + 1);

  auto map_node = [&](int n) {
    SpectralVectorField t = convection(background[n] + v[n]);
    t *= -s;
    t += f[n];
    target[n] = std::move(t);
  };
  auto map_range = [&](int lo, int hi) {
    if (cfg.exec == Exec::serial) {
      for (int n = lo; n <= hi; ++n) map_node(n);
      return;
    }
#pragma omp parallel for schedule(dynamic)
    for (int n = lo; n <= hi; ++n) map_node(n);
  };
  auto project_range = [&](int lo, int hi) {
    for (int n = lo; n <= hi; ++n) {
      lw[n] = pressure_gradient(b.w[n]);
      lw[n] += b.w[n];
    }
  };

  // v(0) = 0, so node 0 of the map does not depend on w.
  map_range(0, 0);
  b.w[0] = target[0];
  project_range(0, 0);

  const double overflow = 1e12 * (1.0 + std::sqrt([&] {
                            double m = 0;
                            for (const auto& x : f.snapshots) m = std::max(m, sq_norm(x));
                            for (const auto& x : background.snapshots) m = std::max(m, sq_norm(x));
                            return m;
                          }()));
  bool stop = false;
  for (int st = 0; st < nt && !stop; st += block) {
    const int en = st + block;
    double theta = cfg.relaxation;
    double prev = std::numeric_limits<double>::infinity();
    bool done = false;
    int sweeps = 0;
    while (sweeps < cfg.max_iterations) {
      ++sweeps;
      project_range(st + 1, en);
      heat_march(lw, hp, v, st, en, cfg.exec);
      map_range(st + 1, en);
      // Scaled by max(|T|, |f|): w may vanish identically when f balances
      // the background flow.
      double num = 0, den = 0, fden = 0, wmax = 0;
      for (int n = st + 1; n <= en; ++n) {
        num += sq_norm(target[n] - b.w[n]);
        den += sq_norm(target[n]);
        fden += sq_norm(f[n]);
        wmax = std::max(wmax, sq_norm(target[n]));
      }
      den = std::max(den, fden);
      double defect = den > 0 ? std::sqrt(num / den) : (num > 0 ? HUGE_VAL : 0.0);
      if (!std::isfinite(num) || !std::isfinite(den) || std::sqrt(wmax) > overflow)
        defect = std::numeric_limits<double>::quiet_NaN();
      b.update_norms.push_back(defect);
      b.final_update = defect;
      if (std::isnan(defect)) {
        b.status = SolveStatus::diverged;
        stop = true;
        break;
      }
      if (defect < cfg.tolerance) {
        for (int n = st + 1; n <= en; ++n) b.w[n] = target[n];
        project_range(st + 1, en);
        heat_march(lw, hp, v, st, en, cfg.exec);
        done = true;
        break;
      }
      if (defect > prev) theta = std::max(theta / 2, 1.0 / 16);
      b.theta_min = std::min(b.theta_min, theta);
      prev = defect;
      for (int n = st + 1; n <= en; ++n) {
        SpectralVectorField next = (1 - theta) * b.w[n];
        next += theta * target[n];
        b.w[n] = std::move(next);
      }
    }
    b.block_iterations.push_back(sweeps);
    b.total_sweeps += sweeps;
    b.iterations = std::max(b.iterations, sweeps);
    if (!done && !stop) {
      b.status = SolveStatus::max_iterations;
      stop = true;
    }
  }

  b.grad_p = pressure_gradient_from_w(b.w, cfg.exec);
  b.p = ScalarSpaceTimeField(cfg.time, cfg.domain);
  for (int n = 0; n <= nt; ++n) b.p.snapshots[n] = pressure_potential(b.w[n]);
  b.u = recover_velocity(b.w, cfg);
  b.u += background;
  b.w_norm = norm_series(b.w);
  b.f_norm = norm_series(f);
  b.p_norm = norm_series(b.grad_p);
  if (nt >= 4 && b.status != SolveStatus::diverged) {
    ResidualReport r = nse_residual(b, f, cfg);
    b.residual = std::move(r.residual);
    b.residual_budget = std::move(r.budget);
  } else {
    b.residual = TimeSeries(cfg.time);
    b.residual_budget = TimeSeries(cfg.time);
  }
  return b;
}

}  // namespace

SolutionBundle picard_solve(const SpaceTimeField& f, const SolveConfig& cfg) {
  return solve_core(f, SpaceTimeField(cfg.time, cfg.domain), cfg);
}

SolutionBundle solve_inhomogeneous(const SpaceTimeField& f, const SpectralVectorField& a,
                                   const SolveConfig& cfg) {
  cfg.validate();
  if (!(a.domain() == cfg.domain)) throw std::invalid_argument("initial data domain differs from config");
  const double div = divergence(a).max_abs();
  if (div > 1e-10 * std::max(1.0, a.max_abs()))
    throw std::invalid_argument("initial data is not divergence-free (max |div a| coefficient " +
                                std::to_string(div) + ")");
  return solve_core(f, heat_flow(a, cfg.heat(), cfg.time), cfg);
}

// --- residuals -------------------------------------------------------------------------

namespace {

constexpr double kRoundoffUlps = 64;

std::vector<SpectralVectorField> residual_fields(const SpaceTimeField& u,
                                                 const std::vector<SpectralVectorField>& ut,
                                                 const SpaceTimeField& grad_p,
                                                 const SpaceTimeField& f, const SolveConfig& cfg,
                                                 std::vector<double>* scale = nullptr) {
  const double s = convection_sign(cfg.sign);
  const int nodes = u.grid.nodes();
  std::vector<SpectralVectorField> r(nodes);
  if (scale) scale->assign(nodes, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < nodes; ++n) {
    SpectralVectorField lap(u.domain());
    for (int i = 0; i < 3; ++i) lap[i] = cfg.rho * laplacian(u[n][i]);
    const SpectralVectorField conv = convection(u[n]);
    SpectralVectorField x = ut[n] - lap;
    x += s * conv;
    x -= grad_p[n];
    x -= f[n];
    // size of the cancelling terms, for the rounding floor
    if (scale)
      (*scale)[n] = l2_norm(ut[n]) + l2_norm(lap) + l2_norm(conv) + l2_norm(grad_p[n]) + l2_norm(f[n]);
    r[n] = std::move(x);
  }
  return r;
}

}  // namespace

TimeSeries nse_residual(const SpaceTimeField& u, const SpaceTimeField& grad_p,
                        const SpaceTimeField& f, const SolveConfig& cfg) {
  if (u.grid.steps < 2) throw std::invalid_argument("residual needs Nt >= 2");
  const auto ut = time_derivative(u, 1);
  const auto r = residual_fields(u, ut, grad_p, f, cfg);
  TimeSeries out(u.grid);
  for (int n = 0; n < u.grid.nodes(); ++n) out[n] = l2_norm(r[n]);
  return out;
}

ResidualReport nse_residual(const SolutionBundle& b, const SpaceTimeField& f, const SolveConfig& cfg) {
  if (b.u.grid.steps < 4) throw std::invalid_argument("residual budget needs Nt >= 4");
  // The free heat flow is differentiated exactly (its u_t is rho Lap u0);
  // only the solved part v = u - u0 goes through difference quotients.
  const SpaceTimeField v = b.u - b.background;
  auto ut = time_derivative(v, 1);
  auto ut2 = time_derivative(v, 2);
  for (int n = 0; n < b.u.grid.nodes(); ++n)
    for (int i = 0; i < 3; ++i) {
      const SpectralField exact = cfg.rho * laplacian(b.background[n][i]);
      ut[n][i] += exact;
      ut2[n][i] += exact;
    }
  std::vector<double> scale;
  const auto r = residual_fields(b.u, ut, b.grad_p, f, cfg, &scale);
  ResidualReport rep{TimeSeries(b.u.grid), TimeSeries(b.u.grid)};
  double wmax = 0;
  for (const auto& w : b.w.snapshots) wmax = std::max(wmax, l2_norm(w));
  for (int n = 0; n < b.u.grid.nodes(); ++n) {
    rep.residual[n] = l2_norm(r[n]);
    // Richardson estimate of the difference-quotient error, the Picard
    // stopping error, and rounding accumulated over the march.
    rep.budget[n] = l2_norm(ut2[n] - ut[n]) / 3 + cfg.tolerance * wmax +
                    kRoundoffUlps * std::numeric_limits<double>::epsilon() * scale[n];
  }
  return rep;
}

double fixed_point_defect(const SolutionBundle& b, const SpaceTimeField& f) {
  const SolveConfig& cfg = b.config;
  const double s = convection_sign(cfg.sign);
  const SpaceTimeField v = recover_velocity(b.w, cfg);
  SpaceTimeField full = v;
  full += b.background;
  SpaceTimeField diff = b.w - f;
  diff += s * nonlinear_term(full, cfg.exec);
  const double wn = l2_norm(b.w);
  const double dn = l2_norm(diff);
  return wn > 0 ? dn / wn : dn;
}

// --- manufactured ---------------------------------------------------------------------------

namespace {

// S = (sin k x2, sin k x3, sin k x1) and (S.grad)S.
struct CyclicField {
  SpectralVectorField s, conv;
  std::array<double, 3> k2;  // |k|^2 of each component's mode
};

CyclicField cyclic_field(const DomainSpec& d) {
  CyclicField c{SpectralVectorField(d), SpectralVectorField(d), {}};
  c.s[0].add_sin(0, 1, 0, 1.0);
  c.s[1].add_sin(0, 0, 1, 1.0);
  c.s[2].add_sin(1, 0, 0, 1.0);
  const double k1 = d.wavenumber(0, 1), k2 = d.wavenumber(1, 1), k3 = d.wavenumber(2, 1);
  c.k2 = {k2 * k2, k3 * k3, k1 * k1};
  // sin a cos b = (sin(a+b) + sin(a-b)) / 2
  c.conv[0].add_sin(0, 1, 1, 0.5 * k2);  // sin x3 * k cos x2
  c.conv[0].add_sin(0, -1, 1, 0.5 * k2);
  c.conv[1].add_sin(1, 0, 1, 0.5 * k3);  // sin x1 * k cos x3
  c.conv[1].add_sin(1, 0, -1, 0.5 * k3);
  c.conv[2].add_sin(1, 1, 0, 0.5 * k1);  // sin x2 * k cos x1
  c.conv[2].add_sin(-1, 1, 0, 0.5 * k1);
  return c;
}

}  // namespace

ManufacturedSolution manufactured_forcing(const ManufacturedSpec& spec, const SolveConfig& cfg) {
  cfg.validate();
  const CyclicField c = cyclic_field(cfg.domain);
  const double s = convection_sign(cfg.sign);
  const double eps = spec.epsilon, lam = spec.decay;
  ManufacturedSolution m{SpaceTimeField(cfg.time, cfg.domain), SpaceTimeField(cfg.time, cfg.domain),
                         ScalarSpaceTimeField(cfg.time, cfg.domain)};
  for (int n = 0; n <= cfg.time.steps; ++n) {
    const double t = cfg.time.time(n);
    double a, da;
    switch (spec.family) {
      case ManufacturedFamily::cyclic_decay:
        a = eps * std::exp(-lam * t);
        da = -lam * a;
        break;
      case ManufacturedFamily::cyclic_ramp:
        a = eps * t * std::exp(-lam * t);
        da = eps * std::exp(-lam * t) * (1 - lam * t);
        break;
      default:
        throw std::invalid_argument("unknown manufactured family");
    }
    for (int i = 0; i < 3; ++i) {
      m.u[n][i] = a * c.s[i];
      m.f[n][i] = (da + cfg.rho * c.k2[i] * a) * c.s[i];
      if (spec.include_convection) m.f[n][i] += (s * a * a) * c.conv[i];
    }
  }
  return m;
}

SpaceTimeField single_mode_forcing(double epsilon, const SolveConfig& cfg) {
  const CyclicField c = cyclic_field(cfg.domain);
  SpaceTimeField f(cfg.time, cfg.domain);
  for (int n = 0; n <= cfg.time.steps; ++n) f[n] = (epsilon * cfg.time.time(n)) * c.s;
  return f;
}

}  // namespace nsv
