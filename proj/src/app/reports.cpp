#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "nsv/cli.hpp"
#include "nsv/field_io.hpp"
#include "nsv/fraccalc.hpp"
#include "nsv/projection.hpp"
#include "nsv/random_fields.hpp"

namespace nsv::app {

using nlohmann::json;

namespace {

SpectralVectorField read_profile(const std::string& path, const DomainSpec& d, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + " file '" + path + "'");
  SpectralVectorField v;
  try {
    v = read_vector_snapshot(in);
  } catch (const std::exception& e) {
    throw IoError(std::string("malformed ") + what + " file '" + path + "': " + e.what());
  }
  if (!(v.domain() == d))
    throw ConfigError(std::string(what) + " file '" + path + "' does not match the [domain] section");
  return v;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double series_max(const TimeSeries& s) {
  double m = 0;
  for (double v : s.values) m = std::max(m, v);
  return m;
}

}  // namespace

ScenarioInputs build_inputs(const Scenario& s) {
  const SolveConfig& c = s.solve;
  ScenarioInputs in;
  in.a = SpectralVectorField(c.domain);
  const std::string& kind = s.forcing.kind;
  if (kind == "zero") {
    in.f = SpaceTimeField(c.time, c.domain);
  } else if (kind == "manufactured") {
    in.exact = manufactured_forcing(s.forcing.manufactured, c);
    in.f = in.exact->f;
  } else if (kind == "single_mode") {
    in.f = single_mode_forcing(s.forcing.amplitude, c);
  } else if (kind == "random") {
    Rng rng(s.seed);
    in.f = random_space_time_field(c.time, c.domain, rng, s.forcing.amplitude, s.forcing.modes,
                                   true, false);
  } else if (kind == "file") {
    const SpectralVectorField prof = read_profile(s.forcing.path, c.domain, "forcing");
    in.f = SpaceTimeField(c.time, c.domain);
    for (int n = 0; n <= c.time.steps; ++n) {
      const double factor =
          s.forcing.amplitude * (s.forcing.profile == "linear" ? c.time.time(n) : 1.0);
      in.f[n] = factor * prof;
    }
  } else {
    throw ConfigError("unknown forcing kind '" + kind + "'");
  }

  const std::string& ik = s.initial.kind;
  if ((ik == "auto" || ik == "manufactured") && in.exact) {
    in.a = in.exact->initial();
  } else if (ik == "random") {
    Rng rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
    in.a = random_vector_field(c.domain, rng, s.initial.amplitude, 2.0, true);
  } else if (ik == "file") {
    in.a = read_profile(s.initial.path, c.domain, "initial data");
  }
  in.has_initial = in.a.max_abs() > 0;
  return in;
}

SolutionBundle solve_scenario(const Scenario& s, const ScenarioInputs& in) {
  return in.has_initial ? solve_inhomogeneous(in.f, in.a, s.solve) : picard_solve(in.f, s.solve);
}

namespace {

json config_json(const Scenario& s) {
  const SolveConfig& c = s.solve;
  return json{{"rho", c.rho},
              {"horizon", c.time.horizon},
              {"steps", c.time.steps},
              {"modes", c.domain.modes[0]},
              {"grid", c.domain.grid[0]},
              {"length", c.domain.length[0]},
              {"tolerance", c.tolerance},
              {"max_iterations", c.max_iterations},
              {"relaxation", c.relaxation},
              {"sign", to_string(c.sign)},
              {"mu", c.mu},
              {"block_steps", c.block_length()}};
}

json forcing_json(const Scenario& s) {
  const ForcingSpec& f = s.forcing;
  json j{{"kind", f.kind}};
  if (f.kind == "manufactured") {
    j["family"] = to_string(f.manufactured.family);
    j["epsilon"] = f.manufactured.epsilon;
    j["decay"] = f.manufactured.decay;
    j["convection"] = f.manufactured.include_convection;
  } else if (f.kind == "single_mode" || f.kind == "random") {
    j["amplitude"] = f.amplitude;
    if (f.kind == "random") j["modes"] = f.modes;
  } else if (f.kind == "file") {
    j["amplitude"] = f.amplitude;
    j["profile"] = f.profile;
  }
  return j;
}

}  // namespace

std::string summary_json(const Scenario& s, const SolutionBundle& b, const ScenarioInputs& in) {
  double div_max = 0;
  for (const auto& u : b.u.snapshots) div_max = std::max(div_max, divergence(u).max_abs());
  double ratio = 0;
  for (int n = 0; n < b.residual.size(); ++n)
    if (b.residual_budget[n] > 0) ratio = std::max(ratio, b.residual[n] / b.residual_budget[n]);
  json j{
      {"scenario", s.name},
      {"seed", s.seed},
      {"config", config_json(s)},
      {"forcing", forcing_json(s)},
      {"initial_data", in.has_initial},
      {"status", to_string(b.status)},
      {"converged", b.converged()},
      {"iterations", b.iterations},
      {"total_sweeps", b.total_sweeps},
      {"block_iterations", b.block_iterations},
      {"final_update", b.final_update},
      {"theta_min", b.theta_min},
      {"update_norms", b.update_norms},
      {"thresholds",
       {{"tolerance", b.config.tolerance}, {"overflow_factor", 1e12}, {"residual_budget_factor", 3.0}}},
      {"norms",
       {{"w_L2QT", l2_norm(b.w)},
        {"f_L2QT", l2_norm(in.f)},
        {"grad_p_L2QT", l2_norm(b.grad_p)},
        {"u_L2QT", l2_norm(b.u)}}},
      {"residual",
       {{"max", series_max(b.residual)},
        {"budget_max", series_max(b.residual_budget)},
        {"max_ratio", ratio}}},
      {"divergence_max", div_max},
  };
  if (in.exact) j["manufactured_error_L2QT"] = l2_norm(b.u - in.exact->u);
  return j.dump(2) + "\n";
}

std::string norms_csv(const SolutionBundle& b) {
  std::ostringstream out;
  out << "t,w,f,p,residual,budget\n";
  const TimeGrid& g = b.w.grid;
  for (int n = 0; n <= g.steps; ++n)
    out << num(g.time(n)) << ',' << num(b.w_norm[n]) << ',' << num(b.f_norm[n]) << ','
        << num(b.p_norm[n]) << ',' << num(b.residual[n]) << ',' << num(b.residual_budget[n])
        << '\n';
  return out.str();
}

CheckItem to_item(const InequalityReport& r) {
  CheckItem it;
  it.id = r.id;
  it.pass = r.pass;
  it.margin = r.margin;
  for (const auto& [k, v] : r.constants) it.values.emplace_back(k, v);
  it.notes = r.notes;
  it.report = r;
  return it;
}

CheckItem to_item(const HarnessResult& r) {
  CheckItem it;
  it.id = r.id;
  it.pass = r.stable;
  it.values = {{"coarse", r.coarse},
               {"fine", r.fine},
               {"relative_change", r.relative_change},
               {"exponent", r.exponent}};
  it.notes = r.notes;
  return it;
}

std::string report_csv(const InequalityReport& r) {
  std::ostringstream out;
  out << r.abscissa << ",lhs,rhs\n";
  for (std::size_t i = 0; i < r.x.size(); ++i)
    out << num(r.x[i]) << ',' << num(r.lhs[i]) << ',' << num(r.rhs[i]) << '\n';
  return out.str();
}

// --- operator identities ------------------------------------------------------------

CheckItem abel_roundtrip_check() {
  CheckItem it;
  it.id = "abel_roundtrip";
  const TimeGrid g{1.0, 2048};
  const std::pair<const char*, double (*)(double)> cases[] = {
      {"one", [](double) { return 1.0; }},
      {"t", [](double t) { return t; }},
      {"sin3t", [](double t) { return std::sin(3 * t); }},
  };
  double worst = 0;
  for (double mu : {0.625, 0.75}) {
    for (const auto& [name, fn] : cases) {
      TimeSeries u(g);
      for (int n = 0; n <= g.steps; ++n) u[n] = fn(g.time(n));
      const TimeSeries back = abel_invert(frac_integral(u, FracOrder(mu)), FracOrder(mu));
      double err = 0;
      for (int n = 0; n <= g.steps; ++n) err = std::max(err, std::abs(back[n] - u[n]));
      it.values.emplace_back(std::string("error_") + name + (mu == 0.625 ? "_mu5/8" : "_mu3/4"), err);
      worst = std::max(worst, err);
    }
  }
  it.values.emplace_back("max_error", worst);
  it.margin = 1e-4 - worst;
  it.pass = worst < 1e-4;
  return it;
}

CheckItem composition_check() {
  CheckItem it;
  it.id = "composition_2_14";
  const TimeGrid g{1.0, 1024};
  TimeSeries one(g);
  std::fill(one.values.begin(), one.values.end(), 1.0);
  double worst = 0;
  for (const auto& [m1, m2] : {std::pair{0.5, 0.5}, std::pair{0.6, 0.3}}) {
    const TimeSeries nested = frac_integral(frac_integral(one, FracOrder(m2)), FracOrder(m1));
    const double c = composition_constant(m1, m2).value;
    const double e = 2 - m1 - m2;  // J^{m1+m2-1} 1 = t^e / e
    // Relative in the sup norm; nodewise ratios near t = 0 do not converge.
    double diff = 0, scale = 0;
    for (int n = 1; n <= g.steps; ++n) {
      const double exact = c * std::pow(g.time(n), e) / e;
      diff = std::max(diff, std::abs(nested[n] - exact));
      scale = std::max(scale, exact);
    }
    const double err = diff / scale;
    char key[48];
    std::snprintf(key, sizeof key, "relative_error_%.1f_%.1f", m1, m2);
    it.values.emplace_back(key, err);
    worst = std::max(worst, err);
  }
  it.values.emplace_back("gamma_constant_0.5_0.5", composition_constant(0.5, 0.5).value);
  it.values.emplace_back("gamma_constant_0.6_0.3", composition_constant(0.6, 0.3).value);
  it.values.emplace_back("max_relative_error", worst);
  it.margin = 1e-3 - worst;
  it.pass = worst < 1e-3;
  return it;
}

CheckItem f_mu_identity_check(std::uint64_t seed) {
  CheckItem it;
  it.id = "f_mu_identity_3_18";
  const TimeGrid g{1.0, 1024};
  const FracOrder mu(0.625);
  Rng rng(seed);
  double worst = 0;
  int violations = 0;
  for (int s = 0; s < 20; ++s) {
    const TimeSeries gs = sample_signal_abs(random_signal(rng, 1.0), g);
    const TimeSeries F = f_mu_transform(sample_Lplus(gs, mu), mu);
    TimeSeries sq(g);
    for (int n = 0; n <= g.steps; ++n) sq[n] = gs[n] * gs[n];
    const TimeSeries target = cumulative_trapezoid(sq);
    double diff = 0, scale = 0;
    for (int n = 0; n <= g.steps; ++n) {
      diff = std::max(diff, std::abs(F[n] - 2 * target[n]));
      scale = std::max(scale, 2 * target[n]);
      if (n > 0 && F[n] < F[n - 1]) ++violations;
    }
    worst = std::max(worst, scale > 0 ? diff / scale : diff);
  }
  it.values = {{"max_relative_error", worst}, {"monotonicity_violations", double(violations)},
               {"samples", 20}};
  it.margin = 1e-3 - worst;
  it.pass = worst < 1e-3 && violations == 0;
  return it;
}

CheckItem projection_check(std::uint64_t seed, int modes) {
  CheckItem it;
  it.id = "projection_2_17";
  const DomainSpec d = DomainSpec::cube(modes);
  const TimeGrid g{1.0, 8};
  Rng rng(seed);
  double div_max = 0, c_max = 0;
  for (int s = 0; s < 100; ++s) {
    const SpaceTimeField w = random_space_time_field(g, d, rng);
    const SpaceTimeField gp = pressure_gradient_from_w(w);
    for (int n = 0; n <= g.steps; ++n)
      div_max = std::max(div_max, divergence(w[n] + gp[n]).max_abs());
    c_max = std::max(c_max, pressure_bound_constant(w));
  }
  it.values = {{"divergence_max", div_max}, {"fitted_c", c_max}, {"samples", 100}};
  it.margin = 3 - c_max;
  it.pass = div_max < 1e-13 && c_max <= 3;
  return it;
}

}  // namespace nsv::app
