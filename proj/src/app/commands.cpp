#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "nsv/cli.hpp"
#include "nsv/field_io.hpp"
#include "nsv/fraccalc.hpp"

namespace nsv::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_out(const Scenario& s, const std::string& rel, const std::string& contents) {
  const fs::path p = fs::path(s.out_dir) / rel;
  try {
    write_file_atomic(p.string(), contents);
  } catch (const std::exception& e) {
    throw IoError("cannot write '" + p.string() + "': " + e.what());
  }
}

std::string snapshot_text(const SpectralVectorField& v) {
  std::ostringstream out;
  write_snapshot(out, v);
  return out.str();
}

std::string snapshot_text(const SpectralField& f) {
  std::ostringstream out;
  write_snapshot(out, f);
  return out.str();
}

void write_snapshots(const Scenario& s, const SolutionBundle& b) {
  if (s.snapshots == "none") return;
  const int last = b.w.grid.steps;
  auto node = [&](int n, const std::string& tag) {
    write_out(s, "fields/w_" + tag + ".snap", snapshot_text(b.w[n]));
    write_out(s, "fields/u_" + tag + ".snap", snapshot_text(b.u[n]));
    write_out(s, "fields/p_" + tag + ".snap", snapshot_text(b.p.snapshots[n]));
  };
  if (s.snapshots == "final") {
    node(last, "final");
    return;
  }
  for (int n = 0; n <= last; ++n) {
    char tag[16];
    std::snprintf(tag, sizeof tag, "%05d", n);
    node(n, tag);
  }
}

json item_json(const CheckItem& it) {
  json values = json::object();
  for (const auto& [k, v] : it.values) values[k] = v;
  return json{{"id", it.id},
              {"pass", it.pass},
              {"margin", it.margin},
              {"values", values},
              {"notes", it.notes}};
}

bool needs_bundle(const std::string& id) {
  static const std::vector<std::string> ids{"scalar_3_2",    "scalar_3_4",   "pressure_3_4pp",
                                            "key_3_25",      "gronwall_3_24", "apriori_2_21",
                                            "hopf_4_4",      "residual_budget", "fixed_point"};
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

// Everything in the summary that depends only on the scenario.
json scenario_fingerprint(const json& summary) {
  return json{{"scenario", summary.at("scenario")},
              {"seed", summary.at("seed")},
              {"config", summary.at("config")},
              {"forcing", summary.at("forcing")},
              {"initial_data", summary.at("initial_data")}};
}

InequalityReport residual_report(const SolutionBundle& b) {
  InequalityReport r;
  r.id = "residual_budget";
  for (int n = 0; n < b.residual.size(); ++n) {
    r.x.push_back(b.w.grid.time(n));
    r.lhs.push_back(b.residual[n]);
    r.rhs.push_back(3 * b.residual_budget[n]);
  }
  r.constants["budget_factor"] = 3;
  r.finalize(0.0);
  return r;
}

InequalityReport fixed_point_report(const SolutionBundle& b, const SpaceTimeField& f) {
  const double wn = l2_norm(b.w), fn = l2_norm(f);
  const double rel = fixed_point_defect(b, f);
  const double defect = wn > 0 ? rel * wn : rel;
  InequalityReport r;
  r.id = "fixed_point";
  r.abscissa = "index";
  r.x = {0.0};
  r.lhs = {defect};
  r.rhs = {b.config.tolerance * std::max(wn, fn)};
  r.constants["defect"] = defect;
  r.constants["relative_defect"] = rel;
  r.finalize(0.0);
  return r;
}

}  // namespace

int run_solve(const Scenario& s, bool quiet, std::ostream& log) {
  const ScenarioInputs in = build_inputs(s);
  const SolutionBundle b = solve_scenario(s, in);
  write_out(s, "summary.json", summary_json(s, b, in));
  write_out(s, "norms.csv", norms_csv(b));
  write_snapshots(s, b);
  if (!quiet)
    log << "solve " << s.name << ": " << to_string(b.status) << " after " << b.iterations
        << " sweeps (final update " << b.final_update << ")\n";
  return b.converged() ? kOk : kNotConverged;
}

int run_verify(const Scenario& s, bool quiet, std::ostream& log) {
  std::vector<CheckItem> items;
  const bool bundle_needed = std::any_of(s.verify.begin(), s.verify.end(), needs_bundle);
  const bool forcing_needed =
      bundle_needed || std::find(s.verify.begin(), s.verify.end(), "bilinear_3_1") != s.verify.end();

  std::optional<ScenarioInputs> in;
  std::optional<SolutionBundle> bundle;
  if (forcing_needed) in = build_inputs(s);
  if (bundle_needed) {
    const fs::path summary_path = fs::path(s.out_dir) / "summary.json";
    std::ifstream sf(summary_path);
    if (!sf) throw IoError("missing solve artifacts: '" + summary_path.string() + "' (run solve first)");
    json prior;
    try {
      prior = json::parse(sf);
    } catch (const json::exception& e) {
      throw IoError("unreadable '" + summary_path.string() + "': " + e.what());
    }
    bundle = solve_scenario(s, *in);
    const json now = json::parse(summary_json(s, *bundle, *in));
    try {
      if (scenario_fingerprint(prior) != scenario_fingerprint(now))
        throw ConfigError("artifacts in '" + s.out_dir + "' come from a different scenario");
    } catch (const json::exception& e) {
      throw IoError("incomplete '" + summary_path.string() + "': " + e.what());
    }
    if (!bundle->converged()) {
      if (!quiet) log << "verify " << s.name << ": solve did not converge\n";
      return kNotConverged;
    }
  }

  const double mu = s.solve.mu;
  std::optional<ScalarChainReports> chain_reports;
  std::optional<RiccatiChain> chain;
  auto norms = [&] { return norms_from_bundle(*bundle, in->f); };
  auto scalar = [&]() -> ScalarChainReports& {
    if (!chain_reports) {
      const BundleNorms nm = norms();
      chain_reports = check_32_34(nm.w, nm.f, nm.p, mu);
    }
    return *chain_reports;
  };
  auto riccati = [&]() -> RiccatiChain& {
    if (!chain) {
      const BundleNorms nm = norms();
      const double k = riccati_k(scalar().r34.constants.at("b1"), mu);
      chain = build_riccati_chain(nm.w, nm.f, mu, k);
    }
    return *chain;
  };

  for (const std::string& id : s.verify) {
    if (id == "abel_roundtrip") items.push_back(abel_roundtrip_check());
    else if (id == "composition_2_14") items.push_back(composition_check());
    else if (id == "f_mu_identity_3_18") items.push_back(f_mu_identity_check(s.seed));
    else if (id == "projection_2_17") items.push_back(projection_check(s.seed, s.solve.domain.modes[0]));
    else if (id == "kernel_estimates") {
      for (KernelEstimate k : {KernelEstimate::value, KernelEstimate::gradient}) {
        if (k == KernelEstimate::gradient && !(mu > 0.5)) continue;
        const KernelEstimateResult r = kernel_estimate_constant(mu, k, s.solve.heat());
        const double sup = kernel_estimate_supremum(mu, k, s.solve.heat());
        CheckItem it;
        it.id = k == KernelEstimate::value ? "kernel_value" : "kernel_gradient";
        it.values = {{"fitted", r.constant}, {"supremum", sup}, {"argmax_gap", r.argmax.gap},
                     {"argmax_offset", r.argmax.offset}};
        it.margin = sup - r.constant;
        it.pass = std::isfinite(r.constant) && r.constant <= sup * (1 + 1e-12);
        items.push_back(it);
      }
    }
    else if (id == "hardy_littlewood") items.push_back(to_item(hardy_littlewood_harness(s.harness)));
    else if (id == "sobolev_potential") items.push_back(to_item(sobolev_harness(s.harness)));
    else if (id == "green_mixed_2_11") {
      for (const HarnessResult& r : green_mixed_norm_harness(s.harness)) items.push_back(to_item(r));
    }
    else if (id == "bilinear_2_12") items.push_back(to_item(bilinear_pair_harness(s.harness)));
    else if (id == "bilinear_3_1") items.push_back(to_item(check_bilinear(in->f, mu, s.solve.heat())));
    else if (id == "scalar_3_2") items.push_back(to_item(scalar().r32));
    else if (id == "scalar_3_4") items.push_back(to_item(scalar().r34));
    else if (id == "pressure_3_4pp") items.push_back(to_item(scalar().r34pp));
    else if (id == "key_3_25") {
      InequalityReport r = check_key_inequality(riccati());
      CheckItem it = to_item(r);
      // Mean-value points are part of the claim.
      const RiccatiChain& c = riccati();
      it.pass = it.pass && c.located && c.residual_t1 < 1e-10 && c.residual_t2 < 1e-10;
      items.push_back(it);
    }
    else if (id == "gronwall_3_24") items.push_back(to_item(check_gronwall_chain(riccati())));
    else if (id == "apriori_2_21") items.push_back(to_item(check_apriori(*bundle, in->f)));
    else if (id == "hopf_4_4") items.push_back(to_item(check_hopf(*bundle, in->f, in->a)));
    else if (id == "residual_budget") items.push_back(to_item(residual_report(*bundle)));
    else if (id == "fixed_point") items.push_back(to_item(fixed_point_report(*bundle, in->f)));
    else throw ConfigError("unknown verification identifier '" + id + "'");
  }

  bool all = true;
  json list = json::array();
  for (const CheckItem& it : items) {
    all = all && it.pass;
    list.push_back(item_json(it));
    if (it.report) write_out(s, "reports/" + it.id + ".csv", report_csv(*it.report));
    if (!quiet) log << (it.pass ? "PASS " : "FAIL ") << it.id << '\n';
  }
  const json doc{{"scenario", s.name}, {"seed", s.seed}, {"mu", mu}, {"all_pass", all},
                 {"reports", list}};
  write_out(s, "verify.json", doc.dump(2) + "\n");
  return all ? kOk : kNotConverged;
}

int run_convergence(const Scenario& s, bool quiet, std::ostream& log) {
  if (s.forcing.kind != "manufactured")
    throw ConfigError("converge needs [forcing] kind = manufactured");
  std::ostringstream csv;
  csv << "Nt,N,error,order\n";
  json rows = json::array();
  double prev = 0, min_order = std::numeric_limits<double>::infinity();
  int prev_nt = 0;
  bool monotone = true, all_converged = true;
  for (int nt : s.levels) {
    Scenario level = s;
    level.solve.time.steps = nt;
    level.validate();
    const ScenarioInputs in = build_inputs(level);
    const SolutionBundle b = solve_scenario(level, in);
    const double err = l2_norm(b.u - in.exact->u);
    json row{{"Nt", nt}, {"N", s.solve.domain.modes[0]}, {"error", err},
             {"status", to_string(b.status)}, {"iterations", b.iterations}};
    std::string order_text;
    if (prev_nt) {
      const double order = std::log(prev / err) / std::log(double(nt) / prev_nt);
      row["order"] = order;
      min_order = std::min(min_order, order);
      monotone = monotone && err < prev;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", order);
      order_text = buf;
    } else {
      row["order"] = nullptr;
    }
    char ebuf[32];
    std::snprintf(ebuf, sizeof ebuf, "%.17g", err);
    csv << nt << ',' << s.solve.domain.modes[0] << ',' << ebuf << ',' << order_text << '\n';
    all_converged = all_converged && b.converged();
    rows.push_back(row);
    if (!quiet) log << "converge Nt=" << nt << " error=" << err << '\n';
    prev = err;
    prev_nt = nt;
  }
  write_out(s, "convergence.csv", csv.str());
  const json doc{{"scenario", s.name},       {"seed", s.seed},
                 {"family", to_string(s.forcing.manufactured.family)},
                 {"levels", rows},           {"monotone", monotone},
                 {"min_order", min_order},   {"order_threshold", 1.8},
                 {"order_ok", min_order >= 1.8}, {"all_converged", all_converged}};
  write_out(s, "convergence.json", doc.dump(2) + "\n");
  return all_converged ? kOk : kNotConverged;
}

int run_selftest(const Scenario& s, bool write_files, bool quiet, std::ostream& out,
                 std::ostream& log) {
  const std::vector<CheckItem> items{abel_roundtrip_check(), composition_check(),
                                     f_mu_identity_check(s.seed),
                                     projection_check(s.seed, s.solve.domain.modes[0])};
  bool all = true;
  json list = json::array();
  for (const CheckItem& it : items) {
    all = all && it.pass;
    list.push_back(item_json(it));
    if (!quiet) log << (it.pass ? "PASS " : "FAIL ") << it.id << '\n';
  }
  const std::string doc =
      json{{"seed", s.seed}, {"all_pass", all}, {"checks", list}}.dump(2) + "\n";
  out << doc;
  if (write_files) write_out(s, "selftest.json", doc);
  return all ? kOk : kNotConverged;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace nsv::app
