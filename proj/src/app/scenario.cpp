#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "nsv/cli.hpp"

namespace nsv::app {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"scenario", {"name", "seed", "verify", "out"}},
      {"domain", {"modes", "grid", "length"}},
      {"time", {"horizon", "steps"}},
      {"solver",
       {"rho", "tolerance", "max_iterations", "relaxation", "sign", "mu", "block_steps", "exec"}},
      {"forcing",
       {"kind", "family", "epsilon", "decay", "convection", "amplitude", "modes", "path",
        "profile"}},
      {"initial", {"kind", "amplitude", "path"}},
      {"converge", {"levels"}},
      {"harness",
       {"samples", "p", "lambda", "hl_steps", "sobolev_grid", "sobolev_box", "mixed_samples",
        "mixed_modes", "mixed_steps", "tolerance"}},
      {"output", {"snapshots"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

class Reader {
 public:
  Reader(std::string text, std::string origin) : text_(std::move(text)), origin_(std::move(origin)) {
    std::istringstream ss(text_);
    try {
      pt::read_ini(ss, tree_);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(origin_ + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree_) {
      const auto it = schema().find(section);
      if (body.empty() && !body.data().empty())
        fail(section, "", "key outside any section: '" + section + "'");
      if (it == schema().end()) fail(section, "", "unknown section [" + section + "]");
      for (const auto& [key, value] : body)
        if (!it->second.count(key)) fail(section, key, "unknown key '" + key + "' in [" + section + "]");
    }
  }

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line_of(section, key)) + ": " + msg);
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void get(const std::string& sec, const std::string& key, std::string& out) const {
    if (auto v = raw(sec, key)) out = *v;
  }
  void get(const std::string& sec, const std::string& key, double& out) const {
    if (auto v = raw(sec, key)) out = number<double>(sec, key, *v);
  }
  void get(const std::string& sec, const std::string& key, int& out) const {
    if (auto v = raw(sec, key)) out = number<int>(sec, key, *v);
  }
  void get(const std::string& sec, const std::string& key, std::uint64_t& out) const {
    if (auto v = raw(sec, key)) out = number<std::uint64_t>(sec, key, *v);
  }
  void get(const std::string& sec, const std::string& key, bool& out) const {
    if (auto v = raw(sec, key)) {
      if (*v == "true" || *v == "yes" || *v == "1")
        out = true;
      else if (*v == "false" || *v == "no" || *v == "0")
        out = false;
      else
        fail(sec, key, "expected a boolean for '" + key + "', got '" + *v + "'");
    }
  }
  std::vector<std::string> list(const std::string& sec, const std::string& key) const {
    std::vector<std::string> out;
    if (auto v = raw(sec, key)) {
      std::string item;
      std::istringstream ss(*v);
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
      }
    }
    return out;
  }
  bool has(const std::string& sec, const std::string& key) const { return raw(sec, key).has_value(); }

  template <class T>
  T number(const std::string& sec, const std::string& key, const std::string& v) const {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty())
      fail(sec, key, "cannot read '" + v + "' as a number for '" + key + "'");
    return out;
  }

  std::string path(const std::string& p) const {
    const std::filesystem::path fp(p);
    if (fp.is_absolute()) return p;
    return (std::filesystem::path(origin_).parent_path() / fp).lexically_normal().string();
  }

 private:
  // Line of `key` inside [section] (or of the section header), 0 if absent.
  int line_of(const std::string& section, const std::string& key) const {
    std::istringstream ss(text_);
    std::string line, current;
    int n = 0;
    while (std::getline(ss, line)) {
      ++n;
      const std::string t = trim(line);
      if (t.empty() || t[0] == ';' || t[0] == '#') continue;
      if (t.front() == '[') {
        current = trim(t.substr(1, t.find(']') - 1));
        if (key.empty() && current == section) return n;
        continue;
      }
      const auto eq = t.find('=');
      const std::string k = trim(t.substr(0, eq));
      if (current == section && k == key) return n;
      if (key.empty() && current.empty() && k == section) return n;
    }
    return 0;
  }

  std::string text_, origin_;
  pt::ptree tree_;
};

}  // namespace

void Scenario::validate() const {
  try {
    solve.validate();
    harness.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  static const std::set<std::string> forcing_kinds{"zero", "manufactured", "single_mode", "random",
                                                   "file"};
  static const std::set<std::string> initial_kinds{"auto", "zero", "manufactured", "random", "file"};
  if (!forcing_kinds.count(forcing.kind)) throw ConfigError("unknown forcing kind '" + forcing.kind + "'");
  if (!initial_kinds.count(initial.kind)) throw ConfigError("unknown initial kind '" + initial.kind + "'");
  if (initial.kind == "manufactured" && forcing.kind != "manufactured")
    throw ConfigError("manufactured initial data needs manufactured forcing");
  if (forcing.kind == "file" && forcing.profile != "linear" && forcing.profile != "constant")
    throw ConfigError("forcing profile must be linear or constant");
  if (forcing.kind == "file" && !std::filesystem::exists(forcing.path))
    throw ConfigError("forcing file not found: " + forcing.path);
  if (initial.kind == "file" && !std::filesystem::exists(initial.path))
    throw ConfigError("initial data file not found: " + initial.path);
  if (!(forcing.amplitude >= 0) || !(initial.amplitude >= 0))
    throw ConfigError("amplitudes must be nonnegative");
  if (!(forcing.manufactured.epsilon >= 0)) throw ConfigError("epsilon must be nonnegative");
  if (forcing.modes < 1) throw ConfigError("forcing modes must be positive");
  const auto& known = known_verifications();
  for (const auto& id : verify)
    if (std::find(known.begin(), known.end(), id) == known.end())
      throw ConfigError("unknown verification identifier '" + id + "'");
  if (levels.size() < 2) throw ConfigError("convergence study needs at least two levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 2) throw ConfigError("convergence levels must be >= 2");
    if (i && levels[i] <= levels[i - 1]) throw ConfigError("convergence levels must increase");
  }
  if (snapshots != "none" && snapshots != "final" && snapshots != "all")
    throw ConfigError("snapshots must be none, final or all");
  if (out_dir.empty()) throw ConfigError("output directory must not be empty");
}

Scenario parse_scenario(std::istream& in, const std::string& origin) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const Reader r(std::move(text), origin);
  Scenario s;
  r.get("scenario", "name", s.name);
  r.get("scenario", "seed", s.seed);
  r.get("scenario", "out", s.out_dir);
  s.verify = r.list("scenario", "verify");
  for (const auto& id : s.verify) {
    const auto& known = known_verifications();
    if (std::find(known.begin(), known.end(), id) == known.end())
      r.fail("scenario", "verify", "unknown verification identifier '" + id + "'");
  }

  int modes = 8, grid = 0;
  double length = 2 * std::numbers::pi;
  r.get("domain", "modes", modes);
  r.get("domain", "grid", grid);
  r.get("domain", "length", length);
  if (modes < 1) r.fail("domain", "modes", "modes must be >= 1");
  if (!(length > 0)) r.fail("domain", "length", "length must be positive");
  s.solve.domain = DomainSpec::cube(modes, grid, length);

  r.get("time", "horizon", s.solve.time.horizon);
  r.get("time", "steps", s.solve.time.steps);

  SolveConfig& c = s.solve;
  r.get("solver", "rho", c.rho);
  r.get("solver", "tolerance", c.tolerance);
  r.get("solver", "max_iterations", c.max_iterations);
  r.get("solver", "relaxation", c.relaxation);
  r.get("solver", "mu", c.mu);
  r.get("solver", "block_steps", c.block_steps);
  if (auto v = r.raw("solver", "sign")) {
    try {
      c.sign = parse_sign_convention(*v);
    } catch (const std::invalid_argument& e) {
      r.fail("solver", "sign", e.what());
    }
  }
  if (auto v = r.raw("solver", "exec")) {
    if (*v == "serial")
      c.exec = Exec::serial;
    else if (*v == "parallel")
      c.exec = Exec::parallel;
    else
      r.fail("solver", "exec", "exec must be serial or parallel");
  }

  ForcingSpec& f = s.forcing;
  r.get("forcing", "kind", f.kind);
  if (auto v = r.raw("forcing", "family")) {
    try {
      f.manufactured.family = parse_manufactured_family(*v);
    } catch (const std::invalid_argument& e) {
      r.fail("forcing", "family", e.what());
    }
  }
  r.get("forcing", "epsilon", f.manufactured.epsilon);
  r.get("forcing", "decay", f.manufactured.decay);
  r.get("forcing", "convection", f.manufactured.include_convection);
  r.get("forcing", "amplitude", f.amplitude);
  r.get("forcing", "modes", f.modes);
  r.get("forcing", "profile", f.profile);
  if (r.has("forcing", "path")) f.path = r.path(*r.raw("forcing", "path"));

  r.get("initial", "kind", s.initial.kind);
  r.get("initial", "amplitude", s.initial.amplitude);
  if (r.has("initial", "path")) s.initial.path = r.path(*r.raw("initial", "path"));

  if (r.has("converge", "levels")) {
    s.levels.clear();
    for (const auto& item : r.list("converge", "levels"))
      s.levels.push_back(r.number<int>("converge", "levels", item));
  }

  HarnessConfig& h = s.harness;
  h.seed = s.seed;
  h.mu = c.mu;
  h.rho = c.rho;
  r.get("harness", "samples", h.samples);
  r.get("harness", "p", h.p);
  r.get("harness", "lambda", h.lambda);
  r.get("harness", "hl_steps", h.hl_steps);
  r.get("harness", "sobolev_grid", h.sobolev_grid);
  r.get("harness", "sobolev_box", h.sobolev_box);
  r.get("harness", "mixed_samples", h.mixed_samples);
  r.get("harness", "mixed_modes", h.mixed_modes);
  r.get("harness", "mixed_steps", h.mixed_steps);
  r.get("harness", "tolerance", h.tolerance);

  r.get("output", "snapshots", s.snapshots);

  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_scenario(in, path);
}

void apply_overrides(Scenario& s, const Overrides& o) {
  if (o.seed) {
    s.seed = *o.seed;
    s.harness.seed = *o.seed;
  }
  if (o.mu) {
    s.solve.mu = *o.mu;
    s.harness.mu = *o.mu;
  }
  if (o.sign) {
    try {
      s.solve.sign = parse_sign_convention(*o.sign);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.out_dir) s.out_dir = *o.out_dir;
  s.validate();
}

const std::vector<std::string>& known_verifications() {
  static const std::vector<std::string> ids{
      // operator identities
      "abel_roundtrip", "composition_2_14", "f_mu_identity_3_18", "projection_2_17",
      "kernel_estimates",
      // boundedness harnesses
      "hardy_littlewood", "sobolev_potential", "green_mixed_2_11", "bilinear_2_12",
      // checks on the forcing
      "bilinear_3_1",
      // checks on a solved bundle
      "scalar_3_2", "scalar_3_4", "pressure_3_4pp", "key_3_25", "gronwall_3_24",
      "apriori_2_21", "hopf_4_4", "residual_budget", "fixed_point"};
  return ids;
}

}  // namespace nsv::app
