#include "nsv/field_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nsv {

namespace {

constexpr const char* kColumns = "kx ky kz component re im";

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("snapshot line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_snapshot(std::ostream& out, const std::vector<const SpectralField*>& components) {
  if (components.empty()) throw std::invalid_argument("snapshot needs a component");
  const DomainSpec& d = components.front()->domain();
  char buf[160];
  out << "# nsv field snapshot\n";
  std::snprintf(buf, sizeof buf, "domain.length = %.17g %.17g %.17g\n", d.length[0],
                d.length[1], d.length[2]);
  out << buf;
  out << "domain.modes = " << d.modes[0] << ' ' << d.modes[1] << ' ' << d.modes[2] << '\n';
  out << "domain.grid = " << d.grid[0] << ' ' << d.grid[1] << ' ' << d.grid[2] << '\n';
  out << "components = " << components.size() << '\n';
  out << kColumns << '\n';
  for (std::size_t c = 0; c < components.size(); ++c) {
    const SpectralField& f = *components[c];
    if (!(f.domain() == d)) throw std::invalid_argument("components on different domains");
    const auto& n = d.modes;
    for (int a = -n[0]; a <= n[0]; ++a)
      for (int b = -n[1]; b <= n[1]; ++b)
        for (int k = -n[2]; k <= n[2]; ++k) {
          const Complex v = f.at(a, b, k);
          std::snprintf(buf, sizeof buf, "%d %d %d %zu %.17g %.17g\n", a, b, k, c, v.real(),
                        v.imag());
          out << buf;
        }
  }
}

void write_snapshot(std::ostream& out, const SpectralVectorField& v) {
  write_snapshot(out, {&v[0], &v[1], &v[2]});
}

void write_snapshot(std::ostream& out, const SpectralField& f) { write_snapshot(out, {&f}); }

std::vector<SpectralField> read_snapshot(std::istream& in) {
  DomainSpec d;
  bool have_length = false, have_modes = false, have_grid = false;
  int components = -1;
  std::string line;
  int lineno = 0;
  // header block
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == kColumns) break;
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value' in header");
    const std::string key = trim(t.substr(0, eq));
    std::istringstream vals(t.substr(eq + 1));
    if (key == "domain.length") {
      if (!(vals >> d.length[0] >> d.length[1] >> d.length[2])) fail(lineno, "bad domain.length");
      have_length = true;
    } else if (key == "domain.modes") {
      if (!(vals >> d.modes[0] >> d.modes[1] >> d.modes[2])) fail(lineno, "bad domain.modes");
      have_modes = true;
    } else if (key == "domain.grid") {
      if (!(vals >> d.grid[0] >> d.grid[1] >> d.grid[2])) fail(lineno, "bad domain.grid");
      have_grid = true;
    } else if (key == "components") {
      if (!(vals >> components) || components < 1) fail(lineno, "bad components");
    } else {
      fail(lineno, "unknown header key '" + key + "'");
    }
  }
  if (!have_length || !have_modes || !have_grid || components < 1)
    fail(lineno, "incomplete header block");
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    fail(lineno, e.what());
  }
  std::vector<SpectralField> fields(components, SpectralField(d));
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream row(t);
    int a, b, k, c;
    double re, im;
    if (!(row >> a >> b >> k >> c >> re >> im)) fail(lineno, "expected six columns");
    if (c < 0 || c >= components) fail(lineno, "component index out of range");
    if (!fields[c].in_cutoff(a, b, k)) fail(lineno, "wave vector outside cutoff");
    fields[c].at(a, b, k) = Complex(re, im);
  }
  for (auto& f : fields) f.enforce_conjugate_symmetry();
  return fields;
}

SpectralVectorField read_vector_snapshot(std::istream& in) {
  auto fields = read_snapshot(in);
  if (fields.size() != 3) throw std::runtime_error("vector snapshot needs 3 components");
  return {std::move(fields[0]), std::move(fields[1]), std::move(fields[2])};
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + tmp.string());
    out << contents;
    if (!out) throw std::ios_base::failure("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace nsv
