#pragma once

// Scenario runner behind the nsv command line tool: INI scenario files,
// the solve / verify / converge / selftest commands and their artifacts.
// Column and key reference: docs/schema.md.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsv/inequalities.hpp"
#include "nsv/solver.hpp"

namespace nsv::app {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNotConverged = 3, kIoError = 4 };

/// Invalid scenario: bad syntax, unknown key, value out of range.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Unreadable input or unwritable output.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ForcingSpec {
  std::string kind = "zero";  // zero | manufactured | single_mode | random | file
  ManufacturedSpec manufactured;
  double amplitude = 0.1;     // single_mode epsilon, random amplitude, file scale
  int modes = 3;              // temporal modes of the random forcing
  std::string path;           // file: spatial profile snapshot
  std::string profile = "linear";  // file: f = scale * t * F (linear) or scale * F (constant)
};

struct InitialSpec {
  std::string kind = "auto";  // auto | zero | manufactured | random | file
  double amplitude = 0.05;
  std::string path;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 12345;
  SolveConfig solve;
  ForcingSpec forcing;
  InitialSpec initial;
  std::vector<std::string> verify;
  std::vector<int> levels{32, 64, 128};
  HarnessConfig harness;
  std::string out_dir = "out";
  std::string snapshots = "final";  // none | final | all

  /// Throws ConfigError.
  void validate() const;
};

/// Parses an INI scenario; `origin` names the source in messages and
/// anchors relative file paths. Throws ConfigError with a line number.
Scenario parse_scenario(std::istream& in, const std::string& origin);
/// Throws IoError if the file cannot be opened, ConfigError otherwise.
Scenario load_scenario(const std::string& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> mu;
  std::optional<std::string> sign;
  std::optional<std::string> out_dir;
};
void apply_overrides(Scenario& s, const Overrides& o);

/// Identifiers accepted in [scenario] verify.
const std::vector<std::string>& known_verifications();

struct ScenarioInputs {
  SpaceTimeField f;
  SpectralVectorField a;  // zero unless initial data is present
  bool has_initial = false;
  std::optional<ManufacturedSolution> exact;
};
ScenarioInputs build_inputs(const Scenario& s);
SolutionBundle solve_scenario(const Scenario& s, const ScenarioInputs& in);

/// Deterministic JSON documents (sorted keys, no timestamps).
std::string summary_json(const Scenario& s, const SolutionBundle& b, const ScenarioInputs& in);
std::string norms_csv(const SolutionBundle& b);

struct CheckItem {
  std::string id;
  bool pass = false;
  double margin = 0;
  std::vector<std::pair<std::string, double>> values;
  std::string notes;
  std::optional<InequalityReport> report;  // series for the CSV export
};
CheckItem to_item(const InequalityReport& r);
CheckItem to_item(const HarnessResult& r);
std::string report_csv(const InequalityReport& r);

/// Operator identities (no solve): abel_roundtrip, composition_2_14,
/// f_mu_identity_3_18, projection_2_17.
CheckItem abel_roundtrip_check();
CheckItem composition_check();
CheckItem f_mu_identity_check(std::uint64_t seed);
CheckItem projection_check(std::uint64_t seed, int modes);

int run_solve(const Scenario& s, bool quiet, std::ostream& log);
int run_verify(const Scenario& s, bool quiet, std::ostream& log);
int run_convergence(const Scenario& s, bool quiet, std::ostream& log);
/// Identity residuals as JSON on `out`; written to s.out_dir when given.
int run_selftest(const Scenario& s, bool write_files, bool quiet, std::ostream& out,
                 std::ostream& log);

/// Runs `body`, mapping exceptions to exit codes with a message on `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace nsv::app
