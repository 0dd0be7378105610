/**
 * @file bench.hpp
 * @brief Case configuration, the solve/recover/compare pipeline, sweeps and reports.
 */
#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "igalam/collocation_solver.hpp"
#include "igalam/laminate_material.hpp"
#include "igalam/pagano_oracle.hpp"
#include "igalam/stress_recovery.hpp"

namespace igalam {

inline constexpr int kSchemaVersion = 1;

/// Stiffness used when turning the displacement solution into stresses.
enum class StressStiffness { Plywise, Homogenized };

struct CaseConfig {
  int layers = 11;
  double ply_thickness = 1.0;  ///< mm
  double slenderness = 20.0;   ///< L / t
  std::array<int, 3> degrees{6, 6, 4};
  int inplane_spans = 4;
  int thickness_spans = 1;
  std::array<double, 2> station{0.25, 0.25};  ///< fractions of L
  int samples = 201;
  EngineeringConstants material = benchmark_ply_material();
  double sigma0 = 1.0;  ///< MPa
  ModalBackend oracle = ModalBackend::Propagation;
  PlyOrientation bottom_ply = PlyOrientation::Deg90;
  StressStiffness stress_stiffness = StressStiffness::Plywise;
  Sigma33Anchor sigma33_anchor = Sigma33Anchor::Balanced;

  /// Throws ConfigError.
  void validate() const;
  double thickness() const { return layers * ply_thickness; }
  double length() const { return slenderness * thickness(); }
  std::string label() const;
};

/// Percent error max|ref - approx| / max|ref| over paired samples.
double relative_max_error_percent(std::span<const double> reference, std::span<const double> approx);

struct Timing {
  double homogenize = 0, assemble = 0, solve = 0, recover = 0, oracle = 0, total = 0;  ///< seconds
};

struct ResultRecord {
  CaseConfig config;
  std::array<double, 3> raw_error{};        ///< IGA-C, percent: sigma_13, sigma_23, sigma_33
  std::array<double, 3> recovered_error{};  ///< IGA-C+PP, percent
  int dofs = 0;
  double residual = 0.0;
  Timing timing;
};

/// Everything produced by one solved case.
struct CaseRun {
  CaseConfig config;
  Layup layup;
  ElasticityMatrix cbar;
  SolveResult solution;
  ModalSolution oracle;
  Timing timing;
};

CaseRun solve_case(const CaseConfig& cfg);

/// Stiffness profile selected by run.config.stress_stiffness.
StiffnessProfile stress_stiffness_profile(const CaseRun& run);

/// Through-thickness comparison at one in-plane station; all stresses normalized.
struct ProfileTable {
  double x1 = 0, x2 = 0;
  StressProfile method;
  Eigen::MatrixXd reference;  ///< n x 6 reference stresses (Voigt, not normalized)
};

ProfileTable station_profile(const CaseRun& run, std::array<double, 2> station_fraction);

ResultRecord evaluate_errors(const CaseRun& run);
ResultRecord run_case(const CaseConfig& cfg);

struct SweepEntry {
  CaseConfig config;
  std::optional<ResultRecord> result;
  std::string error;  ///< empty on success
};

struct SweepGrid {
  CaseConfig base;
  std::vector<int> layers{3, 11, 33};
  std::vector<double> slenderness{20, 30, 40, 50};
  std::vector<std::array<int, 3>> degrees{{6, 6, 4}, {6, 6, 6}};
  std::vector<int> inplane_spans{4};

  /// Cartesian product, layers outermost, spans innermost.
  std::vector<CaseConfig> expand() const;
};

/// Runs every case; failures are recorded and the sweep continues. Results
/// keep the order of `configs` regardless of `jobs`.
std::vector<SweepEntry> run_sweep(const std::vector<CaseConfig>& configs, unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Published reference errors

struct GoldenRow {
  int layers;
  double slenderness;
  std::array<int, 3> degrees;
  std::array<double, 3> raw;        ///< percent
  std::array<double, 3> recovered;  ///< percent
};

/// Tabulated errors at station (0.25L, 0.25L), 4 in-plane spans, 1 thickness span.
std::span<const GoldenRow> golden_rows();

/// |ours - published| <= 0.5 points, or ours within a factor of two of published.
bool recovered_matches(double ours, double published);
/// |ours - published| <= 10 points.
bool raw_matches(double ours, double published);

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Reference-solver consistency checks on the 3- and 11-ply S = 20 problems:
/// backend agreement, spline self-convergence, surface tractions, interface
/// continuity, ODE residual.
std::vector<SelfCheck> oracle_self_checks();

// ---------------------------------------------------------------------------
// Configuration files and reports

CaseConfig case_from_json(const nlohmann::json& j, const CaseConfig& defaults = {});
nlohmann::json case_to_json(const CaseConfig& cfg);
SweepGrid sweep_from_json(const nlohmann::json& j);
/// Reads a JSON config file; throws ConfigError unless it is an object with
/// a supported schema_version.
nlohmann::json load_json(const std::filesystem::path& path);

/// Result CSV (no timings, so output is reproducible bit for bit).
void write_results_csv(std::ostream& os, std::span<const SweepEntry> entries);
nlohmann::json results_to_json(std::span<const SweepEntry> entries, bool with_timing = true);
/// Human-readable table, percentages to three significant figures.
void write_results_table(std::ostream& os, std::span<const SweepEntry> entries);

void write_profile_csv(std::ostream& os, const ProfileTable& table);

/// Default stations: the 3 x 3 quarter-length grid.
std::vector<std::array<double, 2>> quarter_stations();

/// One CSV per station in `out_dir`; returns the written paths.
std::vector<std::filesystem::path> emit_profiles(const CaseConfig& cfg,
                                                 const std::vector<std::array<double, 2>>& stations,
                                                 const std::filesystem::path& out_dir);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Formats with `digits` significant figures.
std::string format_sig(double value, int digits = 3);

}  // namespace igalam
