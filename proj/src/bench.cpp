#include "igalam/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "igalam/errors.hpp"

namespace igalam {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr std::array<GoldenRow, 24> kGolden{{
    // 11 layers
    {11, 20, {6, 6, 4}, {97.6, 56.7, 6.34}, {0.31, 2.94, 0.90}},
    {11, 30, {6, 6, 4}, {98.7, 55.6, 6.36}, {0.16, 1.34, 0.47}},
    {11, 40, {6, 6, 4}, {99.2, 55.3, 6.37}, {0.07, 0.78, 0.34}},
    {11, 50, {6, 6, 4}, {99.4, 55.1, 6.38}, {0.03, 0.52, 0.29}},
    {11, 20, {6, 6, 6}, {96.6, 56.1, 6.31}, {1.97, 1.20, 0.05}},
    {11, 30, {6, 6, 6}, {98.3, 55.4, 6.34}, {0.91, 0.57, 0.08}},
    {11, 40, {6, 6, 6}, {98.9, 55.2, 6.36}, {0.50, 0.35, 0.12}},
    {11, 50, {6, 6, 6}, {99.2, 55.1, 6.38}, {0.30, 0.25, 0.15}},
    // 3 layers
    {3, 20, {6, 6, 4}, {292, 57.2, 5.80}, {10.4, 3.16, 0.54}},
    {3, 30, {6, 6, 4}, {311, 57.5, 5.77}, {5.05, 1.40, 0.28}},
    {3, 40, {6, 6, 4}, {319, 57.6, 5.76}, {2.91, 0.81, 0.21}},
    {3, 50, {6, 6, 4}, {323, 57.6, 5.76}, {1.87, 0.54, 0.20}},
    {3, 20, {6, 6, 6}, {291, 57.2, 5.79}, {11.9, 1.41, 0.33}},
    {3, 30, {6, 6, 6}, {311, 57.5, 5.77}, {5.75, 0.63, 0.11}},
    {3, 40, {6, 6, 6}, {319, 57.6, 5.76}, {3.32, 0.38, 0.02}},
    {3, 50, {6, 6, 6}, {322, 57.6, 5.76}, {2.14, 0.26, 0.07}},
    // 33 layers
    {33, 20, {6, 6, 4}, {81.6, 69.7, 6.33}, {1.16, 2.21, 0.93}},
    {33, 30, {6, 6, 4}, {81.5, 69.0, 6.34}, {0.53, 1.01, 0.48}},
    {33, 40, {6, 6, 4}, {81.5, 68.7, 6.35}, {0.32, 0.59, 0.34}},
    {33, 50, {6, 6, 4}, {81.6, 68.6, 6.35}, {0.23, 0.40, 0.30}},
    {33, 20, {6, 6, 6}, {80.7, 68.9, 6.33}, {0.54, 0.50, 0.07}},
    {33, 30, {6, 6, 6}, {81.2, 68.7, 6.34}, {0.23, 0.25, 0.09}},
    {33, 40, {6, 6, 6}, {81.3, 68.6, 6.34}, {0.11, 0.16, 0.12}},
    {33, 50, {6, 6, 6}, {81.4, 68.5, 6.35}, {0.05, 0.13, 0.16}},
}};

}  // namespace

// ---------------------------------------------------------------------------

void CaseConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (layers < 1) fail("layers must be >= 1");
  if (layers % 2 == 0) fail("an alternating 0/90 stack needs an odd number of layers to be symmetric");
  if (!(ply_thickness > 0.0)) fail("ply_thickness must be positive");
  if (!(slenderness > 0.0)) fail("S must be positive");
  if (degrees[0] < 3 || degrees[1] < 3) fail("in-plane degrees must be >= 3");
  if (degrees[2] < 2) fail("through-thickness degree must be >= 2");
  if (inplane_spans < 1 || thickness_spans < 1) fail("knot span counts must be >= 1");
  for (double s : station)
    if (!(s >= 0.0 && s <= 1.0)) fail("station fractions must lie in [0, 1]");
  if (samples < 2) fail("samples must be >= 2");
  if (!(sigma0 > 0.0)) fail("sigma0 must be positive");
}

std::string CaseConfig::label() const {
  std::ostringstream os;
  os << "N=" << layers << " S=" << slenderness << " deg=(" << degrees[0] << ',' << degrees[1] << ','
     << degrees[2] << ") spans=" << inplane_spans << 'x' << thickness_spans;
  return os.str();
}

double relative_max_error_percent(std::span<const double> reference, std::span<const double> approx) {
  if (reference.size() != approx.size() || reference.empty())
    throw DomainError("error metric: sample sets differ in size");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    num = std::max(num, std::abs(reference[i] - approx[i]));
    den = std::max(den, std::abs(reference[i]));
  }
  if (!(den > 0.0)) throw DomainError("error metric: reference vanishes at every sample");
  return 100.0 * num / den;
}

CaseRun solve_case(const CaseConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  Timing timing;

  auto t = Clock::now();
  const Layup layup = alternating_cross_ply(cfg.layers, cfg.ply_thickness, cfg.material, cfg.bottom_ply);
  ElasticityMatrix cbar = homogenize(layup);
  timing.homogenize = seconds_since(t);

  // Solved for a unit load and scaled afterwards, so errors do not pick up
  // load-dependent round-off.
  PlateProblem problem{make_plate_space(cfg.length(), cfg.thickness(), cfg.degrees, cfg.inplane_spans,
                                        cfg.thickness_spans),
                       cbar, 1.0, cfg.slenderness, cfg.thickness()};
  t = Clock::now();
  const CollocationGrid grid = build_grid(problem.space);
  const CollocationSystem system = assemble(problem.space, cbar, problem.boundary_conditions(), grid);
  timing.assemble = seconds_since(t);

  t = Clock::now();
  SolveResult solution = solve(system, problem.space);
  solution.field.coeffs *= cfg.sigma0;
  timing.solve = seconds_since(t);

  t = Clock::now();
  ModalSolution oracle =
      solve_modal(make_modal_problem(layup, cfg.slenderness, 1.0), cfg.oracle).scaled(cfg.sigma0);
  timing.oracle = seconds_since(t);

  timing.total = seconds_since(t0);
  return CaseRun{cfg, layup, std::move(cbar), std::move(solution), std::move(oracle), timing};
}

StiffnessProfile stress_stiffness_profile(const CaseRun& run) {
  const double bottom = -0.5 * run.config.thickness();
  if (run.config.stress_stiffness == StressStiffness::Homogenized)
    return StiffnessProfile::uniform(run.cbar, bottom, -bottom);
  return StiffnessProfile::plywise(run.layup, bottom);
}

ProfileTable station_profile(const CaseRun& run, std::array<double, 2> station) {
  const double L = run.config.length();
  ProfileTable table;
  table.x1 = station[0] * L;
  table.x2 = station[1] * L;
  RecoveryPlan plan = make_recovery_plan(run.solution.field, stress_stiffness_profile(run), table.x1, table.x2);
  const double k = std::numbers::pi / L;
  plan.top_traction = Vec3(0.0, 0.0, run.config.sigma0 * std::sin(k * table.x1) * std::sin(k * table.x2));
  plan.sigma33_anchor = run.config.sigma33_anchor;
  table.method =
      profile(run.solution.field, plan, run.config.samples, run.config.sigma0, run.config.slenderness);
  table.reference.resize(static_cast<Eigen::Index>(table.method.x3.size()), 6);
  for (std::size_t i = 0; i < table.method.x3.size(); ++i)
    table.reference.row(static_cast<Eigen::Index>(i)) =
        reference_stress(run.oracle, table.x1, table.x2, table.method.x3[i]).transpose();
  return table;
}

ResultRecord evaluate_errors(const CaseRun& run) {
  const auto t = Clock::now();
  const ProfileTable table = station_profile(run, run.config.station);
  ResultRecord rec;
  rec.config = run.config;
  rec.dofs = 3 * run.solution.field.space.size();
  rec.residual = run.solution.relative_residual;

  const std::array<int, 3> voigt{k13, k23, k33};
  const auto n = static_cast<Eigen::Index>(table.method.x3.size());
  for (std::size_t c = 0; c < 3; ++c) {
    const Eigen::VectorXd ref = table.reference.col(voigt[c]);
    const Eigen::VectorXd raw = table.method.raw.col(voigt[c]);
    const Eigen::VectorXd rec_c = table.method.recovered.col(static_cast<Eigen::Index>(c));
    rec.raw_error[c] = relative_max_error_percent({ref.data(), static_cast<std::size_t>(n)},
                                                  {raw.data(), static_cast<std::size_t>(n)});
    rec.recovered_error[c] = relative_max_error_percent({ref.data(), static_cast<std::size_t>(n)},
                                                        {rec_c.data(), static_cast<std::size_t>(n)});
  }
  rec.timing = run.timing;
  rec.timing.recover = seconds_since(t);
  rec.timing.total += rec.timing.recover;
  return rec;
}

ResultRecord run_case(const CaseConfig& cfg) {
  try {
    return evaluate_errors(solve_case(cfg));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    // keep the concrete type out of the way; attach case context
    throw Error("[" + cfg.label() + "] " + e.what());
  }
}

std::vector<CaseConfig> SweepGrid::expand() const {
  std::vector<CaseConfig> out;
  for (int n : layers)
    for (double s : slenderness)
      for (const auto& d : degrees)
        for (int sp : inplane_spans) {
          CaseConfig c = base;
          c.layers = n;
          c.slenderness = s;
          c.degrees = d;
          c.inplane_spans = sp;
          out.push_back(c);
        }
  return out;
}

std::vector<SweepEntry> run_sweep(const std::vector<CaseConfig>& configs, unsigned jobs) {
  if (configs.empty()) throw ConfigError("sweep: empty case list");
  std::vector<SweepEntry> out(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      out[i].config = configs[i];
      try {
        out[i].result = run_case(configs[i]);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::span<const GoldenRow> golden_rows() { return kGolden; }

bool recovered_matches(double ours, double published) {
  if (std::abs(ours - published) <= 0.5) return true;
  return ours >= 0.5 * published && ours <= 2.0 * published;
}

bool raw_matches(double ours, double published) { return std::abs(ours - published) <= 10.0; }

std::vector<SelfCheck> oracle_self_checks() {
  std::vector<SelfCheck> out;
  auto add = [&](std::string name, double value, double tol) {
    out.push_back({std::move(name), value <= tol, format_sig(value) + " <= " + format_sig(tol, 2)});
  };
  for (int n : {3, 11}) {
    const Layup layup = alternating_cross_ply(n, 1.0, benchmark_ply_material(), PlyOrientation::Deg90);
    const ModalProblem problem = make_modal_problem(layup, 20.0, 1.0);
    const ModalSolution a = solve_modal(problem, ModalBackend::Propagation);
    const SplineOptions b_default;
    const ModalSolution b = solve_modal(problem, ModalBackend::SplineCollocation, b_default);
    const std::string tag = "N=" + std::to_string(n) + " S=20 ";
    const double bottom = problem.interfaces.front(), top = problem.interfaces.back();

    // per component, relative to the component's largest amplitude
    auto discrepancy = [&](const ModalSolution& x, const ModalSolution& y) {
      constexpr int samples = 401;
      Vector6 peak = Vector6::Zero(), diff = Vector6::Zero();
      for (int i = 0; i < samples; ++i) {
        const double z = bottom + (top - bottom) * i / (samples - 1);
        const Vector6 sx = x.stress_amplitudes(z), sy = y.stress_amplitudes(z);
        peak = peak.cwiseMax(sx.cwiseAbs());
        diff = diff.cwiseMax((sx - sy).cwiseAbs());
      }
      return (diff.array() / peak.array()).maxCoeff();
    };
    add(tag + "backend agreement", discrepancy(a, b), 1e-8);
    const SplineOptions fine{b_default.degree, 2 * b_default.spans_per_layer};
    add(tag + "spline self-convergence", discrepancy(b, solve_modal(problem, ModalBackend::SplineCollocation, fine)),
        1e-9);

    // surface tractions
    const Vec3 tb = a.traction_amplitudes(bottom, 0);
    const Vec3 tt = a.traction_amplitudes(top, n - 1) - Vec3(0, 0, problem.sigma0);
    add(tag + "surface tractions", std::max(tb.norm(), tt.norm()) / problem.sigma0, 1e-10);

    // continuity of displacement and traction amplitudes
    double jump = 0.0;
    for (int k = 1; k < n; ++k) {
      const double z = problem.interfaces[static_cast<std::size_t>(k)];
      const State6 lo = a.amplitudes(z, k - 1), hi = a.amplitudes(z, k);
      const Vec3 tlo = a.traction_amplitudes(z, k - 1), thi = a.traction_amplitudes(z, k);
      jump = std::max({jump, (lo.head<3>() - hi.head<3>()).norm() / lo.head<3>().norm(),
                       (tlo - thi).norm() / problem.sigma0});
    }
    add(tag + "interface continuity", jump, 1e-9);

    // ODE residual by central differences of y' inside each layer
    double res = 0.0;
    for (int k = 0; k < n; ++k) {
      const ModalOde ode = reduce_to_modal_ode(problem.layers[static_cast<std::size_t>(k)], problem.alpha,
                                               problem.beta);
      const double z0 = problem.interfaces[static_cast<std::size_t>(k)];
      const double z1 = problem.interfaces[static_cast<std::size_t>(k) + 1];
      const double h = 1e-4 * (z1 - z0);
      for (double f : {0.25, 0.5, 0.75}) {
        const double z = z0 + f * (z1 - z0);
        const State6 s = a.amplitudes(z, k);
        const Vec3 d2 = (a.amplitudes(z + h, k).tail<3>() - a.amplitudes(z - h, k).tail<3>()) / (2 * h);
        const Vec3 r = ode.residual(s.head<3>(), s.tail<3>(), d2);
        const double ref = (ode.D * d2).norm() + (ode.G * s.tail<3>()).norm() + (ode.K * s.head<3>()).norm();
        res = std::max(res, r.norm() / ref);
      }
    }
    add(tag + "ODE residual", res, 1e-6);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(std::string("config: unknown key '") + it.key() + "' in " + where);
}

}  // namespace

CaseConfig case_from_json(const nlohmann::json& j, const CaseConfig& defaults) {
  if (!j.is_object()) throw ConfigError("config: case must be a JSON object");
  reject_unknown(j,
                 {"layers", "ply_thickness", "S", "degrees", "inplane_spans", "thickness_spans", "station",
                  "samples", "sigma0", "material", "oracle", "bottom_ply", "stress_stiffness", "sigma33_anchor"},
                 "case");
  CaseConfig c = defaults;
  if (j.contains("layers")) c.layers = get_as<int>(j, "layers");
  if (j.contains("ply_thickness")) c.ply_thickness = get_as<double>(j, "ply_thickness");
  if (j.contains("S")) c.slenderness = get_as<double>(j, "S");
  if (j.contains("degrees")) c.degrees = get_as<std::array<int, 3>>(j, "degrees");
  if (j.contains("inplane_spans")) c.inplane_spans = get_as<int>(j, "inplane_spans");
  if (j.contains("thickness_spans")) c.thickness_spans = get_as<int>(j, "thickness_spans");
  if (j.contains("station")) c.station = get_as<std::array<double, 2>>(j, "station");
  if (j.contains("samples")) c.samples = get_as<int>(j, "samples");
  if (j.contains("sigma0")) c.sigma0 = get_as<double>(j, "sigma0");
  if (j.contains("oracle")) {
    const auto o = get_as<std::string>(j, "oracle");
    if (o == "propagation")
      c.oracle = ModalBackend::Propagation;
    else if (o == "spline")
      c.oracle = ModalBackend::SplineCollocation;
    else
      throw ConfigError("config: oracle must be 'propagation' or 'spline'");
  }
  if (j.contains("bottom_ply")) {
    const auto o = get_as<int>(j, "bottom_ply");
    if (o != 0 && o != 90) throw ConfigError("config: bottom_ply must be 0 or 90");
    c.bottom_ply = o == 0 ? PlyOrientation::Deg0 : PlyOrientation::Deg90;
  }
  if (j.contains("stress_stiffness")) {
    const auto o = get_as<std::string>(j, "stress_stiffness");
    if (o == "plywise")
      c.stress_stiffness = StressStiffness::Plywise;
    else if (o == "homogenized")
      c.stress_stiffness = StressStiffness::Homogenized;
    else
      throw ConfigError("config: stress_stiffness must be 'plywise' or 'homogenized'");
  }
  if (j.contains("sigma33_anchor")) {
    const auto o = get_as<std::string>(j, "sigma33_anchor");
    if (o == "bottom")
      c.sigma33_anchor = Sigma33Anchor::Bottom;
    else if (o == "balanced")
      c.sigma33_anchor = Sigma33Anchor::Balanced;
    else
      throw ConfigError("config: sigma33_anchor must be 'bottom' or 'balanced'");
  }
  if (j.contains("material")) {
    const auto& m = j.at("material");
    if (!m.is_object()) throw ConfigError("config: material must be an object");
    reject_unknown(m, {"E1", "E2", "E3", "G23", "G13", "G12", "nu23", "nu13", "nu12"}, "material");
    auto& e = c.material;
    if (m.contains("E1")) e.E1 = get_as<double>(m, "E1");
    if (m.contains("E2")) e.E2 = get_as<double>(m, "E2");
    if (m.contains("E3")) e.E3 = get_as<double>(m, "E3");
    if (m.contains("G23")) e.G23 = get_as<double>(m, "G23");
    if (m.contains("G13")) e.G13 = get_as<double>(m, "G13");
    if (m.contains("G12")) e.G12 = get_as<double>(m, "G12");
    if (m.contains("nu23")) e.nu23 = get_as<double>(m, "nu23");
    if (m.contains("nu13")) e.nu13 = get_as<double>(m, "nu13");
    if (m.contains("nu12")) e.nu12 = get_as<double>(m, "nu12");
  }
  c.validate();
  return c;
}

nlohmann::json case_to_json(const CaseConfig& c) {
  const auto& e = c.material;
  return {{"layers", c.layers},
          {"ply_thickness", c.ply_thickness},
          {"S", c.slenderness},
          {"degrees", c.degrees},
          {"inplane_spans", c.inplane_spans},
          {"thickness_spans", c.thickness_spans},
          {"station", c.station},
          {"samples", c.samples},
          {"sigma0", c.sigma0},
          {"oracle", c.oracle == ModalBackend::Propagation ? "propagation" : "spline"},
          {"bottom_ply", c.bottom_ply == PlyOrientation::Deg0 ? 0 : 90},
          {"stress_stiffness", c.stress_stiffness == StressStiffness::Plywise ? "plywise" : "homogenized"},
          {"sigma33_anchor", c.sigma33_anchor == Sigma33Anchor::Bottom ? "bottom" : "balanced"},
          {"material",
           {{"E1", e.E1}, {"E2", e.E2}, {"E3", e.E3}, {"G23", e.G23}, {"G13", e.G13}, {"G12", e.G12},
            {"nu23", e.nu23}, {"nu13", e.nu13}, {"nu12", e.nu12}}}};
}

SweepGrid sweep_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: sweep must be a JSON object");
  reject_unknown(j, {"base", "layers", "S", "degrees", "inplane_spans"}, "sweep");
  SweepGrid g;
  if (j.contains("base")) g.base = case_from_json(j.at("base"));
  if (j.contains("layers")) g.layers = get_as<std::vector<int>>(j, "layers");
  if (j.contains("S")) g.slenderness = get_as<std::vector<double>>(j, "S");
  if (j.contains("degrees")) g.degrees = get_as<std::vector<std::array<int, 3>>>(j, "degrees");
  if (j.contains("inplane_spans")) g.inplane_spans = get_as<std::vector<int>>(j, "inplane_spans");
  if (g.layers.empty() || g.slenderness.empty() || g.degrees.empty() || g.inplane_spans.empty())
    throw ConfigError("config: sweep axes must be non-empty");
  for (const auto& c : g.expand()) c.validate();
  return g;
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    if (!j.is_object() || !j.contains("schema_version"))
      throw ConfigError("config: " + path.string() + " has no schema_version");
    if (j.at("schema_version") != kSchemaVersion)
      throw ConfigError("config: unsupported schema_version in " + path.string());
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

void write_results_csv(std::ostream& os, std::span<const SweepEntry> entries) {
  os << "layers,S,p,q,r,inplane_spans,thickness_spans,station_x1,station_x2,samples,dofs,residual,"
        "raw_e13,raw_e23,raw_e33,pp_e13,pp_e23,pp_e33,status\n";
  for (const auto& e : entries) {
    const auto& c = e.config;
    os << c.layers << ',' << fmt_full(c.slenderness) << ',' << c.degrees[0] << ',' << c.degrees[1] << ','
       << c.degrees[2] << ',' << c.inplane_spans << ',' << c.thickness_spans << ',' << fmt_full(c.station[0])
       << ',' << fmt_full(c.station[1]) << ',' << c.samples << ',';
    if (e.result) {
      const auto& r = *e.result;
      os << r.dofs << ',' << fmt_full(r.residual);
      for (double v : r.raw_error) os << ',' << fmt_full(v);
      for (double v : r.recovered_error) os << ',' << fmt_full(v);
      os << ",ok\n";
    } else {
      os << ",,,,,,,,failed\n";
    }
  }
}

nlohmann::json results_to_json(std::span<const SweepEntry> entries, bool with_timing) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json j{{"config", case_to_json(e.config)}};
    if (e.result) {
      const auto& r = *e.result;
      j["status"] = "ok";
      j["dofs"] = r.dofs;
      j["residual"] = r.residual;
      j["raw_error_percent"] = {{"s13", r.raw_error[0]}, {"s23", r.raw_error[1]}, {"s33", r.raw_error[2]}};
      j["recovered_error_percent"] = {
          {"s13", r.recovered_error[0]}, {"s23", r.recovered_error[1]}, {"s33", r.recovered_error[2]}};
      if (with_timing) {
        const auto& t = r.timing;
        j["timing_s"] = {{"homogenize", t.homogenize}, {"assemble", t.assemble}, {"solve", t.solve},
                         {"recover", t.recover},       {"oracle", t.oracle},     {"total", t.total}};
      }
    } else {
      j["status"] = "failed";
      j["error"] = e.error;
    }
    cases.push_back(std::move(j));
  }
  return {{"schema_version", kSchemaVersion}, {"cases", cases}};
}

std::string format_sig(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

void write_results_table(std::ostream& os, std::span<const SweepEntry> entries) {
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-5s %-9s %-6s | %8s %8s %8s | %8s %8s %8s | %7s\n", "N", "S", "degrees",
                "spans", "e13", "e23", "e33", "e13+PP", "e23+PP", "e33+PP", "time_s");
  os << line;
  for (const auto& e : entries) {
    const auto& c = e.config;
    const std::string deg =
        std::to_string(c.degrees[0]) + "," + std::to_string(c.degrees[1]) + "," + std::to_string(c.degrees[2]);
    if (!e.result) {
      std::snprintf(line, sizeof line, "%-6d %-5s %-9s %-6d | FAILED: ", c.layers, format_sig(c.slenderness).c_str(),
                    deg.c_str(), c.inplane_spans);
      os << line << e.error << '\n';
      continue;
    }
    const auto& r = *e.result;
    std::snprintf(line, sizeof line, "%-6d %-5s %-9s %-6d | %8s %8s %8s | %8s %8s %8s | %7.2f\n", c.layers,
                  format_sig(c.slenderness).c_str(), deg.c_str(), c.inplane_spans,
                  format_sig(r.raw_error[0]).c_str(), format_sig(r.raw_error[1]).c_str(),
                  format_sig(r.raw_error[2]).c_str(), format_sig(r.recovered_error[0]).c_str(),
                  format_sig(r.recovered_error[1]).c_str(), format_sig(r.recovered_error[2]).c_str(),
                  r.timing.total);
    os << line;
  }
}

void write_profile_csv(std::ostream& os, const ProfileTable& t) {
  const auto& m = t.method;
  const Eigen::MatrixXd raw = m.raw_normalized();
  const Eigen::MatrixXd rec = m.recovered_normalized();
  os << "x3,raw_s11,raw_s22,raw_s33,raw_s23,raw_s13,raw_s12,pp_s13,pp_s23,pp_s33,"
        "ref_s11,ref_s22,ref_s33,ref_s23,ref_s13,ref_s12\n";
  for (std::size_t i = 0; i < m.x3.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const Vector6 ref = normalize_stress(t.reference.row(r).transpose(), m.sigma0, m.slenderness);
    os << fmt_full(m.x3[i]);
    for (int c = 0; c < 6; ++c) os << ',' << fmt_full(raw(r, c));
    for (int c = 0; c < 3; ++c) os << ',' << fmt_full(rec(r, c));
    for (int c = 0; c < 6; ++c) os << ',' << fmt_full(ref[c]);
    os << '\n';
  }
}

std::vector<std::array<double, 2>> quarter_stations() {
  std::vector<std::array<double, 2>> s;
  for (double b : {0.25, 0.5, 0.75})
    for (double a : {0.25, 0.5, 0.75}) s.push_back({a, b});
  return s;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::filesystem::path> emit_profiles(const CaseConfig& cfg,
                                                 const std::vector<std::array<double, 2>>& stations,
                                                 const std::filesystem::path& out_dir) {
  const CaseRun run = solve_case(cfg);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& st : stations) {
    const ProfileTable table = station_profile(run, st);
    std::ostringstream os;
    write_profile_csv(os, table);
    char name[128];
    std::snprintf(name, sizeof name, "profile_N%d_S%s_x%.4g_y%.4g.csv", cfg.layers,
                  format_sig(cfg.slenderness, 6).c_str(), st[0], st[1]);
    const auto path = out_dir / name;
    write_file_atomic(path, os.str());
    written.push_back(path);
  }
  return written;
}

}  // namespace igalam
