// igalam: run, sweep, profiles and verify for the laminated plate benchmark.
//
// Exit codes: 0 success, 1 a case failed or missed its reference, 2 bad
// configuration or command line.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "igalam/bench.hpp"
#include "igalam/errors.hpp"

namespace fs = std::filesystem;
using namespace igalam;

namespace {

constexpr int kOk = 0, kCaseFailure = 1, kConfigError = 2;

struct CaseFlags {
  std::string config;
  int layers = 0;
  double slenderness = 0;
  std::vector<int> degrees;
  int spans = 0;
  std::string out;
};

void add_case_flags(CLI::App* app, CaseFlags& f) {
  app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--layers", f.layers, "number of plies");
  app->add_option("--S", f.slenderness, "length-to-thickness ratio");
  app->add_option("--degrees", f.degrees, "degrees p q r")->expected(3);
  app->add_option("--spans", f.spans, "in-plane knot spans");
  app->add_option("--out", f.out, "output directory");
}

CaseConfig case_config(const CaseFlags& f) {
  CaseConfig c;
  if (!f.config.empty()) {
    const auto doc = load_json(f.config);
    if (!doc.contains("case")) throw ConfigError("config: " + f.config + " has no 'case' object");
    c = case_from_json(doc.at("case"));
  }
  if (f.layers) c.layers = f.layers;
  if (f.slenderness) c.slenderness = f.slenderness;
  if (!f.degrees.empty()) c.degrees = {f.degrees[0], f.degrees[1], f.degrees[2]};
  if (f.spans) c.inplane_spans = f.spans;
  c.validate();
  return c;
}

void write_reports(const fs::path& dir, std::span<const SweepEntry> entries) {
  fs::create_directories(dir);
  std::ostringstream csv;
  write_results_csv(csv, entries);
  write_file_atomic(dir / "results.csv", csv.str());
  write_file_atomic(dir / "results.json", results_to_json(entries).dump(2) + "\n");
}

int report(const std::vector<SweepEntry>& entries, const std::string& out) {
  write_results_table(std::cout, entries);
  if (!out.empty()) write_reports(out, entries);
  for (const auto& e : entries)
    if (!e.result) return kCaseFailure;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogenized isogeometric collocation for cross-ply plates"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned jobs = 1;
  app.add_option("-j,--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);

  CaseFlags run_flags;
  auto* run = app.add_subcommand("run", "solve one case and report errors against the reference");
  add_case_flags(run, run_flags);

  struct {
    std::string config;
    std::vector<int> layers;
    std::vector<double> slenderness;
    std::vector<int> degrees;
    std::vector<int> spans;
    std::string out;
  } sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "run a layers x S x degrees x spans grid");
  sweep->add_option("--config", sweep_flags.config, "JSON config file")->check(CLI::ExistingFile);
  sweep->add_option("--layers", sweep_flags.layers, "ply counts");
  sweep->add_option("--S", sweep_flags.slenderness, "length-to-thickness ratios");
  sweep->add_option("--degrees", sweep_flags.degrees, "degree triples p q r ...")->expected(3, 3 * 16);
  sweep->add_option("--spans", sweep_flags.spans, "in-plane knot spans");
  sweep->add_option("--out", sweep_flags.out, "output directory");

  CaseFlags prof_flags;
  auto* prof = app.add_subcommand("profiles", "write through-thickness profiles at the 3x3 quarter stations");
  add_case_flags(prof, prof_flags);

  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "oracle self-checks and comparison with the published tables");
  verify->add_option("--out", verify_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      const CaseConfig c = case_config(run_flags);
      return report(run_sweep({c}, 1), run_flags.out);
    }

    if (*sweep) {
      SweepGrid grid;
      if (!sweep_flags.config.empty()) {
        const auto doc = load_json(sweep_flags.config);
        if (!doc.contains("sweep")) throw ConfigError("config: " + sweep_flags.config + " has no 'sweep' object");
        grid = sweep_from_json(doc.at("sweep"));
      }
      if (!sweep_flags.layers.empty()) grid.layers = sweep_flags.layers;
      if (!sweep_flags.slenderness.empty()) grid.slenderness = sweep_flags.slenderness;
      if (!sweep_flags.spans.empty()) grid.inplane_spans = sweep_flags.spans;
      if (!sweep_flags.degrees.empty()) {
        if (sweep_flags.degrees.size() % 3) throw ConfigError("--degrees takes whole p q r triples");
        grid.degrees.clear();
        for (std::size_t i = 0; i < sweep_flags.degrees.size(); i += 3)
          grid.degrees.push_back({sweep_flags.degrees[i], sweep_flags.degrees[i + 1], sweep_flags.degrees[i + 2]});
      }
      const auto configs = grid.expand();
      for (const auto& c : configs) c.validate();
      return report(run_sweep(configs, jobs), sweep_flags.out);
    }

    if (*prof) {
      const CaseConfig c = case_config(prof_flags);
      const fs::path dir = prof_flags.out.empty() ? fs::path("profiles") : fs::path(prof_flags.out);
      for (const auto& p : emit_profiles(c, quarter_stations(), dir)) std::cout << p.string() << '\n';
      return kOk;
    }

    if (*verify) {
      bool ok = true;
      for (const auto& check : oracle_self_checks()) {
        std::printf("%s oracle: %s (%s)\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                    check.detail.c_str());
        ok = ok && check.passed;
      }
      std::vector<CaseConfig> configs;
      for (const auto& g : golden_rows()) {
        CaseConfig c;
        c.layers = g.layers;
        c.slenderness = g.slenderness;
        c.degrees = g.degrees;
        configs.push_back(c);
      }
      const auto entries = run_sweep(configs, jobs);
      const auto rows = golden_rows();
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const auto& g = rows[i];
        if (!e.result) {
          std::printf("FAIL %s: %s\n", e.config.label().c_str(), e.error.c_str());
          ok = false;
          continue;
        }
        bool row_ok = true;
        std::string detail;
        for (int k = 0; k < 3; ++k) {
          const double raw = e.result->raw_error[k], rec = e.result->recovered_error[k];
          row_ok = row_ok && raw_matches(raw, g.raw[k]) && recovered_matches(rec, g.recovered[k]);
          detail += " " + format_sig(raw) + "/" + format_sig(g.raw[k]) + " pp " + format_sig(rec) + "/" +
                    format_sig(g.recovered[k]);
        }
        std::printf("%s %s:%s\n", row_ok ? "PASS" : "FAIL", e.config.label().c_str(), detail.c_str());
        ok = ok && row_ok;
      }
      if (!verify_out.empty()) write_reports(verify_out, entries);
      return ok ? kOk : kCaseFailure;
    }
  } catch (const ConfigError& e) {
    std::cerr << "igalam: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "igalam: " << e.what() << '\n';
    return kCaseFailure;
  }
  return kOk;
}
