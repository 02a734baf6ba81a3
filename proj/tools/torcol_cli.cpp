// torcol command line. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 verification failure or other runtime error,
// 2 invalid parameter, 3 budget exceeded, 4 I/O error. Errors are printed to
// stderr as one JSON object.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "torcol/torcol.h"

using nlohmann::json;

namespace {

int exit_code(torcol_status s) {
  switch (s) {
    case TORCOL_OK: return 0;
    case TORCOL_E_INVALID_ARGUMENT:
    case TORCOL_E_BAD_VALUE:
    case TORCOL_E_LENGTH_MISMATCH:
    case TORCOL_E_IMPROPER_COLORING:
    case TORCOL_E_NOT_IN_IMAGE: return 2;
    case TORCOL_E_BUDGET_EXCEEDED: return 3;
    case TORCOL_E_IO: return 4;
    default: return 1;
  }
}

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
  return code;
}

int report_status(torcol_status s) { return report_error(torcol_status_name(s), torcol_last_error(), exit_code(s)); }

// Accepts "10000000", "1e7" or "1.5e6" as long as the value is a whole number.
std::uint64_t parse_count(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  long double x = 0;
  try {
    x = std::stold(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || !(x >= 0) || x != std::floor(x) || x > 1.8e19L)
    throw CLI::ValidationError(what, "expected a nonnegative whole number, got \"" + text + "\"");
  return static_cast<std::uint64_t>(x);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs fn(config, &out); prints out to stdout on success.
template <class F>
int drive(F fn, const std::string& config) {
  char* out = nullptr;
  const torcol_status s = fn(config.c_str(), &out);
  if (s != TORCOL_OK) {
    if (out) torcol_string_free(out);
    return report_status(s);
  }
  std::cout << out << "\n";
  torcol_string_free(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proper 3-colourings of the discrete torus: enumeration, dynamics and cutset checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(torcol_version()));

  int side = 4, dim = 2;
  std::string rho = "0.22";
  std::string chain = "metropolis";
  int block_size = 1;
  std::string out_dir;
  std::string config_path;
  std::uint64_t seed = 0;
  std::uint32_t replicas = 1;

  // enumerate
  auto* en = app.add_subcommand("enumerate", "exhaustive small-instance report");
  std::string max_states = "2000000";
  en->add_option("--L", side, "side length (even, >= 4)");
  en->add_option("--d", dim, "dimension");
  en->add_option("--rho", rho, "balance parameter, e.g. 0.22 or 11/50");
  en->add_option("--chain", chain, "metropolis or rho_local_block");
  en->add_option("--block-size", block_size);
  en->add_option("--max-states", max_states);
  en->add_option("--out", out_dir, "directory for states.jsonl, kernel.csv, report.json");
  en->add_option("--config", config_path, "JSON config file (overrides flags)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run replicas of the chain and write trajectories");
  std::string steps = "0", stride = "1", start = "even";
  std::string sim_out = "torcol_simulate";
  sim->add_option("--L", side);
  sim->add_option("--d", dim);
  sim->add_option("--rho", rho);
  sim->add_option("--steps", steps);
  sim->add_option("--stride", stride);
  sim->add_option("--seed", seed);
  sim->add_option("--replicas", replicas);
  sim->add_option("--start", start, "even, odd or random");
  sim->add_option("--chain", chain);
  sim->add_option("--block-size", block_size);
  sim->add_option("--out", sim_out, "bundle directory");
  sim->add_option("--config", config_path);

  // cutsets
  auto* cut = app.add_subcommand("cutsets", "dump cutset reports for a colouring file");
  std::string coloring_path;
  cut->add_option("--coloring", coloring_path, "colouring JSON file")->required();

  // verify
  auto* ver = app.add_subcommand("verify", "run verification suites");
  std::string suites_text;
  std::string subset_cap = "4096";
  ver->add_option("--suite", suites_text, "comma-separated: cutset,shift,flow,reconstruct,bounds,kernel")->required();
  ver->add_option("--L", side);
  ver->add_option("--d", dim);
  ver->add_option("--rho", rho);
  ver->add_option("--subset-cap", subset_cap);
  ver->add_option("--seed", seed);
  ver->add_option("--out", out_dir);

  // escape
  auto* esc = app.add_subcommand("escape", "escape-time table across dimensions");
  std::string dims = "2..4", budget = "10000000";
  std::uint32_t esc_replicas = 16;
  esc->add_option("--L", side);
  esc->add_option("--dims", dims, "range lo..hi");
  esc->add_option("--rho", rho);
  esc->add_option("--budget", budget, "steps per replica");
  esc->add_option("--replicas", esc_replicas);
  esc->add_option("--seed", seed);
  esc->add_option("--chain", chain);
  esc->add_option("--block-size", block_size);
  esc->add_option("--out", out_dir);
  esc->add_option("--config", config_path);

  // replay
  auto* rep = app.add_subcommand("replay", "re-run a simulate bundle and check its payload hash");
  std::string bundle;
  rep->add_option("--bundle", bundle)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("invalid_argument", e.what(), 2);
  }

  try {
    json base = {{"schema_version", 1}, {"rho", rho}};
    if (!out_dir.empty()) base["out"] = out_dir;

    if (*en) {
      json c = base;
      c.update({{"L", side}, {"d", dim}, {"chain", chain}, {"block_size", block_size},
                {"max_states", parse_count(max_states, "--max-states")}});
      return drive(torcol_run_enumerate, config_path.empty() ? c.dump() : read_text(config_path));
    }
    if (*sim) {
      json c = base;
      c["out"] = sim_out;
      c.update({{"L", side}, {"d", dim}, {"chain", chain}, {"block_size", block_size},
                {"steps", parse_count(steps, "--steps")}, {"stride", parse_count(stride, "--stride")},
                {"seed", seed}, {"replicas", replicas}, {"start", start}});
      return drive(torcol_run_simulate, config_path.empty() ? c.dump() : read_text(config_path));
    }
    if (*esc) {
      const auto dots = dims.find("..");
      int lo = 0, hi = 0;
      try {
        if (dots == std::string::npos) {
          lo = hi = std::stoi(dims);
        } else {
          lo = std::stoi(dims.substr(0, dots));
          hi = std::stoi(dims.substr(dots + 2));
        }
      } catch (const std::exception&) {
        throw CLI::ValidationError("--dims", "expected lo..hi, got \"" + dims + "\"");
      }
      json c = base;
      c.update({{"L", side}, {"dims", {lo, hi}}, {"chain", chain}, {"block_size", block_size},
                {"budget", parse_count(budget, "--budget")}, {"replicas", esc_replicas}, {"seed", seed}});
      return drive(torcol_run_escape, config_path.empty() ? c.dump() : read_text(config_path));
    }
    if (*ver) {
      json suites = json::array();
      std::stringstream ss(suites_text);
      for (std::string s; std::getline(ss, s, ',');)
        if (!s.empty()) suites.push_back(s);
      json c = base;
      c.update({{"suites", suites}, {"L", side}, {"d", dim}, {"seed", seed},
                {"subset_cap", parse_count(subset_cap, "--subset-cap")}});
      char* out = nullptr;
      const torcol_status s = torcol_run_verify(c.dump().c_str(), &out);
      if (out) {
        const json report = json::parse(out);
        for (const auto& line : report["lines"]) std::cout << line.dump() << "\n";
        torcol_string_free(out);
      }
      return s == TORCOL_OK ? 0 : report_status(s);
    }
    if (*cut) {
      torcol_coloring* chi = nullptr;
      torcol_status s = torcol_coloring_read_file(coloring_path.c_str(), &chi);
      if (s != TORCOL_OK) return report_status(s);
      char* out = nullptr;
      s = torcol_cutsets_report(chi, &out);
      torcol_coloring_free(chi);
      if (s != TORCOL_OK) return report_status(s);
      std::cout << out << "\n";
      torcol_string_free(out);
      return 0;
    }
    if (*rep) {
      char* out = nullptr;
      const torcol_status s = torcol_replay_bundle(bundle.c_str(), &out);
      if (s != TORCOL_OK) return report_status(s);
      std::cout << json{{"payload_hash", out}, {"replayed", true}}.dump() << "\n";
      torcol_string_free(out);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    return report_error("invalid_argument", e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
