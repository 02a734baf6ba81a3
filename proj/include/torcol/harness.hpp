#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "torcol/coloring.hpp"
#include "torcol/glauber.hpp"
#include "torcol/rational.hpp"

namespace torcol::harness {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr const char* kWorkersEnv = "TORCOL_WORKERS";

// Worker count from TORCOL_WORKERS, else the hardware concurrency, at least 1.
unsigned worker_count();

// SHA-256 of the bytes, lowercase hex.
std::string sha256_hex(std::string_view bytes);

// All configs are JSON objects with "schema_version": 1. Unknown keys and
// out-of-range values are InvalidArgument. rho may be a string ("11/50",
// "0.22") or a JSON number (read through its shortest decimal form).

struct EnumerateConfig {
  int side = 4;
  int dim = 1;
  Rational rho{11, 50};
  ChainKind kind = ChainKind::Metropolis;
  int block_size = 1;
  std::uint64_t max_states = 2'000'000;
  std::uint64_t max_kernel_states = 50'000;
  std::uint64_t mixing_cap = 100'000;
  std::string out_dir;  // empty: report only
};

enum class StartKind { Even, Odd, Random };

struct SimulateConfig {
  int side = 4;
  int dim = 2;
  Rational rho{11, 50};
  ChainKind kind = ChainKind::Metropolis;
  int block_size = 1;
  std::uint64_t steps = 0;
  std::uint64_t stride = 1;
  std::uint64_t seed = 0;
  std::uint32_t replicas = 1;
  StartKind start = StartKind::Even;
  std::string out_dir;
};

struct EscapeConfig {
  int side = 4;
  int dim_lo = 2;
  int dim_hi = 4;
  Rational rho{11, 50};
  ChainKind kind = ChainKind::Metropolis;
  int block_size = 1;
  std::uint64_t budget = 10'000'000;
  std::uint32_t replicas = 16;
  std::uint64_t seed = 0;
  std::string out_dir;
};

struct VerifyConfig {
  std::vector<std::string> suites;  // subset of cutset, shift, flow, reconstruct, bounds, kernel
  int side = 4;
  int dim = 2;
  Rational rho{11, 50};
  std::uint64_t subset_cap = 4096;  // exhaustive over S up to this many subsets, sampled beyond
  std::uint64_t seed = 0;
  std::string out_dir;
};

EnumerateConfig enumerate_config_from_json(std::string_view text);
SimulateConfig simulate_config_from_json(std::string_view text);
EscapeConfig escape_config_from_json(std::string_view text);
VerifyConfig verify_config_from_json(std::string_view text);
std::string to_json(const EnumerateConfig& c);
std::string to_json(const SimulateConfig& c);
std::string to_json(const EscapeConfig& c);
std::string to_json(const VerifyConfig& c);

std::string_view start_kind_name(StartKind k);

// Start state for replica r: the Even or Odd ground state, or for Random a
// uniformly chosen class coloured 0 and iid colours {1, 2} on the other, drawn
// from an Rng seeded with ~replica_seed(seed, r).
Coloring start_state(const TorusPtr& graph, StartKind kind, std::uint64_t seed, std::uint32_t replica);

// Exhaustive small-instance report: state count (two ways), class measures,
// kernel summary, exact mixing time and the bottleneck bound. With out_dir set
// also writes states.jsonl, kernel.csv and report.json. Returns the report.
std::string run_enumerate(const EnumerateConfig& c);

struct SimulateResult {
  std::vector<Trajectory> trajectories;
  std::vector<std::string> csv;  // one "step,imbalance,phase" file per replica
  std::string payload_hash;      // SHA-256 over the CSV payloads in replica order
  std::string aggregate_json;
};

// Replicas run on the worker pool; files (replica_NNN.csv, config.json,
// metadata.json, aggregate.json) are written afterwards by one writer.
SimulateResult run_simulate(const SimulateConfig& c);

// Re-runs the config stored in bundle_dir/config.json and compares the payload
// hash with bundle_dir/aggregate.json. Returns the recomputed hash;
// VerificationFailed on mismatch.
std::string replay_bundle(const std::string& bundle_dir);

// One row per dimension; non-escaping replicas are counted as censored at the
// budget. Writes escape.csv and escape.json when out_dir is set. Returns JSON.
std::string run_escape(const EscapeConfig& c);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> lines;  // JSON lines
  std::string first_witness;
};

// InvalidArgument for an unknown suite name.
VerifyResult run_verify(const VerifyConfig& c);

// Extraction, properties, selection and dyadic scale for one colouring.
std::string cutsets_report(const Coloring& chi);

}  // namespace torcol::harness
