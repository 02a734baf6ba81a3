#include "torcol/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <deque>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "torcol/bounds.hpp"
#include "torcol/cutset.hpp"
#include "torcol/error.hpp"
#include "torcol/exactgibbs.hpp"
#include "torcol/peierls.hpp"

namespace torcol::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---- config parsing -------------------------------------------------------

json parse_object(std::string_view text, const std::set<std::string>& allowed) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "config must be a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kSchemaVersion)
    fail(ErrorCode::InvalidArgument, "config needs \"schema_version\": " + std::to_string(kSchemaVersion));
  for (const auto& [key, value] : j.items())
    if (key != "schema_version" && !allowed.count(key)) fail(ErrorCode::InvalidArgument, "unknown config key \"" + key + "\"");
  return j;
}

template <class T>
T get_int(const json& j, const char* key, T fallback, long double lo, long double hi) {
  if (!j.contains(key)) return fallback;
  const json& v = j[key];
  long double x = 0;
  if (v.is_number_integer())
    x = v.is_number_unsigned() ? static_cast<long double>(v.get<std::uint64_t>()) : static_cast<long double>(v.get<std::int64_t>());
  else if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
    x = v.get<double>();
  else
    fail(ErrorCode::InvalidArgument, std::string("\"") + key + "\" must be an integer");
  if (x < lo || x > hi) fail(ErrorCode::InvalidArgument, std::string("\"") + key + "\" is out of range");
  if (v.is_number_unsigned()) return static_cast<T>(v.get<std::uint64_t>());
  return static_cast<T>(x);
}

Rational get_rho(const json& j, const Rational& fallback) {
  if (!j.contains("rho")) return fallback;
  const json& v = j["rho"];
  Rational rho;
  if (v.is_string()) {
    rho = parse_rational(v.get<std::string>());
  } else if (v.is_number()) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    rho = parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  } else {
    fail(ErrorCode::InvalidArgument, "\"rho\" must be a string or a number");
  }
  if (rho <= 0 || rho >= 1) fail(ErrorCode::InvalidArgument, "rho must lie in (0, 1)");
  return rho;
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) fail(ErrorCode::InvalidArgument, std::string("\"") + key + "\" must be a string");
  return j[key].get<std::string>();
}

ChainKind get_kind(const json& j) {
  const std::string k = get_string(j, "chain", "metropolis");
  if (k == "metropolis") return ChainKind::Metropolis;
  if (k == "rho_local_block") return ChainKind::RhoLocalBlock;
  fail(ErrorCode::InvalidArgument, "unknown chain \"" + k + "\" (metropolis or rho_local_block)");
}

void check_side(int side) {
  if (side < 4 || side % 2 != 0) fail(ErrorCode::InvalidArgument, "L must be even >= 4");
}

constexpr long double kU64Max = 18446744073709551615.0L;

// ---- small utilities ------------------------------------------------------

std::string instance_name(int side, int dim) { return "T_{" + std::to_string(side) + "," + std::to_string(dim) + "}"; }

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorCode::Io, "write to " + path.string() + " failed");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory " + dir + ": " + ec.message());
}

// Runs job(i) for i in [0, count) on the worker pool. The first exception is
// rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t count, F&& job) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

json rational_json(const Rational& q) { return {{"exact", to_string(q)}, {"float", to_double(q)}}; }

// Median over all replicas, censored ones counted as beyond the budget.
// Undefined when a middle order statistic is censored.
std::optional<double> median(std::vector<std::uint64_t> xs, std::size_t replicas) {
  if (replicas == 0) return std::nullopt;
  std::sort(xs.begin(), xs.end());
  const std::size_t hi = replicas / 2, lo = replicas % 2 ? hi : hi - 1;
  if (hi >= xs.size()) return std::nullopt;
  return (static_cast<double>(xs[lo]) + static_cast<double>(xs[hi])) / 2.0;
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    unsigned n = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::Io, "SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string_view start_kind_name(StartKind k) {
  switch (k) {
    case StartKind::Even: return "even";
    case StartKind::Odd: return "odd";
    case StartKind::Random: return "random";
  }
  return "?";
}

EnumerateConfig enumerate_config_from_json(std::string_view text) {
  const json j = parse_object(text, {"L", "d", "rho", "chain", "block_size", "max_states", "max_kernel_states",
                                     "mixing_cap", "out"});
  EnumerateConfig c;
  c.side = get_int<int>(j, "L", c.side, 0, 1 << 20);
  c.dim = get_int<int>(j, "d", c.dim, 1, 64);
  check_side(c.side);
  c.rho = get_rho(j, c.rho);
  c.kind = get_kind(j);
  c.block_size = get_int<int>(j, "block_size", c.block_size, 1, BlockChain::kMaxBlockSize);
  c.max_states = get_int<std::uint64_t>(j, "max_states", c.max_states, 1, kU64Max);
  c.max_kernel_states = get_int<std::uint64_t>(j, "max_kernel_states", c.max_kernel_states, 1, kU64Max);
  c.mixing_cap = get_int<std::uint64_t>(j, "mixing_cap", c.mixing_cap, 1, kU64Max);
  c.out_dir = get_string(j, "out", "");
  return c;
}

SimulateConfig simulate_config_from_json(std::string_view text) {
  const json j = parse_object(text, {"L", "d", "rho", "chain", "block_size", "steps", "stride", "seed", "replicas",
                                     "start", "out"});
  SimulateConfig c;
  c.side = get_int<int>(j, "L", c.side, 0, 1 << 20);
  c.dim = get_int<int>(j, "d", c.dim, 1, 64);
  check_side(c.side);
  c.rho = get_rho(j, c.rho);
  c.kind = get_kind(j);
  c.block_size = get_int<int>(j, "block_size", c.block_size, 1, BlockChain::kMaxBlockSize);
  c.steps = get_int<std::uint64_t>(j, "steps", c.steps, 0, kU64Max);
  c.stride = get_int<std::uint64_t>(j, "stride", c.stride, 1, kU64Max);
  c.seed = get_int<std::uint64_t>(j, "seed", c.seed, 0, kU64Max);
  c.replicas = get_int<std::uint32_t>(j, "replicas", c.replicas, 1, 1 << 20);
  const std::string start = get_string(j, "start", "even");
  if (start == "even")
    c.start = StartKind::Even;
  else if (start == "odd")
    c.start = StartKind::Odd;
  else if (start == "random")
    c.start = StartKind::Random;
  else
    fail(ErrorCode::InvalidArgument, "unknown start \"" + start + "\" (even, odd or random)");
  c.out_dir = get_string(j, "out", "");
  return c;
}

EscapeConfig escape_config_from_json(std::string_view text) {
  const json j = parse_object(text, {"L", "dims", "rho", "chain", "block_size", "budget", "replicas", "seed", "out"});
  EscapeConfig c;
  c.side = get_int<int>(j, "L", c.side, 0, 1 << 20);
  check_side(c.side);
  if (j.contains("dims")) {
    const json& d = j["dims"];
    if (!d.is_array() || d.size() != 2 || !d[0].is_number_integer() || !d[1].is_number_integer())
      fail(ErrorCode::InvalidArgument, "\"dims\" must be [lo, hi]");
    c.dim_lo = d[0].get<int>();
    c.dim_hi = d[1].get<int>();
  }
  if (c.dim_lo < 1 || c.dim_hi < c.dim_lo || c.dim_hi > 64) fail(ErrorCode::InvalidArgument, "dims must satisfy 1 <= lo <= hi");
  c.rho = get_rho(j, c.rho);
  c.kind = get_kind(j);
  c.block_size = get_int<int>(j, "block_size", c.block_size, 1, BlockChain::kMaxBlockSize);
  c.budget = get_int<std::uint64_t>(j, "budget", c.budget, 0, kU64Max);
  c.replicas = get_int<std::uint32_t>(j, "replicas", c.replicas, 1, 1 << 20);
  c.seed = get_int<std::uint64_t>(j, "seed", c.seed, 0, kU64Max);
  c.out_dir = get_string(j, "out", "");
  return c;
}

VerifyConfig verify_config_from_json(std::string_view text) {
  static const std::set<std::string> known = {"cutset", "shift", "flow", "reconstruct", "bounds", "kernel"};
  const json j = parse_object(text, {"suites", "L", "d", "rho", "subset_cap", "seed", "out"});
  VerifyConfig c;
  if (!j.contains("suites") || !j["suites"].is_array() || j["suites"].empty())
    fail(ErrorCode::InvalidArgument, "\"suites\" must be a nonempty array");
  for (const auto& s : j["suites"]) {
    if (!s.is_string() || !known.count(s.get<std::string>()))
      fail(ErrorCode::InvalidArgument, "unknown suite " + s.dump() + " (cutset, shift, flow, reconstruct, bounds, kernel)");
    c.suites.push_back(s.get<std::string>());
  }
  c.side = get_int<int>(j, "L", c.side, 0, 1 << 20);
  c.dim = get_int<int>(j, "d", c.dim, 1, 64);
  check_side(c.side);
  c.rho = get_rho(j, c.rho);
  c.subset_cap = get_int<std::uint64_t>(j, "subset_cap", c.subset_cap, 1, 1 << 30);
  c.seed = get_int<std::uint64_t>(j, "seed", c.seed, 0, kU64Max);
  c.out_dir = get_string(j, "out", "");
  return c;
}

std::string to_json(const EnumerateConfig& c) {
  json j = {{"schema_version", kSchemaVersion}, {"L", c.side}, {"d", c.dim}, {"rho", to_string(c.rho)},
            {"chain", chain_kind_name(c.kind)}, {"block_size", c.block_size}, {"max_states", c.max_states},
            {"max_kernel_states", c.max_kernel_states}, {"mixing_cap", c.mixing_cap}};
  if (!c.out_dir.empty()) j["out"] = c.out_dir;
  return j.dump();
}

std::string to_json(const SimulateConfig& c) {
  json j = {{"schema_version", kSchemaVersion}, {"L", c.side}, {"d", c.dim}, {"rho", to_string(c.rho)},
            {"chain", chain_kind_name(c.kind)}, {"block_size", c.block_size}, {"steps", c.steps},
            {"stride", c.stride}, {"seed", c.seed}, {"replicas", c.replicas}, {"start", start_kind_name(c.start)}};
  if (!c.out_dir.empty()) j["out"] = c.out_dir;
  return j.dump();
}

std::string to_json(const EscapeConfig& c) {
  json j = {{"schema_version", kSchemaVersion}, {"L", c.side}, {"dims", {c.dim_lo, c.dim_hi}}, {"rho", to_string(c.rho)},
            {"chain", chain_kind_name(c.kind)}, {"block_size", c.block_size}, {"budget", c.budget},
            {"replicas", c.replicas}, {"seed", c.seed}};
  if (!c.out_dir.empty()) j["out"] = c.out_dir;
  return j.dump();
}

std::string to_json(const VerifyConfig& c) {
  json j = {{"schema_version", kSchemaVersion}, {"suites", c.suites}, {"L", c.side}, {"d", c.dim},
            {"rho", to_string(c.rho)}, {"subset_cap", c.subset_cap}, {"seed", c.seed}};
  if (!c.out_dir.empty()) j["out"] = c.out_dir;
  return j.dump();
}

Coloring start_state(const TorusPtr& graph, StartKind kind, std::uint64_t seed, std::uint32_t replica) {
  if (kind == StartKind::Even) return ground_state(graph, Parity::Even);
  if (kind == StartKind::Odd) return ground_state(graph, Parity::Odd);
  Rng rng(~replica_seed(seed, replica));
  const Parity zero_on = rng.below(2) == 0 ? Parity::Even : Parity::Odd;
  std::vector<Color> colors(graph->size());
  for (Vertex v = 0; v < graph->size(); ++v)
    colors[v] = graph->parity(v) == zero_on ? 0 : static_cast<Color>(1 + rng.below(2));
  return Coloring::validate(graph, colors);
}

// ---- enumerate ------------------------------------------------------------

std::string run_enumerate(const EnumerateConfig& c) {
  const auto graph = TorusGraph::make(c.side, c.dim);
  const StateIndex idx = StateIndex::enumerate(graph, c.max_states);
  json report;
  report["schema_version"] = kSchemaVersion;
  report["config"] = json::parse(to_json(c));
  report["instance"] = instance_name(c.side, c.dim);
  report["states"] = idx.size();
  try {
    const BigInt tm = transfer_matrix_count(c.side, c.dim);
    report["transfer_matrix_count"] = tm.str();
    report["counts_agree"] = tm == BigInt(idx.size());
  } catch (const Error& e) {
    report["transfer_matrix_count"] = nullptr;
    report["transfer_matrix_skipped"] = e.what();
  }
  const ClassMeasures cm = stationary_measure(idx, c.rho);
  report["class_measures"] = {
      {"balanced", {{"count", cm.balanced_count}, {"probability", rational_json(cm.balanced)}}},
      {"even", {{"count", cm.even_count}, {"probability", rational_json(cm.even_phase)}}},
      {"odd", {{"count", cm.odd_count}, {"probability", rational_json(cm.odd_phase)}}},
      {"balanced_limit", PhaseClassifier(*graph, c.rho).balanced_limit()}};

  std::optional<ExactKernel> kernel;
  if (idx.size() <= c.max_kernel_states) {
    ChainSpec spec;
    spec.kind = c.kind;
    spec.block_size = c.block_size;
    spec.rho = c.rho;
    kernel = exact_kernel(idx, spec, c.max_kernel_states);
    report["kernel"] = {{"label", kernel->label()},
                        {"states", kernel->size()},
                        {"nonzeros", kernel->nonzeros()},
                        {"symmetric", kernel->symmetric()},
                        {"doubly_stochastic", kernel->doubly_stochastic()}};
    std::optional<std::uint64_t> tau;
    bool reducible = false;
    try {
      const auto reps = idx.orbit_representatives();
      const MixingResult mr = exact_mixing_time(*kernel, reps, c.mixing_cap);
      tau = mr.tau;
      report["mixing"] = {{"tau", mr.tau},
                          {"starts", "orbit_representatives"},
                          {"start_count", reps.size()},
                          {"final_tv", mr.tv_curve.empty() ? 0.0 : mr.tv_curve.back()}};
    } catch (const Error& e) {
      reducible = e.code() == ErrorCode::Reducible;
      report["mixing"] = {{"tau", nullptr}, {"error", error_code_name(e.code())}, {"message", e.what()}};
    }
    try {
      const ConductanceReport cr = exact_conductance_bound(idx, *kernel, c.rho);
      json cj = {{"pi_a", rational_json(cr.pi_a)},
                 {"pi_m", rational_json(cr.pi_m)},
                 {"transitions_checked", cr.transitions_checked}};
      cj["bound"] = cr.bound ? rational_json(*cr.bound) : json("infinity");
      cj["symmetrized"] = cr.symmetrized ? rational_json(*cr.symmetrized) : json("infinity");
      if (tau)
        cj["tau_at_least_bound"] = !cr.bound || Rational(*tau) >= *cr.bound;
      else if (reducible)
        cj["tau_at_least_bound"] = true;  // tau is infinite
      report["conductance"] = cj;
    } catch (const Error& e) {
      report["conductance"] = {{"error", error_code_name(e.code())}, {"message", e.what()}};
    }
  } else {
    report["kernel"] = {{"skipped", "state count " + std::to_string(idx.size()) + " exceeds max_kernel_states " +
                                         std::to_string(c.max_kernel_states)}};
  }

  if (!c.out_dir.empty()) {
    ensure_dir(c.out_dir);
    std::string states;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto colors = idx.colors(i);
      json line = {{"index", i}, {"L", c.side}, {"d", c.dim},
                   {"colors", std::vector<int>(colors.begin(), colors.end())}, {"imbalance", idx.imbalance(i)}};
      states += line.dump();
      states += '\n';
    }
    write_file(fs::path(c.out_dir) / "states.jsonl", states);
    if (kernel) {
      std::string csv = "row,col,prob,prob_float\n";
      for (std::size_t i = 0; i < kernel->size(); ++i)
        for (const auto& e : kernel->row(i)) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.17g", to_double(e.p));
          csv += std::to_string(i) + "," + std::to_string(e.col) + "," + to_string(e.p) + "," + buf + "\n";
        }
      write_file(fs::path(c.out_dir) / "kernel.csv", csv);
    }
    write_file(fs::path(c.out_dir) / "report.json", report.dump(2) + "\n");
  }
  return report.dump();
}

// ---- simulate -------------------------------------------------------------

namespace {

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "step,imbalance,phase\n";
  for (std::size_t k = 0; k < t.imbalances.size(); ++k) {
    out += std::to_string(k * t.sample_stride);
    out += ',';
    out += std::to_string(t.imbalances[k]);
    out += ',';
    out += phase_name(t.phase_tags[k]);
    out += '\n';
  }
  return out;
}

std::string replica_file(std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "replica_%03zu.csv", r);
  return buf;
}

SimulateResult simulate_in_memory(const SimulateConfig& c) {
  const auto graph = TorusGraph::make(c.side, c.dim);
  if (c.kind == ChainKind::RhoLocalBlock) BlockChain check(graph, c.block_size, c.rho);
  SimulateResult res;
  res.trajectories.resize(c.replicas);
  parallel_for(c.replicas, [&](std::size_t r) {
    ChainSpec spec;
    spec.kind = c.kind;
    spec.block_size = c.block_size;
    spec.rho = c.rho;
    spec.seed = replica_seed(c.seed, r);
    spec.steps = c.steps;
    spec.stride = c.stride;
    res.trajectories[r] = run(start_state(graph, c.start, c.seed, static_cast<std::uint32_t>(r)), spec);
  });
  std::string payload;
  for (const auto& t : res.trajectories) {
    res.csv.push_back(trajectory_csv(t));
    payload += res.csv.back();
  }
  res.payload_hash = sha256_hex(payload);

  json agg;
  agg["schema_version"] = kSchemaVersion;
  agg["config"] = json::parse(to_json(c));
  agg["config"].erase("out");
  agg["payload_hash"] = res.payload_hash;
  agg["generator"] = kGeneratorName;
  agg["code_version"] = kCodeVersion;
  json reps = json::array();
  std::vector<std::uint64_t> escapes;
  std::map<std::int64_t, std::uint64_t> hist;
  for (std::size_t r = 0; r < res.trajectories.size(); ++r) {
    const auto& t = res.trajectories[r];
    if (t.escape_step) escapes.push_back(*t.escape_step);
    for (auto x : t.imbalances) ++hist[x];
    reps.push_back({{"replica", r},
                    {"seed", replica_seed(c.seed, r)},
                    {"start_phase", phase_name(t.start_phase)},
                    {"escape_step", t.escape_step ? json(*t.escape_step) : json(nullptr)},
                    {"censored", !t.escape_step.has_value()},
                    {"balanced_fraction", static_cast<double>(t.balanced_steps) / static_cast<double>(t.steps + 1)}});
  }
  agg["replicas"] = reps;
  agg["escape_fraction"] = static_cast<double>(escapes.size()) / static_cast<double>(c.replicas);
  agg["median_escape_step"] = optional_number(median(escapes, c.replicas));
  json h = json::object();
  for (const auto& [x, n] : hist) h[std::to_string(x)] = n;
  agg["imbalance_histogram"] = h;
  res.aggregate_json = agg.dump();
  return res;
}

}  // namespace

SimulateResult run_simulate(const SimulateConfig& c) {
  SimulateResult res = simulate_in_memory(c);
  if (!c.out_dir.empty()) {
    ensure_dir(c.out_dir);
    const fs::path dir(c.out_dir);
    for (std::size_t r = 0; r < res.csv.size(); ++r) write_file(dir / replica_file(r), res.csv[r]);
    SimulateConfig stored = c;
    stored.out_dir.clear();
    write_file(dir / "config.json", json::parse(to_json(stored)).dump(2) + "\n");
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    json meta = {{"L", c.side},
                 {"d", c.dim},
                 {"rho", to_string(c.rho)},
                 {"seed", c.seed},
                 {"kind", chain_kind_name(c.kind)},
                 {"block_size", c.block_size},
                 {"stride", c.stride},
                 {"steps", c.steps},
                 {"replicas", c.replicas},
                 {"start", start_kind_name(c.start)},
                 {"generator", kGeneratorName},
                 {"code_version", kCodeVersion},
                 {"created_unix_ms", std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    write_file(dir / "metadata.json", meta.dump(2) + "\n");
    write_file(dir / "aggregate.json", json::parse(res.aggregate_json).dump(2) + "\n");
  }
  return res;
}

std::string replay_bundle(const std::string& bundle_dir) {
  const fs::path dir(bundle_dir);
  SimulateConfig c = simulate_config_from_json(read_file(dir / "config.json"));
  c.out_dir.clear();
  json agg;
  try {
    agg = json::parse(read_file(dir / "aggregate.json"));
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("aggregate.json is not valid JSON: ") + e.what());
  }
  const std::string hash = simulate_in_memory(c).payload_hash;
  if (!agg.contains("payload_hash") || agg["payload_hash"] != hash)
    fail(ErrorCode::VerificationFailed, "replayed payload hash " + hash + " differs from the bundle");
  return hash;
}

// ---- escape ---------------------------------------------------------------

std::string run_escape(const EscapeConfig& c) {
  struct Job {
    int dim;
    std::uint32_t replica;
  };
  std::vector<Job> jobs;
  std::map<int, TorusPtr> graphs;
  for (int d = c.dim_lo; d <= c.dim_hi; ++d) {
    graphs[d] = TorusGraph::make(c.side, d);
    if (c.kind == ChainKind::RhoLocalBlock) BlockChain check(graphs[d], c.block_size, c.rho);
    for (std::uint32_t r = 0; r < c.replicas; ++r) jobs.push_back({d, r});
  }
  std::vector<Trajectory> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t k) {
    const Job& job = jobs[k];
    ChainSpec spec;
    spec.kind = c.kind;
    spec.block_size = c.block_size;
    spec.rho = c.rho;
    spec.seed = replica_seed(c.seed, (static_cast<std::uint64_t>(job.dim) << 32) + job.replica);
    spec.steps = c.budget;
    spec.stride = std::max<std::uint64_t>(c.budget, 1);
    out[k] = run(ground_state(graphs[job.dim], Parity::Even), spec);
  });

  json rows = json::array();
  std::string csv = "d,n,replicas,budget,escaped,censored,escape_fraction,median_escape_step,balanced_fraction\n";
  for (int d = c.dim_lo; d <= c.dim_hi; ++d) {
    std::vector<std::uint64_t> escapes;
    std::uint64_t balanced = 0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      if (jobs[k].dim != d) continue;
      if (out[k].escape_step) escapes.push_back(*out[k].escape_step);
      balanced += out[k].balanced_steps;
    }
    const std::size_t censored = c.replicas - escapes.size();
    const double frac = static_cast<double>(balanced) / (static_cast<double>(c.budget + 1) * c.replicas);
    const auto med = median(escapes, c.replicas);
    const double esc_frac = static_cast<double>(escapes.size()) / c.replicas;
    rows.push_back({{"d", d},
                    {"n", graphs[d]->size()},
                    {"replicas", c.replicas},
                    {"budget", c.budget},
                    {"escaped", escapes.size()},
                    {"censored", censored},
                    {"escape_fraction", esc_frac},
                    {"median_escape_step", optional_number(med)},
                    {"balanced_fraction", frac}});
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%zu,%u,%llu,%zu,%zu,%.6g,%s,%.6g\n", d, graphs[d]->size(), c.replicas,
                  static_cast<unsigned long long>(c.budget), escapes.size(), censored, esc_frac,
                  med ? std::to_string(static_cast<long long>(*med)).c_str() : "", frac);
    csv += buf;
  }
  json result = {{"schema_version", kSchemaVersion},
                 {"config", json::parse(to_json(c))},
                 {"generator", kGeneratorName},
                 {"start", "even ground state"},
                 {"rows", rows}};
  result["config"].erase("out");
  if (!c.out_dir.empty()) {
    ensure_dir(c.out_dir);
    write_file(fs::path(c.out_dir) / "escape.csv", csv);
    write_file(fs::path(c.out_dir) / "escape.json", result.dump(2) + "\n");
  }
  return result.dump();
}

// ---- verify ---------------------------------------------------------------

namespace {

struct CheckTally {
  std::string suite;
  std::string check;
  bool informational = false;
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  std::string witness;

  void record(bool ok, const std::function<std::string()>& what) {
    ++checked;
    if (ok) return;
    if (failures++ == 0) witness = what();
  }
};

json tally_json(const CheckTally& t, const std::string& instance) {
  json j = {{"suite", t.suite},  {"check", t.check},       {"instance", instance},
            {"pass", t.failures == 0}, {"checked", t.checked}, {"failures", t.failures}};
  if (t.informational) j["informational"] = true;
  if (!t.witness.empty()) j["witness"] = t.witness;
  return j;
}

std::string dir_name(Direction s) { return (s.positive() ? "+" : "-") + std::to_string(s.axis() + 1); }

}  // namespace

VerifyResult run_verify(const VerifyConfig& c) {
  const std::set<std::string> suites(c.suites.begin(), c.suites.end());
  const std::string inst = instance_name(c.side, c.dim);
  const auto graph = TorusGraph::make(c.side, c.dim);
  std::deque<CheckTally> tallies;
  std::vector<json> extra;
  auto tally = [&](const std::string& suite, const std::string& check, bool informational = false) -> CheckTally& {
    tallies.push_back({suite, check, informational, 0, 0, ""});
    return tallies.back();
  };

  const bool corpus = suites.count("cutset") || suites.count("shift") || suites.count("reconstruct") || suites.count("flow");
  std::optional<StateIndex> idx;
  if (corpus || suites.count("kernel")) idx = StateIndex::enumerate(graph);

  if (corpus) {
    CheckTally* hard = suites.count("cutset") ? &tally("cutset", "hard_properties") : nullptr;
    CheckTally* large_d = suites.count("cutset") ? &tally("cutset", "large_d_bound", true) : nullptr;
    CheckTally* proper = suites.count("shift") ? &tally("shift", "image_proper") : nullptr;
    CheckTally* distinct = suites.count("shift") ? &tally("shift", "zero_set_identifies_subset") : nullptr;
    CheckTally* roundtrip = suites.count("reconstruct") ? &tally("reconstruct", "round_trip") : nullptr;
    CheckTally* wrong_dir = suites.count("reconstruct") ? &tally("reconstruct", "reverse_direction_differs", true) : nullptr;
    CheckTally* flow_sum = suites.count("flow") ? &tally("flow", "sum_is_one") : nullptr;
    CheckTally* lemma = suites.count("flow") ? &tally("flow", "weight_below_b_bound", true) : nullptr;
    const bool contexts = proper || roundtrip || flow_sum;
    Rng rng(c.seed);
    std::uint64_t sampled_contexts = 0;
    std::uint64_t covered = 0;
    for (std::size_t i = 0; i < idx->size(); ++i) {
      const Coloring chi = idx->coloring(i);
      const Extraction ex = extract_all(chi);
      if (hard)
        for (std::size_t k = 0; k < ex.cutsets.size(); ++k) {
          const auto& cs = ex.cutsets[k];
          hard->record(cs.properties_verified(), [&] {
            return inst + " colouring " + std::to_string(i) + " cutset " + std::to_string(k) + ": " + cs.report.witness;
          });
          large_d->record(cs.report.large_d_bound, [&] {
            return inst + " colouring " + std::to_string(i) + " cutset " + std::to_string(k) + ": |gamma| = " +
                   std::to_string(cs.size());
          });
        }
      if (!contexts) continue;
      const GammaSelection sel = select_gamma(chi, ex);
      if (!sel.coverage_ok) continue;
      ++covered;
      for (std::size_t k = 0; k < sel.gamma.size(); ++k) {
        const Cutset& cs = sel.gamma[k];
        if (!cs.properties_verified()) continue;
        const Approximation approx = identity_approximation(cs);
        for (int di = 0; di < graph->degree(); ++di) {
          const Direction s = Direction::from_index(di);
          const ShiftContext ctx = make_shift_context(chi, cs, approx, s);
          const std::vector<Vertex> ws = ctx.w_s.members();
          const bool exhaustive = ws.size() < 63 && (std::uint64_t{1} << ws.size()) <= c.subset_cap;
          const std::uint64_t count = exhaustive ? (std::uint64_t{1} << ws.size()) : c.subset_cap;
          if (!exhaustive) ++sampled_contexts;
          const std::string where = inst + " colouring " + std::to_string(i) + " gamma " + std::to_string(k) +
                                    " s=" + dir_name(s);
          Rational total = 0;
          bool flow_ok = true;
          for (std::uint64_t m = 0; m < count; ++m) {
            VertexSet subset(graph);
            for (std::size_t b = 0; b < ws.size(); ++b) {
              const bool on = exhaustive ? ((m >> b) & 1u) : rng.below(2) == 1;
              if (on) subset.insert(ws[b]);
            }
            std::optional<Coloring> image;
            try {
              image = shift_coloring(ctx, subset);
            } catch (const Error& e) {
              if (proper) proper->record(false, [&] { return where + ": " + e.what(); });
              if (roundtrip) roundtrip->record(false, [&] { return where + ": no image (" + std::string(e.what()) + ")"; });
              flow_ok = false;
              continue;
            }
            if (proper) {
              proper->record(true, {});
              distinct->record((image->zero_set() & ctx.w_s) == subset, [&] { return where + ": zero set differs from S"; });
            }
            if (roundtrip) {
              bool ok = false;
              std::string msg;
              try {
                ok = reconstruct(*image, cs.W, s) == chi;
                if (!ok) msg = "reconstruction differs from the original";
              } catch (const Error& e) {
                msg = e.what();
              }
              roundtrip->record(ok, [&] { return where + ": " + msg; });
              bool differs = true;
              try {
                differs = !(reconstruct(*image, cs.W, s.reversed()) == chi);
              } catch (const Error&) {
              }
              wrong_dir->record(differs, [&] { return where + ": reverse direction also reconstructs"; });
            }
            if (flow_sum) {
              const Rational nu = flow_weight(ctx, *image);
              total += nu;
              const HatTriple hat = hat_triple(cs, approx, *image, s);
              const auto best = minimal_good_triple(approx, hat.u);
              if (best) {
                const std::size_t kp = (best->triple.k - hat.triple.k).count();
                const std::size_t lp = (best->triple.l - hat.triple.l).count();
                const std::size_t w_near = cs.parity == Parity::Even ? cs.w_e : cs.w_o;
                const std::size_t w_far = cs.parity == Parity::Even ? cs.w_o : cs.w_e;
                const Surd bound = b_weight(w_near, w_far, best->triple.k.count(), best->triple.l.count(), kp, lp);
                lemma->record(less_equal(nu, bound), [&] {
                  return where + ": nu = " + to_string(nu) + " > B = " + std::to_string(bound.to_double());
                });
              }
            }
          }
          if (flow_sum && exhaustive && flow_ok)
            flow_sum->record(total == 1, [&] { return where + ": sum of weights is " + to_string(total); });
        }
      }
    }
    if (contexts) {
      extra.push_back({{"suite", "shift"}, {"check", "sampled_contexts"}, {"instance", inst},
                       {"informational", true}, {"count", sampled_contexts}});
      extra.push_back({{"suite", "shift"}, {"check", "gamma_coverage"}, {"instance", inst}, {"informational", true},
                       {"covered", covered}, {"colourings", idx->size()}});
    }
  }

  if (suites.count("bounds")) {
    CheckTally& chern = tally("bounds", "chernoff_grid");
    for (std::uint64_t m = 1; m <= 64; ++m)
      for (int k = 1; k <= 32; ++k) {
        const auto r = chernoff_bound_check(m, Rational(k, 64));
        chern.record(r.holds, [&] { return "M=" + std::to_string(m) + " beta=" + std::to_string(k) + "/64"; });
      }
    CheckTally& comp = tally("bounds", "comp_small_sets");
    const auto& g = *graph;
    const std::vector<Vertex> evens = VertexSet::parity_class(graph, Parity::Even).members();
    const std::vector<Vertex> odds = VertexSet::parity_class(graph, Parity::Odd).members();
    std::vector<Vertex> all(g.size());
    for (Vertex v = 0; v < g.size(); ++v) all[v] = v;
    // Every A ∪ B with |A| + |B| <= 3 and no A-B edge.
    std::vector<Vertex> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      VertexSet a(graph), b(graph);
      for (Vertex v : pick) (g.parity(v) == Parity::Even ? a : b).insert(v);
      bool edge = false;
      a.for_each([&](Vertex x) {
        for (int i = 0; i < g.degree(); ++i) edge = edge || b.contains(g.neighbor(x, i));
      });
      if (!edge) {
        const auto r = comp_count(a, b);
        comp.record(r.holds, [&] {
          std::string w = inst + " A∪B = {";
          for (Vertex v : pick) w += std::to_string(v) + " ";
          return w + "} comp = " + std::to_string(r.comp);
        });
      }
      if (pick.size() == 3) return;
      for (std::size_t v = from; v < all.size(); ++v) {
        pick.push_back(all[v]);
        rec(v + 1);
        pick.pop_back();
      }
    };
    rec(0);
    CheckTally& free_choice = tally("bounds", "free_choice_T41");
    const StateIndex small = StateIndex::enumerate(TorusGraph::make(4, 1));
    for (const auto& r : free_choice_check(small))
      free_choice.record(r.holds, [&] {
        return "T_{4,1} pair with " + std::to_string(r.colorings) + " colourings > 2^" + std::to_string(r.exponent);
      });
    const EntropyCondition ec = entropy_condition(c.rho);
    extra.push_back({{"suite", "bounds"}, {"check", "entropy_condition"}, {"instance", to_string(c.rho)},
                     {"informational", true}, {"value", static_cast<double>(ec.value)}, {"satisfied", ec.satisfied}});
  }

  if (suites.count("kernel")) {
    ChainSpec spec;
    spec.rho = c.rho;
    const ExactKernel k = exact_kernel(*idx, spec, idx->size());
    CheckTally& sym = tally("kernel", "symmetric_doubly_stochastic");
    sym.record(k.symmetric() && k.doubly_stochastic(), [&] { return inst + ": kernel is not symmetric and doubly stochastic"; });
    CheckTally& ineq = tally("kernel", "mixing_time_at_least_bound");
    std::string detail;
    bool ok = false;
    try {
      const ConductanceReport cr = exact_conductance_bound(*idx, k, c.rho);
      try {
        const auto reps = idx->orbit_representatives();
        const MixingResult mr = exact_mixing_time(k, reps);
        ok = !cr.bound || Rational(mr.tau) >= *cr.bound;
        detail = "tau = " + std::to_string(mr.tau) + ", bound = " + (cr.bound ? to_string(*cr.bound) : "infinity");
      } catch (const Error& e) {
        ok = e.code() == ErrorCode::Reducible;
        detail = std::string("tau infinite or unknown: ") + e.what();
      }
    } catch (const Error& e) {
      detail = e.what();
    }
    ineq.record(ok, [&] { return inst + ": " + detail; });
    extra.push_back({{"suite", "kernel"}, {"check", "mixing_detail"}, {"instance", inst}, {"informational", true},
                     {"detail", detail}});
  }

  VerifyResult res;
  for (const auto& t : tallies) {
    res.lines.push_back(tally_json(t, inst).dump());
    if (!t.informational && t.failures > 0) {
      if (res.ok) res.first_witness = t.suite + "/" + t.check + ": " + t.witness;
      res.ok = false;
    }
  }
  for (const auto& e : extra) res.lines.push_back(e.dump());
  if (!c.out_dir.empty()) {
    ensure_dir(c.out_dir);
    std::string body;
    for (const auto& l : res.lines) body += l + "\n";
    write_file(fs::path(c.out_dir) / "verify.jsonl", body);
  }
  return res;
}

// ---- cutsets --------------------------------------------------------------

std::string cutsets_report(const Coloring& chi) {
  const auto& g = *chi.graph();
  const Extraction ex = extract_all(chi);
  json j;
  j["L"] = g.side();
  j["d"] = g.dim();
  j["wraps_torus"] = ex.wraps_torus;
  json cuts = json::array();
  for (std::size_t k = 0; k < ex.cutsets.size(); ++k) {
    json c = json::parse(cutset_report_json(ex.cutsets[k]));
    c["index"] = k;
    cuts.push_back(c);
  }
  j["cutsets"] = cuts;
  const GammaSelection sel = select_gamma(chi, ex);
  std::vector<std::size_t> sizes;
  for (const auto& cs : sel.gamma) sizes.push_back(cs.size());
  j["selection"] = {{"parity", sel.parity == Parity::Even ? "even" : "odd"},
                    {"coverage_ok", sel.coverage_ok},
                    {"gamma_sizes", sizes}};
  if (g.dim() >= 2 && !sizes.empty()) {
    const DyadicSelection dy = dyadic_buckets(sizes, g.dim());
    json buckets = json::object();
    for (const auto& [i, members] : dy.buckets)
      buckets[std::to_string(i)] = {{"count", members.size()}, {"mass", static_cast<double>(dy.bucket_mass.at(i))}};
    j["dyadic"] = {{"selected", dy.selected}, {"ell", dy.ell}, {"buckets", buckets}};
  } else {
    j["dyadic"] = nullptr;
  }
  return j.dump();
}

}  // namespace torcol::harness
