#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "torcol/error.hpp"
#include "torcol/harness.hpp"

using namespace torcol;
using namespace torcol::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Reducible;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("torcol_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("worker count honours the environment") {
  setenv(kWorkersEnv, "3", 1);
  CHECK(worker_count() == 3);
  setenv(kWorkersEnv, "0", 1);
  CHECK(worker_count() >= 1);
  unsetenv(kWorkersEnv);
  CHECK(worker_count() >= 1);
}

TEST_CASE("config parsing") {
  auto e = enumerate_config_from_json(R"({"schema_version":1,"L":4,"d":2,"rho":"11/50"})");
  CHECK(e.side == 4);
  CHECK(e.dim == 2);
  CHECK(e.rho == Rational(11, 50));
  CHECK(enumerate_config_from_json(R"({"schema_version":1,"rho":0.22})").rho == Rational(11, 50));
  CHECK(enumerate_config_from_json(to_json(e)).rho == e.rho);

  CHECK(code_of([] { enumerate_config_from_json(R"({"L":4})"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { enumerate_config_from_json(R"({"schema_version":2})"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { enumerate_config_from_json(R"({"schema_version":1,"colour":3})"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { enumerate_config_from_json(R"({"schema_version":1,"L":3})"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { enumerate_config_from_json("[1,2]"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { simulate_config_from_json(R"({"schema_version":1,"start":"sideways"})"); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { simulate_config_from_json(R"({"schema_version":1,"steps":-1})"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { escape_config_from_json(R"({"schema_version":1,"dims":[3,2]})"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { verify_config_from_json(R"({"schema_version":1,"suites":["nope"]})"); }) ==
        ErrorCode::InvalidArgument);

  auto s = simulate_config_from_json(R"({"schema_version":1,"steps":1e3,"start":"random","replicas":4})");
  CHECK(s.steps == 1000);
  CHECK(s.start == StartKind::Random);
  auto back = simulate_config_from_json(to_json(s));
  CHECK(back.steps == s.steps);
  CHECK(back.replicas == 4);
  CHECK(back.start == StartKind::Random);

  auto esc = escape_config_from_json(R"({"schema_version":1,"dims":[1,3]})");
  CHECK(esc.dim_lo == 1);
  CHECK(esc.dim_hi == 3);
  CHECK(esc.replicas == 16);
}

TEST_CASE("start states") {
  auto g = TorusGraph::make(4, 2);
  CHECK(start_state(g, StartKind::Even, 0, 0).imbalance() == 8);
  CHECK(start_state(g, StartKind::Odd, 0, 0).imbalance() == -8);
  auto a = start_state(g, StartKind::Random, 5, 1);
  CHECK(a == start_state(g, StartKind::Random, 5, 1));
  CHECK(std::abs(a.imbalance()) == 8);
}

TEST_CASE("enumerate report on T_{4,1}") {
  const auto dir = scratch("enumerate");
  EnumerateConfig c;
  c.side = 4;
  c.dim = 1;
  c.out_dir = dir.string();
  const json r = json::parse(run_enumerate(c));
  CHECK(r["states"] == 18);
  CHECK(r["transfer_matrix_count"] == "18");
  CHECK(r["counts_agree"] == true);
  CHECK(r["mixing"]["tau"] == 19);
  CHECK(r["conductance"]["bound"]["exact"] == "1/2");
  CHECK(r["conductance"]["tau_at_least_bound"] == true);
  CHECK(r["kernel"]["symmetric"] == true);

  CHECK(fs::exists(dir / "report.json"));
  std::ifstream states(dir / "states.jsonl");
  int lines = 0;
  for (std::string l; std::getline(states, l);) {
    const json s = json::parse(l);
    CHECK(s["colors"].size() == 4);
    ++lines;
  }
  CHECK(lines == 18);
  const std::string kernel = slurp(dir / "kernel.csv");
  CHECK(kernel.rfind("row,col,prob,prob_float\n", 0) == 0);
  CHECK(std::count(kernel.begin(), kernel.end(), '\n') == 67);
  fs::remove_all(dir);
}

TEST_CASE("enumerate on a reducible cycle") {
  EnumerateConfig c;
  c.side = 6;
  c.dim = 1;
  const json r = json::parse(run_enumerate(c));
  CHECK(r["states"] == 66);
  CHECK(r["mixing"]["tau"].is_null());
  CHECK(r["mixing"]["error"] == "reducible");
  CHECK(r["conductance"]["tau_at_least_bound"] == true);
}

TEST_CASE("simulate is deterministic and replayable") {
  const auto dir = scratch("simulate");
  SimulateConfig c;
  c.side = 4;
  c.dim = 2;
  c.steps = 20000;
  c.stride = 10;
  c.seed = 7;
  c.replicas = 8;
  c.start = StartKind::Random;
  c.out_dir = dir.string();
  setenv(kWorkersEnv, "4", 1);
  const auto a = run_simulate(c);
  unsetenv(kWorkersEnv);
  c.out_dir.clear();
  const auto b = run_simulate(c);
  CHECK(a.payload_hash == b.payload_hash);
  CHECK(a.csv == b.csv);
  CHECK(a.trajectories.size() == 8);
  for (const auto& t : a.trajectories) CHECK(t.imbalances.size() == 2001);

  for (int r = 0; r < 8; ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "replica_%03d.csv", r);
    CHECK(slurp(dir / name) == a.csv[static_cast<std::size_t>(r)]);
  }
  const json agg = json::parse(slurp(dir / "aggregate.json"));
  CHECK(agg["payload_hash"] == a.payload_hash);
  CHECK(agg["replicas"].size() == 8);
  CHECK(replay_bundle(dir.string()) == a.payload_hash);

  // A different seed in the stored config no longer matches the hash.
  json cfg = json::parse(slurp(dir / "config.json"));
  cfg["seed"] = 8;
  std::ofstream(dir / "config.json") << cfg.dump();
  CHECK(code_of([&] { replay_bundle(dir.string()); }) == ErrorCode::VerificationFailed);
  CHECK(code_of([&] { replay_bundle((dir / "missing").string()); }) == ErrorCode::Io);
  fs::remove_all(dir);

  c.seed = 8;
  CHECK(run_simulate(c).payload_hash != a.payload_hash);
  c.steps = 0;
  for (const auto& t : run_simulate(c).trajectories) CHECK(t.imbalances.size() == 1);
}

TEST_CASE("escape table") {
  const auto dir = scratch("escape");
  EscapeConfig c;
  c.side = 4;
  c.dim_lo = 1;
  c.dim_hi = 3;
  c.budget = 20000;
  c.replicas = 4;
  c.seed = 1;
  c.out_dir = dir.string();
  const json r = json::parse(run_escape(c));
  REQUIRE(r["rows"].size() == 3);
  for (const auto& row : r["rows"]) {
    CHECK(row["escaped"].get<int>() + row["censored"].get<int>() == 4);
    CHECK(row["balanced_fraction"].get<double>() >= 0.0);
    CHECK(row["balanced_fraction"].get<double>() <= 1.0);
    CHECK(row["median_escape_step"].is_null() == (row["escaped"].get<int>() <= 2));
  }
  CHECK(r["rows"][0]["d"] == 1);
  CHECK(r["rows"][0]["escaped"] == 4);
  const std::string csv = slurp(dir / "escape.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(json::parse(slurp(dir / "escape.json")) == r);
  CHECK(run_escape(c) == r.dump());
  fs::remove_all(dir);
}

TEST_CASE("verify suites") {
  VerifyConfig c;
  c.side = 4;
  c.dim = 1;
  c.suites = {"bounds", "kernel"};
  const auto r = run_verify(c);
  CHECK(r.ok);
  CHECK(r.first_witness.empty());
  bool saw_entropy = false;
  for (const auto& l : r.lines) {
    const json j = json::parse(l);
    if (j["check"] == "entropy_condition") {
      saw_entropy = true;
      CHECK(j["satisfied"] == true);
    } else if (!j.contains("informational")) {
      CHECK(j["pass"] == true);
    }
  }
  CHECK(saw_entropy);

  VerifyConfig s;
  s.side = 4;
  s.dim = 2;
  s.suites = {"shift", "reconstruct", "flow"};
  const auto sr = run_verify(s);
  CHECK(sr.ok);

  VerifyConfig cut = s;
  cut.suites = {"cutset"};
  const auto cr = run_verify(cut);
  CHECK_FALSE(cr.ok);
  CHECK(cr.first_witness.find("cutset/hard_properties") == 0);
}

TEST_CASE("cutsets report") {
  auto g = TorusGraph::make(4, 2);
  std::vector<Color> c(g->size());
  for (Vertex v = 0; v < g->size(); ++v) c[v] = g->parity(v) == Parity::Even ? 1 : 2;
  c[0] = 0;
  const json r = json::parse(cutsets_report(Coloring::validate(g, c)));
  REQUIRE(r["cutsets"].size() == 1);
  CHECK(r["selection"]["coverage_ok"] == true);
  CHECK(r["selection"]["gamma_sizes"] == json::array({12}));
  CHECK(r["dyadic"]["selected"] == 4);
  CHECK(r["dyadic"]["ell"] == 1);
}
