#include "torcol/torcol.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "json.hpp"
#include "torcol/coloring.hpp"
#include "torcol/error.hpp"
#include "torcol/exactgibbs.hpp"
#include "torcol/glauber.hpp"
#include "torcol/harness.hpp"

struct torcol_torus {
  torcol::TorusPtr graph;
};

struct torcol_coloring {
  torcol::Coloring chi;
};

namespace {

thread_local std::string last_error;

torcol_status set_error(torcol_status status, const std::string& msg) {
  last_error = msg;
  return status;
}

template <class F>
torcol_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const torcol::Error& e) {
    return set_error(static_cast<torcol_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(TORCOL_E_BUDGET_EXCEEDED, "out of memory");
  } catch (const std::exception& e) {
    return set_error(TORCOL_E_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

torcol_status null_arg(const char* what) { return set_error(TORCOL_E_INVALID_ARGUMENT, std::string(what) + " is null"); }

}  // namespace

extern "C" {

const char* torcol_version(void) { return torcol::harness::kCodeVersion; }

const char* torcol_last_error(void) { return last_error.c_str(); }

const char* torcol_status_name(torcol_status status) {
  if (status == TORCOL_OK) return "ok";
  if (status == TORCOL_E_INTERNAL) return "internal";
  if (status >= 1 && status <= 11) return torcol::error_code_name(static_cast<torcol::ErrorCode>(status));
  return "unknown";
}

void torcol_string_free(char* s) { std::free(s); }

torcol_status torcol_torus_new(int side, int dim, torcol_torus** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new torcol_torus{torcol::TorusGraph::make(side, dim)};
    return TORCOL_OK;
  });
}

void torcol_torus_free(torcol_torus* t) { delete t; }
size_t torcol_torus_size(const torcol_torus* t) { return t ? t->graph->size() : 0; }
int torcol_torus_side(const torcol_torus* t) { return t ? t->graph->side() : 0; }
int torcol_torus_dim(const torcol_torus* t) { return t ? t->graph->dim() : 0; }

torcol_status torcol_coloring_new(const torcol_torus* t, const uint8_t* colors, size_t len, torcol_coloring** out) {
  if (!t) return null_arg("torus");
  if (!out) return null_arg("out");
  if (!colors && len) return null_arg("colors");
  return guarded([&] {
    *out = new torcol_coloring{torcol::Coloring::validate(t->graph, std::span<const torcol::Color>(colors, len))};
    return TORCOL_OK;
  });
}

torcol_status torcol_coloring_ground_state(const torcol_torus* t, int zero_on_odd, torcol_coloring** out) {
  if (!t) return null_arg("torus");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new torcol_coloring{
        torcol::ground_state(t->graph, zero_on_odd ? torcol::Parity::Odd : torcol::Parity::Even)};
    return TORCOL_OK;
  });
}

torcol_status torcol_coloring_from_json(const char* text, torcol_coloring** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new torcol_coloring{torcol::coloring_from_json(text)};
    return TORCOL_OK;
  });
}

torcol_status torcol_coloring_read_file(const char* path, torcol_coloring** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new torcol_coloring{torcol::read_coloring_file(path)};
    return TORCOL_OK;
  });
}

torcol_status torcol_coloring_write_file(const torcol_coloring* c, const char* path) {
  if (!c) return null_arg("coloring");
  if (!path) return null_arg("path");
  return guarded([&] {
    torcol::write_coloring_file(c->chi, path);
    return TORCOL_OK;
  });
}

torcol_status torcol_coloring_to_json(const torcol_coloring* c, char** out) {
  if (!c) return null_arg("coloring");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = dup_string(torcol::coloring_to_json(c->chi));
    return TORCOL_OK;
  });
}

void torcol_coloring_free(torcol_coloring* c) { delete c; }
size_t torcol_coloring_size(const torcol_coloring* c) { return c ? c->chi.size() : 0; }

torcol_status torcol_coloring_colors(const torcol_coloring* c, uint8_t* out, size_t len) {
  if (!c) return null_arg("coloring");
  if (!out) return null_arg("out");
  if (len != c->chi.size())
    return set_error(TORCOL_E_LENGTH_MISMATCH,
                     "buffer holds " + std::to_string(len) + " entries, colouring has " + std::to_string(c->chi.size()));
  for (size_t v = 0; v < len; ++v) out[v] = c->chi[static_cast<torcol::Vertex>(v)];
  return TORCOL_OK;
}

int64_t torcol_coloring_imbalance(const torcol_coloring* c) { return c ? c->chi.imbalance() : 0; }

torcol_status torcol_coloring_classify(const torcol_coloring* c, const char* rho, torcol_phase* out) {
  if (!c) return null_arg("coloring");
  if (!rho) return null_arg("rho");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = static_cast<torcol_phase>(torcol::classify(c->chi, torcol::parse_rational(rho)).tag);
    return TORCOL_OK;
  });
}

torcol_status torcol_metropolis_run(const torcol_coloring* c, uint64_t seed, uint64_t steps, torcol_coloring** out) {
  if (!c) return null_arg("coloring");
  if (!out) return null_arg("out");
  return guarded([&] {
    torcol::ChainState state(c->chi);
    torcol::Rng rng(seed);
    for (uint64_t t = 0; t < steps; ++t) torcol::metropolis_step(state, rng);
    *out = new torcol_coloring{state.snapshot()};
    return TORCOL_OK;
  });
}

torcol_status torcol_count_colorings(int side, int dim, int method, uint64_t max_states, char** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    if (method == 0) {
      const auto idx = torcol::StateIndex::enumerate(torcol::TorusGraph::make(side, dim), max_states);
      *out = dup_string(std::to_string(idx.size()));
    } else if (method == 1) {
      torcol::TorusGraph::make(side, dim);
      *out = dup_string(torcol::transfer_matrix_count(side, dim).str());
    } else {
      torcol::fail(torcol::ErrorCode::InvalidArgument, "method must be 0 (enumerate) or 1 (transfer matrix)");
    }
    return TORCOL_OK;
  });
}

torcol_status torcol_run_enumerate(const char* config_json, char** report_json) {
  if (!config_json) return null_arg("config");
  if (!report_json) return null_arg("out");
  return guarded([&] {
    *report_json = dup_string(torcol::harness::run_enumerate(torcol::harness::enumerate_config_from_json(config_json)));
    return TORCOL_OK;
  });
}

torcol_status torcol_run_simulate(const char* config_json, char** report_json) {
  if (!config_json) return null_arg("config");
  if (!report_json) return null_arg("out");
  return guarded([&] {
    const auto res = torcol::harness::run_simulate(torcol::harness::simulate_config_from_json(config_json));
    *report_json = dup_string(res.aggregate_json);
    return TORCOL_OK;
  });
}

torcol_status torcol_run_escape(const char* config_json, char** report_json) {
  if (!config_json) return null_arg("config");
  if (!report_json) return null_arg("out");
  return guarded([&] {
    *report_json = dup_string(torcol::harness::run_escape(torcol::harness::escape_config_from_json(config_json)));
    return TORCOL_OK;
  });
}

torcol_status torcol_run_verify(const char* config_json, char** report_json) {
  if (!config_json) return null_arg("config");
  if (!report_json) return null_arg("out");
  return guarded([&] {
    const auto res = torcol::harness::run_verify(torcol::harness::verify_config_from_json(config_json));
    nlohmann::json j = {{"ok", res.ok}, {"first_witness", res.first_witness}, {"lines", nlohmann::json::array()}};
    for (const auto& l : res.lines) j["lines"].push_back(nlohmann::json::parse(l));
    *report_json = dup_string(j.dump());
    if (!res.ok) return set_error(TORCOL_E_VERIFICATION_FAILED, res.first_witness);
    return TORCOL_OK;
  });
}

torcol_status torcol_replay_bundle(const char* bundle_dir, char** hash_out) {
  if (!bundle_dir) return null_arg("bundle_dir");
  if (!hash_out) return null_arg("out");
  return guarded([&] {
    *hash_out = dup_string(torcol::harness::replay_bundle(bundle_dir));
    return TORCOL_OK;
  });
}

torcol_status torcol_cutsets_report(const torcol_coloring* c, char** report_json) {
  if (!c) return null_arg("coloring");
  if (!report_json) return null_arg("out");
  return guarded([&] {
    *report_json = dup_string(torcol::harness::cutsets_report(c->chi));
    return TORCOL_OK;
  });
}

}  // extern "C"
