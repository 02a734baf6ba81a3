#include "torcol/cutset.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "json.hpp"
#include "torcol/error.hpp"

namespace torcol {

Cutset make_cutset(const VertexSet& w, Parity parity) {
  const auto& g = *w.graph();
  Cutset cs;
  cs.parity = parity;
  cs.W = w;
  cs.C = w.complement();
  cs.gamma = edge_boundary(cs.C);
  const std::size_t wsize = cs.W.count();
  const std::size_t csize = cs.C.count();
  cs.interior_is_w = wsize <= csize;
  cs.interior = cs.interior_is_w ? cs.W : cs.C;
  cs.w_e = cs.W.restrict_to(Parity::Even).count();
  cs.w_o = wsize - cs.w_e;
  std::size_t threshold = 1;
  for (int k = 0; k + 1 < g.dim(); ++k) threshold *= static_cast<std::size_t>(g.side());
  cs.topologically_nontrivial = cs.gamma.size() >= threshold;
  return cs;
}

PropertyReport verify_properties(const Cutset& cs, const VertexSet& zero_set) {
  const auto& graph = cs.W.graph();
  const auto& g = *graph;
  const Parity near = cs.parity;
  const Parity far = opposite(near);
  PropertyReport r;
  auto note = [&](bool ok, const std::string& what) {
    if (!ok && r.witness.empty()) r.witness = what;
    return ok;
  };

  {
    const bool partition = cs.W == cs.C.complement();
    const bool w_connected = components(cs.W).size() == 1;
    const bool c_connected = components(cs.C).size() == 1;
    const bool gamma_matches = cs.gamma == edge_boundary(cs.C);
    r.minimal = note(partition, "W and C do not partition V") && note(w_connected, "W is not connected") &&
                note(c_connected, "C is not connected") && note(gamma_matches, "gamma differs from nabla(C)");
  }

  const VertexSet int_w = interior_boundary(cs.W);
  const VertexSet ext_w = exterior_boundary(cs.W);
  {
    bool ok = true;
    int_w.for_each([&](Vertex v) {
      if (ok && g.parity(v) != far) ok = note(false, "interior boundary vertex " + std::to_string(v) + " has the wrong parity");
    });
    ext_w.for_each([&](Vertex v) {
      if (ok && g.parity(v) != near) ok = note(false, "exterior boundary vertex " + std::to_string(v) + " has the wrong parity");
    });
    r.boundary_parity = ok;
  }
  {
    const VertexSet hit = (int_w | ext_w) & zero_set;
    r.zero_free = note(hit.empty(), "boundary vertex " + std::to_string(hit.first()) + " is coloured 0");
  }

  const VertexSet w_near = cs.W.restrict_to(near);
  const VertexSet w_far = cs.W.restrict_to(far);
  {
    const VertexSet ext_near = exterior_boundary(w_near);
    const VertexSet diff = (ext_near - w_far) | (w_far - ext_near);
    r.far_is_ext_of_near = note(diff.empty(), "vertex " + std::to_string(diff.first()) +
                                                  " breaks W^far = ext(W^near)");
  }
  {
    VertexSet star(graph);
    for (Vertex y = 0; y < g.size(); ++y) {
      if (g.parity(y) != near) continue;
      bool all = true;
      for (int i = 0; i < g.degree() && all; ++i) all = w_far.contains(g.neighbor(y, i));
      if (all) star.insert(y);
    }
    const VertexSet diff = (star - w_near) | (w_near - star);
    r.near_is_star = note(diff.empty(), "vertex " + std::to_string(diff.first()) +
                                            " breaks W^near = {y : all neighbours in W^far}");
  }
  {
    const auto w_far_count = static_cast<std::int64_t>(w_far.count());
    const auto w_near_count = static_cast<std::int64_t>(w_near.count());
    const std::int64_t expected = 2 * g.dim() * (w_far_count - w_near_count);
    r.size_identity = note(static_cast<std::int64_t>(cs.gamma.size()) == expected,
                           "|gamma| = " + std::to_string(cs.gamma.size()) + " but 2d(w_far - w_near) = " +
                               std::to_string(expected));
  }

  const double d = g.dim();
  r.w_power = std::pow(static_cast<double>(cs.W.count()), 1.0 - 1.0 / d);
  r.d_power = std::pow(d, 1.9);
  r.large_d_bound = static_cast<double>(cs.gamma.size()) >= std::max(r.w_power, r.d_power);
  return r;
}

Extraction extract_all(const Coloring& chi) {
  const auto& graph = chi.graph();
  const VertexSet zeros = chi.zero_set();
  const VertexSet everything = VertexSet::full(graph);
  Extraction ex;
  for (Parity p : {Parity::Even, Parity::Odd}) {
    const VertexSet plus = closure(zeros.restrict_to(p));
    for (const auto& r : components(plus)) {
      if (r == everything) {
        ex.wraps_torus = true;
        continue;
      }
      for (const auto& c : components(r.complement())) {
        Cutset cs = make_cutset(c.complement(), p);
        cs.report = verify_properties(cs, zeros);
        ex.cutsets.push_back(std::move(cs));
      }
    }
  }
  return ex;
}

GammaSelection select_gamma(const Coloring& chi) { return select_gamma(chi, extract_all(chi)); }

GammaSelection select_gamma(const Coloring& chi, const Extraction& ex) {
  const VertexSet zeros = chi.zero_set();
  auto attempt = [&](Parity p) {
    std::vector<const Cutset*> candidates;
    for (const auto& cs : ex.cutsets)
      if (cs.parity == p && cs.properties_verified()) candidates.push_back(&cs);
    std::stable_sort(candidates.begin(), candidates.end(), [](const Cutset* a, const Cutset* b) {
      const auto sa = a->interior.count();
      const auto sb = b->interior.count();
      return sa != sb ? sa > sb : a->interior.first() < b->interior.first();
    });
    GammaSelection sel;
    sel.parity = p;
    sel.wraps_torus = ex.wraps_torus;
    VertexSet covered(chi.graph());
    for (const Cutset* cs : candidates) {
      if (cs->interior.intersects(covered)) continue;
      covered |= cs->interior;
      sel.gamma.push_back(*cs);
    }
    sel.coverage_ok = zeros.restrict_to(p).subset_of(covered);
    return sel;
  };
  // A class with no zeros is covered vacuously; that only counts when I is empty.
  const bool has_even = !zeros.restrict_to(Parity::Even).empty();
  const bool has_odd = !zeros.restrict_to(Parity::Odd).empty();
  GammaSelection even = attempt(Parity::Even);
  if (!has_even && !has_odd) return even;
  if (has_even && even.coverage_ok) return even;
  GammaSelection odd = attempt(Parity::Odd);
  if (has_odd && odd.coverage_ok) return odd;
  return has_even ? even : odd;
}

int dyadic_index(std::size_t gamma_size) {
  if (gamma_size == 0) fail(ErrorCode::InvalidArgument, "cutset of size 0 has no dyadic bucket");
  int i = 0;
  while ((std::size_t{1} << i) <= gamma_size) ++i;
  return i;  // 2^(i-1) <= size < 2^i
}

DyadicSelection dyadic_buckets(const std::vector<std::size_t>& gamma_sizes, int dim) {
  if (gamma_sizes.empty()) fail(ErrorCode::InvalidArgument, "dyadic bucketing needs a nonempty cutset family");
  if (dim < 2) fail(ErrorCode::InvalidArgument, "dyadic bucketing needs d >= 2 (exponent d/(d-1))");
  const long double exponent = static_cast<long double>(dim) / static_cast<long double>(dim - 1);
  DyadicSelection sel;
  for (std::size_t k = 0; k < gamma_sizes.size(); ++k) {
    const int i = dyadic_index(gamma_sizes[k]);
    const long double mass = std::pow(static_cast<long double>(gamma_sizes[k]), exponent);
    sel.buckets[i].push_back(k);
    sel.bucket_mass[i] += mass;
    sel.total_mass += mass;
  }
  const long double c = 6.0L / (std::numbers::pi_v<long double> * std::numbers::pi_v<long double>);
  for (const auto& [i, mass] : sel.bucket_mass) {
    if (mass >= c * sel.total_mass / (static_cast<long double>(i) * i)) {
      sel.selected = i;
      sel.ell = sel.buckets[i].size();
      return sel;
    }
  }
  // Unreachable: sum_i 6/(pi^2 i^2) = 1, so some bucket always qualifies.
  fail(ErrorCode::InvalidArgument, "no dyadic scale satisfied the selection criterion");
}

DyadicSelection dyadic_buckets(const std::vector<Cutset>& gamma, int dim) {
  std::vector<std::size_t> sizes;
  sizes.reserve(gamma.size());
  for (const auto& cs : gamma) sizes.push_back(cs.size());
  return dyadic_buckets(sizes, dim);
}

bool profile_membership(const Coloring& chi, const Profile& profile) {
  const GammaSelection sel = select_gamma(chi);
  if (!sel.coverage_ok || sel.parity != Parity::Even) return false;
  const std::size_t n_entries = profile.size();
  const std::size_t n_cuts = sel.gamma.size();
  std::vector<std::vector<std::size_t>> adj(n_entries);
  for (std::size_t a = 0; a < n_entries; ++a)
    for (std::size_t b = 0; b < n_cuts; ++b) {
      const auto& cs = sel.gamma[b];
      const auto& e = profile[a];
      if (cs.size() == e.size && e.vertex < chi.size() && chi.graph()->parity(e.vertex) == Parity::Even &&
          cs.W.contains(e.vertex))
        adj[a].push_back(b);
    }
  // Kuhn's augmenting paths.
  std::vector<std::ptrdiff_t> owner(n_cuts, -1);
  std::vector<bool> visited;
  std::function<bool(std::size_t)> augment = [&](std::size_t a) {
    for (std::size_t b : adj[a]) {
      if (visited[b]) continue;
      visited[b] = true;
      if (owner[b] < 0 || augment(static_cast<std::size_t>(owner[b]))) {
        owner[b] = static_cast<std::ptrdiff_t>(a);
        return true;
      }
    }
    return false;
  };
  for (std::size_t a = 0; a < n_entries; ++a) {
    visited.assign(n_cuts, false);
    if (!augment(a)) return false;
  }
  return true;
}

std::string cutset_report_json(const Cutset& cs) {
  nlohmann::json j;
  j["parity"] = cs.parity == Parity::Even ? "even" : "odd";
  j["gamma_size"] = cs.size();
  j["w_e"] = cs.w_e;
  j["w_o"] = cs.w_o;
  j["w_size"] = cs.W.count();
  j["c_size"] = cs.C.count();
  j["interior_size"] = cs.interior.count();
  j["interior_is_w"] = cs.interior_is_w;
  j["topologically_nontrivial"] = cs.topologically_nontrivial;
  j["properties_verified"] = cs.properties_verified();
  const auto& r = cs.report;
  j["checks"] = {{"minimal", r.minimal},
                 {"boundary_parity", r.boundary_parity},
                 {"zero_free", r.zero_free},
                 {"far_is_ext_of_near", r.far_is_ext_of_near},
                 {"near_is_star", r.near_is_star},
                 {"size_identity", r.size_identity}};
  j["witness"] = r.witness;
  j["informational"] = {{"w_power", r.w_power}, {"d_power", r.d_power}, {"large_d_bound", r.large_d_bound}};
  return j.dump();
}

}  // namespace torcol
