#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "torcol/coloring.hpp"
#include "torcol/torus.hpp"

namespace torcol {

// Outcome of the property checks on one cutset. For an Odd cutset the roles
// of E and O are exchanged throughout.
struct PropertyReport {
  bool minimal = false;              // W, C connected, partition V, gamma = nabla(C)
  bool boundary_parity = false;      // int W inside the far class, ext W inside the near class
  bool zero_free = false;            // int W and ext W avoid I
  bool far_is_ext_of_near = false;   // W^O = ext W^E
  bool near_is_star = false;         // W^E = {y in E : all neighbours in W^O}
  bool size_identity = false;        // |gamma| = 2d (w_far - w_near)
  std::string witness;               // first hard failure, empty when all pass

  // Informational only: |gamma| >= max(|W|^(1-1/d), d^1.9).
  double w_power = 0.0;
  double d_power = 0.0;
  bool large_d_bound = false;

  bool hard_ok() const {
    return minimal && boundary_parity && zero_free && far_is_ext_of_near && near_is_star && size_identity;
  }
};

struct Cutset {
  Parity parity = Parity::Even;  // parity of the zero-set component R it came from
  std::vector<Edge> gamma;       // nabla(C), canonical and sorted
  VertexSet W;                   // complement of C
  VertexSet C;
  VertexSet interior;            // smaller of C and W; W on a tie
  bool interior_is_w = true;
  std::size_t w_e = 0;           // |W ∩ E|
  std::size_t w_o = 0;           // |W ∩ O|
  bool topologically_nontrivial = false;  // |gamma| >= L^(d-1)
  PropertyReport report;

  std::size_t size() const { return gamma.size(); }
  bool properties_verified() const { return report.hard_ok(); }
};

struct Extraction {
  std::vector<Cutset> cutsets;
  // Some component R of (I^E)^+ or (I^O)^+ is all of V.
  bool wraps_torus = false;
};

// One cutset for every component R of (I^E)^+ and (I^O)^+ and every component
// C of V \ R, Even components first, each group ordered by (R, C) smallest
// member. Every cutset carries its property report.
Extraction extract_all(const Coloring& chi);

// zero_set is I of the colouring the cutset came from.
PropertyReport verify_properties(const Cutset& cs, const VertexSet& zero_set);

// Builds the cutset fields (gamma, interior, sizes) from a given W.
Cutset make_cutset(const VertexSet& w, Parity parity);

struct GammaSelection {
  std::vector<Cutset> gamma;
  Parity parity = Parity::Even;
  bool coverage_ok = false;
  bool wraps_torus = false;
};

// Greedy choice of hard-verified cutsets with pairwise disjoint interiors
// covering I^E (falling back to the Odd analogue). A class with no zeros never
// counts as covered unless I is empty. Failure is reported in coverage_ok.
GammaSelection select_gamma(const Coloring& chi);
// Same selection from an already computed extraction.
GammaSelection select_gamma(const Coloring& chi, const Extraction& ex);

struct DyadicSelection {
  // Bucket i holds the positions of cutsets with 2^(i-1) <= |gamma| < 2^i.
  std::map<int, std::vector<std::size_t>> buckets;
  std::map<int, long double> bucket_mass;  // sum of |gamma|^(d/(d-1)) per bucket
  long double total_mass = 0.0L;
  int selected = 0;
  std::size_t ell = 0;
};

int dyadic_index(std::size_t gamma_size);

// Picks the smallest i with bucket_mass[i] >= (6 / pi^2) * total_mass / i^2.
// InvalidArgument on an empty list or d < 2.
DyadicSelection dyadic_buckets(const std::vector<std::size_t>& gamma_sizes, int dim);
DyadicSelection dyadic_buckets(const std::vector<Cutset>& gamma, int dim);

struct ProfileEntry {
  std::size_t size;
  Vertex vertex;
};
using Profile = std::vector<ProfileEntry>;

// True iff chi has an Even selection with coverage and the selection contains
// distinct cutsets matching every (size, vertex in W^E) entry.
bool profile_membership(const Coloring& chi, const Profile& profile);

std::string cutset_report_json(const Cutset& cs);

}  // namespace torcol
