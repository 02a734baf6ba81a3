#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torcol/coloring.hpp"
#include "torcol/cutset.hpp"
#include "torcol/rational.hpp"

namespace torcol {

// The shift-and-transpose surgery on a cutset, its flow weights, and the
// approximation / cover certificates used to bound the flow into a colouring.
//
// Everything is written for Even cutsets ("near" class E, "far" class O). For
// an Odd cutset the two classes swap roles.

// f: 0 -> 0, 1 <-> 2.
constexpr Color transpose12(Color c) { return c == 0 ? 0 : static_cast<Color>(3 - c); }

struct Approximation {
  Parity near = Parity::Even;
  VertexSet a_near;  // A^E
  VertexSet a_far;   // A^O
  VertexSet q_near;  // Q^E = A^E ∩ ext(O \ A^O)
  VertexSet q_far;   // Q^O = (O \ A^O) ∩ ext(A^E)
};

// Fills in the Q sets for the given A^E, A^O.
Approximation make_approximation(VertexSet a_near, VertexSet a_far, Parity near = Parity::Even);
// A = (W^E, W^O).
Approximation identity_approximation(const Cutset& cs);

// A^E ⊇ W^E, A^O ⊆ W^O, every x in A^E has >= 2d - sqrt(d) neighbours in A^O,
// every y in O \ A^O has >= 2d - sqrt(d) neighbours in E \ A^E. Exact.
bool is_approximation(const Approximation& a, const Cutset& cs);

struct ShiftContext {
  Coloring chi;
  Cutset cs;
  Approximation approx;
  Direction s;
  VertexSet w_s;    // {x in int W : x - e_s not in W}
  VertexSet c_set;  // W^s ∩ A^O ∩ sigma_s(Q^E)
  VertexSet d_set;  // W^s \ C
};

ShiftContext make_shift_context(const Coloring& chi, const Cutset& cs, const Approximation& a, Direction s);

// W^s for a set W and direction s.
VertexSet shifted_boundary(const VertexSet& w, Direction s);

// chi^s_S: 0 on S, chi on (W^s \ S) ∪ (V \ W), f(chi(v - e_s)) on W \ W^s.
// InvalidArgument when S is not inside W^s; ImproperColoring (with the edge)
// when the result is not proper.
Coloring shift_coloring(const ShiftContext& ctx, const VertexSet& subset);

// chi(v) = chi'(v) off W, f(chi'(v + e_s)) on W. ImproperColoring when the
// result is not proper.
Coloring reconstruct(const Coloring& image, const VertexSet& w, Direction s);

// (1/4)^|C ∩ I(chi')| (3/4)^|C \ I(chi')| (1/2)^|D|. NotInImage when chi' is
// not chi^s_S for S = I(chi') ∩ W^s.
Rational flow_weight(const ShiftContext& ctx, const Coloring& image);

struct DirectionDiagnostic {
  Direction s;
  std::size_t w_s_size = 0;
  std::size_t overlap = 0;  // |sigma_s(Q^E) ∩ Q^O|
  bool enough_boundary = false;  // |W^s| >= 0.8 (w_o - w_e)
  bool small_overlap = false;    // overlap <= 5 |W^s| / sqrt(d)
};

struct DirectionChoice {
  Direction s;
  bool met_conditions = false;
  std::vector<DirectionDiagnostic> diagnostics;  // order +1, -1, +2, -2, ...
};

// First direction (order +1, -1, +2, -2, ...) meeting both conditions; if none
// does, the first direction with the largest |W^s|.
DirectionChoice choose_direction(const Cutset& cs, const Approximation& a);

struct Triple {
  VertexSet k;  // inside Q^O
  VertexSet l;  // inside U
  VertexSet m;  // inside Q^E \ U
};

struct Goodness {
  bool is_cover = false;           // every Q^E-Q^O edge touched
  bool inclusion_minimal = false;  // no single vertex can be dropped
  bool containments = false;       // K ⊆ Q^O, L ⊆ U, M ⊆ Q^E \ U
  bool k_is_boundary = false;      // K = ext(U \ L) ∩ Q^O
  bool k_is_full_boundary = false; // K = ext(U \ L), no restriction
  bool good() const { return is_cover && inclusion_minimal && containments && k_is_boundary; }
};

Goodness evaluate_triple(const Triple& t, const Approximation& a, const VertexSet& u);

// U = Q^E ∩ sigma_{-s}(I(chi')).
VertexSet uncertainty_set(const Approximation& a, const Coloring& image, Direction s);

struct HatTriple {
  VertexSet u;
  Triple triple;  // (W ∩ Q^O, U \ W, (Q^E \ U) \ W)
  Goodness goodness;
};

HatTriple hat_triple(const Cutset& cs, const Approximation& a, const Coloring& image, Direction s);

struct MinimalTriple {
  Triple triple;
  Goodness goodness;
  std::size_t subsets_scanned = 0;
  std::size_t min_cover_size = 0;  // minimum-cardinality cover size (Konig)
};

// Good triple with |K| + |L| smallest, ties broken lexicographically on
// (K, L) members. Scans L ⊆ U; nullopt when |U| exceeds max_u_bits or no
// good triple exists.
std::optional<MinimalTriple> minimal_good_triple(const Approximation& a, const VertexSet& u, int max_u_bits = 20);

// Size of a maximum matching between Q^E and Q^O (= minimum vertex cover).
std::size_t min_vertex_cover_size(const Approximation& a);

// Exact value coef * sqrt(3)^(has_sqrt3 ? 1 : 0).
struct Surd {
  Rational coef;
  bool has_sqrt3 = false;
  double to_double() const;
};

// Exact comparison q <= s.
bool less_equal(const Rational& q, const Surd& s);

// (sqrt3/2)^(w_o - w_e) * 2^|K0| / (3^(|K0|+|L0|) * 2^(|K'| - |L'|)).
// InvalidArgument when w_o < w_e.
Surd b_weight(std::size_t w_e, std::size_t w_o, std::size_t k0, std::size_t l0, std::size_t k_prime, std::size_t l_prime);

// (sqrt3/2)^m.
Surd sqrt3_over_2_power(std::size_t m);

}  // namespace torcol
