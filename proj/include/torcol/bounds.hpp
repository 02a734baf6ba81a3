#pragma once

#include <cstdint>
#include <vector>

#include "torcol/exactgibbs.hpp"
#include "torcol/rational.hpp"
#include "torcol/torus.hpp"

namespace torcol {

// H(x) = -x log2 x - (1 - x) log2(1 - x), with H(0) = H(1) = 0.
long double binary_entropy(long double x);

struct EntropyCondition {
  Rational rho;
  long double h = 0.0L;
  long double value = 0.0L;  // H(rho) + rho, rounded to 12 digits
  bool satisfied = false;    // value < 1
};

// InvalidArgument unless 0 < rho < 1.
EntropyCondition entropy_condition(const Rational& rho);

// The unique root of H(x) + x = 1 in (0, 1/2), by bisection until the bracket
// is narrower than tol. The left end of the final bracket is returned.
long double entropy_threshold(long double tol = 1e-12L);

struct ChernoffCheck {
  std::uint64_t m = 0;
  Rational beta;
  BigInt lhs;            // sum_{i <= floor(beta m)} C(m, i)
  long double rhs = 0;   // 2^(H(beta) m)
  bool holds = false;
};

// InvalidArgument unless m >= 1 and 0 < beta <= 1/2.
ChernoffCheck chernoff_bound_check(std::uint64_t m, const Rational& beta);

struct CompCount {
  std::size_t comp = 0;
  Rational bound;  // L^d / 2d
  bool holds = false;
};

// Components of V \ (A ∪ B ∪ star(A) ∪ star(B)). A must sit in E and B in O;
// InvalidArgument when they do not or when some edge joins A and B.
CompCount comp_count(const VertexSet& a, const VertexSet& b);

struct SmallClassCensus {
  std::size_t total = 0;
  std::size_t small = 0;           // min(|I^E|, |I^O|) <= L^d / (4 sqrt d)
  std::size_t balanced = 0;        // balanced colourings at rho
  std::size_t small_balanced = 0;  // both
  Rational fraction;               // small / total
};

SmallClassCensus small_class_census(const StateIndex& idx, const Rational& rho);

struct FreeChoiceRecord {
  std::vector<Vertex> a;
  std::vector<Vertex> b;
  std::size_t colorings = 0;   // colourings with zero set exactly A ∪ B
  std::size_t exponent = 0;    // |star A| + |star B| + comp(A, B)
  bool holds = false;          // colorings <= 2^exponent
};

// Every pair A ⊆ E, B ⊆ O with no edge between them, against the enumerated
// colourings. Meant for tiny tori; InvalidArgument when n > 24.
std::vector<FreeChoiceRecord> free_choice_check(const StateIndex& idx);

}  // namespace torcol
