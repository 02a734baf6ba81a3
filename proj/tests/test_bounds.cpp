#include <cmath>
#include <vector>

#include "doctest.h"
#include "torcol/bounds.hpp"
#include "torcol/error.hpp"
#include "torcol/rng.hpp"

using namespace torcol;

namespace {

Vertex at(const TorusPtr& g, int x, int y) {
  const int c[2] = {x, y};
  return g->vertex(c);
}

// A uniform-ish random pair A ⊆ E, B ⊆ O with no edge between them.
std::pair<VertexSet, VertexSet> random_pair(const TorusPtr& g, Rng& rng) {
  VertexSet a(g), b(g);
  const auto pa = rng.below(5);
  const auto pb = rng.below(5);
  for (Vertex v = 0; v < g->size(); ++v)
    if (g->parity(v) == Parity::Even && rng.below(8) < pa) a.insert(v);
  const auto blocked = closure(a);
  for (Vertex v = 0; v < g->size(); ++v)
    if (g->parity(v) == Parity::Odd && !blocked.contains(v) && rng.below(8) < pb) b.insert(v);
  return {a, b};
}

}  // namespace

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5L) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0L) == 0.0L);
  CHECK(binary_entropy(1.0L) == 0.0L);
  for (long double x : {0.01L, 0.1L, 0.22L, 0.37L}) {
    CHECK(std::fabs(static_cast<double>(binary_entropy(x) - binary_entropy(1 - x))) < 1e-12);
  }
}

TEST_CASE("entropy condition") {
  auto r = entropy_condition(Rational(11, 50));
  CHECK(r.satisfied);
  CHECK(static_cast<double>(r.value) == doctest::Approx(0.980167502962).epsilon(1e-12));
  auto half = entropy_condition(Rational(1, 2));
  CHECK(static_cast<double>(half.value) == doctest::Approx(1.5));
  CHECK_FALSE(half.satisfied);
  auto tiny = entropy_condition(Rational(1, 1000000));
  CHECK(tiny.satisfied);
  CHECK(tiny.value < 0.001L);
  CHECK_THROWS_AS(entropy_condition(Rational(0)), Error);
  CHECK_THROWS_AS(entropy_condition(Rational(1)), Error);
}

TEST_CASE("entropy threshold") {
  const long double x = entropy_threshold();
  CHECK(std::round(static_cast<double>(x) * 10000) / 10000 == 0.2271);
  CHECK(entropy_condition(Rational(2270, 10000)).satisfied);
  CHECK_FALSE(entropy_condition(Rational(2272, 10000)).satisfied);
}

TEST_CASE("Chernoff examples") {
  auto a = chernoff_bound_check(10, Rational(1, 5));
  CHECK(a.lhs == 56);
  CHECK(static_cast<double>(a.rhs) == doctest::Approx(149.0116).epsilon(1e-6));
  CHECK(a.holds);
  auto b = chernoff_bound_check(1, Rational(1, 2));
  CHECK(b.lhs == 1);
  CHECK(static_cast<double>(b.rhs) == doctest::Approx(2.0));
  CHECK(b.holds);
  CHECK_THROWS_AS(chernoff_bound_check(10, Rational(3, 5)), Error);
  CHECK_THROWS_AS(chernoff_bound_check(0, Rational(1, 5)), Error);
  CHECK_THROWS_AS(chernoff_bound_check(10, Rational(0)), Error);
}

TEST_CASE("Chernoff grid") {
  int checked = 0;
  for (std::uint64_t m = 1; m <= 64; ++m)
    for (int k = 1; k <= 32; ++k) {
      auto c = chernoff_bound_check(m, Rational(k, 64));
      CHECK(c.holds);
      ++checked;
    }
  CHECK(checked == 2048);
}

TEST_CASE("comp_count examples") {
  auto g = TorusGraph::make(4, 2);
  VertexSet none(g);
  auto z = comp_count(none, none);
  CHECK(z.comp == 1);
  CHECK(z.bound == 4);
  CHECK(z.holds);

  VertexSet a(g);
  a.insert(at(g, 0, 0));
  auto one = comp_count(a, none);
  CHECK(one.comp == 1);
  CHECK(one.holds);

  VertexSet b(g);
  b.insert(at(g, 1, 0));
  CHECK_THROWS_AS(comp_count(a, b), Error);
  CHECK_THROWS_AS(comp_count(b, none), Error);
  CHECK_THROWS_AS(comp_count(none, a), Error);
}

TEST_CASE("comp_count exhaustive for |A| + |B| <= 3 on T_{4,2}") {
  auto g = TorusGraph::make(4, 2);
  const std::size_t n = g->size();
  int checked = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) > 3) continue;
    VertexSet a(g), b(g);
    for (Vertex v = 0; v < n; ++v)
      if (mask >> v & 1u) (g->parity(v) == Parity::Even ? a : b).insert(v);
    bool adjacent = false;
    a.for_each([&](Vertex x) { adjacent = adjacent || degree_into(b, x) > 0; });
    if (adjacent) continue;
    CHECK(comp_count(a, b).holds);
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("comp_count on random pairs") {
  Rng rng(99);
  for (int dim : {2, 3}) {
    auto g = TorusGraph::make(4, dim);
    for (int trial = 0; trial < 500; ++trial) {
      auto [a, b] = random_pair(g, rng);
      CHECK(comp_count(a, b).holds);
    }
  }
}

TEST_CASE("small-class census") {
  auto idx = StateIndex::enumerate(TorusGraph::make(4, 1));
  auto c = small_class_census(idx, Rational(11, 50));
  CHECK(c.total == 18);
  CHECK(c.small == 18);
  CHECK(c.balanced == 2);
  CHECK(c.small_balanced == 2);
  CHECK(c.fraction == 1);
  CHECK(small_class_census(idx, Rational(1, 10)).small == c.small);

  auto big = StateIndex::enumerate(TorusGraph::make(4, 2));
  auto b = small_class_census(big, Rational(11, 50));
  CHECK(b.total == 2970);
  CHECK(b.balanced == 338);
  CHECK(b.small == 2970);
  CHECK(b.small_balanced == 338);
}

TEST_CASE("free-choice bound on T_{4,1}") {
  auto idx = StateIndex::enumerate(TorusGraph::make(4, 1));
  auto recs = free_choice_check(idx);
  CHECK(recs.size() == 7);
  std::size_t colorings = 0;
  for (const auto& r : recs) {
    CHECK(r.holds);
    colorings += r.colorings;
  }
  CHECK(colorings == 18);
  CHECK_THROWS_AS(free_choice_check(StateIndex::enumerate(TorusGraph::make(6, 2))), Error);
}
