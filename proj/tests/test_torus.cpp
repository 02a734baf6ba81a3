#include <vector>

#include "doctest.h"
#include "torcol/error.hpp"
#include "torcol/rng.hpp"
#include "torcol/torus.hpp"

using namespace torcol;

namespace {

Vertex at(const TorusPtr& g, int x, int y) {
  const int c[2] = {x, y};
  return g->vertex(c);
}

VertexSet plus_shape(const TorusPtr& g) {
  VertexSet x(g);
  x.insert(at(g, 0, 0));
  for (int i = 0; i < 4; ++i) x.insert(g->neighbor(at(g, 0, 0), i));
  return x;
}

}  // namespace

TEST_CASE("make_torus") {
  auto c = TorusGraph::make(4, 1);
  CHECK(c->size() == 4);
  CHECK(c->degree() == 2);
  CHECK(c->adjacent(0, 1));
  CHECK(c->adjacent(0, 3));
  CHECK_FALSE(c->adjacent(0, 2));

  auto g = TorusGraph::make(4, 2);
  CHECK(g->size() == 16);
  CHECK(g->edge_count() == 32);
  CHECK(VertexSet::parity_class(g, Parity::Even).count() == 8);
  for (Vertex v = 0; v < 16; ++v) {
    std::vector<Vertex> nb(4);
    g->neighbors(v, nb);
    for (Vertex u : nb) CHECK(g->parity(u) != g->parity(v));
  }
}

TEST_CASE("make_torus preconditions") {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::VerificationFailed;
  };
  CHECK(code([] { TorusGraph::make(3, 2); }) == ErrorCode::InvalidArgument);
  CHECK(code([] { TorusGraph::make(2, 2); }) == ErrorCode::InvalidArgument);
  CHECK(code([] { TorusGraph::make(4, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code([] { TorusGraph::make(8, 9); }) == ErrorCode::BudgetExceeded);
}

TEST_CASE("coordinates round trip") {
  auto g = TorusGraph::make(6, 3);
  for (Vertex v = 0; v < g->size(); ++v) {
    auto c = g->coordinates(v);
    CHECK(g->vertex(c) == v);
    int sum = c[0] + c[1] + c[2];
    CHECK((g->parity(v) == Parity::Even) == (sum % 2 == 0));
  }
}

TEST_CASE("boundary_ops small sets") {
  auto g = TorusGraph::make(4, 2);
  auto empty = boundary_ops(VertexSet(g));
  CHECK(empty.nabla.empty());
  CHECK(empty.interior_boundary.empty());
  CHECK(empty.exterior_boundary.empty());
  CHECK(empty.closure.empty());

  VertexSet o(g);
  o.insert(at(g, 0, 0));
  auto b = boundary_ops(o);
  CHECK(b.nabla.size() == 4);
  CHECK(b.exterior_boundary.count() == 4);
  CHECK(b.interior_boundary == o);
  CHECK(b.closure.count() == 5);
  for (Vertex u : b.exterior_boundary.members()) CHECK(g->adjacent(u, at(g, 0, 0)));

  auto p = boundary_ops(plus_shape(g));
  CHECK(p.nabla.size() == 12);
  CHECK(p.interior_boundary.count() == 4);
  // Opposite arm tips share their outer neighbour on the 4-torus.
  CHECK(p.exterior_boundary.count() == 6);
}

TEST_CASE("star_boundary") {
  auto g = TorusGraph::make(4, 2);
  VertexSet o(g);
  o.insert(at(g, 0, 0));
  CHECK(star_boundary(o).empty());

  CHECK(star_boundary(VertexSet::parity_class(g, Parity::Even)) == VertexSet::parity_class(g, Parity::Odd));

  auto ring = plus_shape(g);
  ring.erase(at(g, 0, 0));
  auto st = star_boundary(ring);
  CHECK(st.count() == 1);
  CHECK(st.contains(at(g, 0, 0)));

  VertexSet mixed(g);
  mixed.insert(at(g, 0, 0));
  mixed.insert(at(g, 1, 0));
  CHECK_THROWS_AS(star_boundary(mixed), Error);
}

TEST_CASE("shift wraps and inverts") {
  auto g = TorusGraph::make(4, 2);
  VertexSet o(g);
  o.insert(at(g, 0, 0));
  CHECK(shift(o, Direction{1}).members() == std::vector<Vertex>{at(g, 1, 0)});
  CHECK(shift(o, Direction{-1}).members() == std::vector<Vertex>{at(g, 3, 0)});
  CHECK(shift(o, Direction{2}).members() == std::vector<Vertex>{at(g, 0, 1)});

  auto g3 = TorusGraph::make(4, 3);
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    VertexSet x(g3);
    for (Vertex v = 0; v < g3->size(); ++v)
      if (rng.below(3) == 0) x.insert(v);
    for (int s = 1; s <= 3; ++s) {
      CHECK(shift(shift(x, Direction{s}), Direction{-s}) == x);
      CHECK(shift(x, Direction{s}).count() == x.count());
    }
  }
}

TEST_CASE("closure and boundary identities on random sets") {
  auto g = TorusGraph::make(4, 3);
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    VertexSet x(g);
    for (Vertex v = 0; v < g->size(); ++v)
      if (rng.below(4) == 0) x.insert(v);
    auto b = boundary_ops(x);
    CHECK(b.closure == (x | b.exterior_boundary));
    CHECK(b.interior_boundary.subset_of(x));
    CHECK_FALSE(b.exterior_boundary.intersects(x));
    std::size_t crossing = 0;
    x.for_each([&](Vertex v) { crossing += static_cast<std::size_t>(g->degree() - degree_into(x, v)); });
    CHECK(b.nabla.size() == crossing);
  }
}

TEST_CASE("components") {
  auto g = TorusGraph::make(4, 2);
  VertexSet x(g);
  x.insert(at(g, 0, 0));
  x.insert(at(g, 2, 2));
  x.insert(at(g, 2, 3));
  auto comps = components(x);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].count() == 1);
  CHECK(comps[1].count() == 2);
  CHECK(components(VertexSet::full(g)).size() == 1);
  CHECK(components(VertexSet::parity_class(g, Parity::Even)).size() == 8);
}
