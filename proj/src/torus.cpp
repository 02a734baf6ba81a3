#include "torcol/torus.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "torcol/error.hpp"

namespace torcol {

std::shared_ptr<const TorusGraph> TorusGraph::make(int side, int dim, std::uint64_t vertex_budget) {
  if (side < 4 || side % 2 != 0) fail(ErrorCode::InvalidArgument, "L must be even >= 4 (got " + std::to_string(side) + ")");
  if (dim < 1) fail(ErrorCode::InvalidArgument, "d must be >= 1 (got " + std::to_string(dim) + ")");
  std::uint64_t n = 1;
  for (int k = 0; k < dim; ++k) {
    n *= static_cast<std::uint64_t>(side);
    if (n > vertex_budget)
      fail(ErrorCode::BudgetExceeded, "L^d = " + std::to_string(side) + "^" + std::to_string(dim) +
                                          " exceeds the vertex budget of " + std::to_string(vertex_budget));
  }
  return std::shared_ptr<const TorusGraph>(new TorusGraph(side, dim));
}

TorusGraph::TorusGraph(int side, int dim) : side_(side), dim_(dim), size_(1), stride_(dim) {
  for (int k = dim - 1; k >= 0; --k) {
    stride_[k] = size_;
    size_ *= static_cast<std::size_t>(side);
  }
  if (size_ * 2 * static_cast<std::size_t>(dim) <= kTableLimit) {
    std::vector<Vertex> table(size_ * 2 * static_cast<std::size_t>(dim));
    for (Vertex v = 0; v < size_; ++v)
      for (int i = 0; i < 2 * dim; ++i) table[static_cast<std::size_t>(v) * 2 * dim + i] = compute_neighbor(v, Direction::from_index(i));
    table_ = std::move(table);
  }
}

Vertex TorusGraph::compute_neighbor(Vertex v, Direction s) const {
  const int axis = s.axis();
  const std::size_t stride = stride_[axis];
  const int c = coordinate(v, axis);
  if (s.positive()) return static_cast<Vertex>(c == side_ - 1 ? v - (side_ - 1) * stride : v + stride);
  return static_cast<Vertex>(c == 0 ? v + (side_ - 1) * stride : v - stride);
}

void TorusGraph::neighbors(Vertex v, std::span<Vertex> out) const {
  for (int i = 0; i < 2 * dim_; ++i) out[i] = neighbor(v, i);
}

bool TorusGraph::adjacent(Vertex u, Vertex v) const {
  for (int i = 0; i < 2 * dim_; ++i)
    if (neighbor(u, i) == v) return true;
  return false;
}

std::vector<int> TorusGraph::coordinates(Vertex v) const {
  std::vector<int> c(dim_);
  for (int k = 0; k < dim_; ++k) c[k] = coordinate(v, k);
  return c;
}

Vertex TorusGraph::vertex(std::span<const int> coords) const {
  std::size_t v = 0;
  for (int k = 0; k < dim_; ++k) {
    const int c = ((coords[k] % side_) + side_) % side_;
    v += static_cast<std::size_t>(c) * stride_[k];
  }
  return static_cast<Vertex>(v);
}

Parity TorusGraph::parity(Vertex v) const {
  int sum = 0;
  for (int k = 0; k < dim_; ++k) sum += coordinate(v, k);
  return (sum & 1) ? Parity::Odd : Parity::Even;
}

Edge TorusGraph::canonical_edge(Vertex u, Vertex v) const {
  const Vertex low = std::min(u, v);
  const Vertex high = std::max(u, v);
  for (int i = 0; i < 2 * dim_; ++i)
    if (neighbor(low, i) == high) return Edge{low, Direction::from_index(i)};
  fail(ErrorCode::InvalidArgument, "vertices " + std::to_string(u) + " and " + std::to_string(v) + " are not adjacent");
}

// ---------------------------------------------------------------------------

VertexSet::VertexSet(TorusPtr graph) : graph_(std::move(graph)), words_((graph_->size() + 63) / 64, 0) {}

VertexSet::VertexSet(TorusPtr graph, std::span<const Vertex> members) : VertexSet(std::move(graph)) {
  for (Vertex v : members) {
    if (v >= graph_->size()) fail(ErrorCode::InvalidArgument, "vertex index out of range: " + std::to_string(v));
    insert(v);
  }
}

VertexSet VertexSet::full(TorusPtr graph) { return VertexSet(std::move(graph)).complement(); }

VertexSet VertexSet::parity_class(TorusPtr graph, Parity p) {
  VertexSet s(graph);
  for (Vertex v = 0; v < graph->size(); ++v)
    if (graph->parity(v) == p) s.insert(v);
  return s;
}

void VertexSet::trim() {
  const std::size_t n = universe();
  if (n % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n % 64)) - 1;
}

std::size_t VertexSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

bool VertexSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::vector<Vertex> VertexSet::members() const {
  std::vector<Vertex> out;
  out.reserve(count());
  for_each([&](Vertex v) { out.push_back(v); });
  return out;
}

Vertex VertexSet::first() const {
  for (std::size_t w = 0; w < words_.size(); ++w)
    if (words_[w]) return static_cast<Vertex>(w * 64 + __builtin_ctzll(words_[w]));
  return static_cast<Vertex>(universe());
}

VertexSet VertexSet::complement() const {
  VertexSet out = *this;
  for (auto& w : out.words_) w = ~w;
  out.trim();
  return out;
}

VertexSet& VertexSet::operator|=(const VertexSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

VertexSet& VertexSet::operator&=(const VertexSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

VertexSet& VertexSet::operator-=(const VertexSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
  return *this;
}

bool VertexSet::subset_of(const VertexSet& o) const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~o.words_[i]) return false;
  return true;
}

bool VertexSet::intersects(const VertexSet& o) const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & o.words_[i]) return true;
  return false;
}

VertexSet VertexSet::restrict_to(Parity p) const {
  VertexSet out(graph_);
  for_each([&](Vertex v) {
    if (graph_->parity(v) == p) out.insert(v);
  });
  return out;
}

bool VertexSet::within(Parity p) const {
  bool ok = true;
  for_each([&](Vertex v) { ok = ok && graph_->parity(v) == p; });
  return ok;
}

// ---------------------------------------------------------------------------

std::vector<Edge> edge_boundary(const VertexSet& x) {
  const auto& g = *x.graph();
  std::vector<Edge> out;
  x.for_each([&](Vertex v) {
    for (int i = 0; i < g.degree(); ++i) {
      const Vertex u = g.neighbor(v, i);
      if (!x.contains(u)) out.push_back(g.canonical_edge(v, u));
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

VertexSet interior_boundary(const VertexSet& x) {
  const auto& g = *x.graph();
  VertexSet out(x.graph());
  x.for_each([&](Vertex v) {
    for (int i = 0; i < g.degree(); ++i)
      if (!x.contains(g.neighbor(v, i))) {
        out.insert(v);
        break;
      }
  });
  return out;
}

VertexSet exterior_boundary(const VertexSet& x) {
  const auto& g = *x.graph();
  VertexSet out(x.graph());
  x.for_each([&](Vertex v) {
    for (int i = 0; i < g.degree(); ++i) {
      const Vertex u = g.neighbor(v, i);
      if (!x.contains(u)) out.insert(u);
    }
  });
  return out;
}

VertexSet closure(const VertexSet& x) { return x | exterior_boundary(x); }

BoundaryInfo boundary_ops(const VertexSet& x) {
  BoundaryInfo info{edge_boundary(x), interior_boundary(x), exterior_boundary(x), {}};
  info.closure = x | info.exterior_boundary;
  return info;
}

VertexSet star_boundary(const VertexSet& t) {
  if (!t.within(Parity::Even) && !t.within(Parity::Odd))
    fail(ErrorCode::InvalidArgument, "star boundary needs a set inside one parity class");
  const auto& g = *t.graph();
  VertexSet out(t.graph());
  // Candidates are neighbours of t; a vertex with every neighbour in t is one.
  exterior_boundary(t).for_each([&](Vertex v) {
    for (int i = 0; i < g.degree(); ++i)
      if (!t.contains(g.neighbor(v, i))) return;
    out.insert(v);
  });
  return out;
}

VertexSet shift(const VertexSet& x, Direction s) {
  const auto& g = *x.graph();
  if (!g.valid_direction(s)) fail(ErrorCode::InvalidArgument, "invalid direction " + std::to_string(s.value));
  VertexSet out(x.graph());
  x.for_each([&](Vertex v) { out.insert(g.neighbor(v, s)); });
  return out;
}

int degree_into(const VertexSet& x, Vertex v) {
  const auto& g = *x.graph();
  int k = 0;
  for (int i = 0; i < g.degree(); ++i) k += x.contains(g.neighbor(v, i)) ? 1 : 0;
  return k;
}

std::vector<VertexSet> components(const VertexSet& x) {
  const auto& g = *x.graph();
  std::vector<VertexSet> out;
  VertexSet seen(x.graph());
  std::deque<Vertex> queue;
  x.for_each([&](Vertex root) {
    if (seen.contains(root)) return;
    VertexSet comp(x.graph());
    seen.insert(root);
    queue.push_back(root);
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop_front();
      comp.insert(v);
      for (int i = 0; i < g.degree(); ++i) {
        const Vertex u = g.neighbor(v, i);
        if (x.contains(u) && !seen.contains(u)) {
          seen.insert(u);
          queue.push_back(u);
        }
      }
    }
    out.push_back(std::move(comp));
  });
  return out;
}

}  // namespace torcol
