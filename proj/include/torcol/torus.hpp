#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace torcol {

using Vertex = std::uint32_t;

enum class Parity : std::uint8_t { Even = 0, Odd = 1 };

constexpr Parity opposite(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }

// Signed lattice direction s in {+-1, ..., +-d}. Stored as the signed value.
struct Direction {
  int value = 1;

  int axis() const { return (value > 0 ? value : -value) - 1; }
  bool positive() const { return value > 0; }
  Direction reversed() const { return Direction{-value}; }
  // Dense index in [0, 2d): +1 -> 0, -1 -> 1, +2 -> 2, ...
  int index() const { return 2 * axis() + (positive() ? 0 : 1); }
  static Direction from_index(int idx) { return Direction{(idx % 2 == 0 ? 1 : -1) * (idx / 2 + 1)}; }
  friend bool operator==(Direction, Direction) = default;
};

// Canonical edge identity: the lower-index endpoint and the direction that
// leads from it to the other endpoint.
struct Edge {
  Vertex low;
  Direction dir;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend bool operator<(const Edge& a, const Edge& b) {
    return a.low != b.low ? a.low < b.low : a.dir.index() < b.dir.index();
  }
};

// The even discrete torus T_{L,d}. Vertices are indexed row-major over
// coordinates: index = sum_k x_k * L^(d-1-k), so coordinate 0 varies slowest.
class TorusGraph {
 public:
  static constexpr std::uint64_t kDefaultVertexBudget = std::uint64_t{1} << 24;

  // Throws InvalidArgument for odd L, L < 4 or d < 1, and BudgetExceeded when
  // L^d is larger than vertex_budget.
  static std::shared_ptr<const TorusGraph> make(int side, int dim,
                                                std::uint64_t vertex_budget = kDefaultVertexBudget);

  int side() const { return side_; }
  int dim() const { return dim_; }
  std::size_t size() const { return size_; }
  int degree() const { return 2 * dim_; }

  Vertex neighbor(Vertex v, Direction s) const {
    return table_.empty() ? compute_neighbor(v, s) : table_[static_cast<std::size_t>(v) * 2 * dim_ + s.index()];
  }
  Vertex neighbor(Vertex v, int dir_index) const {
    return table_.empty() ? compute_neighbor(v, Direction::from_index(dir_index))
                          : table_[static_cast<std::size_t>(v) * 2 * dim_ + dir_index];
  }
  // Fills out[0..2d) in direction-index order.
  void neighbors(Vertex v, std::span<Vertex> out) const;
  bool adjacent(Vertex u, Vertex v) const;

  int coordinate(Vertex v, int axis) const { return static_cast<int>((v / stride_[axis]) % side_); }
  std::vector<int> coordinates(Vertex v) const;
  Vertex vertex(std::span<const int> coords) const;

  Parity parity(Vertex v) const;
  Edge canonical_edge(Vertex u, Vertex v) const;
  Vertex other_end(const Edge& e) const { return neighbor(e.low, e.dir); }
  bool valid_direction(Direction s) const { return s.value != 0 && s.axis() < dim_; }

  // Number of edges, L^d * d.
  std::size_t edge_count() const { return size_ * static_cast<std::size_t>(dim_); }

 private:
  TorusGraph(int side, int dim);
  Vertex compute_neighbor(Vertex v, Direction s) const;

  // Neighbour lookup table, built when n * 2d stays under kTableLimit entries.
  static constexpr std::size_t kTableLimit = std::size_t{1} << 25;

  int side_;
  int dim_;
  std::size_t size_;
  std::vector<std::size_t> stride_;
  std::vector<Vertex> table_;
};

using TorusPtr = std::shared_ptr<const TorusGraph>;

// Dense bit-per-vertex subset of a torus. Value semantics.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(TorusPtr graph);
  VertexSet(TorusPtr graph, std::span<const Vertex> members);

  static VertexSet full(TorusPtr graph);
  static VertexSet parity_class(TorusPtr graph, Parity p);

  const TorusPtr& graph() const { return graph_; }
  std::size_t universe() const { return graph_ ? graph_->size() : 0; }

  bool contains(Vertex v) const { return (words_[v >> 6] >> (v & 63)) & 1u; }
  void insert(Vertex v) { words_[v >> 6] |= std::uint64_t{1} << (v & 63); }
  void erase(Vertex v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
  void set(Vertex v, bool on) { on ? insert(v) : erase(v); }

  std::size_t count() const;
  bool empty() const;
  std::vector<Vertex> members() const;
  // Smallest member, or universe() when empty.
  Vertex first() const;

  VertexSet complement() const;
  VertexSet& operator|=(const VertexSet& o);
  VertexSet& operator&=(const VertexSet& o);
  VertexSet& operator-=(const VertexSet& o);
  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }
  friend bool operator==(const VertexSet& a, const VertexSet& b) { return a.words_ == b.words_; }

  bool subset_of(const VertexSet& o) const;
  bool intersects(const VertexSet& o) const;

  VertexSet restrict_to(Parity p) const;
  // True iff every member has the given parity (vacuously true when empty).
  bool within(Parity p) const;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = __builtin_ctzll(bits);
        f(static_cast<Vertex>(w * 64 + b));
        bits &= bits - 1;
      }
    }
  }

 private:
  void trim();

  TorusPtr graph_;
  std::vector<std::uint64_t> words_;
};

struct BoundaryInfo {
  std::vector<Edge> nabla;  // sorted canonical edges with exactly one end in X
  VertexSet interior_boundary;
  VertexSet exterior_boundary;
  VertexSet closure;  // X^+
};

BoundaryInfo boundary_ops(const VertexSet& x);
std::vector<Edge> edge_boundary(const VertexSet& x);
VertexSet interior_boundary(const VertexSet& x);
VertexSet exterior_boundary(const VertexSet& x);
VertexSet closure(const VertexSet& x);

// Vertices all of whose 2d neighbours lie in t. t must sit inside one parity
// class; InvalidArgument otherwise.
VertexSet star_boundary(const VertexSet& t);

// sigma_s(X) = {x + e_s}.
VertexSet shift(const VertexSet& x, Direction s);

// Number of neighbours of v inside x.
int degree_into(const VertexSet& x, Vertex v);

// Connected components of the subgraph induced by x, ordered by smallest member.
std::vector<VertexSet> components(const VertexSet& x);

}  // namespace torcol
