#include "torcol/exactgibbs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>

#include "torcol/error.hpp"

namespace torcol {

namespace {

struct Enumerator {
  const TorusGraph& g;
  std::uint64_t max_states;
  std::vector<std::uint8_t> domain;  // bitmask of still-allowed colours
  std::vector<Color> current;
  std::vector<Color>& flat;
  std::vector<std::int64_t>& imbalance;
  std::vector<std::vector<Vertex>> later;  // neighbours with larger index

  void descend(Vertex v) {
    const std::size_t n = g.size();
    if (v == n) {
      if (imbalance.size() >= max_states)
        fail(ErrorCode::BudgetExceeded, "more than " + std::to_string(max_states) +
                                            " proper colourings; enumeration refused (no partial count reported)");
      flat.insert(flat.end(), current.begin(), current.end());
      imbalance.push_back(imbalance_of(g, current));
      return;
    }
    for (Color c = 0; c < 3; ++c) {
      if (!(domain[v] & (1u << c))) continue;
      current[v] = c;
      // Forward check: strip c from later neighbours, undo afterwards.
      std::array<Vertex, 64> touched{};
      std::size_t ntouched = 0;
      bool dead = false;
      for (Vertex u : later[v]) {
        if (domain[u] & (1u << c)) {
          domain[u] &= static_cast<std::uint8_t>(~(1u << c));
          touched[ntouched++] = u;
          if (domain[u] == 0) dead = true;
        }
      }
      if (!dead) descend(v + 1);
      for (std::size_t i = 0; i < ntouched; ++i) domain[touched[i]] |= static_cast<std::uint8_t>(1u << c);
    }
  }
};

std::vector<std::vector<Vertex>> symmetry_maps(const TorusGraph& g) {
  const int d = g.dim();
  const int L = g.side();
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<Vertex>> maps;
  std::vector<int> coords(d);
  do {
    for (int signs = 0; signs < (1 << d); ++signs)
      for (Vertex t = 0; t < g.size(); ++t) {
        const auto shift = g.coordinates(t);
        std::vector<Vertex> map(g.size());
        for (Vertex v = 0; v < g.size(); ++v) {
          for (int k = 0; k < d; ++k) {
            const int x = g.coordinate(v, perm[k]);
            coords[k] = ((signs >> k) & 1 ? L - x : x) + shift[k];
          }
          map[v] = g.vertex(coords);
        }
        maps.push_back(std::move(map));
      }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return maps;
}

}  // namespace

StateIndex StateIndex::enumerate(TorusPtr graph, std::uint64_t max_states) {
  const std::size_t n = graph->size();
  // Zero on one class and a free {1,2} choice on the other already gives
  // 2 * 2^(n/2) distinct colourings.
  const std::size_t half = n / 2;
  if (half + 1 >= 63 || (std::uint64_t{1} << (half + 1)) > max_states)
    fail(ErrorCode::BudgetExceeded, "state space of T_{" + std::to_string(graph->side()) + "," +
                                        std::to_string(graph->dim()) + "} has at least 2^" + std::to_string(half + 1) +
                                        " colourings, over the budget of " + std::to_string(max_states));
  StateIndex idx;
  idx.graph_ = graph;
  idx.stride_ = n;
  Enumerator e{*graph, max_states, std::vector<std::uint8_t>(n, 7), std::vector<Color>(n, 0), idx.flat_, idx.imbalance_, {}};
  e.later.resize(n);
  for (Vertex v = 0; v < n; ++v)
    for (int i = 0; i < graph->degree(); ++i) {
      const Vertex u = graph->neighbor(v, i);
      if (u > v && std::find(e.later[v].begin(), e.later[v].end(), u) == e.later[v].end()) e.later[v].push_back(u);
    }
  e.descend(0);
  return idx;
}

std::optional<std::size_t> StateIndex::find(std::span<const Color> colors) const {
  std::size_t lo = 0;
  std::size_t hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto row = this->colors(mid);
    if (std::lexicographical_compare(row.begin(), row.end(), colors.begin(), colors.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && std::equal(colors.begin(), colors.end(), this->colors(lo).begin())) return lo;
  return std::nullopt;
}

std::vector<std::size_t> StateIndex::orbit_representatives() const {
  const auto maps = symmetry_maps(*graph_);
  std::array<std::array<Color, 3>, 6> color_perms{};
  std::array<Color, 3> p{0, 1, 2};
  for (std::size_t k = 0; k < 6; ++k) {
    color_perms[k] = p;
    std::next_permutation(p.begin(), p.end());
  }
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> reps;
  std::vector<Color> image(stride_);
  for (std::size_t i = 0; i < size(); ++i) {
    if (seen[i]) continue;
    reps.push_back(i);
    const auto x = colors(i);
    for (const auto& map : maps)
      for (const auto& cp : color_perms) {
        for (Vertex v = 0; v < stride_; ++v) image[map[v]] = cp[x[v]];
        if (auto j = find(image)) seen[*j] = true;
      }
  }
  return reps;
}

// ---------------------------------------------------------------------------

BigInt transfer_matrix_count(int side, int dim, std::size_t max_slice_states) {
  // Validates (side, dim) the same way the torus does.
  (void)TorusGraph::make(side, dim);
  std::vector<std::vector<Color>> slices;
  if (dim == 1) {
    slices = {{0}, {1}, {2}};
  } else {
    auto slice_graph = TorusGraph::make(side, dim - 1);
    const std::size_t m = slice_graph->size();
    std::vector<Color> c(m, 0);
    // Plain depth-first generation, kept separate from the enumerator above.
    std::function<void(std::size_t)> gen = [&](std::size_t v) {
      if (v == m) {
        if (slices.size() >= max_slice_states)
          fail(ErrorCode::BudgetExceeded, "transfer matrix slice space exceeds " + std::to_string(max_slice_states));
        slices.push_back(c);
        return;
      }
      for (Color col = 0; col < 3; ++col) {
        bool ok = true;
        for (int i = 0; i < slice_graph->degree() && ok; ++i) {
          const Vertex u = slice_graph->neighbor(static_cast<Vertex>(v), i);
          if (u < v && c[u] == col) ok = false;
        }
        if (!ok) continue;
        c[v] = col;
        gen(v + 1);
      }
    };
    gen(0);
  }
  const std::size_t s = slices.size();
  using Matrix = std::vector<std::vector<BigInt>>;
  Matrix t(s, std::vector<BigInt>(s, 0));
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) {
      bool ok = true;
      for (std::size_t v = 0; v < slices[a].size() && ok; ++v) ok = slices[a][v] != slices[b][v];
      t[a][b] = ok ? 1 : 0;
    }
  auto mul = [s](const Matrix& x, const Matrix& y) {
    Matrix z(s, std::vector<BigInt>(s, 0));
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t k = 0; k < s; ++k) {
        if (x[i][k] == 0) continue;
        for (std::size_t j = 0; j < s; ++j)
          if (y[k][j] != 0) z[i][j] += x[i][k] * y[k][j];
      }
    return z;
  };
  Matrix result(s, std::vector<BigInt>(s, 0));
  for (std::size_t i = 0; i < s; ++i) result[i][i] = 1;
  Matrix base = t;
  for (int e = side; e > 0; e >>= 1) {
    if (e & 1) result = mul(result, base);
    if (e > 1) base = mul(base, base);
  }
  BigInt trace = 0;
  for (std::size_t i = 0; i < s; ++i) trace += result[i][i];
  return trace;
}

ClassMeasures stationary_measure(const StateIndex& idx, const Rational& rho) {
  const PhaseClassifier c(*idx.graph(), rho);
  ClassMeasures m;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    switch (c.classify(idx.imbalance(i))) {
      case Phase::Balanced: ++m.balanced_count; break;
      case Phase::EvenPhase: ++m.even_count; break;
      case Phase::OddPhase: ++m.odd_count; break;
    }
  }
  const Rational total(idx.size());
  m.balanced = Rational(m.balanced_count) / total;
  m.even_phase = Rational(m.even_count) / total;
  m.odd_phase = Rational(m.odd_count) / total;
  return m;
}

// ---------------------------------------------------------------------------

ExactKernel::ExactKernel(std::vector<std::vector<KernelEntry>> rows, std::string label)
    : rows_(std::move(rows)), label_(std::move(label)) {
  for (auto& r : rows_) {
    std::sort(r.begin(), r.end(), [](const KernelEntry& a, const KernelEntry& b) { return a.col < b.col; });
    // Merge duplicate columns and drop zeros.
    std::vector<KernelEntry> merged;
    for (auto& e : r) {
      if (!merged.empty() && merged.back().col == e.col)
        merged.back().p += e.p;
      else
        merged.push_back(e);
    }
    std::erase_if(merged, [](const KernelEntry& e) { return e.p == 0; });
    r = std::move(merged);
  }
}

Rational ExactKernel::at(std::size_t i, std::size_t j) const {
  const auto& r = rows_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const KernelEntry& e, std::size_t c) { return e.col < c; });
  return (it != r.end() && it->col == j) ? it->p : Rational(0);
}

bool ExactKernel::symmetric() const {
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& e : rows_[i])
      if (at(e.col, i) != e.p) return false;
  return true;
}

bool ExactKernel::rows_sum_to_one() const {
  return std::all_of(rows_.begin(), rows_.end(), [](const auto& r) {
    Rational s = 0;
    for (const auto& e : r) s += e.p;
    return s == 1;
  });
}

bool ExactKernel::doubly_stochastic() const {
  if (!rows_sum_to_one()) return false;
  std::vector<Rational> col(size(), Rational(0));
  for (const auto& r : rows_)
    for (const auto& e : r) col[e.col] += e.p;
  return std::all_of(col.begin(), col.end(), [](const Rational& c) { return c == 1; });
}

std::size_t ExactKernel::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

ExactKernel exact_kernel(const StateIndex& idx, const ChainSpec& spec, std::size_t max_states) {
  if (idx.size() > max_states)
    fail(ErrorCode::BudgetExceeded, "kernel over " + std::to_string(idx.size()) + " states exceeds the budget of " +
                                        std::to_string(max_states));
  const auto& graph = idx.graph();
  const std::size_t n = graph->size();
  std::vector<std::vector<KernelEntry>> rows(idx.size());
  if (spec.kind == ChainKind::Metropolis) {
    const Rational move(1, 3 * static_cast<long long>(n));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      ChainState s(idx.coloring(i));
      Rational stay = 1;
      for (Vertex v = 0; v < n; ++v)
        for (Color c = 0; c < 3; ++c) {
          if (c == s.colors[v] || !color_allowed(s, v, c)) continue;
          const Color old = s.colors[v];
          s.colors[v] = c;
          rows[i].push_back({static_cast<std::uint32_t>(*idx.find(s.colors)), move});
          s.colors[v] = old;
          stay -= move;
        }
      rows[i].push_back({static_cast<std::uint32_t>(i), stay});
    }
    return ExactKernel(std::move(rows), "metropolis");
  }
  const BlockChain chain(graph, spec.block_size, spec.rho);
  const Rational per_block(1, static_cast<long long>(chain.blocks().size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    ChainState s(idx.coloring(i));
    for (const auto& block : chain.blocks()) {
      const auto options = chain.recolorings(s, block);
      const Rational weight = per_block / Rational(static_cast<long long>(options.size()));
      std::vector<Color> saved(block.size());
      for (std::size_t k = 0; k < block.size(); ++k) saved[k] = s.colors[block[k]];
      for (const auto& opt : options) {
        for (std::size_t k = 0; k < block.size(); ++k) s.colors[block[k]] = opt[k];
        rows[i].push_back({static_cast<std::uint32_t>(*idx.find(s.colors)), weight});
      }
      for (std::size_t k = 0; k < block.size(); ++k) s.colors[block[k]] = saved[k];
    }
  }
  return ExactKernel(std::move(rows), "rho_local_block(" + std::to_string(spec.block_size) + ")");
}

// ---------------------------------------------------------------------------

namespace {

struct DoubleRows {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
  explicit DoubleRows(const ExactKernel& k) : rows(k.size()) {
    for (std::size_t i = 0; i < k.size(); ++i)
      for (const auto& e : k.row(i)) rows[i].emplace_back(e.col, to_double(e.p));
  }
  void push(const std::vector<double>& in, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t x = 0; x < rows.size(); ++x) {
      const double mass = in[x];
      if (mass == 0.0) continue;
      for (const auto& [y, p] : rows[x]) out[y] += mass * p;
    }
  }
};

std::vector<bool> reachable(const ExactKernel& k, bool reverse) {
  const std::size_t n = k.size();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& e : k.row(i)) {
      if (reverse)
        adj[e.col].push_back(static_cast<std::uint32_t>(i));
      else
        adj[i].push_back(e.col);
    }
  std::vector<bool> seen(n, false);
  std::deque<std::uint32_t> q{0};
  seen[0] = true;
  while (!q.empty()) {
    const auto v = q.front();
    q.pop_front();
    for (auto u : adj[v])
      if (!seen[u]) {
        seen[u] = true;
        q.push_back(u);
      }
  }
  return seen;
}

std::uint64_t period(const ExactKernel& k) {
  const std::size_t n = k.size();
  std::vector<std::int64_t> level(n, -1);
  std::deque<std::uint32_t> q{0};
  level[0] = 0;
  std::uint64_t g = 0;
  while (!q.empty()) {
    const auto v = q.front();
    q.pop_front();
    for (const auto& e : k.row(v)) {
      if (level[e.col] < 0) {
        level[e.col] = level[v] + 1;
        q.push_back(e.col);
      } else {
        g = std::gcd(g, static_cast<std::uint64_t>(std::llabs(level[v] + 1 - level[e.col])));
      }
    }
  }
  return g;
}

void require_ergodic_uniform(const ExactKernel& k) {
  if (k.size() == 0) fail(ErrorCode::InvalidArgument, "empty kernel");
  const auto fwd = reachable(k, false);
  const auto bwd = reachable(k, true);
  for (std::size_t i = 0; i < k.size(); ++i)
    if (!fwd[i] || !bwd[i])
      fail(ErrorCode::Reducible, "kernel is reducible: state " + std::to_string(i) + " is not mutually reachable with state 0");
  if (const auto p = period(k); p != 1) fail(ErrorCode::Reducible, "kernel is periodic with period " + std::to_string(p));
  if (!k.doubly_stochastic())
    fail(ErrorCode::HypothesisViolated, "kernel is not doubly stochastic; the uniform measure is not stationary");
}

double tv_to_uniform(const std::vector<double>& dist) {
  const double u = 1.0 / static_cast<double>(dist.size());
  double s = 0.0;
  for (double x : dist) s += std::abs(x - u);
  return 0.5 * s;
}

}  // namespace

std::vector<double> tv_curve(const ExactKernel& kernel, std::span<const std::size_t> starts, std::uint64_t steps) {
  const DoubleRows rows(kernel);
  std::vector<std::size_t> all;
  if (starts.empty()) {
    all.resize(kernel.size());
    std::iota(all.begin(), all.end(), 0);
    starts = all;
  }
  std::vector<std::vector<double>> dist(starts.size(), std::vector<double>(kernel.size(), 0.0));
  for (std::size_t k = 0; k < starts.size(); ++k) dist[k][starts[k]] = 1.0;
  std::vector<double> scratch(kernel.size());
  std::vector<double> curve;
  for (std::uint64_t t = 0;; ++t) {
    double worst = 0.0;
    for (const auto& d : dist) worst = std::max(worst, tv_to_uniform(d));
    curve.push_back(worst);
    if (t == steps) break;
    for (auto& d : dist) {
      rows.push(d, scratch);
      d.swap(scratch);
    }
  }
  return curve;
}

MixingResult exact_mixing_time(const ExactKernel& kernel, std::span<const std::size_t> starts, std::uint64_t cap,
                               double threshold) {
  require_ergodic_uniform(kernel);
  const DoubleRows rows(kernel);
  std::vector<std::size_t> all;
  if (starts.empty()) {
    all.resize(kernel.size());
    std::iota(all.begin(), all.end(), 0);
    starts = all;
  }
  std::vector<std::vector<double>> dist(starts.size(), std::vector<double>(kernel.size(), 0.0));
  for (std::size_t k = 0; k < starts.size(); ++k) dist[k][starts[k]] = 1.0;
  std::vector<double> scratch(kernel.size());
  MixingResult result;
  for (std::uint64_t t = 0; t <= cap; ++t) {
    double worst = 0.0;
    for (const auto& d : dist) worst = std::max(worst, tv_to_uniform(d));
    result.tv_curve.push_back(worst);
    if (worst <= threshold) {
      result.tau = t == 0 ? 0 : t - 1;
      return result;
    }
    for (auto& d : dist) {
      rows.push(d, scratch);
      d.swap(scratch);
    }
  }
  fail(ErrorCode::NotMixed, "worst-start TV still above threshold after " + std::to_string(cap) + " steps");
}

ConductanceReport exact_conductance_bound(const StateIndex& idx, const ExactKernel& kernel, const Rational& rho) {
  if (kernel.size() != idx.size()) fail(ErrorCode::InvalidArgument, "kernel and state index sizes differ");
  const PhaseClassifier c(*idx.graph(), rho);
  std::vector<Phase> phase(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) phase[i] = c.classify(idx.imbalance(i));
  const auto m = stationary_measure(idx, rho);
  ConductanceReport r;
  r.pi_a = m.even_phase;
  r.pi_m = m.balanced;
  if (r.pi_a > Rational(1, 2)) fail(ErrorCode::HypothesisViolated, "pi(A) = " + to_string(r.pi_a) + " exceeds 1/2");
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (phase[i] != Phase::EvenPhase) continue;
    for (const auto& e : kernel.row(i)) {
      ++r.transitions_checked;
      if (phase[e.col] == Phase::OddPhase)
        fail(ErrorCode::HypothesisViolated, "transition " + std::to_string(i) + " -> " + std::to_string(e.col) +
                                                " jumps from the even phase to the odd phase with probability " +
                                                to_string(e.p));
    }
  }
  r.bound = bottleneck_bound(r.pi_a, r.pi_m);
  if (r.pi_m != 0) r.symmetrized = (1 - r.pi_a) / (16 * r.pi_m);
  return r;
}

std::optional<Rational> bottleneck_bound(const Rational& pi_a, const Rational& pi_m) {
  if (pi_m == 0) return std::nullopt;
  return pi_a / (8 * pi_m);
}

std::vector<double> hitting_probability(const ExactKernel& kernel, std::size_t start, const std::vector<bool>& target,
                                        std::uint64_t steps) {
  const DoubleRows rows(kernel);
  std::vector<double> dist(kernel.size(), 0.0);
  std::vector<double> scratch(kernel.size());
  dist[start] = 1.0;
  double absorbed = 0.0;
  std::vector<double> out;
  for (std::uint64_t t = 0;; ++t) {
    for (std::size_t i = 0; i < dist.size(); ++i)
      if (target[i]) {
        absorbed += dist[i];
        dist[i] = 0.0;
      }
    out.push_back(absorbed);
    if (t == steps) break;
    rows.push(dist, scratch);
    dist.swap(scratch);
  }
  return out;
}

}  // namespace torcol
