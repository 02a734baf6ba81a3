#include "torcol/glauber.hpp"

#include <algorithm>
#include <set>

#include "torcol/error.hpp"

namespace torcol {

std::string_view chain_kind_name(ChainKind k) { return k == ChainKind::Metropolis ? "metropolis" : "rho_local_block"; }

ChainState::ChainState(const Coloring& chi) : graph(chi.graph()), colors(chi.to_vector()), imbalance(chi.imbalance()) {}

void ChainState::recolor(Vertex v, Color c) {
  const Color old = colors[v];
  if (old == c) return;
  const std::int64_t sign = graph->parity(v) == Parity::Even ? 1 : -1;
  if (old == 0) imbalance -= sign;
  if (c == 0) imbalance += sign;
  colors[v] = c;
}

bool color_allowed(const ChainState& s, Vertex v, Color c) {
  const auto& g = *s.graph;
  for (int i = 0; i < g.degree(); ++i)
    if (s.colors[g.neighbor(v, i)] == c) return false;
  return true;
}

int metropolis_step(ChainState& state, Rng& rng) {
  const std::uint64_t r = rng.below(3 * static_cast<std::uint64_t>(state.graph->size()));
  const auto v = static_cast<Vertex>(r / 3);
  const auto c = static_cast<Color>(r % 3);
  if (state.colors[v] == c || !color_allowed(state, v, c)) return 0;
  state.recolor(v, c);
  return 1;
}

Coloring metropolis_step(const Coloring& chi, Rng& rng) {
  ChainState s(chi);
  metropolis_step(s, rng);
  return s.snapshot();
}

std::vector<std::vector<Vertex>> connected_blocks(const TorusGraph& g, int max_size) {
  std::set<std::vector<Vertex>> found;
  std::vector<std::vector<Vertex>> frontier;
  for (Vertex v = 0; v < g.size(); ++v) frontier.push_back({v});
  for (int size = 1; size <= max_size && !frontier.empty(); ++size) {
    std::vector<std::vector<Vertex>> next;
    for (auto& block : frontier) {
      if (!found.insert(block).second) continue;
      if (size == max_size) continue;
      for (Vertex v : block)
        for (int i = 0; i < g.degree(); ++i) {
          const Vertex u = g.neighbor(v, i);
          if (std::binary_search(block.begin(), block.end(), u)) continue;
          auto grown = block;
          grown.insert(std::upper_bound(grown.begin(), grown.end(), u), u);
          next.push_back(std::move(grown));
        }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  return {found.begin(), found.end()};
}

BlockChain::BlockChain(TorusPtr graph, int block_size, const Rational& rho)
    : graph_(std::move(graph)), block_size_(block_size) {
  if (block_size < 1) fail(ErrorCode::InvalidArgument, "block size must be >= 1");
  const BigInt cap = floor_of(rho * Rational(graph_->size()));
  if (BigInt(block_size) > cap)
    fail(ErrorCode::InvalidArgument, "block size " + std::to_string(block_size) + " exceeds floor(rho L^d) = " + cap.str());
  if (block_size > kMaxBlockSize)
    fail(ErrorCode::InvalidArgument, "block size " + std::to_string(block_size) + " exceeds the supported maximum " +
                                         std::to_string(kMaxBlockSize));
  blocks_ = connected_blocks(*graph_, block_size);
}

std::vector<std::vector<Color>> BlockChain::recolorings(const ChainState& s, const std::vector<Vertex>& block) const {
  const auto& g = *graph_;
  const std::size_t b = block.size();
  std::vector<std::vector<Color>> out;
  std::vector<Color> tuple(b, 0);
  // Odometer over {0,1,2}^b in lexicographic order.
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < b && ok; ++i) {
      const Vertex v = block[i];
      for (int k = 0; k < g.degree() && ok; ++k) {
        const Vertex u = g.neighbor(v, k);
        const auto it = std::lower_bound(block.begin(), block.end(), u);
        const Color cu = (it != block.end() && *it == u) ? tuple[static_cast<std::size_t>(it - block.begin())] : s.colors[u];
        ok = cu != tuple[i];
      }
    }
    if (ok) out.push_back(tuple);
    std::size_t pos = b;
    while (pos > 0) {
      --pos;
      if (++tuple[pos] < 3) break;
      tuple[pos] = 0;
      if (pos == 0) return out;
    }
    if (b == 0) return out;
  }
}

int BlockChain::step(ChainState& state, Rng& rng) const {
  const auto& block = blocks_[rng.below(blocks_.size())];
  const auto options = recolorings(state, block);
  // The current colouring of the block is always among the options.
  const auto& pick = options[rng.below(options.size())];
  int changed = 0;
  for (std::size_t i = 0; i < block.size(); ++i)
    if (state.colors[block[i]] != pick[i]) {
      state.recolor(block[i], pick[i]);
      ++changed;
    }
  return changed;
}

Coloring rho_local_step(const Coloring& chi, const BlockChain& chain, Rng& rng) {
  ChainState s(chi);
  chain.step(s, rng);
  return s.snapshot();
}

Trajectory run(const Coloring& start, const ChainSpec& spec, const StepObserver& observer) {
  if (spec.stride == 0) fail(ErrorCode::InvalidArgument, "stride must be >= 1");
  const auto& graph = start.graph();
  const PhaseClassifier classifier(*graph, spec.rho);
  std::optional<BlockChain> block;
  if (spec.kind == ChainKind::RhoLocalBlock) block.emplace(graph, spec.block_size, spec.rho);

  Trajectory traj;
  traj.sample_stride = spec.stride;
  traj.steps = spec.steps;
  traj.start_phase = classifier.classify(start.imbalance());
  const Phase target = traj.start_phase == Phase::EvenPhase  ? Phase::OddPhase
                       : traj.start_phase == Phase::OddPhase ? Phase::EvenPhase
                                                             : Phase::Balanced;

  ChainState state(start);
  Rng rng(spec.seed);
  auto record = [&](std::uint64_t t, Phase p) {
    if (t % spec.stride == 0) {
      traj.imbalances.push_back(state.imbalance);
      traj.phase_tags.push_back(p);
    }
    if (p == Phase::Balanced) ++traj.balanced_steps;
    if (traj.start_phase != Phase::Balanced && !traj.escape_step && p == target) traj.escape_step = t;
  };
  record(0, traj.start_phase);
  for (std::uint64_t t = 1; t <= spec.steps; ++t) {
    const int changed = block ? block->step(state, rng) : metropolis_step(state, rng);
    if (observer) observer(t, state, changed);
    record(t, classifier.classify(state.imbalance));
  }
  return traj;
}

}  // namespace torcol
