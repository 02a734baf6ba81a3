#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "torcol/coloring.hpp"
#include "torcol/rng.hpp"

namespace torcol {

enum class ChainKind : std::uint8_t { Metropolis, RhoLocalBlock };

struct ChainSpec {
  ChainKind kind = ChainKind::Metropolis;
  int block_size = 1;  // RhoLocalBlock only
  Rational rho{11, 50};
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::uint64_t stride = 1;
};

std::string_view chain_kind_name(ChainKind k);

// Mutable chain state: the colour array plus its running imbalance.
struct ChainState {
  TorusPtr graph;
  std::vector<Color> colors;
  std::int64_t imbalance = 0;

  explicit ChainState(const Coloring& chi);
  Coloring snapshot() const { return Coloring::validate(graph, colors); }
  void recolor(Vertex v, Color c);
};

// True iff colour c at v clashes with no neighbour.
bool color_allowed(const ChainState& s, Vertex v, Color c);

// One step of M_3. A single draw r = below(3n) picks vertex r / 3 and colour
// r % 3; the move is taken iff it keeps the colouring proper. Returns the
// number of vertices whose colour changed (0 or 1).
int metropolis_step(ChainState& state, Rng& rng);
Coloring metropolis_step(const Coloring& chi, Rng& rng);

// All connected vertex sets of size 1..max_size, each listed once with its
// members sorted; the list is sorted lexicographically.
std::vector<std::vector<Vertex>> connected_blocks(const TorusGraph& g, int max_size);

// Block heat-bath chain: pick a connected block uniformly from
// connected_blocks(g, block_size), then a uniform proper recolouring of the
// block given its surroundings. The proposal is symmetric, so the Metropolis
// acceptance ratio is always 1 and the uniform measure is stationary.
class BlockChain {
 public:
  static constexpr int kMaxBlockSize = 6;

  // InvalidArgument if block_size < 1, block_size > floor(rho L^d) or
  // block_size > kMaxBlockSize.
  BlockChain(TorusPtr graph, int block_size, const Rational& rho);

  const std::vector<std::vector<Vertex>>& blocks() const { return blocks_; }
  int block_size() const { return block_size_; }

  // Proper recolourings of the block consistent with the rest of the state,
  // in lexicographic order of the block's colour tuple.
  std::vector<std::vector<Color>> recolorings(const ChainState& s, const std::vector<Vertex>& block) const;

  // Returns the Hamming distance of the transition.
  int step(ChainState& state, Rng& rng) const;

 private:
  TorusPtr graph_;
  int block_size_;
  std::vector<std::vector<Vertex>> blocks_;
};

Coloring rho_local_step(const Coloring& chi, const BlockChain& chain, Rng& rng);

struct Trajectory {
  std::uint64_t sample_stride = 1;
  std::uint64_t steps = 0;
  std::vector<std::int64_t> imbalances;  // state at step t * stride
  std::vector<Phase> phase_tags;
  Phase start_phase = Phase::Balanced;
  // First step in the phase opposite to start_phase. Passing through Balanced
  // does not count. Never set when the start is Balanced.
  std::optional<std::uint64_t> escape_step;
  std::uint64_t balanced_steps = 0;  // states t in [0, steps] that were Balanced

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Called after every step with the step number, the state and the Hamming
// distance of the transition.
using StepObserver = std::function<void(std::uint64_t step, const ChainState& state, int changed)>;

// Deterministic in (start, spec): the generator is seeded with spec.seed.
Trajectory run(const Coloring& start, const ChainSpec& spec, const StepObserver& observer = {});

}  // namespace torcol
