#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "torcol/coloring.hpp"
#include "torcol/glauber.hpp"
#include "torcol/rational.hpp"

namespace torcol {

// Every proper 3-colouring of a small torus, in lexicographic order of the
// colour array, with a dense index.
class StateIndex {
 public:
  static constexpr std::uint64_t kDefaultMaxStates = 2'000'000;

  // Backtracking with forward checking. BudgetExceeded when the state count
  // is known (or found) to exceed max_states; no partial result is returned.
  static StateIndex enumerate(TorusPtr graph, std::uint64_t max_states = kDefaultMaxStates);

  const TorusPtr& graph() const { return graph_; }
  std::size_t size() const { return imbalance_.size(); }

  std::span<const Color> colors(std::size_t i) const { return {flat_.data() + i * stride_, stride_}; }
  std::int64_t imbalance(std::size_t i) const { return imbalance_[i]; }
  Coloring coloring(std::size_t i) const { return Coloring::validate(graph_, colors(i)); }
  std::optional<std::size_t> find(std::span<const Color> colors) const;

  // One state per orbit of the group generated by translations, signed axis
  // permutations and colour permutations.
  std::vector<std::size_t> orbit_representatives() const;

 private:
  TorusPtr graph_;
  std::size_t stride_ = 0;
  std::vector<Color> flat_;
  std::vector<std::int64_t> imbalance_;
};

// Independent count of proper colourings: slices are colourings of T_{L,d-1},
// adjacent slices must differ at every site, and the count is trace(T^L).
// BudgetExceeded when the slice state space exceeds max_slice_states.
BigInt transfer_matrix_count(int side, int dim, std::size_t max_slice_states = 4000);

struct ClassMeasures {
  Rational balanced;
  Rational even_phase;
  Rational odd_phase;
  std::size_t balanced_count = 0;
  std::size_t even_count = 0;
  std::size_t odd_count = 0;
};

// Exact uniform-measure probabilities of the three phase classes.
ClassMeasures stationary_measure(const StateIndex& idx, const Rational& rho);

struct KernelEntry {
  std::uint32_t col;
  Rational p;
};

// Sparse exact transition matrix over a StateIndex (or hand-built rows).
class ExactKernel {
 public:
  ExactKernel() = default;
  ExactKernel(std::vector<std::vector<KernelEntry>> rows, std::string label);

  std::size_t size() const { return rows_.size(); }
  const std::vector<KernelEntry>& row(std::size_t i) const { return rows_[i]; }
  Rational at(std::size_t i, std::size_t j) const;
  const std::string& label() const { return label_; }

  bool symmetric() const;
  bool rows_sum_to_one() const;
  bool doubly_stochastic() const;
  std::size_t nonzeros() const;

 private:
  std::vector<std::vector<KernelEntry>> rows_;  // sorted by column
  std::string label_;
};

// Builds the exact kernel of the chain described by spec (Metropolis or the
// block chain). BudgetExceeded when idx.size() > max_states.
ExactKernel exact_kernel(const StateIndex& idx, const ChainSpec& spec, std::size_t max_states = 50'000);

struct MixingResult {
  std::uint64_t tau = 0;
  // Worst-start total variation distance at t = 0, 1, ..., first t with
  // distance <= threshold.
  std::vector<double> tv_curve;
};

// tau = min{t0 : max_x ||P^t(x,.) - uniform||_tv <= threshold for all t > t0}.
// Worst-start distance is non-increasing in t, so the scan stops at the first
// crossing. starts restricts the maximum to the given rows (pass orbit
// representatives when the kernel commutes with the symmetry group); empty
// means every state. Throws Reducible for reducible or periodic kernels,
// HypothesisViolated when the uniform measure is not stationary, NotMixed when
// cap steps pass without crossing.
MixingResult exact_mixing_time(const ExactKernel& kernel, std::span<const std::size_t> starts = {},
                               std::uint64_t cap = 100'000, double threshold = 0.36787944117144233);

// Worst-start TV distance after each of steps steps, starting at t = 0.
std::vector<double> tv_curve(const ExactKernel& kernel, std::span<const std::size_t> starts, std::uint64_t steps);

struct ConductanceReport {
  Rational pi_a;  // even phase
  Rational pi_m;  // balanced
  std::optional<Rational> bound;        // pi(A) / (8 pi(M)); nullopt is +infinity
  std::optional<Rational> symmetrized;  // (1 - pi(A)) / (16 pi(M))
  std::size_t transitions_checked = 0;
};

// pi(A) / (8 pi(M)); nullopt (+infinity) when pi(M) = 0.
std::optional<Rational> bottleneck_bound(const Rational& pi_a, const Rational& pi_m);

// Checks pi(A) <= 1/2 and that no transition leaves A except into M, then
// evaluates the bound. HypothesisViolated (with the witness pair) otherwise.
ConductanceReport exact_conductance_bound(const StateIndex& idx, const ExactKernel& kernel, const Rational& rho);

// P(chain started at start has visited target by step t), t = 0..steps.
std::vector<double> hitting_probability(const ExactKernel& kernel, std::size_t start,
                                        const std::vector<bool>& target, std::uint64_t steps);

}  // namespace torcol
