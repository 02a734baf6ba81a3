#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "torcol/rational.hpp"
#include "torcol/torus.hpp"

namespace torcol {

using Color = std::uint8_t;

// Proper 3-coloring of a torus, two bits per vertex. Always proper: every
// constructor validates.
class Coloring {
 public:
  // Throws LengthMismatch, BadValue(index) or ImproperColoring(edge).
  static Coloring validate(TorusPtr graph, std::span<const Color> colors);

  const TorusPtr& graph() const { return graph_; }
  std::size_t size() const { return graph_->size(); }

  Color operator[](Vertex v) const { return static_cast<Color>((packed_[v >> 2] >> (2 * (v & 3))) & 3u); }
  std::vector<Color> to_vector() const;

  // I(chi): the vertices coloured 0.
  VertexSet zero_set() const;
  // |I ∩ E| - |I ∩ O|.
  std::int64_t imbalance() const { return imbalance_; }

  friend bool operator==(const Coloring& a, const Coloring& b) { return a.packed_ == b.packed_; }

 private:
  Coloring(TorusPtr graph, std::span<const Color> colors);

  TorusPtr graph_;
  std::vector<std::uint8_t> packed_;
  std::int64_t imbalance_ = 0;
};

// Zero-set imbalance of a raw colour array (no validation).
std::int64_t imbalance_of(const TorusGraph& g, std::span<const Color> colors);

// First monochromatic edge of a raw array, if any.
std::optional<Edge> first_conflict(const TorusGraph& g, std::span<const Color> colors);

enum class Phase : std::uint8_t { Balanced = 0, EvenPhase = 1, OddPhase = 2 };

std::string_view phase_name(Phase p);

struct PhaseClass {
  Phase tag;
  Rational rho;
  std::int64_t imbalance;
};

// Classifies imbalances against rho * L^d / 2 with exact arithmetic. A value
// exactly on the threshold is Balanced.
class PhaseClassifier {
 public:
  // rho must lie in (0, 1).
  PhaseClassifier(const TorusGraph& g, Rational rho);

  Phase classify(std::int64_t imbalance) const {
    if (imbalance > limit_) return Phase::EvenPhase;
    if (imbalance < -limit_) return Phase::OddPhase;
    return Phase::Balanced;
  }
  const Rational& rho() const { return rho_; }
  // Largest |imbalance| still counted as Balanced: floor(rho L^d / 2).
  std::int64_t balanced_limit() const { return limit_; }

 private:
  Rational rho_;
  std::int64_t limit_;
};

PhaseClass classify(const Coloring& chi, const Rational& rho);

// Colour 0 on the zero_on class and 1 on the other class.
Coloring ground_state(TorusPtr graph, Parity zero_on);

// Interchange format {"L": int, "d": int, "colors": [...]}, row-major.
std::string coloring_to_json(const Coloring& chi);
Coloring coloring_from_json(std::string_view text, std::uint64_t vertex_budget = TorusGraph::kDefaultVertexBudget);
Coloring read_coloring_file(const std::string& path);
void write_coloring_file(const Coloring& chi, const std::string& path);

}  // namespace torcol
