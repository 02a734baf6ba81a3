#include "torcol/coloring.hpp"

#include <fstream>
#include "json.hpp"
#include <sstream>

#include "torcol/error.hpp"

namespace torcol {

std::optional<Edge> first_conflict(const TorusGraph& g, std::span<const Color> colors) {
  for (Vertex v = 0; v < g.size(); ++v)
    for (int axis = 0; axis < g.dim(); ++axis) {
      // Each edge is visited once, from the endpoint it leaves in the + direction.
      const Vertex u = g.neighbor(v, Direction{axis + 1});
      if (colors[v] == colors[u]) return g.canonical_edge(v, u);
    }
  return std::nullopt;
}

std::int64_t imbalance_of(const TorusGraph& g, std::span<const Color> colors) {
  std::int64_t imb = 0;
  for (Vertex v = 0; v < g.size(); ++v)
    if (colors[v] == 0) imb += g.parity(v) == Parity::Even ? 1 : -1;
  return imb;
}

Coloring::Coloring(TorusPtr graph, std::span<const Color> colors)
    : graph_(std::move(graph)), packed_((graph_->size() + 3) / 4, 0) {
  for (Vertex v = 0; v < graph_->size(); ++v) packed_[v >> 2] |= static_cast<std::uint8_t>(colors[v] << (2 * (v & 3)));
  imbalance_ = imbalance_of(*graph_, colors);
}

Coloring Coloring::validate(TorusPtr graph, std::span<const Color> colors) {
  if (colors.size() != graph->size())
    fail(ErrorCode::LengthMismatch, "expected " + std::to_string(graph->size()) + " colours, got " +
                                        std::to_string(colors.size()));
  for (std::size_t i = 0; i < colors.size(); ++i)
    if (colors[i] > 2)
      fail(ErrorCode::BadValue, "colour value " + std::to_string(int(colors[i])) + " at index " + std::to_string(i));
  if (auto e = first_conflict(*graph, colors))
    fail(ErrorCode::ImproperColoring, "monochromatic edge {" + std::to_string(e->low) + ", " +
                                          std::to_string(graph->other_end(*e)) + "}");
  return Coloring(std::move(graph), colors);
}

std::vector<Color> Coloring::to_vector() const {
  std::vector<Color> out(size());
  for (Vertex v = 0; v < size(); ++v) out[v] = (*this)[v];
  return out;
}

VertexSet Coloring::zero_set() const {
  VertexSet z(graph_);
  for (Vertex v = 0; v < size(); ++v)
    if ((*this)[v] == 0) z.insert(v);
  return z;
}

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Balanced: return "balanced";
    case Phase::EvenPhase: return "even";
    case Phase::OddPhase: return "odd";
  }
  return "?";
}

PhaseClassifier::PhaseClassifier(const TorusGraph& g, Rational rho) : rho_(std::move(rho)) {
  if (rho_ <= 0 || rho_ >= 1) fail(ErrorCode::InvalidArgument, "rho must lie in (0, 1), got " + to_string(rho_));
  limit_ = floor_of(rho_ * Rational(g.size()) / 2).convert_to<std::int64_t>();
}

PhaseClass classify(const Coloring& chi, const Rational& rho) {
  const PhaseClassifier c(*chi.graph(), rho);
  return PhaseClass{c.classify(chi.imbalance()), rho, chi.imbalance()};
}

Coloring ground_state(TorusPtr graph, Parity zero_on) {
  std::vector<Color> colors(graph->size());
  for (Vertex v = 0; v < graph->size(); ++v) colors[v] = graph->parity(v) == zero_on ? 0 : 1;
  return Coloring::validate(std::move(graph), colors);
}

std::string coloring_to_json(const Coloring& chi) {
  nlohmann::json j;
  j["L"] = chi.graph()->side();
  j["d"] = chi.graph()->dim();
  std::vector<int> colors;
  colors.reserve(chi.size());
  for (Vertex v = 0; v < chi.size(); ++v) colors.push_back(chi[v]);
  j["colors"] = colors;
  return j.dump();
}

Coloring coloring_from_json(std::string_view text, std::uint64_t vertex_budget) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("coloring JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("L") || !j.contains("d") || !j.contains("colors") || !j["colors"].is_array())
    fail(ErrorCode::InvalidArgument, "coloring JSON needs integer fields L, d and array field colors");
  auto graph = TorusGraph::make(j["L"].get<int>(), j["d"].get<int>(), vertex_budget);
  std::vector<Color> colors;
  colors.reserve(j["colors"].size());
  for (std::size_t i = 0; i < j["colors"].size(); ++i) {
    const auto& c = j["colors"][i];
    if (!c.is_number_integer() || c.get<long long>() < 0 || c.get<long long>() > 2)
      fail(ErrorCode::BadValue, "colour value " + c.dump() + " at index " + std::to_string(i));
    colors.push_back(static_cast<Color>(c.get<int>()));
  }
  return Coloring::validate(std::move(graph), colors);
}

Coloring read_coloring_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return coloring_from_json(ss.str());
}

void write_coloring_file(const Coloring& chi, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << coloring_to_json(chi) << '\n';
}

}  // namespace torcol
