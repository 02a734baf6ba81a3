#include "torcol/bounds.hpp"

#include <cmath>
#include <map>

#include "torcol/error.hpp"

namespace torcol {

namespace {

long double to_long_double(const Rational& q) {
  return static_cast<long double>(numerator(q)) / static_cast<long double>(denominator(q));
}

long double round12(long double x) { return std::round(x * 1e12L) / 1e12L; }

}  // namespace

long double binary_entropy(long double x) {
  if (x <= 0.0L || x >= 1.0L) return 0.0L;
  return -x * std::log2(x) - (1.0L - x) * std::log2(1.0L - x);
}

EntropyCondition entropy_condition(const Rational& rho) {
  if (rho <= 0 || rho >= 1) fail(ErrorCode::InvalidArgument, "rho must lie in (0, 1)");
  EntropyCondition c;
  c.rho = rho;
  const long double r = to_long_double(rho);
  c.h = binary_entropy(r);
  c.value = round12(c.h + r);
  c.satisfied = c.value < 1.0L;
  return c;
}

long double entropy_threshold(long double tol) {
  // H(x) + x is increasing on (0, 1/2): 0 at 0 and 3/2 at 1/2.
  long double lo = 0.0L, hi = 0.5L;
  while (hi - lo > tol) {
    const long double mid = (lo + hi) / 2;
    (binary_entropy(mid) + mid < 1.0L ? lo : hi) = mid;
  }
  return lo;
}

ChernoffCheck chernoff_bound_check(std::uint64_t m, const Rational& beta) {
  if (m == 0) fail(ErrorCode::InvalidArgument, "M must be at least 1");
  if (beta <= 0 || beta > Rational(1, 2)) fail(ErrorCode::InvalidArgument, "beta must lie in (0, 1/2]");
  ChernoffCheck c;
  c.m = m;
  c.beta = beta;
  const auto top = static_cast<std::uint64_t>(floor_of(beta * m));
  BigInt binom = 1;
  c.lhs = 0;
  for (std::uint64_t i = 0; i <= top; ++i) {
    c.lhs += binom;
    binom = binom * (m - i) / (i + 1);
  }
  c.rhs = std::exp2(binary_entropy(to_long_double(beta)) * static_cast<long double>(m));
  c.holds = static_cast<long double>(c.lhs) <= c.rhs;
  return c;
}

CompCount comp_count(const VertexSet& a, const VertexSet& b) {
  const auto& graph = a.graph();
  const auto& g = *graph;
  if (!a.within(Parity::Even) || !b.within(Parity::Odd))
    fail(ErrorCode::InvalidArgument, "A must lie in E and B in O");
  a.for_each([&](Vertex x) {
    for (int i = 0; i < g.degree(); ++i)
      if (b.contains(g.neighbor(x, i)))
        fail(ErrorCode::InvalidArgument,
             "A and B are joined by the edge " + std::to_string(x) + "-" + std::to_string(g.neighbor(x, i)));
  });
  const VertexSet removed = a | b | star_boundary(a) | star_boundary(b);
  CompCount c;
  c.comp = components(removed.complement()).size();
  c.bound = Rational(static_cast<std::int64_t>(g.size()), 2 * g.dim());
  c.holds = static_cast<std::size_t>(2 * g.dim()) * c.comp <= g.size();
  return c;
}

SmallClassCensus small_class_census(const StateIndex& idx, const Rational& rho) {
  const auto& g = *idx.graph();
  const PhaseClassifier classifier(g, rho);
  const auto n = static_cast<std::int64_t>(g.size());
  const std::int64_t d = g.dim();
  SmallClassCensus c;
  c.total = idx.size();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto colors = idx.colors(i);
    std::int64_t even = 0, odd = 0;
    for (Vertex v = 0; v < g.size(); ++v)
      if (colors[v] == 0) (g.parity(v) == Parity::Even ? even : odd) += 1;
    const std::int64_t mn = std::min(even, odd);
    // mn <= n / (4 sqrt d)  <=>  16 d mn^2 <= n^2
    const bool small = 16 * d * mn * mn <= n * n;
    const bool balanced = classifier.classify(even - odd) == Phase::Balanced;
    c.small += small;
    c.balanced += balanced;
    c.small_balanced += small && balanced;
  }
  c.fraction = c.total ? Rational(static_cast<std::int64_t>(c.small), static_cast<std::int64_t>(c.total)) : Rational(0);
  return c;
}

std::vector<FreeChoiceRecord> free_choice_check(const StateIndex& idx) {
  const auto& graph = idx.graph();
  const auto& g = *graph;
  if (g.size() > 24) fail(ErrorCode::InvalidArgument, "free-choice check is exhaustive; needs at most 24 vertices");
  std::map<std::uint32_t, std::size_t> by_zero_set;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto colors = idx.colors(i);
    std::uint32_t mask = 0;
    for (Vertex v = 0; v < g.size(); ++v)
      if (colors[v] == 0) mask |= 1u << v;
    ++by_zero_set[mask];
  }
  std::uint32_t even_mask = 0;
  for (Vertex v = 0; v < g.size(); ++v)
    if (g.parity(v) == Parity::Even) even_mask |= 1u << v;
  const std::uint32_t odd_mask = ((1u << g.size()) - 1) & ~even_mask;
  auto adjacent_any = [&](std::uint32_t x, std::uint32_t y) {
    for (Vertex v = 0; v < g.size(); ++v) {
      if (!((x >> v) & 1u)) continue;
      for (int i = 0; i < g.degree(); ++i)
        if ((y >> g.neighbor(v, i)) & 1u) return true;
    }
    return false;
  };
  auto to_set = [&](std::uint32_t mask) {
    VertexSet s(graph);
    for (Vertex v = 0; v < g.size(); ++v)
      if ((mask >> v) & 1u) s.insert(v);
    return s;
  };
  std::vector<FreeChoiceRecord> out;
  // Enumerate submasks of E and O.
  for (std::uint32_t a = even_mask;; a = (a - 1) & even_mask) {
    for (std::uint32_t b = odd_mask;; b = (b - 1) & odd_mask) {
      if (!adjacent_any(a, b)) {
        const VertexSet sa = to_set(a), sb = to_set(b);
        FreeChoiceRecord r;
        r.a = sa.members();
        r.b = sb.members();
        const auto it = by_zero_set.find(a | b);
        r.colorings = it == by_zero_set.end() ? 0 : it->second;
        r.exponent = star_boundary(sa).count() + star_boundary(sb).count() + comp_count(sa, sb).comp;
        r.holds = r.exponent >= 63 || r.colorings <= (std::size_t{1} << r.exponent);
        out.push_back(std::move(r));
      }
      if (b == 0) break;
    }
    if (a == 0) break;
  }
  return out;
}

}  // namespace torcol
