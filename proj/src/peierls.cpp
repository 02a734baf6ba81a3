#include "torcol/peierls.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "torcol/error.hpp"

namespace torcol {

namespace {

Parity near_of(const Cutset& cs) { return cs.parity; }

// 2d - deg <= sqrt(d), exactly.
bool near_full_degree(int deg, int dim) {
  const int gap = 2 * dim - deg;
  return gap <= 0 || gap * gap <= dim;
}

Rational pow_rational(const Rational& base, std::size_t e) {
  Rational r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

BigInt pow_int(int base, std::size_t e) {
  BigInt r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

bool lex_less(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Approximation make_approximation(VertexSet a_near, VertexSet a_far, Parity near) {
  const auto graph = a_near.graph();
  Approximation a;
  a.near = near;
  const VertexSet far_rest = VertexSet::parity_class(graph, opposite(near)) - a_far;
  a.q_near = a_near & exterior_boundary(far_rest);
  a.q_far = far_rest & exterior_boundary(a_near);
  a.a_near = std::move(a_near);
  a.a_far = std::move(a_far);
  return a;
}

Approximation identity_approximation(const Cutset& cs) {
  const Parity near = near_of(cs);
  return make_approximation(cs.W.restrict_to(near), cs.W.restrict_to(opposite(near)), near);
}

bool is_approximation(const Approximation& a, const Cutset& cs) {
  const auto& graph = cs.W.graph();
  const auto& g = *graph;
  const Parity near = near_of(cs);
  const Parity far = opposite(near);
  if (a.near != near) return false;
  if (!a.a_near.within(near) || !a.a_far.within(far)) return false;
  if (!cs.W.restrict_to(near).subset_of(a.a_near)) return false;
  if (!a.a_far.subset_of(cs.W.restrict_to(far))) return false;
  bool ok = true;
  a.a_near.for_each([&](Vertex x) {
    if (ok) ok = near_full_degree(degree_into(a.a_far, x), g.dim());
  });
  if (!ok) return false;
  const VertexSet near_rest = VertexSet::parity_class(graph, near) - a.a_near;
  const VertexSet far_rest = VertexSet::parity_class(graph, far) - a.a_far;
  far_rest.for_each([&](Vertex y) {
    if (ok) ok = near_full_degree(degree_into(near_rest, y), g.dim());
  });
  return ok;
}

VertexSet shifted_boundary(const VertexSet& w, Direction s) {
  const auto& g = *w.graph();
  VertexSet out(w.graph());
  const Direction back = s.reversed();
  interior_boundary(w).for_each([&](Vertex x) {
    if (!w.contains(g.neighbor(x, back))) out.insert(x);
  });
  return out;
}

ShiftContext make_shift_context(const Coloring& chi, const Cutset& cs, const Approximation& a, Direction s) {
  if (!chi.graph()->valid_direction(s)) fail(ErrorCode::InvalidArgument, "direction out of range");
  ShiftContext ctx{chi, cs, a, s, shifted_boundary(cs.W, s), VertexSet(chi.graph()), VertexSet(chi.graph())};
  ctx.c_set = ctx.w_s & a.a_far & shift(a.q_near, s);
  ctx.d_set = ctx.w_s - ctx.c_set;
  return ctx;
}

Coloring shift_coloring(const ShiftContext& ctx, const VertexSet& subset) {
  if (!subset.subset_of(ctx.w_s)) fail(ErrorCode::InvalidArgument, "S is not contained in W^s");
  const auto& graph = ctx.chi.graph();
  const auto& g = *graph;
  const Direction back = ctx.s.reversed();
  std::vector<Color> out(g.size());
  for (Vertex v = 0; v < g.size(); ++v) {
    if (subset.contains(v))
      out[v] = 0;
    else if (!ctx.cs.W.contains(v) || ctx.w_s.contains(v))
      out[v] = ctx.chi[v];
    else
      out[v] = transpose12(ctx.chi[g.neighbor(v, back)]);
  }
  return Coloring::validate(graph, out);
}

Coloring reconstruct(const Coloring& image, const VertexSet& w, Direction s) {
  const auto& graph = image.graph();
  const auto& g = *graph;
  if (!g.valid_direction(s)) fail(ErrorCode::InvalidArgument, "direction out of range");
  std::vector<Color> out(g.size());
  for (Vertex v = 0; v < g.size(); ++v)
    out[v] = w.contains(v) ? transpose12(image[g.neighbor(v, s)]) : image[v];
  return Coloring::validate(graph, out);
}

Rational flow_weight(const ShiftContext& ctx, const Coloring& image) {
  const VertexSet subset = image.zero_set() & ctx.w_s;
  bool in_image = false;
  try {
    in_image = shift_coloring(ctx, subset) == image;
  } catch (const Error&) {
    in_image = false;
  }
  if (!in_image) fail(ErrorCode::NotInImage, "colouring is not in the image of the shift map");
  const std::size_t c_zero = (ctx.c_set & subset).count();
  const std::size_t c_rest = ctx.c_set.count() - c_zero;
  return pow_rational(Rational(1, 4), c_zero) * pow_rational(Rational(3, 4), c_rest) *
         pow_rational(Rational(1, 2), ctx.d_set.count());
}

DirectionChoice choose_direction(const Cutset& cs, const Approximation& a) {
  const auto& g = *cs.W.graph();
  const Parity near = near_of(cs);
  const auto w_near = static_cast<std::int64_t>(near == Parity::Even ? cs.w_e : cs.w_o);
  const auto w_far = static_cast<std::int64_t>(near == Parity::Even ? cs.w_o : cs.w_e);
  const std::int64_t dim = g.dim();
  DirectionChoice choice;
  std::optional<std::size_t> met;
  std::size_t widest = 0;
  for (int i = 0; i < g.degree(); ++i) {
    DirectionDiagnostic diag;
    diag.s = Direction::from_index(i);
    diag.w_s_size = shifted_boundary(cs.W, diag.s).count();
    diag.overlap = (shift(a.q_near, diag.s) & a.q_far).count();
    const auto ws = static_cast<std::int64_t>(diag.w_s_size);
    const auto x = static_cast<std::int64_t>(diag.overlap);
    diag.enough_boundary = 5 * ws >= 4 * (w_far - w_near);
    diag.small_overlap = dim * x * x <= 25 * ws * ws;
    if (!met && diag.enough_boundary && diag.small_overlap) met = choice.diagnostics.size();
    if (!choice.diagnostics.empty() && diag.w_s_size > choice.diagnostics[widest].w_s_size)
      widest = choice.diagnostics.size();
    choice.diagnostics.push_back(diag);
  }
  choice.met_conditions = met.has_value();
  choice.s = choice.diagnostics[met ? *met : widest].s;
  return choice;
}

VertexSet uncertainty_set(const Approximation& a, const Coloring& image, Direction s) {
  return a.q_near & shift(image.zero_set(), s.reversed());
}

Goodness evaluate_triple(const Triple& t, const Approximation& a, const VertexSet& u) {
  const auto& g = *a.q_near.graph();
  Goodness r;
  r.containments = t.k.subset_of(a.q_far) && t.l.subset_of(u) && t.m.subset_of(a.q_near - u);
  const VertexSet cover = t.k | t.l | t.m;
  bool is_cover = true;
  a.q_near.for_each([&](Vertex x) {
    for (int i = 0; i < g.degree(); ++i) {
      const Vertex y = g.neighbor(x, i);
      if (a.q_far.contains(y) && !cover.contains(x) && !cover.contains(y)) is_cover = false;
    }
  });
  r.is_cover = is_cover;
  // A cover vertex is needed iff some Q-edge at it has its other end uncovered.
  bool minimal = true;
  cover.for_each([&](Vertex v) {
    if (!minimal) return;
    const VertexSet& side = a.q_near.contains(v) ? a.q_far : a.q_near;
    if (!a.q_near.contains(v) && !a.q_far.contains(v)) {
      minimal = false;
      return;
    }
    bool needed = false;
    for (int i = 0; i < g.degree() && !needed; ++i) {
      const Vertex y = g.neighbor(v, i);
      needed = side.contains(y) && !cover.contains(y);
    }
    minimal = needed;
  });
  r.inclusion_minimal = minimal;
  const VertexSet ext = exterior_boundary(u - t.l);
  r.k_is_boundary = t.k == (ext & a.q_far);
  r.k_is_full_boundary = t.k == ext;
  return r;
}

HatTriple hat_triple(const Cutset& cs, const Approximation& a, const Coloring& image, Direction s) {
  HatTriple h;
  h.u = uncertainty_set(a, image, s);
  h.triple.k = cs.W & a.q_far;
  h.triple.l = h.u - cs.W;
  h.triple.m = (a.q_near - h.u) - cs.W;
  h.goodness = evaluate_triple(h.triple, a, h.u);
  return h;
}

std::size_t min_vertex_cover_size(const Approximation& a) {
  const auto& g = *a.q_near.graph();
  const std::vector<Vertex> left = a.q_near.members();
  std::vector<std::ptrdiff_t> owner(g.size(), -1);
  std::vector<bool> visited;
  std::function<bool(Vertex)> augment = [&](Vertex x) {
    for (int i = 0; i < g.degree(); ++i) {
      const Vertex y = g.neighbor(x, i);
      if (!a.q_far.contains(y) || visited[y]) continue;
      visited[y] = true;
      if (owner[y] < 0 || augment(static_cast<Vertex>(owner[y]))) {
        owner[y] = x;
        return true;
      }
    }
    return false;
  };
  std::size_t matched = 0;
  for (Vertex x : left) {
    visited.assign(g.size(), false);
    if (augment(x)) ++matched;
  }
  return matched;
}

std::optional<MinimalTriple> minimal_good_triple(const Approximation& a, const VertexSet& u, int max_u_bits) {
  const auto& graph = a.q_near.graph();
  const auto& g = *graph;
  const std::vector<Vertex> um = u.members();
  if (um.size() > static_cast<std::size_t>(max_u_bits) || um.size() >= 63) return std::nullopt;
  const VertexSet rest = a.q_near - u;
  std::optional<MinimalTriple> best;
  std::size_t scanned = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << um.size()); ++mask) {
    ++scanned;
    Triple t{VertexSet(graph), VertexSet(graph), VertexSet(graph)};
    for (std::size_t i = 0; i < um.size(); ++i)
      if ((mask >> i) & 1u) t.l.insert(um[i]);
    t.k = exterior_boundary(u - t.l) & a.q_far;
    const VertexSet open = a.q_far - t.k;
    rest.for_each([&](Vertex x) {
      for (int i = 0; i < g.degree(); ++i)
        if (open.contains(g.neighbor(x, i))) {
          t.m.insert(x);
          break;
        }
    });
    const Goodness good = evaluate_triple(t, a, u);
    if (!good.good()) continue;
    bool better = !best;
    if (best) {
      const std::size_t size_new = t.k.count() + t.l.count();
      const std::size_t size_old = best->triple.k.count() + best->triple.l.count();
      if (size_new != size_old) {
        better = size_new < size_old;
      } else {
        const auto kn = t.k.members(), ko = best->triple.k.members();
        better = kn != ko ? lex_less(kn, ko) : lex_less(t.l.members(), best->triple.l.members());
      }
    }
    if (better) best = MinimalTriple{std::move(t), good, 0, 0};
  }
  if (best) {
    best->subsets_scanned = scanned;
    best->min_cover_size = min_vertex_cover_size(a);
  }
  return best;
}

double Surd::to_double() const {
  const double c = torcol::to_double(coef);
  return has_sqrt3 ? c * std::sqrt(3.0) : c;
}

bool less_equal(const Rational& q, const Surd& s) {
  if (!s.has_sqrt3) return q <= s.coef;
  const Rational lhs = q * q;
  const Rational rhs = 3 * s.coef * s.coef;
  if (s.coef >= 0) return q <= 0 || lhs <= rhs;
  return q < 0 && lhs >= rhs;
}

Surd sqrt3_over_2_power(std::size_t m) {
  Surd s;
  s.coef = Rational(pow_int(3, m / 2), pow_int(2, m));
  s.has_sqrt3 = (m % 2) == 1;
  return s;
}

Surd b_weight(std::size_t w_e, std::size_t w_o, std::size_t k0, std::size_t l0, std::size_t k_prime,
              std::size_t l_prime) {
  if (w_o < w_e) fail(ErrorCode::InvalidArgument, "B(K',L') needs w_o >= w_e");
  Surd s = sqrt3_over_2_power(w_o - w_e);
  const auto two_exp = static_cast<std::int64_t>(k0) - static_cast<std::int64_t>(k_prime) +
                       static_cast<std::int64_t>(l_prime);
  Rational factor(BigInt(1), pow_int(3, k0 + l0));
  if (two_exp >= 0)
    factor *= Rational(pow_int(2, static_cast<std::size_t>(two_exp)));
  else
    factor /= Rational(pow_int(2, static_cast<std::size_t>(-two_exp)));
  s.coef *= factor;
  return s;
}

}  // namespace torcol
