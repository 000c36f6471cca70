#pragma once

// ADE root types, singularity sets, their discriminant forms, Dynkin-graph
// perturbations and the action of diagram automorphisms on discriminants.

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qlc/arith.hpp"
#include "qlc/fqf.hpp"

namespace qlc {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RootType {
  char family = 'A';  // 'A', 'D' or 'E'
  int index = 1;

  int rank() const { return index; }
  std::string str() const { return std::string(1, family) + std::to_string(index); }

  static int family_rank(char f) { return f == 'E' ? 0 : f == 'D' ? 1 : 2; }
  /// Canonical order: E before D before A, larger index first.
  friend bool operator<(const RootType& a, const RootType& b) {
    if (a.family != b.family) return family_rank(a.family) < family_rank(b.family);
    return a.index > b.index;
  }
  friend bool operator==(const RootType&, const RootType&) = default;

  static bool valid(char family, int index) {
    switch (family) {
      case 'A': return index >= 1;
      case 'D': return index >= 4;
      case 'E': return index >= 6 && index <= 8;
      default: return false;
    }
  }
};

/// Multiset of root types kept in canonical order.
class SingularitySet {
 public:
  SingularitySet() = default;
  explicit SingularitySet(std::vector<RootType> comps) : comps_(std::move(comps)) {
    std::sort(comps_.begin(), comps_.end());
  }

  const std::vector<RootType>& components() const { return comps_; }
  bool empty() const { return comps_.empty(); }
  int mu() const {
    int m = 0;
    for (const auto& c : comps_) m += c.rank();
    return m;
  }

  friend bool operator==(const SingularitySet&, const SingularitySet&) = default;
  friend bool operator<(const SingularitySet& a, const SingularitySet& b) {
    return std::lexicographical_compare(a.comps_.begin(), a.comps_.end(), b.comps_.begin(), b.comps_.end());
  }

 private:
  std::vector<RootType> comps_;
};

inline std::string format_set(const SingularitySet& s) {
  std::string out;
  const auto& c = s.components();
  for (std::size_t i = 0; i < c.size();) {
    std::size_t j = i;
    while (j < c.size() && c[j] == c[i]) ++j;
    if (!out.empty()) out += "+";
    if (j - i > 1) out += std::to_string(j - i);
    out += c[i].str();
    i = j;
  }
  return out;
}

inline SingularitySet parse_set(std::string_view text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty()) throw ParseError("empty singularity set");
  std::vector<RootType> comps;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = t.find('+', pos);
    std::string tok = t.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    std::size_t i = 0;
    while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
    int count = 1;
    if (i > 0) {
      if (i > 4) throw ParseError("multiplicity too large in '" + tok + "'");
      count = std::stoi(tok.substr(0, i));
    }
    if (count < 1 || i >= tok.size()) throw ParseError("malformed term '" + tok + "'");
    char fam = tok[i];
    std::string idx = tok.substr(i + 1);
    if (idx.empty() || idx.size() > 4 ||
        !std::all_of(idx.begin(), idx.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
      throw ParseError("malformed term '" + tok + "'");
    int index = std::stoi(idx);
    if (!RootType::valid(fam, index)) throw ParseError("index out of range in '" + tok + "'");
    for (int c = 0; c < count; ++c) comps.push_back({fam, index});
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return SingularitySet(std::move(comps));
}

// ---------------------------------------------------------------------------
// Discriminant forms

/// Discriminant form of the negative definite root lattice.
inline Fqf disc_form(const RootType& t) {
  const int n = t.index;
  switch (t.family) {
    case 'A': return Fqf::cyclic(-n, n + 1);
    case 'D':
      if (n % 2 == 1) return Fqf::cyclic(-n, 4);
      switch (n % 8) {
        case 0: return Fqf::u(1);
        case 4: return Fqf::v(1);
        case 6: return direct_sum(Fqf::cyclic(1, 2), Fqf::cyclic(1, 2));
        default: return direct_sum(Fqf::cyclic(-1, 2), Fqf::cyclic(-1, 2));
      }
    default:
      if (n == 6) return Fqf::cyclic(2, 3);
      if (n == 7) return Fqf::cyclic(1, 2);
      return {};
  }
}

/// The orthogonal sum of the component forms, with the generator indices that
/// each component occupies in the canonical block order.
struct SetDisc {
  Fqf form;
  std::vector<std::vector<int>> coords;  // per component, in that component's block order
};

inline SetDisc set_disc(const SingularitySet& s) {
  std::vector<FqfBlock> all;
  std::vector<Fqf> parts;
  for (const auto& c : s.components()) {
    parts.push_back(disc_form(c));
    all.insert(all.end(), parts.back().blocks().begin(), parts.back().blocks().end());
  }
  SetDisc out{Fqf(all), {}};
  // Generator offset of each block in the sorted form.
  const auto& blocks = out.form.blocks();
  std::vector<int> offset(blocks.size() + 1, 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) offset[i + 1] = offset[i] + blocks[i].rank();
  std::vector<bool> used(blocks.size(), false);
  for (const auto& part : parts) {
    std::vector<int> idx;
    for (const auto& b : part.blocks()) {
      std::size_t at = 0;
      while (used[at] || !(blocks[at] == b)) ++at;
      used[at] = true;
      for (int r = 0; r < b.rank(); ++r) idx.push_back(offset[at] + r);
    }
    out.coords.push_back(std::move(idx));
  }
  return out;
}

inline Fqf disc_form(const SingularitySet& s) { return set_disc(s).form; }

// ---------------------------------------------------------------------------
// Enumeration

/// All multisets of root types with 1 <= total rank <= mu_max, in a fixed order.
inline std::vector<SingularitySet> enumerate_sets(int mu_max) {
  std::vector<RootType> types;
  for (int i = 8; i >= 6; --i)
    if (i <= mu_max) types.push_back({'E', i});
  for (int i = mu_max; i >= 4; --i) types.push_back({'D', i});
  for (int i = mu_max; i >= 1; --i) types.push_back({'A', i});

  std::vector<SingularitySet> out;
  std::vector<RootType> cur;
  auto rec = [&](auto&& self, std::size_t from, int left) -> void {
    if (!cur.empty()) out.emplace_back(cur);
    for (std::size_t i = from; i < types.size(); ++i) {
      if (types[i].rank() > left) continue;
      cur.push_back(types[i]);
      self(self, i, left - types[i].rank());
      cur.pop_back();
    }
  };
  rec(rec, 0, mu_max);
  return out;
}

// ---------------------------------------------------------------------------
// Dynkin graphs and perturbations

/// Adjacency bitmasks of the Dynkin diagram.
inline std::vector<std::uint32_t> dynkin_graph(const RootType& t) {
  const int n = t.index;
  std::vector<std::uint32_t> adj(n, 0);
  auto link = [&](int a, int b) {
    adj[a] |= 1u << b;
    adj[b] |= 1u << a;
  };
  if (t.family == 'A') {
    for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
  } else if (t.family == 'D') {
    for (int i = 0; i + 2 < n; ++i) link(i, i + 1);
    link(n - 3, n - 1);
  } else {
    for (int i = 0; i + 2 < n; ++i) link(i, i + 1);
    link(2, n - 1);
  }
  return adj;
}

/// Root types of the connected components of an induced subgraph of an ADE diagram.
inline std::vector<RootType> classify_subgraph(const std::vector<std::uint32_t>& adj, std::uint32_t nodes) {
  std::vector<RootType> out;
  std::uint32_t left = nodes;
  while (left) {
    std::uint32_t comp = left & (~left + 1), frontier = comp;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj[__builtin_ctz(f)];
      frontier = next & nodes & ~comp;
      comp |= frontier;
    }
    left &= ~comp;
    const int size = __builtin_popcount(comp);
    int branch = -1;
    for (std::uint32_t f = comp; f; f &= f - 1) {
      int v = __builtin_ctz(f);
      if (__builtin_popcount(adj[v] & comp) == 3) branch = v;
    }
    if (branch < 0) {
      out.push_back({'A', size});
      continue;
    }
    // Leg lengths from the branch node.
    std::vector<int> legs;
    for (std::uint32_t f = adj[branch] & comp; f; f &= f - 1) {
      int prev = branch, v = __builtin_ctz(f), len = 1;
      while (true) {
        std::uint32_t nb = adj[v] & comp & ~(1u << prev);
        if (!nb) break;
        prev = v;
        v = __builtin_ctz(nb);
        ++len;
      }
      legs.push_back(len);
    }
    std::sort(legs.begin(), legs.end());
    if (legs[1] == 1)
      out.push_back({'D', size});
    else
      out.push_back({'E', size});
  }
  return out;
}

/// Multisets (possibly empty) obtained from induced subgraphs of one diagram.
inline const std::set<SingularitySet>& component_perturbations(const RootType& t) {
  static std::mutex mu;
  static std::map<std::pair<char, int>, std::set<SingularitySet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(t.family, t.index);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto adj = dynkin_graph(t);
  std::set<SingularitySet> out;
  const std::uint32_t full = (1u << t.index) - 1;
  for (std::uint32_t m = 0;; ++m) {
    out.insert(SingularitySet(classify_subgraph(adj, m)));
    if (m == full) break;
  }
  return cache.emplace(key, std::move(out)).first->second;
}

/// All nonempty sets whose Dynkin graph is an induced subgraph of that of s.
inline std::set<SingularitySet> perturbations(const SingularitySet& s) {
  std::set<std::vector<RootType>> acc{{}};
  for (const auto& c : s.components()) {
    std::set<std::vector<RootType>> next;
    for (const auto& base : acc)
      for (const auto& add : component_perturbations(c)) {
        auto v = base;
        v.insert(v.end(), add.components().begin(), add.components().end());
        std::sort(v.begin(), v.end());
        next.insert(std::move(v));
      }
    acc = std::move(next);
  }
  std::set<SingularitySet> out;
  for (auto& v : acc)
    if (!v.empty()) out.insert(SingularitySet(v));
  return out;
}

// ---------------------------------------------------------------------------
// Reflections on a finite quadratic form

/// Data of condition s^k alpha = 0, alpha^2 = 2u/s^k mod 2Z.
/// `unit_modulus` is the modulus to which u is determined by alpha^2 (s^k).
struct ReflectionData {
  i64 s = 2;
  int k = 1;
  i64 u = 1;
  Residue2 alpha_sq;
  i64 unit_modulus = 2;
};

/// Reflection data of an s-primary element, or nullopt when alpha fails the condition.
inline std::optional<ReflectionData> reflection_data(const Fqf& form, const FqfElement& alpha, i64 s) {
  Residue2 sq = form.value(alpha);
  ReflectionData d;
  d.s = s;
  d.alpha_sq = sq;
  // alpha^2 = c/s^j with gcd(c, s) = 1, or an integer
  i64 den = sq.den(), num = sq.num();
  if (s == 2) {
    if (num % 2 == 0) return std::nullopt;  // 2u/2^k with u odd has odd numerator
    int j = den == 1 ? 0 : valuation(den, 2);
    d.k = j + 1;
    d.u = num;
  } else {
    if (den == 1) return std::nullopt;
    d.k = valuation(den, s);
    d.u = num % 2 == 0 ? num / 2 : (num + den) / 2;
    if (d.u % s == 0) return std::nullopt;
  }
  d.unit_modulus = ipow(s, d.k);
  if (form.scale(d.unit_modulus, alpha) != form.zero()) return std::nullopt;
  return d;
}

/// r_alpha(x) = x - (2 b(x, alpha) / alpha^2) alpha.
inline FqfElement reflect(const Fqf& form, const ReflectionData& d, const FqfElement& alpha, const FqfElement& x) {
  auto [bn, bd] = form.bilinear(x, alpha);
  i64 sk = d.unit_modulus;
  i64 c = mod(bn * (sk / bd), sk);
  i64 coef = mod(c * inverse_mod(mod(d.u, sk), sk), sk);
  return form.add(x, form.scale(-coef, alpha));
}

inline FqfMap reflection_map(const Fqf& form, const ReflectionData& d, const FqfElement& alpha) {
  FqfMap m;
  for (int i = 0; i < form.num_generators(); ++i) m.images.push_back(reflect(form, d, alpha, form.generator(i)));
  return m;
}

// ---------------------------------------------------------------------------
// Generators of the image of O(S) in Aut(disc S)

/// Action of a generator on one primary part of disc S.
struct PrimaryAction {
  enum class Kind { Identity, Reflections, Permutation };
  i64 p = 2;
  Kind kind = Kind::Identity;
  /// Kind::Reflections: the action is the product of these reflections.
  std::vector<FqfElement> roots;
  std::vector<ReflectionData> data;
  /// Kind::Permutation: a swap of coordinate pairs, (first[i], second[i]).
  std::vector<std::pair<int, int>> swaps;
};

struct DiscGenerator {
  enum class Kind { Symmetry, Transposition, Triality };
  Kind kind = Kind::Symmetry;
  std::string label;
  std::vector<int> components;
  FqfMap map;  // automorphism of disc S
  std::vector<PrimaryAction> parts;
};

namespace detail {

inline FqfElement embed(const Fqf& form, const std::vector<int>& coords, const std::vector<i64>& local) {
  auto x = form.zero();
  for (std::size_t i = 0; i < coords.size(); ++i) x[coords[i]] = local[i];
  return form.reduce(std::move(x));
}

/// Blocks of component c as (block, its coordinate indices) pairs.
inline std::vector<std::pair<FqfBlock, std::vector<int>>> component_blocks(const RootType& t,
                                                                           const std::vector<int>& coords) {
  std::vector<std::pair<FqfBlock, std::vector<int>>> out;
  std::size_t at = 0;
  const Fqf form = disc_form(t);
  for (const auto& b : form.blocks()) {
    std::vector<int> idx(coords.begin() + at, coords.begin() + at + b.rank());
    out.emplace_back(b, idx);
    at += b.rank();
  }
  return out;
}

inline void add_reflection(const Fqf& form, PrimaryAction& act, const FqfElement& alpha) {
  auto d = reflection_data(form, alpha, act.p);
  if (!d) throw FqfError("element fails the reflection condition");
  act.kind = PrimaryAction::Kind::Reflections;
  act.roots.push_back(alpha);
  act.data.push_back(*d);
}

inline FqfMap compose_parts(const Fqf& form, const std::vector<PrimaryAction>& parts) {
  FqfMap m = form.identity();
  for (const auto& act : parts) {
    for (std::size_t i = 0; i < act.roots.size(); ++i)
      m = form.compose(reflection_map(form, act.data[i], act.roots[i]), m);
    if (!act.swaps.empty()) {
      FqfMap sw = form.identity();
      for (auto [a, b] : act.swaps) std::swap(sw.images[a], sw.images[b]);
      m = form.compose(sw, m);
    }
  }
  return m;
}

}  // namespace detail

/// Generating set of the image of O(S) in Aut(disc S), one entry per diagram
/// symmetry of a component and per transposition of isomorphic components.
inline std::vector<DiscGenerator> osg_images(const SingularitySet& s) {
  const SetDisc sd = set_disc(s);
  const Fqf& form = sd.form;
  const auto& comps = s.components();
  std::vector<DiscGenerator> out;

  auto finish = [&](DiscGenerator g) {
    g.map = detail::compose_parts(form, g.parts);
    out.push_back(std::move(g));
  };

  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    const RootType& t = comps[ci];
    auto blocks = detail::component_blocks(t, sd.coords[ci]);
    const int ci_int = static_cast<int>(ci);
    if ((t.family == 'A' && t.index >= 2) || (t.family == 'D' && t.index % 2 == 1) ||
        (t.family == 'E' && t.index == 6)) {
      // -id on a cyclic form, one reflection per primary block
      DiscGenerator g{DiscGenerator::Kind::Symmetry, "sym(" + t.str() + ")", {ci_int}, {}, {}};
      for (const auto& [b, idx] : blocks) {
        PrimaryAction act;
        act.p = b.p;
        if (b.exponent_order() > 2) detail::add_reflection(form, act, detail::embed(form, idx, {1}));
        g.parts.push_back(std::move(act));
      }
      finish(std::move(g));
    } else if (t.family == 'D' && t.index >= 6) {
      // swap of the two spinor classes: reflection in their sum
      std::vector<int> idx;
      for (const auto& [b, bi] : blocks) idx.insert(idx.end(), bi.begin(), bi.end());
      DiscGenerator g{DiscGenerator::Kind::Symmetry, "sym(" + t.str() + ")", {ci_int}, {}, {}};
      PrimaryAction act;
      act.p = 2;
      detail::add_reflection(form, act, detail::embed(form, idx, {1, 1}));
      g.parts.push_back(std::move(act));
      finish(std::move(g));
    } else if (t.family == 'D' && t.index == 4) {
      // S3 on the three nonzero elements of V(2), generated by two transpositions
      const auto& idx = blocks[0].second;
      for (auto [root, name] : {std::pair<std::vector<i64>, const char*>{{1, 1}, "tri(D4;e<->f)"},
                                std::pair<std::vector<i64>, const char*>{{1, 0}, "tri(D4;f<->e+f)"}}) {
        DiscGenerator g{DiscGenerator::Kind::Triality, name, {ci_int}, {}, {}};
        PrimaryAction act;
        act.p = 2;
        detail::add_reflection(form, act, detail::embed(form, idx, root));
        g.parts.push_back(std::move(act));
        finish(std::move(g));
      }
    }
  }

  for (std::size_t i = 0; i < comps.size(); ++i)
    for (std::size_t j = i + 1; j < comps.size(); ++j) {
      if (!(comps[i] == comps[j]) || disc_form(comps[i]).is_zero()) continue;
      DiscGenerator g{DiscGenerator::Kind::Transposition,
                      "swap(" + comps[i].str() + "," + comps[j].str() + ")",
                      {static_cast<int>(i), static_cast<int>(j)},
                      {},
                      {}};
      auto bi = detail::component_blocks(comps[i], sd.coords[i]);
      auto bj = detail::component_blocks(comps[j], sd.coords[j]);
      for (std::size_t b = 0; b < bi.size(); ++b) {
        PrimaryAction act;
        act.p = bi[b].first.p;
        if (bi[b].first.kind != BlockKind::Cyclic) {
          // Two equal rank-2 blocks. Within their sum the swap is not a product
          // of reflections; it is kept as a permutation and decomposed later
          // inside the full primary part.
          act.kind = PrimaryAction::Kind::Permutation;
          for (int r = 0; r < 2; ++r) act.swaps.emplace_back(bi[b].second[r], bj[b].second[r]);
        } else {
          // components with two cyclic 2-blocks (D_{8k+-2}) are handled block by block
          auto a = form.zero();
          a[bi[b].second[0]] = 1;
          a[bj[b].second[0]] = -1;
          detail::add_reflection(form, act, form.reduce(a));
        }
        // merge consecutive actions at the same prime
        if (!g.parts.empty() && g.parts.back().p == act.p) {
          auto& last = g.parts.back();
          if (last.kind != PrimaryAction::Kind::Permutation) last.kind = act.kind;
          last.swaps.insert(last.swaps.end(), act.swaps.begin(), act.swaps.end());
          last.roots.insert(last.roots.end(), act.roots.begin(), act.roots.end());
          last.data.insert(last.data.end(), act.data.begin(), act.data.end());
        } else {
          g.parts.push_back(std::move(act));
        }
      }
      finish(std::move(g));
    }
  return out;
}

}  // namespace qlc
