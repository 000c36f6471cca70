#pragma once

// Miranda-Morrison theory for indefinite even lattices of rank >= 3: the local
// groups Gamma_{p,0}, the subgroups Sigma#_p, the quotients E(N) and E+(N),
// and the images of discriminant reflections in them.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlc/fqf.hpp"
#include "qlc/nikulin.hpp"
#include "qlc/roots.hpp"

namespace qlc {

class MMError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Gamma groups as F2 spaces

/// Coordinates of the product of Gamma_{p,0} over the primes dividing det N.
/// Odd p uses two bits (det, chi_p of the unit); p = 2 uses three bits
/// (det, u = 3 mod 4, u = +-3 mod 8), i.e. the full Gamma_{2,0}.
class GammaLayout {
 public:
  GammaLayout() = default;
  explicit GammaLayout(std::vector<i64> primes) : primes_(std::move(primes)) {
    for (i64 p : primes_) {
      offset_.push_back(dim_);
      dim_ += width(p);
    }
    if (dim_ > 64) throw MMError("too many primes for the F2 layout");
  }

  static int width(i64 p) { return p == 2 ? 3 : 2; }
  const std::vector<i64>& primes() const { return primes_; }
  int dim() const { return dim_; }
  int offset(i64 p) const {
    for (std::size_t i = 0; i < primes_.size(); ++i)
      if (primes_[i] == p) return offset_[i];
    throw MMError("prime " + std::to_string(p) + " not in layout");
  }
  bool has(i64 p) const { return std::find(primes_.begin(), primes_.end(), p) != primes_.end(); }

  /// Bits of (d, unit) in Gamma_{p,0}, unshifted.
  static F2Vec local_bits(i64 p, int d, i64 unit) {
    F2Vec v = d < 0 ? 1 : 0;
    if (p == 2) {
      i64 u = mod(unit, 8);
      if (u % 2 == 0) throw MMError("even 2-adic unit");
      if (u % 4 == 3) v |= 2;
      if (u == 3 || u == 5) v |= 4;
    } else if (legendre(unit, p) < 0) {
      v |= 2;
    }
    return v;
  }
  F2Vec at(i64 p, F2Vec local) const { return local << offset(p); }
  F2Vec local_of(F2Vec v, i64 p) const { return (v >> offset(p)) & ((F2Vec{1} << width(p)) - 1); }

  /// Image of the global element (d, e) of Gamma_0 = {+-1} x {+-1} under phi.
  F2Vec global(int d, int e) const {
    F2Vec v = 0;
    for (i64 p : primes_) v |= at(p, local_bits(p, d, e));
    return v;
  }

  /// "+-" string of a vector, grouped by prime, for reports.
  std::string str(F2Vec v) const {
    std::string s;
    for (i64 p : primes_) {
      if (!s.empty()) s += " |";
      for (int b = 0; b < width(p); ++b) s += ((v >> (offset(p) + b)) & 1u) ? " -1" : "  1";
    }
    return s;
  }

 private:
  std::vector<i64> primes_;
  std::vector<int> offset_;
  int dim_ = 0;
};

// ---------------------------------------------------------------------------
// Local Jordan data reconstructed from (signature, discriminant form)

struct JordanComponent {
  int scale = 1;  // exponent k of p^k
  BlockKind kind = BlockKind::Cyclic;
  i64 unit = 1;  // cyclic: exact numerator a of <a/p^k>; U: -1; V: 3
  int sign = 1;  // U/V sign
};

struct LocalJordan {
  i64 p = 2;
  int unimodular_rank = 0;
  i64 unimodular_unit = 1;  // odd p only: determinant of the unimodular part
  std::vector<JordanComponent> parts;  // aligned with the blocks of the p-part
};

inline LocalJordan local_jordan(const GenusDescriptor& g, i64 p) {
  const Fqf part = g.form.p_part(p);
  LocalJordan j;
  j.p = p;
  j.unimodular_rank = g.rank() - part.min_generators(p);
  if (j.unimodular_rank < 0) throw MMError("rank smaller than the number of generators at " + std::to_string(p));
  const i64 det_unit = (g.sigma_minus % 2 ? -1 : 1) * (g.form.order() / part.order());
  for (const auto& b : part.blocks()) {
    JordanComponent c;
    c.scale = b.k;
    c.kind = b.kind;
    c.sign = b.sign;
    if (b.kind == BlockKind::Cyclic)
      c.unit = b.value.num();
    else
      c.unit = b.kind == BlockKind::U ? -1 : 3;
    j.parts.push_back(c);
  }
  if (p != 2) {
    i64 e = det_unit;
    for (const auto& c : j.parts) e = mod(e * mod(c.unit, p), p);
    j.unimodular_unit = j.unimodular_rank > 0 ? e : 1;
    return j;
  }
  if (j.unimodular_rank > 0) return j;
  // No unimodular part: the units of scale-2 constituents are known only mod 4;
  // fix one of them so the total determinant matches.
  i64 prod = 1;
  for (const auto& c : j.parts) prod = mod(prod * mod(c.unit, 8), 8);
  const i64 want = mod(det_unit, 8);
  if (prod != want) {
    auto it = std::find_if(j.parts.begin(), j.parts.end(),
                           [](const JordanComponent& c) { return c.kind == BlockKind::Cyclic && c.scale == 1; });
    if (it == j.parts.end() || mod(prod * 5, 8) != want)
      throw MMError("inconsistent 2-adic Jordan data for " + g.form.str());
    it->unit *= 5;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Sigma#_p

struct SigmaSharp {
  i64 p = 2;
  std::vector<F2Vec> gens;  // local bits
  std::string rule;

  F2Span span() const {
    F2Span s;
    for (F2Vec v : gens) s.add(v);
    return s;
  }
  bool is_full() const { return span().rank() == GammaLayout::width(p); }
  /// Sigma#_2 contains Gamma_{2,2} = {(1,1), (1,5)}.
  bool contains_gamma22() const { return p != 2 || span().contains(4); }
};

/// Odd values of v^2/2 mod 8 over vectors v of a 2-adic lattice without unimodular part.
inline std::vector<i64> odd_half_norms(const LocalJordan& j) {
  std::vector<bool> reach(8, false);
  reach[0] = true;
  for (const auto& c : j.parts) {
    std::vector<bool> vals(8, false);
    const i64 mult = c.scale >= 4 ? 0 : ipow(2, c.scale - 1);
    for (i64 x = 0; x < 8; ++x)
      for (i64 y = 0; y < (c.kind == BlockKind::Cyclic ? 1 : 8); ++y) {
        i64 q = 0;
        if (c.kind == BlockKind::Cyclic)
          q = c.unit * x * x;
        else if (c.kind == BlockKind::U)
          q = c.sign * 2 * x * y;
        else
          q = c.sign * 2 * (x * x + x * y + y * y);
        vals[mod(mult * q, 8)] = true;
      }
    std::vector<bool> next(8, false);
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        if (reach[a] && vals[b]) next[(a + b) % 8] = true;
    reach = next;
  }
  std::vector<i64> out;
  for (int u = 1; u < 8; u += 2)
    if (reach[u]) out.push_back(u);
  return out;
}

inline SigmaSharp sigma_sharp(const LocalJordan& j) {
  SigmaSharp s;
  s.p = j.p;
  if (j.p != 2) {
    if (j.unimodular_rank >= 2) {
      s.gens = {1, 2};
      s.rule = "odd:unimodular-rank>=2";
    } else if (j.unimodular_rank == 1) {
      s.gens = {GammaLayout::local_bits(j.p, -1, 2 * j.unimodular_unit)};
      s.rule = "odd:unimodular-rank=1";
    } else {
      s.rule = "odd:no-unimodular";
    }
    return s;
  }
  if (j.unimodular_rank > 0) {
    s.gens = {1, 2, 4};
    s.rule = "2:unimodular";
    return s;
  }
  s.rule = "2:no-unimodular";
  for (i64 u : odd_half_norms(j)) s.gens.push_back(GammaLayout::local_bits(2, -1, u));
  bool even_at_2 = false, even_at_4 = false;
  int rank_at_4 = 0;
  for (const auto& c : j.parts) {
    if (c.scale == 1 && c.kind != BlockKind::Cyclic) even_at_2 = true;
    if (c.scale == 2) {
      rank_at_4 += c.kind == BlockKind::Cyclic ? 1 : 2;
      if (c.kind != BlockKind::Cyclic) even_at_4 = true;
    }
  }
  if (even_at_2) {
    s.gens.push_back(GammaLayout::local_bits(2, 1, 3));
    s.gens.push_back(GammaLayout::local_bits(2, 1, 5));
    s.rule += ",even-scale-2";
  }
  if (rank_at_4 >= 2 || even_at_4) {
    s.gens.push_back(GammaLayout::local_bits(2, 1, 5));
    s.rule += ",scale-4";
  }
  return s;
}

// ---------------------------------------------------------------------------
// E(N), E+(N)

/// F2 quotient of a Gamma layout by a subspace of relations.
struct EGroup {
  GammaLayout layout;
  F2Span relations;

  int dim() const { return layout.dim() - relations.rank(); }
  i64 order() const { return i64{1} << dim(); }
  F2Vec reduce(F2Vec v) const { return relations.reduce(v); }
  /// Rank of the images in the quotient.
  int image_rank(const std::vector<F2Vec>& images) const {
    F2Span s = relations;
    for (F2Vec v : images) s.add(v);
    return s.rank() - relations.rank();
  }
  bool spanned_by(const std::vector<F2Vec>& images) const { return image_rank(images) == dim(); }
};

/// Everything the Miranda-Morrison computation needs about one genus.
struct MMData {
  GenusDescriptor genus;
  GammaLayout layout;
  std::vector<LocalJordan> jordan;  // layout order
  std::vector<SigmaSharp> sigma;    // layout order
  EGroup e;
  EGroup e_plus;

  const LocalJordan& jordan_at(i64 p) const { return jordan[index_of(p)]; }
  const SigmaSharp& sigma_at(i64 p) const { return sigma[index_of(p)]; }

  /// Primes with Sigma#_p != Gamma_{p,0}.
  std::vector<i64> irregular_primes() const {
    std::vector<i64> out;
    for (const auto& s : sigma)
      if (!s.is_full()) out.push_back(s.p);
    return out;
  }

 private:
  std::size_t index_of(i64 p) const {
    for (std::size_t i = 0; i < layout.primes().size(); ++i)
      if (layout.primes()[i] == p) return i;
    throw MMError("prime " + std::to_string(p) + " does not divide det");
  }
};

inline MMData mm_data(const GenusDescriptor& g) {
  if (g.sigma_plus < 1 || g.sigma_minus < 1 || g.rank() < 3)
    throw MMError("genus must be indefinite of rank >= 3");
  MMData d;
  d.genus = g;
  d.layout = GammaLayout(g.form.primes());
  for (i64 p : d.layout.primes()) {
    d.jordan.push_back(local_jordan(g, p));
    d.sigma.push_back(sigma_sharp(d.jordan.back()));
  }
  d.e.layout = d.layout;
  d.e_plus.layout = d.layout;
  for (const auto& s : d.sigma)
    for (F2Vec v : s.gens) {
      d.e.relations.add(d.layout.at(s.p, v));
      d.e_plus.relations.add(d.layout.at(s.p, v));
    }
  d.e.relations.add(d.layout.global(-1, 1));
  d.e.relations.add(d.layout.global(1, -1));
  d.e_plus.relations.add(d.layout.global(-1, -1));
  return d;
}

inline EGroup e_group(const GenusDescriptor& g) { return mm_data(g).e; }
inline EGroup e_plus_group(const GenusDescriptor& g) { return mm_data(g).e_plus; }

// ---------------------------------------------------------------------------
// Reflection images

/// Pins down u mod 8 for a 2-primary reflection whose square only fixes u mod 2
/// or mod 4, by lifting alpha to the dual of the reconstructed 2-adic lattice.
/// Every lift defines an integral reflection with the same action on the
/// discriminant, so any lift gives the same image in E.
inline ReflectionData exact_reflection(const MMData& d, const FqfElement& alpha, ReflectionData r) {
  if (r.s != 2 || r.unit_modulus >= 8) return r;
  const LocalJordan& j = d.jordan_at(2);
  if (j.unimodular_rank > 0) return r;  // Sigma#_2 is everything; any representative will do
  const Fqf& form = d.genus.form;
  int max_scale = 0;
  for (const auto& c : j.parts) max_scale = std::max(max_scale, c.scale);
  // v^2 * 2^max_scale, exact
  i64 num = 0;
  std::size_t at = 0, bi = 0;
  for (const auto& b : form.blocks()) {
    if (b.p != 2) {
      at += b.rank();
      continue;
    }
    const auto& c = j.parts[bi++];
    const i64 w = ipow(2, max_scale - c.scale);
    if (c.kind == BlockKind::Cyclic) {
      num += alpha[at] * alpha[at] * c.unit * w;
    } else {
      i64 x = alpha[at], y = alpha[at + 1];
      i64 q = c.kind == BlockKind::U ? 2 * x * y : 2 * (x * x + x * y + y * y);
      num += c.sign * q * w;
    }
    at += b.rank();
  }
  // u = v^2 * 2^(k-1)
  int shift = max_scale - (r.k - 1);
  for (int i = 0; i < shift; ++i) {
    if (num % 2 != 0) throw MMError("lift of reflection root has unexpected square");
    num /= 2;
  }
  if (num % 2 == 0) throw MMError("lift of reflection root has even half-norm");
  r.u = mod(num, 8);
  r.unit_modulus = 8;
  return r;
}

/// Image of r_alpha in prod Gamma_{p,0}: (-1, u) at s and (1, s^k) elsewhere.
inline F2Vec reflection_vector(const GammaLayout& layout, const ReflectionData& r) {
  F2Vec v = 0;
  for (i64 p : layout.primes()) {
    if (p == r.s)
      v |= layout.at(p, GammaLayout::local_bits(p, -1, r.u));
    else
      v |= layout.at(p, GammaLayout::local_bits(p, 1, ipow(r.s, r.k)));
  }
  return v;
}

/// One reflection of a generator, transported to the transcendental form.
struct TranscendentalReflection {
  FqfElement alpha;  // coordinates in the transcendental form
  ReflectionData data;  // exact when determined, see exact_reflection
  ReflectionData raw;   // as read from alpha^2 alone
};

struct GeneratorImage {
  std::string label;
  std::vector<TranscendentalReflection> reflections;
  int block_swaps = 0;  // swaps of rank-2 blocks, not written as reflections
  F2Vec vector = 0;     // in the Gamma layout
};

/// Images of the generators of O(S) for a polarized singularity set.
inline std::vector<GeneratorImage> generator_images(const SingularitySet& s, const MMData& d) {
  const Fqf disc_s = disc_form(s);
  const Fqf& disc_t = d.genus.form;
  const auto emb = disc_t.block_embedding(disc_s, -1);
  std::vector<GeneratorImage> out;
  for (const auto& g : osg_images(s)) {
    GeneratorImage img;
    img.label = g.label;
    auto push = [&](const FqfElement& t, i64 p) {
      auto raw = reflection_data(disc_t, t, p);
      if (!raw) throw MMError("transported root fails the reflection condition");
      auto exact = exact_reflection(d, t, *raw);
      img.reflections.push_back({t, exact, *raw});
      img.vector ^= reflection_vector(d.layout, exact);
    };
    for (const auto& part : g.parts) {
      for (const auto& a : part.roots) {
        FqfElement t = disc_t.zero();
        for (std::size_t i = 0; i < a.size(); ++i) t[emb[i]] = a[i];
        push(t, part.p);
      }
      // A swap of two equal rank-2 blocks lifts to the swap of the matching
      // Jordan constituents: -1 on the antidiagonal, so det 1 and spinor norm
      // the determinant of the constituent.
      for (std::size_t i = 0; i < part.swaps.size(); i += 2) {
        const int coord = emb[part.swaps[i].first];
        int at = 0;
        for (const auto& b : disc_t.blocks()) {
          if (coord >= at && coord < at + b.rank()) {
            img.vector ^= d.layout.at(part.p, GammaLayout::local_bits(part.p, 1, b.kind == BlockKind::U ? -1 : 3));
            break;
          }
          at += b.rank();
        }
        ++img.block_swaps;
      }
    }
    out.push_back(std::move(img));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed formulas for one or two irregular primes

/// Gamma_0 = {+-1} x {+-1} as bits (d, e).
inline F2Vec gamma0_bits(int d, int e) { return (d < 0 ? 1u : 0u) | (e < 0 ? 2u : 0u); }
inline constexpr F2Vec kGamma0MinusMinus = 3;

/// Data of the closed formulas in the reduced group Gamma'_{2,0} at p = 2.
struct LemmaContext {
  bool applicable = false;  // rank >= 3, Sigma#_2 contains Gamma_{2,2}, at most two irregular primes
  std::vector<i64> irregular;
  std::map<i64, F2Span> sigma_tilde;  // subgroup of Gamma_0
  std::map<i64, int> e_p;              // [Gamma'_{p,0} : Sigma#_p]
  std::map<i64, bool> E_p_nontrivial;
  std::map<i64, bool> E_plus_p_nontrivial;
};

inline LemmaContext lemma_context(const MMData& d) {
  LemmaContext c;
  for (const auto& s : d.sigma)
    if (!s.contains_gamma22()) return c;
  for (const auto& s : d.sigma) {
    F2Span local = s.span();
    if (s.p == 2) local.add(4);
    const int width = 2;  // Gamma'_{p,0}, with Gamma_{2,2} divided out at p = 2
    const int rank = s.p == 2 ? local.rank() - 1 : local.rank();
    if (rank == width) continue;
    c.irregular.push_back(s.p);
    F2Span tilde;
    for (int dd : {1, -1})
      for (int ee : {1, -1})
        if (local.contains(GammaLayout::local_bits(s.p, dd, ee))) tilde.add(gamma0_bits(dd, ee));
    c.sigma_tilde[s.p] = tilde;
    c.e_p[s.p] = 1 << (width - rank);
    c.E_p_nontrivial[s.p] = s.p % 4 == 1 && c.e_p[s.p] * (1 << tilde.rank()) == 8;
    if (s.p % 4 == 1) {
      c.E_plus_p_nontrivial[s.p] = c.E_p_nontrivial[s.p];
    } else {
      F2Span t = tilde;
      t.add(kGamma0MinusMinus);
      c.E_plus_p_nontrivial[s.p] = t.rank() < 2;
    }
  }
  c.applicable = c.irregular.size() <= 2;
  return c;
}

/// delta_p(alpha) and |alpha|_p as +-1.
inline int lemma_delta(const ReflectionData& r, i64 p) { return r.s == p ? -1 : 1; }
inline std::optional<int> lemma_norm(const ReflectionData& r, i64 p) {
  if (r.s != p) return chi(ipow(r.s, r.k), p);
  if (p == 2 && r.unit_modulus < 4) return std::nullopt;
  return chi(r.u, p);
}

/// Image of r_alpha in the closed-form model of E(N) (two irregular primes at most):
/// bits [E_p][E_q][Gamma_0 (2 bits)], together with the relations of that model.
struct LemmaModel {
  F2Span relations;
  int dim = 0;  // ambient bits
  int quotient_dim() const { return dim - relations.rank(); }
};

inline LemmaModel lemma_model(const LemmaContext& c, bool plus) {
  LemmaModel m;
  const int np = static_cast<int>(c.irregular.size());
  m.dim = np + (np == 2 ? (plus ? 1 : 2) : 0);
  for (int i = 0; i < np; ++i) {
    bool nontrivial = plus ? c.E_plus_p_nontrivial.at(c.irregular[i]) : c.E_p_nontrivial.at(c.irregular[i]);
    if (!nontrivial) m.relations.add(F2Vec{1} << i);
  }
  if (np == 2) {
    for (i64 p : c.irregular) {
      const F2Span& tilde = c.sigma_tilde.at(p);
      if (!plus) {
        for (F2Vec t : tilde.rows()) m.relations.add(t << 2);
      } else if (tilde.contains(kGamma0MinusMinus)) {
        // Sigma~+_p = Sigma~_p meet Gamma_0^{--}
        m.relations.add(F2Vec{1} << 2);
      }
    }
  }
  return m;
}

inline std::optional<F2Vec> lemma_image(const LemmaContext& c, const ReflectionData& r, bool plus) {
  const int np = static_cast<int>(c.irregular.size());
  if (np == 2 && r.s == 2 && r.alpha_sq.is_integral() &&
      std::find(c.irregular.begin(), c.irregular.end(), 2) != c.irregular.end())
    return std::nullopt;
  F2Vec v = 0;
  F2Vec beta = 0;
  for (int i = 0; i < np; ++i) {
    const i64 p = c.irregular[i];
    const int delta = lemma_delta(r, p);
    auto norm = lemma_norm(r, p);
    if (!norm) return std::nullopt;
    const bool one_mod_4 = p % 4 == 1;
    if (!plus) {
      if (c.E_p_nontrivial.at(p) && *norm < 0) v |= F2Vec{1} << i;
      beta ^= one_mod_4 ? gamma0_bits(delta * *norm, 1) : gamma0_bits(delta, *norm);
    } else {
      const bool nontrivial = c.E_plus_p_nontrivial.at(p);
      int phi = 1, b = 1;
      if (one_mod_4) {
        phi = c.E_p_nontrivial.at(p) ? *norm : 1;
        b = delta * *norm;
      } else if (nontrivial) {
        phi = delta * *norm;
        b = *norm;
      } else {
        // projection Gamma_0 -> Gamma_0 / Sigma~_p, identified with Gamma_0^{--}
        F2Vec x = gamma0_bits(delta, *norm);
        b = c.sigma_tilde.at(p).contains(x) ? 1 : -1;
      }
      if (phi < 0) v |= F2Vec{1} << i;
      if (b < 0) beta ^= 1;
    }
  }
  if (np == 2) v |= beta << 2;
  return v;
}

/// det+ of r_alpha through a prime p with Sigma~_p inside Gamma_0^{--}; nullopt if
/// no such prime exists or the hypotheses fail.
inline std::optional<int> det_plus_image(const MMData& d, const ReflectionData& r) {
  for (const auto& s : d.sigma)
    if (!s.contains_gamma22()) return std::nullopt;
  if (d.e.reduce(reflection_vector(d.layout, r)) != 0) return std::nullopt;  // r_alpha not in Im d
  for (const auto& s : d.sigma) {
    F2Span local = s.span();
    if (s.p == 2) local.add(4);
    bool inside = true;
    for (int dd : {1, -1})
      for (int ee : {1, -1})
        if (local.contains(GammaLayout::local_bits(s.p, dd, ee)) && gamma0_bits(dd, ee) != 0 &&
            gamma0_bits(dd, ee) != kGamma0MinusMinus)
          inside = false;
    if (!inside) continue;
    if (s.p == 2 && r.alpha_sq.is_integral()) continue;
    auto norm = lemma_norm(r, s.p);
    if (!norm) continue;
    return lemma_delta(r, s.p) * *norm;
  }
  return std::nullopt;
}

/// |E(N)| from the index formula e(N) / [Gamma_0 : Sigma~(N)], with full Gamma_{2,0}.
inline i64 e_order_by_index(const MMData& d) {
  i64 e = 1;
  F2Span all;  // Sigma~(N) as the intersection over p
  std::vector<F2Vec> tilde = {0, 1, 2, 3};
  for (const auto& s : d.sigma) {
    F2Span local = s.span();
    e *= i64{1} << (GammaLayout::width(s.p) - local.rank());
    std::vector<F2Vec> keep;
    for (F2Vec x : tilde) {
      int dd = (x & 1) ? -1 : 1, ee = (x & 2) ? -1 : 1;
      if (local.contains(GammaLayout::local_bits(s.p, dd, ee))) keep.push_back(x);
    }
    tilde = keep;
  }
  return e * static_cast<i64>(tilde.size()) / 4;
}

}  // namespace qlc
