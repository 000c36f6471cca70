#pragma once

// End-to-end classification of a singularity set with total Milnor number at
// most 18: realizability, surjectivity onto E(T), and the E+(T) analysis that
// decides between one real component and a pair of complex conjugate ones.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qlc/mm.hpp"
#include "qlc/nikulin.hpp"
#include "qlc/roots.hpp"

namespace qlc {

/// Image of one generator of O(S), reduced in E(T) and in E+(T).
struct GeneratorRecord {
  std::string label;
  F2Vec e = 0;
  F2Vec e_plus = 0;
};

struct ClassificationRecord {
  SingularitySet set;
  int mu = 0;
  bool realizable = false;
  // Fields below are meaningful only for realizable sets.
  std::vector<i64> irregular_primes;
  i64 e_order = 1;
  i64 e_plus_order = 1;
  bool d_perp_surjective = true;
  bool symmetric = true;
  int real_components = 0;
  int complex_pairs = 0;
  std::string e_bucket;       // see e_bucket_of
  std::string e_plus_bucket;  // see e_plus_bucket_of
  std::vector<std::string> sigma_rules;
  std::vector<GeneratorRecord> generators;
  std::vector<std::string> methods;
  bool lemma_checked = false;  // closed formulas applied and compared
  bool lemma_agrees = true;
};

namespace detail {

inline bool has_component(const SingularitySet& s, char family, int index) {
  const auto& c = s.components();
  return std::find(c.begin(), c.end(), RootType{family, index}) != c.end();
}

/// Images of the generators with the given label, reduced in `group`.
inline std::vector<F2Vec> images_labeled(const std::vector<GeneratorImage>& imgs, const std::string& label) {
  std::vector<F2Vec> out;
  for (const auto& g : imgs)
    if (g.label == label) out.push_back(g.vector);
  return out;
}

/// True if rank(D) = rank(L) = rank([D L]): the two families of vectors satisfy
/// the same linear relations.
inline bool same_relations(const std::vector<F2Vec>& direct, int direct_bits, const std::vector<F2Vec>& lemma) {
  std::vector<F2Vec> joint;
  for (std::size_t i = 0; i < direct.size(); ++i) joint.push_back(direct[i] | (lemma[i] << direct_bits));
  int rd = f2_rank(direct), rl = f2_rank(lemma), rj = f2_rank(joint);
  return rd == rl && rl == rj;
}

}  // namespace detail

/// Compares the direct images with the closed formulas for one or two irregular primes.
inline void lemma_cross_check(const MMData& d, const std::vector<GeneratorImage>& imgs, ClassificationRecord& rec) {
  const LemmaContext ctx = lemma_context(d);
  if (!ctx.applicable) return;
  for (bool plus : {false, true}) {
    const EGroup& group = plus ? d.e_plus : d.e;
    if (plus && ctx.irregular.size() != 2) continue;
    LemmaModel model = lemma_model(ctx, plus);
    if (model.quotient_dim() != group.dim()) {
      rec.lemma_agrees = false;
      rec.methods.push_back(plus ? "lemma+:order-mismatch" : "lemma:order-mismatch");
      continue;
    }
    std::vector<F2Vec> dv, lv;
    for (const auto& g : imgs) {
      if (g.block_swaps > 0) continue;  // the closed formulas only cover reflections
      F2Vec l = 0;
      bool ok = true;
      for (const auto& r : g.reflections) {
        auto v = lemma_image(ctx, r.data, plus);
        if (!v) {
          ok = false;
          break;
        }
        l ^= *v;
      }
      if (!ok) continue;
      dv.push_back(group.reduce(g.vector));
      lv.push_back(model.relations.reduce(l));
    }
    rec.lemma_checked = true;
    if (!detail::same_relations(dv, group.layout.dim(), lv)) {
      rec.lemma_agrees = false;
      rec.methods.push_back(plus ? "lemma+:image-mismatch" : "lemma:image-mismatch");
    }
  }
}

/// Label of the set in the breakdown of nontrivial E(T):
///   trivial    |E| = 1
///   direct     no closed formula applies
///   order-4    |E| = 4
///   A4-p5      5 irregular with E_5 nontrivial and a symmetry of A4 generating
///   A2-p2-p3   irregular primes {2,3}, a symmetry of A2 generating
///   two-prime  the rest (two irregular primes, |E| = 2)
inline std::string e_bucket_of(const MMData& d, const std::vector<GeneratorImage>& imgs) {
  if (d.e.dim() == 0) return "trivial";
  const LemmaContext ctx = lemma_context(d);
  if (!ctx.applicable) return "direct";
  if (d.e.order() == 4) return "order-4";
  auto generates = [&](const std::string& label) {
    auto v = detail::images_labeled(imgs, label);
    return !v.empty() && d.e.spanned_by({v.front()});
  };
  const auto& irr = ctx.irregular;
  if (std::find(irr.begin(), irr.end(), 5) != irr.end() && ctx.E_p_nontrivial.at(5) && generates("sym(A4)"))
    return "A4-p5";
  if (irr == std::vector<i64>{2, 3} && generates("sym(A2)")) return "A2-p2-p3";
  return "two-prime";
}

/// Label of the set in the breakdown of |E+(T)| > |E(T)|:
///   equal      |E+| = |E|
///   det-plus   |E| = 1 and some local group lies in Gamma_0^{--}
///   direct     the two-prime formula does not apply
///   A2-p2-p3   irregular primes {2,3}, |E| = 2, |E+| = 4, an A2 point present
///   two-prime  the rest
inline std::string e_plus_bucket_of(const SingularitySet& s, const MMData& d) {
  if (d.e_plus.dim() == d.e.dim()) return "equal";
  const LemmaContext ctx = lemma_context(d);
  if (d.e.dim() == 0) {
    for (const auto& sg : d.sigma) {
      F2Span local = sg.span();
      if (sg.p == 2) local.add(4);
      bool inside = true;
      for (int dd : {1, -1})
        for (int ee : {1, -1}) {
          F2Vec g0 = gamma0_bits(dd, ee);
          if (g0 != 0 && g0 != kGamma0MinusMinus && local.contains(GammaLayout::local_bits(sg.p, dd, ee)))
            inside = false;
        }
      if (inside && sg.contains_gamma22()) return "det-plus";
    }
  }
  if (!ctx.applicable || ctx.irregular.size() != 2) return "direct";
  if (ctx.irregular == std::vector<i64>{2, 3} && d.e.order() == 2 && d.e_plus.order() == 4 &&
      detail::has_component(s, 'A', 2))
    return "A2-p2-p3";
  return "two-prime";
}

/// True if the first generators carrying the given labels span E(T) (or E+(T)).
inline bool labels_generate(const ClassificationRecord& rec, const std::vector<std::string>& labels, bool plus) {
  std::vector<F2Vec> rows;
  for (const auto& l : labels) {
    auto it = std::find_if(rec.generators.begin(), rec.generators.end(),
                           [&](const GeneratorRecord& g) { return g.label == l; });
    if (it == rec.generators.end()) return false;
    rows.push_back(plus ? it->e_plus : it->e);
  }
  const i64 order = plus ? rec.e_plus_order : rec.e_order;
  return (i64{1} << f2_rank(rows)) == order;
}

/// Full classification of one set with mu <= 18 (mu = 0 is the smooth case).
inline ClassificationRecord classify_set(const SingularitySet& s) {
  ClassificationRecord rec;
  rec.set = s;
  rec.mu = s.mu();
  if (rec.mu > 18) throw std::invalid_argument("classify_set handles mu <= 18; use the binary-form count");
  const GenusDescriptor g = transcendental_genus(s);
  rec.realizable = exists_even_lattice(g);
  if (!rec.realizable) return rec;

  const MMData d = mm_data(g);
  const auto imgs = generator_images(s, d);
  std::vector<F2Vec> vecs;
  for (const auto& im : imgs) vecs.push_back(im.vector);

  rec.irregular_primes = d.irregular_primes();
  for (const auto& sg : d.sigma) rec.sigma_rules.push_back(std::to_string(sg.p) + ":" + sg.rule);
  for (const auto& im : imgs) rec.generators.push_back({im.label, d.e.reduce(im.vector), d.e_plus.reduce(im.vector)});
  rec.e_order = d.e.order();
  rec.e_plus_order = d.e_plus.order();
  rec.d_perp_surjective = d.e.spanned_by(vecs);
  rec.symmetric = d.e.dim() == d.e_plus.dim() || d.e_plus.spanned_by(vecs);
  rec.real_components = rec.symmetric ? 1 : 0;
  rec.complex_pairs = rec.symmetric ? 0 : 1;
  rec.e_bucket = e_bucket_of(d, imgs);
  rec.e_plus_bucket = e_plus_bucket_of(s, d);
  rec.methods.push_back("direct");
  lemma_cross_check(d, imgs, rec);
  if (rec.lemma_checked) rec.methods.push_back(rec.lemma_agrees ? "lemma:agree" : "lemma:disagree");
  return rec;
}

}  // namespace qlc
