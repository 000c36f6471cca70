#pragma once

// Genera of even lattices and the existence criterion for a lattice with a
// prescribed signature and discriminant form.

#include <string>
#include <vector>

#include "qlc/fqf.hpp"
#include "qlc/roots.hpp"

namespace qlc {

struct GenusDescriptor {
  int sigma_plus = 0;
  int sigma_minus = 0;
  Fqf form;

  int rank() const { return sigma_plus + sigma_minus; }
  /// Determinant of any lattice in the genus.
  i64 det() const { return (sigma_minus % 2 ? -1 : 1) * form.order(); }
};

/// Which of the existence conditions fails, if any (0 = all hold).
inline int failed_existence_condition(const GenusDescriptor& g) {
  const Fqf& f = g.form;
  if (g.sigma_plus < 0 || g.sigma_minus < 0) return 1;
  if (g.rank() < f.min_generators()) return 1;
  if (f.brown() != mod(g.sigma_plus - g.sigma_minus, 8)) return 2;
  const i64 sign = g.sigma_minus % 2 ? -1 : 1;
  for (i64 p : f.primes()) {
    if (g.rank() != f.min_generators(p)) continue;
    auto part = f.p_part(p);
    if (p == 2 && !part.is_even()) continue;
    auto d = f.det_p(p);
    const i64 cof = f.order() / d.order;
    if (p != 2) {
      if (d.unit != legendre(sign * cof, p)) return 3;
    } else {
      const int m = unit_class(cof, 2);
      if (d.unit != m && d.unit != mod(-m, 8)) return 4;
    }
  }
  return 0;
}

/// True iff an even lattice with this signature and discriminant form exists.
inline bool exists_even_lattice(const GenusDescriptor& g) { return failed_existence_condition(g) == 0; }

/// disc S + <1/4>: the discriminant form of S extended by the polarization.
inline Fqf polarized_disc(const SingularitySet& s) { return direct_sum(disc_form(s), Fqf::cyclic(1, 4)); }

/// Genus of the orthogonal complement of S + Zh (h^2 = 4) in the K3 lattice.
inline GenusDescriptor transcendental_genus(const SingularitySet& s) {
  const int mu = s.mu();
  if (mu < 0 || mu > 19) throw std::invalid_argument("total Milnor number out of range: " + std::to_string(mu));
  return {2, 19 - mu, polarized_disc(s).negate()};
}

inline bool realizable_nonspecial(const SingularitySet& s) { return exists_even_lattice(transcendental_genus(s)); }

/// The generators of osg_images(s) acting on `t_form` (the form of
/// transcendental_genus(s)), extended by the identity on the polarization.
inline std::vector<FqfMap> polarized_generator_maps(const SingularitySet& s, const Fqf& t_form) {
  const Fqf disc_s = disc_form(s);
  const auto emb = t_form.block_embedding(disc_s, -1);
  std::vector<FqfMap> out;
  for (const auto& gen : osg_images(s)) {
    FqfMap m = t_form.identity();
    for (std::size_t j = 0; j < emb.size(); ++j) {
      FqfElement img = t_form.zero();
      for (std::size_t i = 0; i < emb.size(); ++i) img[emb[i]] = gen.map.images[j][i];
      m.images[emb[j]] = img;
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace qlc
