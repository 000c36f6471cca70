#pragma once

// Positive definite even binary lattices: genus enumeration by reduction
// theory and the component count of maximizing strata.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qlc/fqf.hpp"
#include "qlc/nikulin.hpp"
#include "qlc/roots.hpp"

namespace qlc {

class BinformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gram matrix (2a, b; b, 2c), reduced: |b| <= a <= c, and b >= 0 when |b| = a or a = c.
struct BinaryEvenLattice {
  i64 a = 1, b = 0, c = 1;

  i64 det() const { return 4 * a * c - b * b; }
  i64 gram(int i, int j) const { return i != j ? b : (i == 0 ? 2 * a : 2 * c); }
  std::string str() const {
    return "(" + std::to_string(2 * a) + "," + std::to_string(b) + ";" + std::to_string(b) + "," +
           std::to_string(2 * c) + ")";
  }
  friend auto operator<=>(const BinaryEvenLattice&, const BinaryEvenLattice&) = default;
};

/// 2x2 integer matrix acting on column vectors, row-major.
struct IntMat2 {
  i64 m[2][2] = {{1, 0}, {0, 1}};
  i64 det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  friend bool operator==(const IntMat2&, const IntMat2&) = default;
};

inline IntMat2 operator*(const IntMat2& x, const IntMat2& y) {
  IntMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = x.m[i][0] * y.m[0][j] + x.m[i][1] * y.m[1][j];
  return r;
}

/// All reduced even positive definite binary lattices of determinant `det`,
/// one per class up to (possibly improper) isometry.
inline std::vector<BinaryEvenLattice> reduced_lattices(i64 det) {
  std::vector<BinaryEvenLattice> out;
  // 4ac - b^2 = det with |b| <= a <= c gives 3a^2 <= det
  for (i64 a = 1; 3 * a * a <= det; ++a)
    for (i64 b = 0; b <= a; ++b) {
      if ((det + b * b) % (4 * a) != 0) continue;
      const i64 c = (det + b * b) / (4 * a);
      if (c < a) continue;
      out.push_back({a, b, c});
    }
  return out;
}

/// The discriminant group L^v/L as explicit elements. An element x = w/D of L^v
/// (D = det) is stored as w mod D.
class BinaryDisc {
 public:
  explicit BinaryDisc(const BinaryEvenLattice& l) : lat_(l), d_(l.det()) {
    // L^v is spanned by the columns of adj(G)/D
    const std::pair<i64, i64> gens[2] = {{mod(2 * l.c, d_), mod(-l.b, d_)}, {mod(-l.b, d_), mod(2 * l.a, d_)}};
    std::set<std::pair<i64, i64>> seen{{0, 0}};
    elems_.push_back({0, 0});
    for (std::size_t at = 0; at < elems_.size(); ++at)
      for (const auto& g : gens) {
        auto w = add(elems_[at], g);
        if (seen.insert(w).second) elems_.push_back(w);
      }
    std::sort(elems_.begin(), elems_.end());
    for (std::size_t i = 0; i < elems_.size(); ++i) index_[elems_[i]] = static_cast<int>(i);
  }

  i64 order() const { return static_cast<i64>(elems_.size()); }
  const std::vector<std::pair<i64, i64>>& elements() const { return elems_; }
  int index(std::pair<i64, i64> w) const { return index_.at({mod(w.first, d_), mod(w.second, d_)}); }

  Residue2 value(std::pair<i64, i64> w) const {
    return Residue2(quad(w.first, w.second, w.first, w.second), d_ * d_);
  }
  /// b(x, y) as a reduced fraction mod 1.
  std::pair<i64, i64> bilinear(std::pair<i64, i64> x, std::pair<i64, i64> y) const {
    return mod1_of(quad(x.first, x.second, y.first, y.second), d_ * d_);
  }
  std::pair<i64, i64> add(std::pair<i64, i64> x, std::pair<i64, i64> y) const {
    return {mod(x.first + y.first, d_), mod(x.second + y.second, d_)};
  }
  std::pair<i64, i64> scale(i64 k, std::pair<i64, i64> x) const { return {mod(k * x.first, d_), mod(k * x.second, d_)}; }
  std::pair<i64, i64> apply(const IntMat2& g, std::pair<i64, i64> w) const {
    return {mod(g.m[0][0] * w.first + g.m[0][1] * w.second, d_), mod(g.m[1][0] * w.first + g.m[1][1] * w.second, d_)};
  }
  i64 element_order(std::pair<i64, i64> w) const { return d_ / std::gcd(d_, std::gcd(w.first, w.second)); }

 private:
  i64 quad(i64 x0, i64 x1, i64 y0, i64 y1) const {
    return x0 * y0 * lat_.gram(0, 0) + (x0 * y1 + x1 * y0) * lat_.b + x1 * y1 * lat_.gram(1, 1);
  }
  BinaryEvenLattice lat_;
  i64 d_;
  std::vector<std::pair<i64, i64>> elems_;
  std::map<std::pair<i64, i64>, int> index_;
};

/// Isometry from `form` onto the discriminant of `l`, as generator images; nullopt if none.
inline std::optional<std::vector<std::pair<i64, i64>>> disc_isometry(const Fqf& form, const BinaryDisc& disc) {
  if (form.order() != disc.order()) return std::nullopt;
  const int n = form.num_generators();
  const auto ord = form.generator_orders();
  std::vector<std::vector<std::pair<i64, i64>>> cands(n);
  for (int i = 0; i < n; ++i) {
    const Residue2 want = form.value(form.generator(i));
    for (const auto& w : disc.elements())
      if (disc.element_order(w) == ord[i] && disc.value(w) == want) cands[i].push_back(w);
  }
  std::vector<std::pair<i64, i64>> cur(n);
  std::function<bool(int)> rec = [&](int i) {
    if (i == n) return true;
    for (const auto& w : cands[i]) {
      bool ok = true;
      for (int j = 0; j < i && ok; ++j)
        if (disc.bilinear(w, cur[j]) != form.bilinear(form.generator(i), form.generator(j))) ok = false;
      if (!ok) continue;
      cur[i] = w;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;
  return cur;
}

/// Reduced lattices of determinant |target| whose discriminant form is isometric to `target`.
inline std::vector<BinaryEvenLattice> enumerate_genus(i64 det, const Fqf& target) {
  if (det != target.order()) throw BinformError("determinant does not match the form order");
  std::vector<BinaryEvenLattice> out;
  for (const auto& l : reduced_lattices(det))
    if (disc_isometry(target, BinaryDisc(l))) out.push_back(l);
  return out;
}

/// All integral isometries of l, found by matching vectors of norms 2a and 2c.
inline std::vector<IntMat2> isometry_group(const BinaryEvenLattice& l) {
  auto norm = [&](i64 x, i64 y) { return 2 * l.a * x * x + 2 * l.b * x * y + 2 * l.c * y * y; };
  auto ip = [&](i64 x0, i64 y0, i64 x1, i64 y1) { return 2 * l.a * x0 * x1 + l.b * (x0 * y1 + x1 * y0) + 2 * l.c * y0 * y1; };
  // norm(x, y) >= lambda_min (x^2 + y^2)
  const double tr = 2.0 * (l.a + l.c);
  const double lmin = (tr - std::sqrt(tr * tr - 4.0 * static_cast<double>(l.det()))) / 2.0;
  const i64 bound = static_cast<i64>(std::sqrt(2.0 * l.c / lmin)) + 1;
  std::vector<std::pair<i64, i64>> first, second;
  for (i64 x = -bound; x <= bound; ++x)
    for (i64 y = -bound; y <= bound; ++y) {
      if (norm(x, y) == 2 * l.a) first.emplace_back(x, y);
      if (norm(x, y) == 2 * l.c) second.emplace_back(x, y);
    }
  std::vector<IntMat2> out;
  for (auto [x0, y0] : first)
    for (auto [x1, y1] : second) {
      if (ip(x0, y0, x1, y1) != l.b) continue;
      IntMat2 g;
      g.m[0][0] = x0, g.m[1][0] = y0, g.m[0][1] = x1, g.m[1][1] = y1;
      if (g.det() == 1 || g.det() == -1) out.push_back(g);
    }
  return out;
}

struct ComponentCount {
  int real = 0;
  int complex_pairs = 0;
  friend bool operator==(const ComponentCount&, const ComponentCount&) = default;
};

namespace detail {

/// An automorphism of a form, flattened to a key.
inline std::vector<i64> map_key(const FqfMap& m) {
  std::vector<i64> k;
  for (const auto& img : m.images) k.insert(k.end(), img.begin(), img.end());
  return k;
}

}  // namespace detail

/// Real components and pairs of complex conjugate ones of the stratum of a
/// maximizing set. For every class T in the genus, the oriented components over T
/// are the double cosets d(SO(T)) \ Aut(disc T) / d(O(S)); complex conjugation
/// reverses the orientation of T.
inline ComponentCount count_components_maximizing(const SingularitySet& s) {
  if (s.mu() != 19) throw std::invalid_argument("count_components_maximizing needs mu = 19");
  const GenusDescriptor g = transcendental_genus(s);
  const Fqf& form = g.form;
  const auto genus = enumerate_genus(form.order(), form);
  if (genus.empty()) throw BinformError("empty genus for " + format_set(s));

  const auto auts = form.aut_group();
  std::map<std::vector<i64>, int> aut_index;
  for (std::size_t i = 0; i < auts.size(); ++i) aut_index[detail::map_key(auts[i])] = static_cast<int>(i);

  const auto from_s = polarized_generator_maps(s, form);

  ComponentCount out;
  for (const auto& lat : genus) {
    const BinaryDisc disc(lat);
    const auto phi = *disc_isometry(form, disc);
    // element of disc T -> coordinates in `form`
    std::map<std::pair<i64, i64>, FqfElement> back;
    for (const auto& x : form.elements()) {
      std::pair<i64, i64> w{0, 0};
      for (std::size_t i = 0; i < x.size(); ++i) w = disc.add(w, disc.scale(x[i], phi[i]));
      back[w] = x;
    }
    auto transport = [&](const IntMat2& t) {
      FqfMap m;
      for (const auto& w : phi) m.images.push_back(back.at(disc.apply(t, w)));
      return m;
    };
    std::vector<FqfMap> proper, improper;
    for (const auto& t : isometry_group(lat)) (t.det() > 0 ? proper : improper).push_back(transport(t));

    // orbits of d(SO(T)) x d(O(S)) on Aut(disc T)
    std::vector<int> orbit(auts.size(), -1);
    int n_orbits = 0;
    for (std::size_t start = 0; start < auts.size(); ++start) {
      if (orbit[start] >= 0) continue;
      std::vector<int> stack{static_cast<int>(start)};
      orbit[start] = n_orbits;
      while (!stack.empty()) {
        const FqfMap cur = auts[stack.back()];
        stack.pop_back();
        auto visit = [&](const FqfMap& m) {
          const int j = aut_index.at(detail::map_key(m));
          if (orbit[j] < 0) {
            orbit[j] = n_orbits;
            stack.push_back(j);
          }
        };
        for (const auto& h : proper) visit(form.compose(h, cur));
        for (const auto& k : from_s) visit(form.compose(cur, k));
      }
      ++n_orbits;
    }
    if (improper.empty()) {
      // (T, theta) and (T, -theta) are distinct oriented classes swapped by conj
      out.complex_pairs += n_orbits;
      continue;
    }
    std::vector<int> rep(n_orbits, -1);
    for (std::size_t i = 0; i < auts.size(); ++i)
      if (rep[orbit[i]] < 0) rep[orbit[i]] = static_cast<int>(i);
    int fixed = 0;
    for (int o = 0; o < n_orbits; ++o) {
      const FqfMap conj = form.compose(improper.front(), auts[rep[o]]);
      if (orbit[aut_index.at(detail::map_key(conj))] == o) ++fixed;
    }
    out.real += fixed;
    out.complex_pairs += (n_orbits - fixed) / 2;
  }
  return out;
}

}  // namespace qlc
