#pragma once

// Finite quadratic forms: finite abelian groups with a Q/2Z-valued quadratic
// form, stored as an orthogonal sum of prime-power blocks.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qlc/arith.hpp"

namespace qlc {

enum class BlockKind { Cyclic, U, V };

/// One indecomposable block. Cyclic blocks have order p^k and generator value
/// `value`. U(2^k)/V(2^k) are rank-2 blocks on (Z/2^k)^2; `sign` = -1 stores the
/// negated Gram matrix so that negation stays coordinate-wise.
struct FqfBlock {
  BlockKind kind = BlockKind::Cyclic;
  i64 p = 2;
  int k = 1;
  Residue2 value;  // cyclic only
  int sign = 1;    // U/V only

  i64 exponent_order() const { return ipow(p, k); }
  int rank() const { return kind == BlockKind::Cyclic ? 1 : 2; }
  i64 order() const { return kind == BlockKind::Cyclic ? ipow(p, k) : ipow(p, 2 * k); }

  friend bool operator==(const FqfBlock&, const FqfBlock&) = default;
  auto sort_key() const {
    return std::make_tuple(p, k, static_cast<int>(kind), value, sign);
  }
};

using FqfElement = std::vector<i64>;

class Fqf;

/// Group homomorphism between forms, given by the images of the source generators.
struct FqfMap {
  std::vector<FqfElement> images;
  friend bool operator==(const FqfMap&, const FqfMap&) = default;
  friend auto operator<=>(const FqfMap&, const FqfMap&) = default;
};

class FqfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default bound on |F| for the exhaustive automorphism/isometry searches.
inline constexpr i64 kDefaultSearchCap = 10000;

class Fqf {
 public:
  Fqf() = default;
  explicit Fqf(std::vector<FqfBlock> blocks) : blocks_(std::move(blocks)) { normalize(); }

  /// <m/n> split into prime-power cyclic blocks.
  static Fqf cyclic(i64 m, i64 n) {
    if (n < 1) throw FqfError("cyclic form needs n >= 1");
    if (std::gcd(m < 0 ? -m : m, n) != 1) throw FqfError("cyclic form needs gcd(m,n) = 1");
    if (((m % 2) * (n % 2)) != 0) throw FqfError("cyclic form needs m*n even");
    std::vector<FqfBlock> blocks;
    for (auto [p, e] : factor(n)) {
      i64 pk = ipow(p, e);
      i64 cof = n / pk;
      // q(cof * g) = cof^2 * m / n = cof * m / p^k
      blocks.push_back({BlockKind::Cyclic, p, e, Residue2(mod(cof * m, 2 * pk), pk), 1});
    }
    return Fqf(std::move(blocks));
  }
  static Fqf u(int k) { return Fqf({{BlockKind::U, 2, k, {}, 1}}); }
  static Fqf v(int k) { return Fqf({{BlockKind::V, 2, k, {}, 1}}); }

  const std::vector<FqfBlock>& blocks() const { return blocks_; }
  bool is_zero() const { return blocks_.empty(); }

  i64 order() const {
    i64 n = 1;
    for (const auto& b : blocks_) n *= b.order();
    return n;
  }

  std::vector<i64> primes() const {
    std::vector<i64> ps;
    for (const auto& b : blocks_)
      if (ps.empty() || ps.back() != b.p) ps.push_back(b.p);
    return ps;
  }

  friend Fqf direct_sum(const Fqf& a, const Fqf& b) {
    auto blocks = a.blocks_;
    blocks.insert(blocks.end(), b.blocks_.begin(), b.blocks_.end());
    return Fqf(std::move(blocks));
  }

  Fqf p_part(i64 p) const {
    std::vector<FqfBlock> out;
    for (const auto& b : blocks_)
      if (b.p == p) out.push_back(b);
    return Fqf(std::move(out));
  }

  Fqf negate() const {
    auto blocks = blocks_;
    for (auto& b : blocks) {
      if (b.kind == BlockKind::Cyclic)
        b.value = -b.value;
      else
        b.sign = -b.sign;
    }
    return Fqf(std::move(blocks));
  }

  /// Minimal number of generators of the p-part.
  int min_generators(i64 p) const {
    int n = 0;
    for (const auto& b : blocks_)
      if (b.p == p) n += b.rank();
    return n;
  }
  int min_generators() const {
    int best = 0;
    for (i64 p : primes()) best = std::max(best, min_generators(p));
    return best;
  }

  // -- generators and elements ---------------------------------------------

  int num_generators() const {
    int n = 0;
    for (const auto& b : blocks_) n += b.rank();
    return n;
  }
  std::vector<i64> generator_orders() const {
    std::vector<i64> out;
    for (const auto& b : blocks_)
      for (int i = 0; i < b.rank(); ++i) out.push_back(b.exponent_order());
    return out;
  }
  /// Prime of each generator coordinate.
  std::vector<i64> generator_primes() const {
    std::vector<i64> out;
    for (const auto& b : blocks_)
      for (int i = 0; i < b.rank(); ++i) out.push_back(b.p);
    return out;
  }
  FqfElement zero() const { return FqfElement(num_generators(), 0); }
  FqfElement generator(int i) const {
    auto e = zero();
    e[i] = 1;
    return e;
  }

  FqfElement reduce(FqfElement x) const {
    auto ord = generator_orders();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = mod(x[i], ord[i]);
    return x;
  }
  FqfElement add(const FqfElement& x, const FqfElement& y) const {
    FqfElement z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return reduce(std::move(z));
  }
  FqfElement scale(i64 c, const FqfElement& x) const {
    FqfElement z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = c * x[i];
    return reduce(std::move(z));
  }
  i64 element_order(const FqfElement& x) const {
    auto ord = generator_orders();
    i64 n = 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      i64 o = ord[i] / std::gcd(mod(x[i], ord[i]) == 0 ? ord[i] : mod(x[i], ord[i]), ord[i]);
      n = std::lcm(n, o);
    }
    return n;
  }

  /// q(x) in Q/2Z.
  Residue2 value(const FqfElement& x) const {
    Residue2 total;
    std::size_t at = 0;
    for (const auto& b : blocks_) {
      i64 pk = b.exponent_order();
      if (b.kind == BlockKind::Cyclic) {
        i64 c = mod(x[at], pk);
        total = total + Residue2(mod(c * c, 2 * pk) * b.value.num(), b.value.den());
        at += 1;
      } else {
        i64 a = mod(x[at], pk), c = mod(x[at + 1], pk);
        i64 num = b.kind == BlockKind::U ? 2 * a * c : 2 * (a * a + a * c + c * c);
        total = total + Residue2(mod(b.sign * num, 2 * pk), pk);
        at += 2;
      }
    }
    return total;
  }

  /// b(x,y) in Q/Z as a reduced fraction (num, den) with 0 <= num < den.
  std::pair<i64, i64> bilinear(const FqfElement& x, const FqfElement& y) const {
    Residue2 d = value(add(x, y)) - value(x) - value(y);
    // d = 2 b(x,y) mod 2, so b = d/2 mod 1
    return mod1_of(d.num(), 2 * d.den());
  }

  /// All elements of the group (mixed-radix enumeration).
  std::vector<FqfElement> elements() const {
    auto ord = generator_orders();
    std::vector<FqfElement> out;
    FqfElement x(ord.size(), 0);
    while (true) {
      out.push_back(x);
      std::size_t i = 0;
      for (; i < x.size(); ++i) {
        if (++x[i] < ord[i]) break;
        x[i] = 0;
      }
      if (i == x.size()) break;
    }
    return out;
  }

  // -- invariants ------------------------------------------------------------

  /// Brown invariant mod 8 from the closed block formulas.
  int brown() const {
    int total = 0;
    for (const auto& b : blocks_) total += block_brown(b);
    return static_cast<int>(mod(total, 8));
  }

  /// Even iff q(x) is integral on every element of order two. An element of
  /// order two in <a/2^k> has value 2^(k-2)*a, and U/V blocks are always even,
  /// so the 2-part is odd exactly when it has a cyclic block of order 2.
  bool is_even() const {
    return std::none_of(blocks_.begin(), blocks_.end(), [](const FqfBlock& b) {
      return b.p == 2 && b.kind == BlockKind::Cyclic && b.k == 1;
    });
  }

  struct DetP {
    i64 p;
    int unit;   // unit_class: +-1 for odd p, residue mod 8 for p = 2
    i64 order;  // |L_p|
  };

  /// det_p = u / |L_p| with u read from a diagonalizing basis of the p-part.
  DetP det_p(i64 p) const {
    auto part = p_part(p);
    if (p == 2 && !part.is_even()) throw FqfError("undefined-2-adic-determinant");
    i64 u = 1;
    for (const auto& b : part.blocks_) {
      if (b.kind == BlockKind::Cyclic) {
        u = mod(u * mod(b.value.num(), p == 2 ? 8 : p), p == 2 ? 8 : p);
      } else {
        u = mod(u * (b.kind == BlockKind::U ? -1 : 3), p == 2 ? 8 : p);
      }
    }
    return {p, unit_class(u, p), part.order()};
  }

  // -- isometries ------------------------------------------------------------

  FqfElement apply(const FqfMap& m, const FqfElement& x, const Fqf& target) const {
    FqfElement out = target.zero();
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += x[i] * m.images[i][j];
    return target.reduce(std::move(out));
  }

  FqfMap identity() const {
    FqfMap m;
    for (int i = 0; i < num_generators(); ++i) m.images.push_back(generator(i));
    return m;
  }

  /// Composition (a after b) of two automorphisms of this form.
  FqfMap compose(const FqfMap& a, const FqfMap& b) const {
    FqfMap out;
    for (const auto& img : b.images) out.images.push_back(apply(a, img, *this));
    return out;
  }

  /// Searches group isomorphisms psi: this -> target with q_target(psi x) = sign * q(x).
  /// Visits each one; the visitor returns false to stop. Returns the count visited.
  std::size_t for_each_isometry(const Fqf& target, int sign, const std::function<bool(const FqfMap&)>& visit,
                                i64 cap = kDefaultSearchCap) const {
    if (order() > cap || target.order() > cap)
      throw FqfError("finite quadratic form exceeds search cap");
    if (primes() != target.primes()) return 0;
    for (i64 p : primes())
      if (p_part(p).order() != target.p_part(p).order()) return 0;

    const int n = num_generators();
    const auto ord = generator_orders();
    const auto gp = generator_primes();
    std::vector<Residue2> gval(n);
    std::vector<std::vector<std::pair<i64, i64>>> gbil(n, std::vector<std::pair<i64, i64>>(n));
    for (int i = 0; i < n; ++i) {
      gval[i] = value(generator(i));
      for (int j = 0; j < i; ++j) gbil[i][j] = bilinear(generator(i), generator(j));
    }
    auto twist = [sign](std::pair<i64, i64> b) { return sign > 0 ? b : mod1_of(-b.first, b.second); };

    // Candidate images per generator: elements of the matching p-part with the right value.
    const auto all = target.elements();
    const auto tprimes = target.generator_primes();
    std::vector<std::vector<const FqfElement*>> cands(n);
    for (int i = 0; i < n; ++i) {
      Residue2 want = sign > 0 ? gval[i] : -gval[i];
      for (const auto& y : all) {
        bool in_part = true;
        for (std::size_t j = 0; j < y.size(); ++j)
          if (y[j] != 0 && tprimes[j] != gp[i]) in_part = false;
        if (!in_part) continue;
        if (target.scale(ord[i], y) != target.zero()) continue;
        if (target.value(y) != want) continue;
        cands[i].push_back(&y);
      }
    }

    std::size_t visited = 0;
    FqfMap cur;
    cur.images.resize(n);
    bool stop = false;
    std::function<void(int)> rec = [&](int i) {
      if (stop) return;
      if (i == n) {
        ++visited;
        if (!visit(cur)) stop = true;
        return;
      }
      for (const FqfElement* y : cands[i]) {
        bool ok = true;
        for (int j = 0; j < i && ok; ++j)
          if (gp[j] == gp[i] && target.bilinear(*y, cur.images[j]) != twist(gbil[i][j])) ok = false;
        if (!ok) continue;
        cur.images[i] = *y;
        rec(i + 1);
        if (stop) return;
      }
    };
    rec(0);
    return visited;
  }

  std::vector<FqfMap> aut_group(i64 cap = kDefaultSearchCap) const {
    std::vector<FqfMap> out;
    for_each_isometry(*this, 1, [&](const FqfMap& m) { out.push_back(m); return true; }, cap);
    return out;
  }

  /// Anti-isometry this -> other, if any.
  std::optional<FqfMap> anti_isometry_to(const Fqf& other, i64 cap = kDefaultSearchCap) const {
    if (order() != other.order()) return std::nullopt;
    std::optional<FqfMap> found;
    for_each_isometry(other, -1, [&](const FqfMap& m) { found = m; return false; }, cap);
    return found;
  }
  std::optional<FqfMap> isometry_to(const Fqf& other, i64 cap = kDefaultSearchCap) const {
    if (order() != other.order()) return std::nullopt;
    std::optional<FqfMap> found;
    for_each_isometry(other, 1, [&](const FqfMap& m) { found = m; return false; }, cap);
    return found;
  }

  // -- text form ---------------------------------------------------------------

  /// `<m>/<n>` for cyclic blocks, `U(2^k)`, `V(2^k)` (optionally negated with '-'), joined by '+'.
  std::string str() const {
    if (blocks_.empty()) return "0";
    std::string s;
    for (const auto& b : blocks_) {
      if (!s.empty()) s += "+";
      if (b.kind == BlockKind::Cyclic) {
        s += std::to_string(b.value.num()) + "/" + std::to_string(b.exponent_order());
      } else {
        if (b.sign < 0) s += "-";
        s += (b.kind == BlockKind::U ? "U(2^" : "V(2^") + std::to_string(b.k) + ")";
      }
    }
    return s;
  }

  static Fqf parse(std::string_view text) {
    std::string t;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t == "0" || t.empty()) return {};
    std::vector<FqfBlock> blocks;
    std::size_t pos = 0;
    while (pos <= t.size()) {
      std::size_t next = t.find('+', pos);
      std::string tok = t.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      if (tok.empty()) throw FqfError("empty term in form '" + std::string(text) + "'");
      int sign = 1;
      std::string body = tok;
      if (body[0] == '-' && (body.size() > 1 && (body[1] == 'U' || body[1] == 'V'))) {
        sign = -1;
        body = body.substr(1);
      }
      if (body[0] == 'U' || body[0] == 'V') {
        if (body.size() < 6 || body.compare(1, 3, "(2^") != 0 || body.back() != ')')
          throw FqfError("malformed block '" + tok + "'");
        int k = std::stoi(body.substr(4, body.size() - 5));
        if (k < 1) throw FqfError("block exponent must be >= 1");
        blocks.push_back({body[0] == 'U' ? BlockKind::U : BlockKind::V, 2, k, {}, sign});
      } else {
        auto slash = body.find('/');
        if (slash == std::string::npos) throw FqfError("malformed block '" + tok + "'");
        i64 m = std::stoll(body.substr(0, slash));
        i64 n = std::stoll(body.substr(slash + 1));
        auto c = cyclic(m, n);
        blocks.insert(blocks.end(), c.blocks_.begin(), c.blocks_.end());
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return Fqf(std::move(blocks));
  }

  friend bool operator==(const Fqf&, const Fqf&) = default;

  /// Generator index map sending each block of `sub`, scaled by `sign`, onto a
  /// distinct equal block of this form. The result is an isometry (sign = 1) or
  /// anti-isometry (sign = -1) of `sub` onto an orthogonal summand.
  std::vector<int> block_embedding(const Fqf& sub, int sign) const {
    std::vector<int> offset(blocks_.size() + 1, 0);
    for (std::size_t i = 0; i < blocks_.size(); ++i) offset[i + 1] = offset[i] + blocks_[i].rank();
    std::vector<bool> used(blocks_.size(), false);
    std::vector<int> out;
    for (FqfBlock b : sub.blocks_) {
      if (sign < 0) {
        if (b.kind == BlockKind::Cyclic)
          b.value = -b.value;
        else
          b.sign = -b.sign;
      }
      std::size_t at = 0;
      while (at < blocks_.size() && (used[at] || !(blocks_[at] == b))) ++at;
      if (at == blocks_.size()) throw FqfError("block " + Fqf({b}).str() + " not found in " + str());
      used[at] = true;
      for (int r = 0; r < b.rank(); ++r) out.push_back(offset[at] + r);
    }
    return out;
  }

 private:
  std::vector<FqfBlock> blocks_;

  void normalize() {
    for (auto& b : blocks_) {
      if (b.k < 1) throw FqfError("block exponent must be >= 1");
      if (!is_prime(b.p)) throw FqfError("block order must be a prime power");
      if (b.kind != BlockKind::Cyclic) {
        if (b.p != 2) throw FqfError("U/V blocks are 2-primary");
        b.value = {};
        b.sign = b.sign < 0 ? -1 : 1;
      } else {
        b.sign = 1;
        if (b.value.den() != b.exponent_order())
          throw FqfError("cyclic block value " + b.value.str() + " does not have order " +
                         std::to_string(b.exponent_order()));
      }
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](const FqfBlock& x, const FqfBlock& y) { return x.sort_key() < y.sort_key(); });
  }

  static int block_brown(const FqfBlock& b) {
    if (b.kind == BlockKind::U) return 0;
    if (b.kind == BlockKind::V) return static_cast<int>(mod(4 * b.k, 8));
    i64 pk = b.exponent_order();
    i64 c = b.value.num();
    if (b.p == 2) {
      i64 a = mod(c, 8);
      return static_cast<int>(mod(a + b.k * (a * a - 1) / 2, 8));
    }
    if (b.k % 2 == 0) return 0;
    // value c/p^k = 2a/p^k mod 2
    i64 a = c % 2 == 0 ? c / 2 : (c + pk) / 2;
    return static_cast<int>(mod(2 * legendre(a, b.p) - legendre(-1, b.p) - 1, 8));
  }
};

}  // namespace qlc
