#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "npstrata/rational.hpp"

namespace npstrata {

/* Errors raised by polygon construction and parsing.  Syntax errors carry the
 * byte offset of the offending token in the input expression; other codes
 * carry an offset only when they were detected while parsing. */
class PolygonError : public std::runtime_error {
 public:
  enum class Code {
    NonCoprime,     // factor G(c,d) with gcd(c,d) != 1 (includes G(0,0))
    NotSymmetric,   // multiplicities of G(c,d) and G(d,c) differ
    Empty,          // no factors at all
    Syntax,         // expression does not match the grammar
    NuTooSmall,     // nu d with d < 3
    GenusMismatch,  // binary operation on polygons of different genus
  };

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  PolygonError(Code code, const std::string& what, std::size_t offset = npos)
      : std::runtime_error(what), code_(code), offset_(offset) {}

  Code code() const { return code_; }
  std::size_t offset() const { return offset_; }  // npos when not applicable

 private:
  Code code_;
  std::size_t offset_;
};

/* One isocrystal factor G_{c,d} with c,d >= 0 coprime.  It contributes a
 * segment of horizontal length c+d and slope d/(c+d) to the Newton polygon.
 * G(1,0) is the unit of slope 0, G(0,1) its symmetric partner of slope 1,
 * G(1,1) the supersingular factor of slope 1/2. */
struct IsoFactor {
  int c = 0;
  int d = 0;

  int height() const { return c + d; }
  Rational slope() const { return Rational(d, c + d); }

  friend bool operator==(const IsoFactor&, const IsoFactor&) = default;
};

// Canonical factor order: ascending slope.  Among coprime pairs the slope
// determines the factor, so the (c,d) tie-break below is never exercised on
// valid data; it only keeps the order total for arbitrary input.
bool factor_less(const IsoFactor& a, const IsoFactor& b);

struct FactorTerm {
  IsoFactor factor;
  int mult = 0;

  friend bool operator==(const FactorTerm&, const FactorTerm&) = default;
};

// Input triple (c, d, multiplicity) for NewtonPolygon::make.
struct FactorEntry {
  int c = 0;
  int d = 0;
  int mult = 1;
};

class NewtonPolygon;

/* Unordered split of a polygon into two nonempty symmetric halves, stored
 * with the canonically smaller side on the left. */
struct PolygonPartition;

/* A symmetric Newton polygon of genus g: a multiset of isocrystal factors
 * G_{c,d}, closed under (c,d) <-> (d,c), with total d-weight g.  Equivalently
 * the lower-convex lattice path from (0,0) to (2g,g) whose slopes in [0,1]
 * are the factor slopes.  Factors are kept merged and sorted by ascending
 * slope, so equality is plain memberwise comparison and every polygon has a
 * unique representation. */
class NewtonPolygon {
 public:
  // Multiset constructor.  Entries with mult == 0 are dropped, duplicates are
  // merged.  Throws PolygonError (NonCoprime / NotSymmetric / Empty) and
  // std::invalid_argument for negative components.
  static NewtonPolygon make(const std::vector<FactorEntry>& entries);

  // Parses the expression grammar:
  //   expr := term ("+" term)*
  //   term := atom ("^" posint)?
  //   atom := "ord" | "ss" | "sigma" posint | "nu" posint
  //         | "G(" int "," int ")"
  // Whitespace is ignored everywhere; integers are plain digit runs.
  // "ord" = G(0,1)+G(1,0), "ss" = G(1,1), "sigma g" = ss^g (sigma 1 = ss),
  // "nu d" = G(1,d-1)+G(d-1,1) and requires d >= 3 (NuTooSmall below that).
  static NewtonPolygon parse(std::string_view text);

  int genus() const { return genus_; }
  int p_rank() const;  // multiplicity of the slope-0 factor G(1,0)

  const std::vector<FactorTerm>& terms() const { return terms_; }

  // Canonical text form; parse(format()) == *this.
  std::string format() const;

  // Structured form [[c,d,m],...] in canonical order.
  std::vector<std::array<long long, 3>> factor_list() const;

  // Breakpoints of the lattice path, starting at (0,0) and ending at (2g,g).
  std::vector<std::pair<long long, long long>> vertices() const;

  // Exact height of the path at abscissa x, 0 <= x <= 2g.
  Rational value_at(long long x) const;

  NewtonPolygon direct_sum(const NewtonPolygon& other) const;

  // All unordered splits into two nonempty symmetric halves.  Splitting is
  // a choice of sub-multiset closed under (c,d) <-> (d,c); the result is
  // deduplicated and sorted.
  std::vector<PolygonPartition> partitions() const;
  bool is_indecomposable() const;

  // True when this polygon's path lies on or above `other` at every integer
  // abscissa 0..2g.  Throws GenusMismatch for different genera.
  bool dominates(const NewtonPolygon& other) const;

  bool operator==(const NewtonPolygon& other) const = default;

  // Total order: genus ascending, then factor lists lexicographically with
  // multiplicities compared descending.  This puts ord^g first and ss^g last
  // within a genus, which is the canonical enumeration order.
  bool operator<(const NewtonPolygon& other) const;

 private:
  explicit NewtonPolygon(std::vector<FactorTerm> terms);

  std::vector<FactorTerm> terms_;  // canonical: sorted, merged, symmetric
  int genus_ = 0;
};

struct PolygonPartition {
  NewtonPolygon left;
  NewtonPolygon right;

  // Normalizes so that !(right < left).
  PolygonPartition(NewtonPolygon a, NewtonPolygon b);

  friend bool operator==(const PolygonPartition&, const PolygonPartition&) = default;
  friend bool operator<(const PolygonPartition& x, const PolygonPartition& y) {
    if (x.left < y.left) return true;
    if (y.left < x.left) return false;
    return x.right < y.right;
  }
};

inline NewtonPolygon direct_sum(const NewtonPolygon& a, const NewtonPolygon& b) {
  return a.direct_sum(b);
}

// Every symmetric Newton polygon of genus g, each exactly once, in canonical
// order.  Throws std::invalid_argument for g < 1.
std::vector<NewtonPolygon> enumerate_polygons(int g);

// Named polygons.
NewtonPolygon ordinary_polygon(int g);       // ord^g, g >= 1
NewtonPolygon supersingular_polygon(int g);  // sigma_g = ss^g, g >= 1
NewtonPolygon nu_zero_polygon(int d);        // G(1,d-1)+G(d-1,1), d >= 3

}  // namespace npstrata
