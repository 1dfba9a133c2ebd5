#include "npstrata/polygon.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>

namespace npstrata {

bool factor_less(const IsoFactor& a, const IsoFactor& b) {
  // slope compare by cross multiplication: d_a/h_a < d_b/h_b
  long long lhs = static_cast<long long>(a.d) * b.height();
  long long rhs = static_cast<long long>(b.d) * a.height();
  if (lhs != rhs) return lhs < rhs;
  if (a.height() != b.height()) return a.height() < b.height();
  return std::pair(a.c, a.d) < std::pair(b.c, b.d);
}

NewtonPolygon::NewtonPolygon(std::vector<FactorTerm> terms) : terms_(std::move(terms)) {
  long long g = 0;
  for (const auto& t : terms_) g += static_cast<long long>(t.mult) * t.factor.d;
  genus_ = static_cast<int>(g);
}

NewtonPolygon NewtonPolygon::make(const std::vector<FactorEntry>& entries) {
  std::map<std::pair<int, int>, long long> mult;
  for (const auto& e : entries) {
    if (e.mult < 0) throw std::invalid_argument("negative multiplicity");
    if (e.c < 0 || e.d < 0) throw std::invalid_argument("negative factor component");
    if (e.mult == 0) continue;
    if (std::gcd(e.c, e.d) != 1) {
      throw PolygonError(PolygonError::Code::NonCoprime,
                         "factor G(" + std::to_string(e.c) + "," + std::to_string(e.d) +
                             ") is not coprime");
    }
    mult[{e.c, e.d}] += e.mult;
  }
  if (mult.empty()) {
    throw PolygonError(PolygonError::Code::Empty, "polygon has no factors");
  }
  for (const auto& [cd, m] : mult) {
    auto it = mult.find({cd.second, cd.first});
    long long mirrored = (it == mult.end()) ? 0 : it->second;
    if (mirrored != m) {
      throw PolygonError(PolygonError::Code::NotSymmetric,
                         "multiplicities of G(" + std::to_string(cd.first) + "," +
                             std::to_string(cd.second) + ") and its mirror differ");
    }
  }
  std::vector<FactorTerm> terms;
  terms.reserve(mult.size());
  long long genus = 0;
  for (const auto& [cd, m] : mult) {
    if (m > static_cast<long long>(1) << 30) throw std::invalid_argument("multiplicity too large");
    genus += m * cd.second;
    terms.push_back({IsoFactor{cd.first, cd.second}, static_cast<int>(m)});
  }
  if (genus > 1000000) throw std::invalid_argument("genus too large");
  std::sort(terms.begin(), terms.end(),
            [](const FactorTerm& a, const FactorTerm& b) { return factor_less(a.factor, b.factor); });
  return NewtonPolygon(std::move(terms));
}

int NewtonPolygon::p_rank() const {
  for (const auto& t : terms_)
    if (t.factor.c == 1 && t.factor.d == 0) return t.mult;
  return 0;
}

/* ---------- parsing ---------- */

namespace {

struct Parser {
  std::string_view s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& msg) {
    throw PolygonError(PolygonError::Code::Syntax,
                       "syntax error at byte " + std::to_string(at) + ": " + msg, at);
  }

  bool eat(char ch) {
    skip_ws();
    if (pos < s.size() && s[pos] == ch) {
      ++pos;
      return true;
    }
    return false;
  }

  // Plain digit run; no sign, no leading-zero restrictions.
  long long integer() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) fail(start, "expected integer");
    if (pos - start > 9) fail(start, "integer too large");
    long long v = 0;
    for (std::size_t i = start; i < pos; ++i) v = v * 10 + (s[i] - '0');
    return v;
  }

  long long positive_integer() {
    skip_ws();
    std::size_t start = pos;
    long long v = integer();
    if (v < 1) fail(start, "expected positive integer");
    return v;
  }

  std::string_view name() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
    return s.substr(start, pos - start);
  }

  // Appends the factors of one atom (with multiplicity 1) to out.
  void atom(std::vector<FactorEntry>& out) {
    skip_ws();
    std::size_t start = pos;
    if (pos >= s.size()) fail(start, "expected polygon atom");
    std::string_view id = name();
    if (id == "ord") {
      out.push_back({0, 1, 1});
      out.push_back({1, 0, 1});
    } else if (id == "ss") {
      out.push_back({1, 1, 1});
    } else if (id == "sigma") {
      long long k = positive_integer();
      out.push_back({1, 1, static_cast<int>(k)});
    } else if (id == "nu") {
      long long d = positive_integer();
      if (d < 3) {
        throw PolygonError(PolygonError::Code::NuTooSmall,
                           "nu " + std::to_string(d) + " is not defined (need d >= 3)", start);
      }
      out.push_back({1, static_cast<int>(d - 1), 1});
      out.push_back({static_cast<int>(d - 1), 1, 1});
    } else if (id == "G") {
      if (!eat('(')) fail(pos, "expected '(' after G");
      long long c = integer();
      if (!eat(',')) fail(pos, "expected ',' in G(c,d)");
      long long d = integer();
      if (!eat(')')) fail(pos, "expected ')' in G(c,d)");
      out.push_back({static_cast<int>(c), static_cast<int>(d), 1});
    } else {
      fail(start, id.empty() ? "expected polygon atom" : "unknown atom '" + std::string(id) + "'");
    }
  }

  void term(std::vector<FactorEntry>& out) {
    std::vector<FactorEntry> atoms;
    atom(atoms);
    long long m = 1;
    if (eat('^')) m = positive_integer();
    for (auto e : atoms) {
      e.mult = static_cast<int>(e.mult * m);
      out.push_back(e);
    }
  }

  std::vector<FactorEntry> expr() {
    std::vector<FactorEntry> out;
    term(out);
    while (true) {
      skip_ws();
      if (pos >= s.size()) break;
      if (s[pos] == '+') {
        ++pos;
        term(out);
      } else {
        fail(pos, "unexpected input");
      }
    }
    return out;
  }
};

}  // namespace

NewtonPolygon NewtonPolygon::parse(std::string_view text) {
  Parser p{text};
  return make(p.expr());
}

/* ---------- formatting ---------- */

std::string NewtonPolygon::format() const {
  // Walk factors in slope order.  The slope-0/slope-1 pair prints as one
  // "ord" token, a G(k,1)/G(1,k) pair (k >= 2) as one "nu{k+1}" token at the
  // position of its lower slope; everything else prints factor by factor.
  std::string out;
  auto piece = [&out](const std::string& tok, int m) {
    if (!out.empty()) out += '+';
    out += tok;
    if (m != 1) out += "^" + std::to_string(m);
  };
  for (const auto& t : terms_) {
    const auto [c, d] = t.factor;
    if (c == 1 && d == 0) {
      piece("ord", t.mult);
    } else if (c == 0 && d == 1) {
      continue;  // mirror of the ord token
    } else if (c == 1 && d == 1) {
      piece("ss", t.mult);
    } else if (d == 1) {
      piece("nu" + std::to_string(c + 1), t.mult);
    } else if (c == 1) {
      continue;  // mirror of a nu token
    } else {
      piece("G(" + std::to_string(c) + "," + std::to_string(d) + ")", t.mult);
    }
  }
  return out;
}

std::vector<std::array<long long, 3>> NewtonPolygon::factor_list() const {
  std::vector<std::array<long long, 3>> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back({t.factor.c, t.factor.d, t.mult});
  return out;
}

/* ---------- path geometry ---------- */

std::vector<std::pair<long long, long long>> NewtonPolygon::vertices() const {
  std::vector<std::pair<long long, long long>> v;
  long long x = 0, y = 0;
  v.emplace_back(x, y);
  for (const auto& t : terms_) {
    x += static_cast<long long>(t.mult) * t.factor.height();
    y += static_cast<long long>(t.mult) * t.factor.d;
    v.emplace_back(x, y);
  }
  return v;
}

Rational NewtonPolygon::value_at(long long x) const {
  if (x < 0 || x > 2 * static_cast<long long>(genus_))
    throw std::out_of_range("abscissa outside [0, 2g]");
  long long x0 = 0, y0 = 0;
  for (const auto& t : terms_) {
    long long run = static_cast<long long>(t.mult) * t.factor.height();
    if (x <= x0 + run) {
      return Rational(y0) + Rational(t.factor.d, t.factor.height()) * Rational(x - x0);
    }
    x0 += run;
    y0 += static_cast<long long>(t.mult) * t.factor.d;
  }
  return Rational(y0);  // x == 2g
}

bool NewtonPolygon::dominates(const NewtonPolygon& other) const {
  if (genus_ != other.genus_)
    throw PolygonError(PolygonError::Code::GenusMismatch,
                       "dominates() requires equal genus");
  for (long long x = 0; x <= 2 * static_cast<long long>(genus_); ++x) {
    if (value_at(x) < other.value_at(x)) return false;
  }
  return true;
}

/* ---------- algebra ---------- */

NewtonPolygon NewtonPolygon::direct_sum(const NewtonPolygon& other) const {
  std::vector<FactorEntry> entries;
  for (const auto& t : terms_) entries.push_back({t.factor.c, t.factor.d, t.mult});
  for (const auto& t : other.terms_) entries.push_back({t.factor.c, t.factor.d, t.mult});
  return make(entries);
}

namespace {

/* Decomposition into indecomposable symmetric units: the ord pair
 * {G(0,1),G(1,0)}, the ss factor G(1,1), and mirror pairs {G(c,d),G(d,c)}
 * with c > d >= 1.  Any symmetric sub-multiset is a choice of units, which
 * is what both partitions() and enumerate_polygons() iterate over. */
struct Unit {
  std::vector<FactorEntry> entries;  // one copy of the unit
  int genus = 0;
};

std::vector<std::pair<Unit, int>> unit_decomposition(const std::vector<FactorTerm>& terms) {
  std::vector<std::pair<Unit, int>> units;
  for (const auto& t : terms) {
    const auto [c, d] = t.factor;
    if (c == 1 && d == 0) {
      units.push_back({Unit{{{0, 1, 1}, {1, 0, 1}}, 1}, t.mult});
    } else if (c == 1 && d == 1) {
      units.push_back({Unit{{{1, 1, 1}}, 1}, t.mult});
    } else if (c > d) {  // representative of the pair {(c,d),(d,c)}
      units.push_back({Unit{{{c, d, 1}, {d, c, 1}}, c + d}, t.mult});
    }
  }
  return units;
}

}  // namespace

bool NewtonPolygon::is_indecomposable() const {
  int total = 0;
  for (const auto& [unit, count] : unit_decomposition(terms_)) {
    (void)unit;
    total += count;
  }
  return total == 1;
}

std::vector<PolygonPartition> NewtonPolygon::partitions() const {
  auto units = unit_decomposition(terms_);
  std::set<PolygonPartition> out;
  // Mixed-radix walk over how many copies of each unit go to the left side.
  std::vector<int> take(units.size(), 0);
  while (true) {
    std::size_t i = 0;
    while (i < units.size() && take[i] == units[i].second) {
      take[i] = 0;
      ++i;
    }
    if (i == units.size()) break;
    ++take[i];

    bool left_empty = true, right_empty = false;
    for (std::size_t j = 0; j < units.size(); ++j)
      if (take[j] > 0) left_empty = false;
    right_empty = true;
    for (std::size_t j = 0; j < units.size(); ++j)
      if (take[j] < units[j].second) right_empty = false;
    if (left_empty || right_empty) continue;

    std::vector<FactorEntry> l, r;
    for (std::size_t j = 0; j < units.size(); ++j) {
      for (const auto& e : units[j].first.entries) {
        if (take[j] > 0) l.push_back({e.c, e.d, e.mult * take[j]});
        int rest = units[j].second - take[j];
        if (rest > 0) r.push_back({e.c, e.d, e.mult * rest});
      }
    }
    out.insert(PolygonPartition(make(l), make(r)));
  }
  return {out.begin(), out.end()};
}

bool NewtonPolygon::operator<(const NewtonPolygon& other) const {
  if (genus_ != other.genus_) return genus_ < other.genus_;
  std::size_t n = std::min(terms_.size(), other.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = terms_[i];
    const auto& b = other.terms_[i];
    if (!(a.factor == b.factor)) return factor_less(a.factor, b.factor);
    if (a.mult != b.mult) return a.mult > b.mult;  // higher multiplicity first
  }
  return terms_.size() < other.terms_.size();
}

PolygonPartition::PolygonPartition(NewtonPolygon a, NewtonPolygon b)
    : left(std::move(a)), right(std::move(b)) {
  if (right < left) std::swap(left, right);
}

/* ---------- enumeration and named polygons ---------- */

std::vector<NewtonPolygon> enumerate_polygons(int g) {
  if (g < 1) throw std::invalid_argument("genus must be >= 1");

  // Unit catalog: ord, ss, then mirror pairs {(h-d,d),(d,h-d)} of total
  // genus h for 3 <= h <= g, gcd(h-d,d) = 1, d < h-d.
  std::vector<Unit> catalog;
  catalog.push_back(Unit{{{0, 1, 1}, {1, 0, 1}}, 1});
  catalog.push_back(Unit{{{1, 1, 1}}, 1});
  for (int h = 3; h <= g; ++h) {
    for (int d = 1; 2 * d < h; ++d) {
      if (std::gcd(h - d, d) != 1) continue;
      catalog.push_back(Unit{{{h - d, d, 1}, {d, h - d, 1}}, h});
    }
  }

  std::vector<NewtonPolygon> out;
  std::vector<FactorEntry> current;
  auto rec = [&](auto&& self, std::size_t idx, int remaining) -> void {
    if (remaining == 0) {
      out.push_back(NewtonPolygon::make(current));
      return;
    }
    if (idx == catalog.size()) return;
    const Unit& u = catalog[idx];
    for (int k = 0; k * u.genus <= remaining; ++k) {
      if (k > 0)
        for (const auto& e : u.entries) current.push_back({e.c, e.d, e.mult});
      self(self, idx + 1, remaining - k * u.genus);
    }
    int copies = remaining / u.genus;
    for (int k = 1; k <= copies; ++k)
      for (std::size_t j = 0; j < u.entries.size(); ++j) current.pop_back();
  };
  rec(rec, 0, g);
  std::sort(out.begin(), out.end());
  return out;
}

NewtonPolygon ordinary_polygon(int g) {
  if (g < 1) throw std::invalid_argument("genus must be >= 1");
  return NewtonPolygon::make({{0, 1, g}, {1, 0, g}});
}

NewtonPolygon supersingular_polygon(int g) {
  if (g < 1) throw std::invalid_argument("genus must be >= 1");
  return NewtonPolygon::make({{1, 1, g}});
}

NewtonPolygon nu_zero_polygon(int d) {
  if (d < 3)
    throw PolygonError(PolygonError::Code::NuTooSmall,
                       "nu " + std::to_string(d) + " is not defined (need d >= 3)");
  return NewtonPolygon::make({{1, d - 1, 1}, {d - 1, 1, 1}});
}

}  // namespace npstrata
