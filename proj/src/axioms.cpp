#include "npstrata/axioms.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace npstrata {

/* ---------- PrimeCondition ---------- */

PrimeCondition PrimeCondition::all_primes() { return {}; }

PrimeCondition PrimeCondition::congruence(long long modulus, std::vector<long long> residues) {
  PrimeCondition c;
  c.type = Type::Congruence;
  c.modulus = modulus;
  if (modulus >= 1) {
    for (auto& r : residues) r = ((r % modulus) + modulus) % modulus;
  }
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  c.residues = std::move(residues);
  return c;
}

PrimeCondition PrimeCondition::almost_all(long long modulus, std::vector<long long> residues,
                                          std::string caveat) {
  PrimeCondition c = congruence(modulus, std::move(residues));
  c.type = Type::AlmostAll;
  c.caveat = std::move(caveat);
  return c;
}

bool PrimeCondition::holds_for_prime(long long p) const {
  switch (type) {
    case Type::AllPrimes:
      return true;
    case Type::Congruence:
      return std::binary_search(residues.begin(), residues.end(), p % modulus);
    case Type::AlmostAll:
      return false;  // no effective bound; never usable
  }
  return false;
}

std::optional<PrimeCondition> PrimeCondition::conjoin(const PrimeCondition& other) const {
  if (type == Type::AlmostAll || other.type == Type::AlmostAll)
    throw std::logic_error("conjoin is not defined for almost-all conditions");
  if (type == Type::AllPrimes) return other;
  if (other.type == Type::AllPrimes) return *this;
  long long l = std::lcm(modulus, other.modulus);
  std::vector<long long> joint;
  for (long long r = 0; r < l; ++r) {
    if (std::binary_search(residues.begin(), residues.end(), r % modulus) &&
        std::binary_search(other.residues.begin(), other.residues.end(), r % other.modulus)) {
      joint.push_back(r);
    }
  }
  if (joint.empty()) return std::nullopt;
  return congruence(l, std::move(joint));
}

std::string PrimeCondition::text() const {
  if (type == Type::AllPrimes) return "all primes";
  std::string s = "p in {";
  for (std::size_t i = 0; i < residues.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(residues[i]);
  }
  s += "} mod " + std::to_string(modulus);
  if (type == Type::AlmostAll) s += ", p >> 0 (" + caveat + ")";
  return s;
}

bool PrimeCondition::operator<(const PrimeCondition& other) const {
  auto key = [](const PrimeCondition& c) {
    return std::tie(c.type, c.modulus, c.residues, c.caveat);
  };
  return key(*this) < key(other);
}

bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

QueryContext QueryContext::prime(long long p) {
  if (!is_prime(p)) {
    throw AxiomError(AxiomError::Code::NotPrime,
                     std::to_string(p) + " is not a prime number");
  }
  QueryContext q;
  q.all_primes = false;
  q.p = p;
  return q;
}

std::string QueryContext::text() const {
  return all_primes ? "all primes" : "p = " + std::to_string(p);
}

bool condition_holds(const PrimeCondition& cond, const QueryContext& query) {
  if (query.all_primes) return cond.holds_all_primes();
  return cond.holds_for_prime(query.p);
}

/* ---------- builtin knowledge base ---------- */

std::string axiom_kind_name(AxiomKind kind) {
  switch (kind) {
    case AxiomKind::OccursSmooth:
      return "occurs-smooth";
    case AxiomKind::GenericNPOfPrankComponents:
      return "generic-np-of-prank-components";
    case AxiomKind::DimExactComponents:
      return "dim-exact-components";
    case AxiomKind::OpenDenseInPrankStratum:
      return "open-dense-in-prank-stratum";
  }
  return "?";
}

namespace {

std::optional<AxiomKind> axiom_kind_from_name(const std::string& name) {
  for (AxiomKind k :
       {AxiomKind::OccursSmooth, AxiomKind::GenericNPOfPrankComponents,
        AxiomKind::DimExactComponents, AxiomKind::OpenDenseInPrankStratum}) {
    if (axiom_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

NewtonPolygon ladder(int ord_count, const NewtonPolygon& tail) {
  if (ord_count == 0) return tail;
  return ordinary_polygon(ord_count).direct_sum(tail);
}

}  // namespace

std::vector<Axiom> builtin_axioms(int family_gmax) {
  if (family_gmax < 4) family_gmax = 4;
  const PrimeCondition all = PrimeCondition::all_primes();
  const PrimeCondition mod11 = PrimeCondition::congruence(11, {3, 4, 5, 9});
  const PrimeCondition mod7 = PrimeCondition::congruence(7, {2, 4});

  std::vector<Axiom> out;
  out.push_back({"A0.ord", AxiomKind::DimExactComponents, 1, {ordinary_polygon(1)}, std::nullopt,
                 all, 1, 1,
                 "classical: the generic elliptic curve is ordinary, and M_1 has dimension 1"});
  out.push_back({"A0.ss", AxiomKind::DimExactComponents, 1, {supersingular_polygon(1)}, std::nullopt,
                 all, 0, 0,
                 "Deuring: supersingular elliptic curves exist in every characteristic, finitely "
                 "many up to isomorphism"});
  out.push_back({"A1", AxiomKind::OccursSmooth, 3, {nu_zero_polygon(3)}, std::nullopt, all,
                 std::nullopt, std::nullopt,
                 "classical: T_3 is open and dense in A_3, so the generic p-rank-0 abelian "
                 "threefold is a Jacobian of a smooth curve"});
  for (int g = 3; g <= family_gmax; ++g) {
    out.push_back({"A2.g" + std::to_string(g), AxiomKind::GenericNPOfPrankComponents, g,
                   {ladder(g - 3, nu_zero_polygon(3))}, g - 3, all, 3LL * g - 6, 3LL * g - 6,
                   "Achter-Pries: the generic Newton polygon of every component of the p-rank "
                   "(g-3) stratum of M_g is ord^(g-3) + nu3, the stratum there being open and "
                   "dense of exact dimension"});
  }
  for (int g = 4; g <= family_gmax; ++g) {
    out.push_back({"A3.g" + std::to_string(g), AxiomKind::OpenDenseInPrankStratum, g,
                   {ladder(g - 4, nu_zero_polygon(4))}, g - 4, all, 3LL * g - 7, 3LL * g - 7,
                   "Pries (p-rank stratification survey): the locus of ord^(g-4) + nu4 is open "
                   "and dense in the p-rank (g-4) stratum of M_g"});
  }
  for (int g = 4; g <= family_gmax; ++g) {
    out.push_back({"A4.g" + std::to_string(g), AxiomKind::GenericNPOfPrankComponents, g,
                   {ladder(g - 4, nu_zero_polygon(4)),
                    ladder(g - 4, nu_zero_polygon(3).direct_sum(supersingular_polygon(1)))},
                   g - 4, all, std::nullopt, std::nullopt,
                   "Achter-Pries: the generic Newton polygon of every component of the p-rank "
                   "(g-4) stratum of M_g is ord^(g-4) + nu4 or ord^(g-4) + nu3 + ss"});
  }
  out.push_back({"A5", AxiomKind::OccursSmooth, 3, {supersingular_polygon(3)}, std::nullopt, all,
                 std::nullopt, std::nullopt,
                 "Oort: supersingular smooth curves of genus 3 exist in every characteristic"});
  out.push_back({"A6", AxiomKind::OccursSmooth, 4, {nu_zero_polygon(4)}, std::nullopt, all,
                 std::nullopt, std::nullopt,
                 "Achter-Pries: nu4 occurs for a smooth curve of genus 4 in every "
                 "characteristic"});
  out.push_back({"A7", AxiomKind::OccursSmooth, 5, {nu_zero_polygon(5)}, std::nullopt, mod11,
                 std::nullopt, std::nullopt,
                 "Li-Mantovan-Pries-Tang (cyclic covers of the projective line): nu5 occurs for "
                 "a smooth curve of genus 5 when p lies in {3, 4, 5, 9} mod 11"});
  out.push_back({"A8", AxiomKind::OccursSmooth, 6, {nu_zero_polygon(6)}, std::nullopt, mod7,
                 std::nullopt, std::nullopt,
                 "Li-Mantovan-Pries-Tang: nu6 occurs for a smooth curve of genus 6 when p lies "
                 "in {2, 4} mod 7"});
  out.push_back({"A9.1", AxiomKind::OccursSmooth, 5, {nu_zero_polygon(5)}, std::nullopt, mod11,
                 std::nullopt, std::nullopt,
                 "Li-Mantovan-Pries-Tang: the genus-5 polygon with slopes 1/5 and 4/5 occurs "
                 "for a smooth curve when p lies in {3, 4, 5, 9} mod 11"});
  out.push_back({"A9.2", AxiomKind::OccursSmooth, 5,
                 {NewtonPolygon::make({{2, 3, 1}, {3, 2, 1}})}, std::nullopt, mod11, std::nullopt,
                 std::nullopt,
                 "Li-Mantovan-Pries-Tang: the genus-5 polygon with slopes 2/5 and 3/5 occurs "
                 "for a smooth curve when p lies in {3, 4, 5, 9} mod 11"});
  out.push_back({"A10", AxiomKind::OccursSmooth, 5, {supersingular_polygon(5)}, std::nullopt,
                 PrimeCondition::almost_all(8, {7}, "no effective bound on p"), std::nullopt,
                 std::nullopt,
                 "Li-Mantovan-Pries-Tang: the supersingular polygon occurs for a smooth curve "
                 "of genus 5 for all sufficiently large p with p = 7 mod 8"});
  out.push_back({"A11", AxiomKind::OccursSmooth, 4, {supersingular_polygon(4)}, std::nullopt, all,
                 std::nullopt, std::nullopt,
                 "Kudo-Harashita-Senda: supersingular smooth curves of genus 4 exist in every "
                 "characteristic (redundant here: rederivable from the remaining axioms)"});
  return out;
}

/* ---------- JSON (strict) ---------- */

namespace {

[[noreturn]] void parse_fail(const std::string& msg) {
  throw AxiomError(AxiomError::Code::Parse, msg);
}

void reject_unknown_fields(const nlohmann::json& obj, const std::set<std::string>& known,
                           const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key)) parse_fail(where + ": unknown field '" + key + "'");
  }
}

nlohmann::ordered_json condition_to_json(const PrimeCondition& c) {
  nlohmann::ordered_json j;
  switch (c.type) {
    case PrimeCondition::Type::AllPrimes:
      j["type"] = "all-primes";
      break;
    case PrimeCondition::Type::Congruence:
      j["type"] = "congruence";
      j["modulus"] = c.modulus;
      j["residues"] = c.residues;
      break;
    case PrimeCondition::Type::AlmostAll:
      j["type"] = "almost-all";
      j["modulus"] = c.modulus;
      j["residues"] = c.residues;
      j["caveat"] = c.caveat;
      break;
  }
  return j;
}

PrimeCondition condition_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) parse_fail(where + ": prime_condition must be an object");
  if (!j.contains("type") || !j["type"].is_string())
    parse_fail(where + ": prime_condition needs a string 'type'");
  std::string type = j["type"].get<std::string>();
  if (type == "all-primes") {
    reject_unknown_fields(j, {"type"}, where);
    return PrimeCondition::all_primes();
  }
  if (type != "congruence" && type != "almost-all")
    parse_fail(where + ": unknown prime_condition type '" + type + "'");
  std::set<std::string> known = {"type", "modulus", "residues"};
  if (type == "almost-all") known.insert("caveat");
  reject_unknown_fields(j, known, where);
  if (!j.contains("modulus") || !j["modulus"].is_number_integer())
    parse_fail(where + ": prime_condition needs an integer 'modulus'");
  if (!j.contains("residues") || !j["residues"].is_array())
    parse_fail(where + ": prime_condition needs a 'residues' array");
  std::vector<long long> residues;
  for (const auto& r : j["residues"]) {
    if (!r.is_number_integer()) parse_fail(where + ": residues must be integers");
    residues.push_back(r.get<long long>());
  }
  long long modulus = j["modulus"].get<long long>();
  if (type == "congruence") return PrimeCondition::congruence(modulus, std::move(residues));
  if (!j.contains("caveat") || !j["caveat"].is_string())
    parse_fail(where + ": almost-all condition needs a string 'caveat'");
  return PrimeCondition::almost_all(modulus, std::move(residues), j["caveat"].get<std::string>());
}

}  // namespace

nlohmann::ordered_json axioms_to_json(const std::vector<Axiom>& axioms) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["axioms"] = nlohmann::ordered_json::array();
  for (const auto& a : axioms) {
    nlohmann::ordered_json j;
    j["id"] = a.id;
    j["kind"] = axiom_kind_name(a.kind);
    j["g"] = a.g;
    if (a.polygons.size() == 1) {
      j["polygon"] = a.polygons[0].format();
    } else {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& p : a.polygons) arr.push_back(p.format());
      j["polygons"] = arr;
    }
    if (a.f) j["f"] = *a.f;
    j["prime_condition"] = condition_to_json(a.condition);
    if (a.dim_lo) j["dim_lo"] = *a.dim_lo;
    if (a.dim_hi) j["dim_hi"] = *a.dim_hi;
    j["citation"] = a.citation;
    doc["axioms"].push_back(std::move(j));
  }
  return doc;
}

std::vector<Axiom> axioms_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) parse_fail("document root must be an object");
  reject_unknown_fields(doc, {"version", "axioms"}, "document");
  if (!doc.contains("version") || doc["version"] != 1)
    parse_fail("document needs 'version': 1");
  if (!doc.contains("axioms") || !doc["axioms"].is_array())
    parse_fail("document needs an 'axioms' array");

  std::vector<Axiom> out;
  int index = 0;
  for (const auto& j : doc["axioms"]) {
    std::string where = "axioms[" + std::to_string(index++) + "]";
    if (!j.is_object()) parse_fail(where + ": axiom must be an object");
    reject_unknown_fields(j,
                          {"id", "kind", "g", "polygon", "polygons", "f", "prime_condition",
                           "dim_lo", "dim_hi", "citation"},
                          where);
    Axiom a;
    if (!j.contains("id") || !j["id"].is_string()) parse_fail(where + ": needs a string 'id'");
    a.id = j["id"].get<std::string>();
    where += " (" + a.id + ")";
    if (!j.contains("kind") || !j["kind"].is_string())
      parse_fail(where + ": needs a string 'kind'");
    auto kind = axiom_kind_from_name(j["kind"].get<std::string>());
    if (!kind) parse_fail(where + ": unknown kind '" + j["kind"].get<std::string>() + "'");
    a.kind = *kind;
    if (!j.contains("g") || !j["g"].is_number_integer())
      parse_fail(where + ": needs an integer 'g'");
    a.g = j["g"].get<int>();
    if (j.contains("polygon") == j.contains("polygons"))
      parse_fail(where + ": needs exactly one of 'polygon' and 'polygons'");
    try {
      if (j.contains("polygon")) {
        if (!j["polygon"].is_string()) parse_fail(where + ": 'polygon' must be a string");
        a.polygons.push_back(NewtonPolygon::parse(j["polygon"].get<std::string>()));
      } else {
        if (!j["polygons"].is_array()) parse_fail(where + ": 'polygons' must be an array");
        for (const auto& p : j["polygons"]) {
          if (!p.is_string()) parse_fail(where + ": 'polygons' entries must be strings");
          a.polygons.push_back(NewtonPolygon::parse(p.get<std::string>()));
        }
      }
    } catch (const PolygonError& e) {
      parse_fail(where + ": bad polygon: " + e.what());
    }
    if (j.contains("f")) {
      if (!j["f"].is_number_integer()) parse_fail(where + ": 'f' must be an integer");
      a.f = j["f"].get<int>();
    }
    if (!j.contains("prime_condition"))
      parse_fail(where + ": needs a 'prime_condition'");
    a.condition = condition_from_json(j["prime_condition"], where);
    if (j.contains("dim_lo")) {
      if (!j["dim_lo"].is_number_integer()) parse_fail(where + ": 'dim_lo' must be an integer");
      a.dim_lo = j["dim_lo"].get<long long>();
    }
    if (j.contains("dim_hi")) {
      if (!j["dim_hi"].is_number_integer()) parse_fail(where + ": 'dim_hi' must be an integer");
      a.dim_hi = j["dim_hi"].get<long long>();
    }
    if (!j.contains("citation") || !j["citation"].is_string())
      parse_fail(where + ": needs a string 'citation'");
    a.citation = j["citation"].get<std::string>();
    out.push_back(std::move(a));
  }
  return out;
}

/* ---------- validation ---------- */

std::vector<std::string> validate_axioms(const std::vector<Axiom>& axioms) {
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto& a : axioms) {
    std::string tag = "axiom " + (a.id.empty() ? "<unnamed>" : a.id);
    auto bad = [&](const std::string& msg) { problems.push_back(tag + ": " + msg); };

    if (a.id.empty()) bad("empty id");
    if (!seen.insert(a.id).second) bad("duplicate id");
    if (a.g < 1) bad("g must be >= 1");
    if (a.polygons.empty()) bad("no polygons");
    for (const auto& p : a.polygons) {
      if (p.genus() != a.g)
        bad("polygon " + p.format() + " has genus " + std::to_string(p.genus()) +
            ", axiom states g=" + std::to_string(a.g));
    }
    bool stratum_kind = a.kind == AxiomKind::GenericNPOfPrankComponents ||
                        a.kind == AxiomKind::OpenDenseInPrankStratum;
    if (stratum_kind) {
      if (!a.f) {
        bad("kind " + axiom_kind_name(a.kind) + " needs the p-rank field 'f'");
      } else {
        if (*a.f < 0 || *a.f > a.g) bad("f out of range [0, g]");
        for (const auto& p : a.polygons) {
          if (p.p_rank() != *a.f)
            bad("polygon " + p.format() + " has p-rank " + std::to_string(p.p_rank()) +
                ", axiom states f=" + std::to_string(*a.f));
        }
      }
    } else {
      if (a.f) bad("kind " + axiom_kind_name(a.kind) + " does not take 'f'");
      if (a.polygons.size() != 1) bad("kind " + axiom_kind_name(a.kind) + " takes one polygon");
    }
    if (a.kind == AxiomKind::OpenDenseInPrankStratum && a.polygons.size() != 1)
      bad("open-dense-in-prank-stratum takes one polygon");
    if (a.kind == AxiomKind::DimExactComponents && (!a.dim_lo || !a.dim_hi))
      bad("dim-exact-components needs dim_lo and dim_hi");
    if (a.dim_lo && *a.dim_lo < 0) bad("dim_lo must be >= 0");
    if (a.dim_hi && *a.dim_hi < 0) bad("dim_hi must be >= 0");
    if (a.dim_lo && a.dim_hi && *a.dim_lo > *a.dim_hi) bad("dim_lo exceeds dim_hi");

    if (a.condition.type != PrimeCondition::Type::AllPrimes) {
      if (a.condition.modulus < 2) bad("condition modulus must be >= 2");
      if (a.condition.residues.empty()) bad("condition residue set is empty");
      for (long long r : a.condition.residues) {
        if (r < 0 || r >= a.condition.modulus) {
          bad("residue " + std::to_string(r) + " not reduced mod " +
              std::to_string(a.condition.modulus));
        } else if (std::gcd(r, a.condition.modulus) != 1 && !is_prime(r)) {
          bad("residue " + std::to_string(r) + " mod " + std::to_string(a.condition.modulus) +
              " is neither a unit nor a prime");
        }
      }
      if (a.condition.type == PrimeCondition::Type::AlmostAll && a.condition.caveat.empty())
        bad("almost-all condition needs a caveat");
    }
    if (a.citation.empty()) bad("missing citation");
  }
  return problems;
}

std::vector<Axiom> load_axioms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AxiomError(AxiomError::Code::Io, "cannot open axiom file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw AxiomError(AxiomError::Code::Parse, std::string("bad JSON in ") + path + ": " + e.what());
  }
  auto axioms = axioms_from_json(doc);
  auto problems = validate_axioms(axioms);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << path << " failed validation:";
    for (const auto& p : problems) msg << "\n  - " << p;
    throw AxiomError(AxiomError::Code::Validation, msg.str());
  }
  return axioms;
}

void save_axioms(const std::vector<Axiom>& axioms, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw AxiomError(AxiomError::Code::Io, "cannot open for writing: " + path);
  out << axioms_to_json(axioms).dump(2) << "\n";
  if (!out) throw AxiomError(AxiomError::Code::Io, "write failed: " + path);
}

}  // namespace npstrata
