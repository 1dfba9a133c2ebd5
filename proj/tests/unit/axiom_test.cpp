#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <doctest.h>

#include "npstrata/axioms.hpp"
#include "npstrata/polygon.hpp"

using namespace npstrata;

namespace {
NewtonPolygon P(const std::string& s) { return NewtonPolygon::parse(s); }

const Axiom& find_axiom(const std::vector<Axiom>& axioms, const std::string& id) {
  auto it = std::find_if(axioms.begin(), axioms.end(),
                         [&](const Axiom& a) { return a.id == id; });
  REQUIRE(it != axioms.end());
  return *it;
}
}  // namespace

TEST_CASE("prime conditions: construction, satisfaction, text") {
  PrimeCondition all = PrimeCondition::all_primes();
  CHECK(all.holds_all_primes());
  CHECK(all.holds_for_prime(2));
  CHECK(all.text() == "all primes");

  PrimeCondition mod11 = PrimeCondition::congruence(11, {9, 3, 5, 4});
  CHECK(mod11.residues == std::vector<long long>{3, 4, 5, 9});  // sorted
  CHECK(mod11.holds_for_prime(3));
  CHECK(mod11.holds_for_prime(47));  // 47 = 4*11 + 3
  CHECK_FALSE(mod11.holds_for_prime(2));
  CHECK_FALSE(mod11.holds_for_prime(11));
  CHECK_FALSE(mod11.holds_all_primes());
  CHECK(mod11.text() == "p in {3, 4, 5, 9} mod 11");

  PrimeCondition almost = PrimeCondition::almost_all(8, {7}, "for p large enough");
  CHECK_FALSE(almost.holds_for_prime(7));   // reporting-only
  CHECK_FALSE(almost.holds_for_prime(23));  // even though 23 = 7 mod 8
  CHECK_FALSE(almost.holds_all_primes());

  CHECK(is_prime(2));
  CHECK(is_prime(47));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(91));  // 7 * 13
}

TEST_CASE("prime condition conjunction is CRT intersection") {
  PrimeCondition a = PrimeCondition::congruence(11, {3, 4, 5, 9});
  PrimeCondition b = PrimeCondition::congruence(7, {2, 4});

  auto ab = a.conjoin(b);
  REQUIRE(ab);
  CHECK(ab->modulus == 77);
  CHECK(ab->residues.size() == 8);
  for (long long r : ab->residues) {
    CHECK(a.holds_for_prime(r + 77));  // any representative prime-or-not check
    CHECK((r % 11 == 3 || r % 11 == 4 || r % 11 == 5 || r % 11 == 9));
    CHECK((r % 7 == 2 || r % 7 == 4));
  }
  CHECK(a.conjoin(b) == b.conjoin(a));

  // AllPrimes is the identity.
  CHECK(a.conjoin(PrimeCondition::all_primes()) == a);
  CHECK(PrimeCondition::all_primes().conjoin(a) == a);

  // Same modulus, disjoint residues: empty intersection.
  CHECK_FALSE(PrimeCondition::congruence(5, {2}).conjoin(PrimeCondition::congruence(5, {3})));

  // Shared factor: only compatible residues survive.
  auto cc = PrimeCondition::congruence(4, {3}).conjoin(PrimeCondition::congruence(8, {7}));
  REQUIRE(cc);
  CHECK(cc->modulus == 8);
  CHECK(cc->residues == std::vector<long long>{7});
}

TEST_CASE("query contexts") {
  QueryContext all = QueryContext::all();
  CHECK(all.all_primes);
  QueryContext p3 = QueryContext::prime(3);
  CHECK_FALSE(p3.all_primes);
  CHECK(p3.p == 3);
  CHECK_THROWS_AS(QueryContext::prime(14), AxiomError);
  CHECK_THROWS_AS(QueryContext::prime(1), AxiomError);

  PrimeCondition mod11 = PrimeCondition::congruence(11, {3, 4, 5, 9});
  CHECK(condition_holds(mod11, QueryContext::prime(3)));
  CHECK_FALSE(condition_holds(mod11, QueryContext::prime(13)));
  CHECK_FALSE(condition_holds(mod11, QueryContext::all()));
  CHECK(condition_holds(PrimeCondition::all_primes(), QueryContext::all()));
  PrimeCondition almost = PrimeCondition::almost_all(8, {7}, "caveat");
  CHECK_FALSE(condition_holds(almost, QueryContext::all()));
  CHECK_FALSE(condition_holds(almost, QueryContext::prime(7)));
}

TEST_CASE("built-in axiom base content") {
  auto axioms = builtin_axioms(12);
  CHECK(axioms.size() == 39);
  CHECK(validate_axioms(axioms).empty());

  const Axiom& a0o = find_axiom(axioms, "A0.ord");
  CHECK(a0o.kind == AxiomKind::DimExactComponents);
  CHECK(a0o.dim_lo == 1);
  CHECK(a0o.dim_hi == 1);
  const Axiom& a0s = find_axiom(axioms, "A0.ss");
  CHECK(a0s.dim_lo == 0);
  CHECK(a0s.dim_hi == 0);

  const Axiom& a1 = find_axiom(axioms, "A1");
  CHECK(a1.kind == AxiomKind::OccursSmooth);
  CHECK(a1.g == 3);
  CHECK(a1.polygons == std::vector<NewtonPolygon>{P("nu3")});
  CHECK(a1.condition.holds_all_primes());

  const Axiom& a2 = find_axiom(axioms, "A2.g5");
  CHECK(a2.kind == AxiomKind::GenericNPOfPrankComponents);
  CHECK(a2.f == 2);
  CHECK(a2.polygons == std::vector<NewtonPolygon>{P("ord^2+nu3")});
  CHECK(a2.dim_lo == 9);
  CHECK(a2.dim_hi == 9);

  const Axiom& a3 = find_axiom(axioms, "A3.g6");
  CHECK(a3.kind == AxiomKind::OpenDenseInPrankStratum);
  CHECK(a3.polygons == std::vector<NewtonPolygon>{P("ord^2+nu4")});

  const Axiom& a4 = find_axiom(axioms, "A4.g6");
  CHECK(a4.kind == AxiomKind::GenericNPOfPrankComponents);
  CHECK(a4.f == 2);
  CHECK(a4.polygons ==
        std::vector<NewtonPolygon>{P("ord^2+nu4"), P("ord^2+nu3+ss")});
  CHECK_FALSE(a4.dim_lo);

  const Axiom& a7 = find_axiom(axioms, "A7");
  CHECK(a7.polygons == std::vector<NewtonPolygon>{P("nu5")});
  CHECK(a7.condition == PrimeCondition::congruence(11, {3, 4, 5, 9}));

  const Axiom& a8 = find_axiom(axioms, "A8");
  CHECK(a8.condition == PrimeCondition::congruence(7, {2, 4}));

  const Axiom& a92 = find_axiom(axioms, "A9.2");
  CHECK(a92.polygons == std::vector<NewtonPolygon>{P("G(2,3)+G(3,2)")});
  CHECK(a92.condition.modulus == 11);

  const Axiom& a10 = find_axiom(axioms, "A10");
  CHECK(a10.condition.type == PrimeCondition::Type::AlmostAll);
  CHECK(a10.polygons == std::vector<NewtonPolygon>{P("ss^5")});
  CHECK_FALSE(a10.condition.caveat.empty());

  const Axiom& a11 = find_axiom(axioms, "A11");
  CHECK(a11.polygons == std::vector<NewtonPolygon>{P("ss^4")});
  CHECK(a11.condition.holds_all_primes());

  // Families stop where requested; the fixed axioms are unaffected.
  auto small = builtin_axioms(4);
  CHECK(std::count_if(small.begin(), small.end(),
                      [](const Axiom& a) { return a.id.rfind("A2.", 0) == 0; }) == 2);
}

TEST_CASE("axiom JSON round trip and file loading") {
  auto axioms = builtin_axioms(12);
  auto doc = axioms_to_json(axioms);
  auto back = axioms_from_json(doc);
  CHECK(axioms_to_json(back) == doc);

  // The shipped file is the serialized built-in base.
  auto from_file = load_axioms("data/axioms-builtin.json");
  CHECK(axioms_to_json(from_file) == doc);
}

TEST_CASE("axiom parsing and validation reject malformed bases") {
  auto parse_code = [](const nlohmann::json& j) -> std::optional<AxiomError::Code> {
    try {
      axioms_from_json(j);
    } catch (const AxiomError& e) {
      return e.code();
    }
    return std::nullopt;
  };

  nlohmann::json good = axioms_to_json(builtin_axioms(4));
  CHECK_FALSE(parse_code(good));

  nlohmann::json bad = good;
  bad["axioms"][0]["kind"] = "no-such-kind";
  CHECK(parse_code(bad) == AxiomError::Code::Parse);

  bad = good;
  bad["axioms"][0]["surprise"] = 1;
  CHECK(parse_code(bad) == AxiomError::Code::Parse);

  bad = good;
  bad["version"] = 2;
  CHECK(parse_code(bad) == AxiomError::Code::Parse);

  auto issues_of = [](std::vector<Axiom> axioms) {
    return validate_axioms(axioms);
  };

  // Duplicate id.
  auto dup = builtin_axioms(4);
  dup.push_back(dup.front());
  CHECK_FALSE(issues_of(dup).empty());

  // Residue 0 mod 11 is neither a unit nor a prime.
  Axiom rogue = find_axiom(builtin_axioms(4), "A1");
  rogue.condition = PrimeCondition::congruence(11, {0});
  CHECK_FALSE(issues_of({rogue}).empty());

  // Residue 2 mod 8 is a non-unit but prime, hence allowed.
  rogue.condition = PrimeCondition::congruence(8, {2});
  CHECK(issues_of({rogue}).empty());

  // Genus mismatch between the polygon and the axiom.
  rogue = find_axiom(builtin_axioms(4), "A1");
  rogue.g = 4;
  CHECK_FALSE(issues_of({rogue}).empty());

  // Missing citation.
  rogue = find_axiom(builtin_axioms(4), "A1");
  rogue.citation.clear();
  CHECK_FALSE(issues_of({rogue}).empty());

  // Stratum-kind axioms need a matching p-rank.
  rogue = find_axiom(builtin_axioms(4), "A2.g4");
  rogue.f = 0;
  CHECK_FALSE(issues_of({rogue}).empty());

  // load_axioms surfaces IO failures.
  CHECK_THROWS_AS(load_axioms("data/no-such-file.json"), AxiomError);
}
