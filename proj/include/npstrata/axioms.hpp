#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "npstrata/polygon.hpp"

namespace npstrata {

class AxiomError : public std::runtime_error {
 public:
  enum class Code { Parse, Validation, NotPrime, Io };

  AxiomError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// A condition on the characteristic p under which a fact is known.
//   AllPrimes   -- unconditional
//   Congruence  -- p lies in a residue set mod n; residues are units mod n or
//                  primes below n (a non-unit residue r is satisfiable only
//                  by p = r itself)
//   AlmostAll   -- "p large enough" on top of a base congruence; reporting
//                  only, never satisfies any query
struct PrimeCondition {
  enum class Type { AllPrimes, Congruence, AlmostAll };

  Type type = Type::AllPrimes;
  long long modulus = 0;              // Congruence / AlmostAll
  std::vector<long long> residues;    // sorted, unique, reduced mod modulus
  std::string caveat;                 // AlmostAll only

  static PrimeCondition all_primes();
  static PrimeCondition congruence(long long modulus, std::vector<long long> residues);
  static PrimeCondition almost_all(long long modulus, std::vector<long long> residues,
                                   std::string caveat);

  bool holds_for_prime(long long p) const;  // AlmostAll -> false
  bool holds_all_primes() const { return type == Type::AllPrimes; }

  // CRT conjunction; nullopt when the residue intersection is empty.
  // AllPrimes is the identity.  Not defined for AlmostAll operands.
  std::optional<PrimeCondition> conjoin(const PrimeCondition& other) const;

  std::string text() const;  // "all primes" / "p = 3, 4, 5, 9 mod 11" / ...

  bool operator==(const PrimeCondition&) const = default;
  bool operator<(const PrimeCondition& other) const;
};

bool is_prime(long long n);

// A query fixes the characteristic context: either "in every characteristic"
// or one concrete prime.
struct QueryContext {
  bool all_primes = true;
  long long p = 0;

  static QueryContext all() { return {}; }
  static QueryContext prime(long long p);  // throws AxiomError(NotPrime)

  std::string text() const;
};

bool condition_holds(const PrimeCondition& cond, const QueryContext& query);

enum class AxiomKind {
  OccursSmooth,                 // the polygon occurs for a smooth genus-g curve
  GenericNPOfPrankComponents,   // generic polygon of every p-rank-f component lies in G
  DimExactComponents,           // occurs, with the stratum dimension known exactly
  OpenDenseInPrankStratum,      // the polygon's locus is open dense in the p-rank stratum
};

std::string axiom_kind_name(AxiomKind kind);

struct Axiom {
  std::string id;
  AxiomKind kind = AxiomKind::OccursSmooth;
  int g = 0;
  std::vector<NewtonPolygon> polygons;  // one entry except for GenericNP... sets
  std::optional<int> f;                 // p-rank, for the stratum-level kinds
  PrimeCondition condition;
  std::optional<long long> dim_lo;
  std::optional<long long> dim_hi;
  std::string citation;
};

// The shipped knowledge base.  The per-genus families (generic polygons of
// the p-rank g-3 and g-4 strata) are instantiated for every genus up to
// family_gmax.
std::vector<Axiom> builtin_axioms(int family_gmax = 12);

// Structured-text (JSON) round trip.  Parsing is strict: unknown fields,
// missing fields, and malformed values raise AxiomError(Parse).
nlohmann::ordered_json axioms_to_json(const std::vector<Axiom>& axioms);
std::vector<Axiom> axioms_from_json(const nlohmann::json& doc);

// Itemized semantic problems (bad polygon/genus, bad residues, duplicate
// ids, missing citation, ...); empty means valid.
std::vector<std::string> validate_axioms(const std::vector<Axiom>& axioms);

// Load + validate a file; throws AxiomError (Io / Parse / Validation).
std::vector<Axiom> load_axioms(const std::string& path);
void save_axioms(const std::vector<Axiom>& axioms, const std::string& path);

}  // namespace npstrata
