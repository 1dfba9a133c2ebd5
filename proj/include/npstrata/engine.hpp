#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "npstrata/axioms.hpp"
#include "npstrata/polygon.hpp"
#include "npstrata/strata.hpp"

namespace npstrata {

class EngineError : public std::runtime_error {
 public:
  enum class Code { KeyOutOfUniverse, Inconsistent, Parse };

  EngineError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Disjunction (DNF) of prime conditions under which a fact is established;
// empty set = not established.  Atoms accumulate as a raw set during
// deduction; normalized() is applied only at presentation time.
class ConditionSet {
 public:
  ConditionSet() = default;
  static ConditionSet single(PrimeCondition atom);

  bool established() const { return !atoms_.empty(); }
  void add(const PrimeCondition& atom) { atoms_.insert(atom); }
  void add_all(const ConditionSet& other);
  ConditionSet conjoin(const ConditionSet& other) const;  // pairwise CRT products

  // Presentation form: AllPrimes absorbs everything; same-modulus atoms are
  // merged; atoms implied by another atom are dropped; result is sorted.
  ConditionSet normalized() const;

  const std::set<PrimeCondition>& atoms() const { return atoms_; }
  std::string text() const;           // of the normalized form
  nlohmann::json to_json() const;     // of the normalized form
  static ConditionSet from_json(const nlohmann::json& arr);

  bool operator==(const ConditionSet&) const = default;

 private:
  std::set<PrimeCondition> atoms_;
};

enum class RuleId { AxiomInjection, R1SmallCodim, R2Prop31, R3OortCase, R4Purity };
std::string rule_name(RuleId rule);

struct FactKey {
  int g = 0;
  NewtonPolygon xi;

  bool operator==(const FactKey&) const = default;
  bool operator<(const FactKey& other) const {
    if (g != other.g) return g < other.g;
    return xi < other.xi;
  }
};

// One hypothesis-(b) comparison for a partition (left, right):
// td_left + td_right < e must hold for the splitting rule to fire.
struct PartitionCheck {
  NewtonPolygon left, right;
  long long td_left = 0, td_right = 0, e = 0;
  bool passed = false;

  std::string line() const;  // e.g. "0 + 2 = 2 < 3" or "1 + 2 = 3 !< 3"
};

struct Blocker {
  enum class Kind { NoPartition, NoNonemptyPair, HypothesisB };

  Kind kind = Kind::NoPartition;
  std::optional<PartitionCheck> witness;  // HypothesisB: minimal failing sum
  std::vector<PartitionCheck> failing;    // HypothesisB: every failing partition

  std::string text() const;
};

// Canonical derivation of an occurrence fact, reconstructed after the
// fixpoint so that it does not depend on rule scheduling.
struct OccursProvenance {
  RuleId rule = RuleId::AxiomInjection;
  // AxiomInjection
  std::string axiom_id;
  std::string citation;
  // R1SmallCodim
  long long codim = 0;
  long long dim_exact = 0;
  // R2Prop31
  long long e = 0;
  std::optional<PolygonPartition> witness;
  std::vector<PartitionCheck> checks;
  // R3OortCase
  int d = 0;
  std::string premise;
  ConditionSet premise_condition;
  long long dim_lo = 0;
};

struct FactState {
  ConditionSet occurs;                // conditions under which xi occurs
  std::optional<long long> dim_lo;    // some component has dimension >= this
  long long dim_hi = 0;               // every component has dimension <= this
  bool empty_ct = false;              // compact-type stratum known empty (never derived)
};

struct FactRecord {
  FactKey key;
  FactState state;
  std::optional<OccursProvenance> occurs_trace;
  std::vector<std::string> dim_notes;
  std::vector<Blocker> blockers;
  nlohmann::json raw_trace;  // only on imported tables
};

struct ClosureOptions {
  std::vector<RuleId> rule_order = {RuleId::AxiomInjection, RuleId::R1SmallCodim,
                                    RuleId::R4Purity, RuleId::R2Prop31, RuleId::R3OortCase};
  int jobs = 1;
};

class FactTable {
 public:
  const std::vector<FactRecord>& records() const { return records_; }
  int g_max() const { return g_max_; }
  const QueryContext& context() const { return context_; }

  bool contains(int g, const NewtonPolygon& xi) const;
  const FactRecord& at(int g, const NewtonPolygon& xi) const;  // EngineError(KeyOutOfUniverse)

  // Whether the compact-type stratum of xi is known nonempty in the table's
  // context: xi occurs, or some partition has both sides nonempty.
  bool nonempty_ct(int g, const NewtonPolygon& xi) const;

  // Largest known dimension bound for the compact-type stratum: the maximum
  // of dim_hi_all(xi) and td_max(left) + td_max(right) over partitions.  (A
  // stratum known to be empty would contribute -infinity, but no emptiness
  // fact is ever derivable from the axiom base, so the value is always >= 0.)
  long long td_max(int g, const NewtonPolygon& xi) const;

  nlohmann::json to_json() const;  // canonical array, stable key order
  std::string export_text() const;
  static FactTable from_json(const nlohmann::json& doc);

 private:
  friend FactTable closure(int, const QueryContext&, const std::vector<Axiom>&,
                           const ClosureOptions&);
  std::size_t index_of(int g, const NewtonPolygon& xi) const;  // throws KeyOutOfUniverse
  void rebuild_derived();

  std::vector<FactRecord> records_;  // sorted by key
  std::vector<char> ne_;             // nonempty_ct per record
  std::vector<long long> td_;        // td_max per record
  int g_max_ = 0;
  QueryContext context_;
};

// Least fixpoint of {axiom injection, R1, R4, R2, R3} over every key with
// genus <= g_max.  The result is independent of rule order and job count.
FactTable closure(int g_max, const QueryContext& context, const std::vector<Axiom>& axioms,
                  const ClosureOptions& options = {});

// Multi-line human-readable rendering of one fact (status, dims, trace,
// blockers).
std::string render_fact(const FactRecord& rec, bool with_trace);

}  // namespace npstrata
