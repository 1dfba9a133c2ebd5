#include "npstrata/engine.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

namespace npstrata {

/* ---------- ConditionSet ---------- */

ConditionSet ConditionSet::single(PrimeCondition atom) {
  ConditionSet cs;
  cs.atoms_.insert(std::move(atom));
  return cs;
}

void ConditionSet::add_all(const ConditionSet& other) {
  atoms_.insert(other.atoms_.begin(), other.atoms_.end());
}

ConditionSet ConditionSet::conjoin(const ConditionSet& other) const {
  ConditionSet out;
  for (const auto& a : atoms_) {
    for (const auto& b : other.atoms_) {
      if (auto c = a.conjoin(b)) out.atoms_.insert(*c);
    }
  }
  return out;
}

ConditionSet ConditionSet::normalized() const {
  for (const auto& a : atoms_) {
    if (a.type == PrimeCondition::Type::AllPrimes) return single(PrimeCondition::all_primes());
  }
  // merge atoms with equal modulus
  std::map<long long, std::set<long long>> by_modulus;
  std::vector<PrimeCondition> others;  // almost-all atoms pass through untouched
  for (const auto& a : atoms_) {
    if (a.type == PrimeCondition::Type::Congruence) {
      by_modulus[a.modulus].insert(a.residues.begin(), a.residues.end());
    } else {
      others.push_back(a);
    }
  }
  std::vector<PrimeCondition> merged;
  for (const auto& [m, res] : by_modulus) {
    merged.push_back(PrimeCondition::congruence(m, {res.begin(), res.end()}));
  }
  // drop atoms implied by another kept atom: B follows from A when
  // A.modulus | B.modulus and B's residues map into A's residue set
  auto implies = [](const PrimeCondition& a, const PrimeCondition& b) {
    if (b.modulus % a.modulus != 0) return false;
    for (long long r : b.residues) {
      if (!std::binary_search(a.residues.begin(), a.residues.end(), r % a.modulus)) return false;
    }
    return true;
  };
  ConditionSet out;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    bool subsumed = false;
    for (std::size_t j = 0; j < merged.size() && !subsumed; ++j) {
      if (i != j && implies(merged[j], merged[i]) && !implies(merged[i], merged[j])) {
        subsumed = true;
      }
    }
    if (!subsumed) out.atoms_.insert(merged[i]);
  }
  for (const auto& a : others) out.atoms_.insert(a);
  return out;
}

std::string ConditionSet::text() const {
  if (atoms_.empty()) return "not established";
  ConditionSet n = normalized();
  std::string s;
  for (const auto& a : n.atoms_) {
    if (!s.empty()) s += " or ";
    s += a.text();
  }
  return s;
}

nlohmann::json ConditionSet::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& a : normalized().atoms_) {
    nlohmann::json j;
    switch (a.type) {
      case PrimeCondition::Type::AllPrimes:
        j["type"] = "all-primes";
        break;
      case PrimeCondition::Type::Congruence:
        j["type"] = "congruence";
        j["modulus"] = a.modulus;
        j["residues"] = a.residues;
        break;
      case PrimeCondition::Type::AlmostAll:
        j["type"] = "almost-all";
        j["modulus"] = a.modulus;
        j["residues"] = a.residues;
        j["caveat"] = a.caveat;
        break;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

ConditionSet ConditionSet::from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw EngineError(EngineError::Code::Parse, "condition must be an array");
  ConditionSet out;
  for (const auto& j : arr) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
      throw EngineError(EngineError::Code::Parse, "condition atom needs a string 'type'");
    std::string type = j["type"].get<std::string>();
    if (type == "all-primes") {
      out.add(PrimeCondition::all_primes());
      continue;
    }
    if (type != "congruence" && type != "almost-all")
      throw EngineError(EngineError::Code::Parse, "unknown condition type '" + type + "'");
    if (!j.contains("modulus") || !j.contains("residues"))
      throw EngineError(EngineError::Code::Parse, "condition atom needs modulus and residues");
    std::vector<long long> residues;
    for (const auto& r : j["residues"]) residues.push_back(r.get<long long>());
    if (type == "congruence") {
      out.add(PrimeCondition::congruence(j["modulus"].get<long long>(), std::move(residues)));
    } else {
      out.add(PrimeCondition::almost_all(j["modulus"].get<long long>(), std::move(residues),
                                         j.value("caveat", std::string{})));
    }
  }
  return out;
}

/* ---------- small pieces ---------- */

std::string rule_name(RuleId rule) {
  switch (rule) {
    case RuleId::AxiomInjection:
      return "axiom";
    case RuleId::R1SmallCodim:
      return "R1-small-codim";
    case RuleId::R2Prop31:
      return "R2-prop31";
    case RuleId::R3OortCase:
      return "R3-oort-case";
    case RuleId::R4Purity:
      return "R4-purity";
  }
  return "?";
}

std::string PartitionCheck::line() const {
  return std::to_string(td_left) + " + " + std::to_string(td_right) + " = " +
         std::to_string(td_left + td_right) + (passed ? " < " : " !< ") + std::to_string(e);
}

std::string Blocker::text() const {
  switch (kind) {
    case Kind::NoPartition:
      return "hypothesis (a): no partition exists (indecomposable polygon)";
    case Kind::NoNonemptyPair:
      return "hypothesis (a): no partition has both sides known nonempty of compact type";
    case Kind::HypothesisB:
      return "hypothesis (b): partition (" + witness->left.format() + ", " +
             witness->right.format() + ") gives " + witness->line();
  }
  return "?";
}

/* ---------- closure ---------- */

namespace {

struct KeyInfo {
  long long codim = 0;
  long long e = 0;
  int f = 0;
  std::vector<std::pair<std::size_t, std::size_t>> parts;  // record indices
  std::vector<PolygonPartition> part_polys;
  bool r1_ladder = false;     // codim <= 3
  bool r1_c4 = false;         // ord^(g-4) + nu4
  std::optional<int> oort_d;  // xi = nu_d + ss
  std::optional<std::size_t> oort_premise;
  // admitted axioms touching this key
  std::vector<const Axiom*> injectors;         // polygon is listed in the axiom
  std::optional<long long> purity_bound;       // from generic-np axioms not listing xi
  std::string purity_axiom;
};

struct Universe {
  std::vector<FactKey> keys;           // sorted
  std::vector<KeyInfo> info;
  std::map<FactKey, std::size_t> index;
};

bool axiom_injects_occurrence(const Axiom& a) {
  return a.kind == AxiomKind::OccursSmooth || a.kind == AxiomKind::DimExactComponents ||
         a.kind == AxiomKind::OpenDenseInPrankStratum;
}

std::optional<int> detect_oort_shape(const NewtonPolygon& xi) {
  auto factors = xi.factor_list();
  if (factors.size() != 3) return std::nullopt;
  bool has_ss = false;
  int c = 0;
  for (const auto& [fc, fd, m] : factors) {
    if (m != 1) return std::nullopt;
    if (fc == 1 && fd == 1) {
      has_ss = true;
    } else if (fd == 1 && fc >= 2) {
      c = static_cast<int>(fc);
    }
  }
  if (!has_ss || c < 2) return std::nullopt;
  return c + 1;  // d: the polygon is nu_d + ss
}

Universe build_universe(int g_max, const std::vector<Axiom>& admitted) {
  Universe u;
  for (int g = 1; g <= g_max; ++g) {
    for (auto& xi : enumerate_polygons(g)) u.keys.push_back({g, std::move(xi)});
  }
  for (std::size_t i = 0; i < u.keys.size(); ++i) u.index[u.keys[i]] = i;

  u.info.resize(u.keys.size());
  for (std::size_t i = 0; i < u.keys.size(); ++i) {
    const auto& [g, xi] = u.keys[i];
    KeyInfo& k = u.info[i];
    k.codim = codim_ag(xi);
    k.e = e_dim(xi);
    k.f = xi.p_rank();
    k.part_polys = xi.partitions();
    for (const auto& p : k.part_polys) {
      k.parts.emplace_back(u.index.at({p.left.genus(), p.left}),
                           u.index.at({p.right.genus(), p.right}));
    }
    k.r1_ladder = g >= 2 && k.codim <= 3;
    if (g >= 4) {
      NewtonPolygon c4 = g == 4 ? nu_zero_polygon(4)
                                : ordinary_polygon(g - 4).direct_sum(nu_zero_polygon(4));
      k.r1_c4 = xi == c4;
    }
    if (auto d = detect_oort_shape(xi)) {
      k.oort_d = d;
      auto it = u.index.find({*d, nu_zero_polygon(*d)});
      if (it != u.index.end()) k.oort_premise = it->second;
    }
  }

  for (const auto& a : admitted) {
    for (const auto& poly : a.polygons) {
      auto it = u.index.find({a.g, poly});
      if (it != u.index.end()) u.info[it->second].injectors.push_back(&a);
    }
    if (a.kind == AxiomKind::GenericNPOfPrankComponents && a.f) {
      for (std::size_t i = 0; i < u.keys.size(); ++i) {
        if (u.keys[i].g != a.g || u.info[i].f != *a.f) continue;
        if (std::find(a.polygons.begin(), a.polygons.end(), u.keys[i].xi) != a.polygons.end())
          continue;
        long long bound = prank_stratum_dim(a.g, *a.f) - 1;
        KeyInfo& k = u.info[i];
        if (!k.purity_bound || bound < *k.purity_bound ||
            (bound == *k.purity_bound && a.id < k.purity_axiom)) {
          k.purity_bound = bound;
          k.purity_axiom = a.id;
        }
      }
    }
  }
  // injectors in id order, for deterministic trace choice
  for (auto& k : u.info) {
    std::sort(k.injectors.begin(), k.injectors.end(),
              [](const Axiom* a, const Axiom* b) { return a->id < b->id; });
  }
  return u;
}

long long default_dim_hi(const FactKey& key, int f) {
  if (key.g == 1) return f == 1 ? 1 : 0;
  return prank_stratum_dim(key.g, f);
}

// Nonempty-of-compact-type conditions: the key occurs, or some partition has
// both sides nonempty.  Computed genus-ascending, so parts are ready.
std::vector<ConditionSet> compute_ne(const Universe& u, const std::vector<FactState>& s) {
  std::vector<ConditionSet> ne(u.keys.size());
  for (std::size_t i = 0; i < u.keys.size(); ++i) {
    ConditionSet cs = s[i].occurs;
    for (const auto& [li, ri] : u.info[i].parts) {
      if (ne[li].established() && ne[ri].established()) {
        cs.add_all(ne[li].conjoin(ne[ri]));
      }
    }
    ne[i] = std::move(cs);
  }
  return ne;
}

// Torelli-image dimension bound: best upper bound on the dimension of the
// compact-type locus with this polygon, smooth part plus all 2-part splits.
std::vector<long long> compute_td(const Universe& u, const std::vector<FactState>& s) {
  std::vector<long long> td(u.keys.size());
  for (std::size_t i = 0; i < u.keys.size(); ++i) {
    long long v = s[i].empty_ct ? -1 : s[i].dim_hi;
    for (const auto& [li, ri] : u.info[i].parts) {
      v = std::max(v, td[li] + td[ri]);
    }
    td[i] = v;
  }
  return td;
}

struct RuleEngine {
  const Universe& u;
  const std::vector<FactState>& snap;
  const std::vector<ConditionSet>& ne;
  const std::vector<long long>& td;

  void merge_dim_lo(FactState& st, long long v) const {
    if (!st.dim_lo || *st.dim_lo < v) st.dim_lo = v;
  }
  void merge_dim_hi(FactState& st, long long v) const { st.dim_hi = std::min(st.dim_hi, v); }

  void apply(RuleId rule, std::size_t i, FactState& st) const {
    const KeyInfo& k = u.info[i];
    const FactKey& key = u.keys[i];
    switch (rule) {
      case RuleId::AxiomInjection:
        for (const Axiom* a : k.injectors) {
          if (axiom_injects_occurrence(*a)) st.occurs.add(a->condition);
          if (a->dim_lo) merge_dim_lo(st, *a->dim_lo);
          if (a->dim_hi) merge_dim_hi(st, *a->dim_hi);
        }
        break;
      case RuleId::R1SmallCodim:
        if (k.r1_ladder || k.r1_c4) {
          st.occurs.add(PrimeCondition::all_primes());
          long long v = 3LL * key.g - 3 - k.codim;
          merge_dim_lo(st, v);
          merge_dim_hi(st, v);
        }
        break;
      case RuleId::R4Purity:
        if (k.purity_bound) merge_dim_hi(st, *k.purity_bound);
        break;
      case RuleId::R2Prop31: {
        if (k.parts.empty()) break;
        bool all_pass = true;
        for (const auto& [li, ri] : k.parts) {
          if (td[li] + td[ri] >= k.e) {
            all_pass = false;
            break;
          }
        }
        if (!all_pass) break;
        ConditionSet gained;
        for (const auto& [li, ri] : k.parts) {
          if (ne[li].established() && ne[ri].established()) {
            gained.add_all(ne[li].conjoin(ne[ri]));
          }
        }
        if (!gained.established()) break;  // hypothesis (a)
        st.occurs.add_all(gained);
        merge_dim_lo(st, k.e);
        break;
      }
      case RuleId::R3OortCase:
        if (k.oort_d && k.oort_premise && snap[*k.oort_premise].occurs.established()) {
          st.occurs.add_all(snap[*k.oort_premise].occurs);
          merge_dim_lo(st, 2LL * *k.oort_d - 2);
        }
        break;
    }
  }
};

bool state_equal(const FactState& a, const FactState& b) {
  return a.occurs == b.occurs && a.dim_lo == b.dim_lo && a.dim_hi == b.dim_hi &&
         a.empty_ct == b.empty_ct;
}

}  // namespace

FactTable closure(int g_max, const QueryContext& context, const std::vector<Axiom>& axioms,
                  const ClosureOptions& options) {
  if (g_max < 1) throw std::invalid_argument("g_max must be >= 1");
  {
    auto problems = validate_axioms(axioms);
    if (!problems.empty()) {
      std::ostringstream msg;
      msg << "axiom set failed validation:";
      for (const auto& p : problems) msg << "\n  - " << p;
      throw AxiomError(AxiomError::Code::Validation, msg.str());
    }
  }

  std::vector<Axiom> admitted;
  for (const auto& a : axioms) {
    if (a.g <= g_max && condition_holds(a.condition, context)) admitted.push_back(a);
  }
  Universe u = build_universe(g_max, admitted);

  std::vector<FactState> state(u.keys.size());
  for (std::size_t i = 0; i < u.keys.size(); ++i) {
    state[i].dim_hi = default_dim_hi(u.keys[i], u.info[i].f);
  }

  int jobs = std::max(1, options.jobs);
  jobs = static_cast<int>(std::min<std::size_t>(jobs, u.keys.size()));

  for (bool changed = true; changed;) {
    changed = false;
    const std::vector<FactState> snap = state;
    auto ne = compute_ne(u, snap);
    auto td = compute_td(u, snap);
    RuleEngine rules{u, snap, ne, td};

    std::vector<FactState> next(snap);
    auto run_chunk = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        for (RuleId rule : options.rule_order) rules.apply(rule, i, next[i]);
      }
    };
    if (jobs <= 1) {
      run_chunk(0, u.keys.size());
    } else {
      std::vector<std::thread> workers;
      std::size_t chunk = (u.keys.size() + jobs - 1) / jobs;
      for (int t = 0; t < jobs; ++t) {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(u.keys.size(), begin + chunk);
        if (begin < end) workers.emplace_back(run_chunk, begin, end);
      }
      for (auto& w : workers) w.join();
    }

    for (std::size_t i = 0; i < u.keys.size(); ++i) {
      if (!state_equal(next[i], state[i])) changed = true;
    }
    state = std::move(next);
  }

  for (std::size_t i = 0; i < u.keys.size(); ++i) {
    if (state[i].dim_lo && *state[i].dim_lo > state[i].dim_hi) {
      throw EngineError(EngineError::Code::Inconsistent,
                        "genus " + std::to_string(u.keys[i].g) + " polygon " +
                            u.keys[i].xi.format() + ": dim_lo_some " +
                            std::to_string(*state[i].dim_lo) + " exceeds dim_hi_all " +
                            std::to_string(state[i].dim_hi));
    }
  }

  /* Canonical provenance, reconstructed from the fixpoint alone so exports
   * are identical for every rule order and job count. */
  auto ne = compute_ne(u, state);
  auto td = compute_td(u, state);

  FactTable table;
  table.g_max_ = g_max;
  table.context_ = context;
  table.td_ = td;
  table.ne_.reserve(u.keys.size());
  for (const auto& cs : ne) table.ne_.push_back(cs.established() ? 1 : 0);
  table.records_.reserve(u.keys.size());
  for (std::size_t i = 0; i < u.keys.size(); ++i) {
    table.records_.push_back(FactRecord{u.keys[i], state[i], {}, {}, {}, {}});
    FactRecord& rec = table.records_.back();
    const KeyInfo& k = u.info[i];
    const int g = u.keys[i].g;

    auto make_checks = [&]() {
      std::vector<PartitionCheck> checks;
      for (std::size_t pi = 0; pi < k.parts.size(); ++pi) {
        const auto& [li, ri] = k.parts[pi];
        const auto& pp = k.part_polys[pi];
        checks.push_back({pp.left, pp.right, td[li], td[ri], k.e, td[li] + td[ri] < k.e});
      }
      return checks;
    };

    if (rec.state.occurs.established()) {
      OccursProvenance prov;
      if (k.r1_ladder || k.r1_c4) {
        prov.rule = RuleId::R1SmallCodim;
        prov.codim = k.codim;
        prov.dim_exact = 3LL * g - 3 - k.codim;
      } else if (k.oort_d && k.oort_premise && state[*k.oort_premise].occurs.established()) {
        prov.rule = RuleId::R3OortCase;
        prov.d = *k.oort_d;
        prov.premise = u.keys[*k.oort_premise].xi.format();
        prov.premise_condition = state[*k.oort_premise].occurs;
        prov.dim_lo = 2LL * *k.oort_d - 2;
      } else {
        auto checks = make_checks();
        bool all_pass = !checks.empty() &&
                        std::all_of(checks.begin(), checks.end(),
                                    [](const PartitionCheck& c) { return c.passed; });
        std::optional<PolygonPartition> witness;
        for (std::size_t pi = 0; pi < k.parts.size() && !witness; ++pi) {
          const auto& [li, ri] = k.parts[pi];
          if (ne[li].established() && ne[ri].established()) witness = k.part_polys[pi];
        }
        if (all_pass && witness) {
          prov.rule = RuleId::R2Prop31;
          prov.e = k.e;
          prov.witness = witness;
          prov.checks = std::move(checks);
        } else {
          const Axiom* chosen = nullptr;
          for (const Axiom* a : k.injectors) {
            if (axiom_injects_occurrence(*a)) {
              chosen = a;
              break;  // injectors are in id order
            }
          }
          if (!chosen) {
            throw EngineError(EngineError::Code::Inconsistent,
                              "occurrence of " + u.keys[i].xi.format() +
                                  " established but no rule reproduces it");
          }
          prov.rule = RuleId::AxiomInjection;
          prov.axiom_id = chosen->id;
          prov.citation = chosen->citation;
        }
      }
      rec.occurs_trace = std::move(prov);
    } else {
      if (k.parts.empty()) {
        rec.blockers.push_back({Blocker::Kind::NoPartition, std::nullopt, {}});
      } else {
        bool any_pair = false;
        for (const auto& [li, ri] : k.parts) {
          if (ne[li].established() && ne[ri].established()) any_pair = true;
        }
        if (!any_pair) {
          rec.blockers.push_back({Blocker::Kind::NoNonemptyPair, std::nullopt, {}});
        } else {
          Blocker b;
          b.kind = Blocker::Kind::HypothesisB;
          for (auto& c : make_checks()) {
            if (!c.passed) b.failing.push_back(std::move(c));
          }
          for (const auto& c : b.failing) {
            if (!b.witness || c.td_left + c.td_right < b.witness->td_left + b.witness->td_right) {
              b.witness = c;  // ties keep the canonically first partition
            }
          }
          rec.blockers.push_back(std::move(b));
        }
      }
    }

    /* dimension provenance notes */
    {
      struct Cand {
        long long value;
        int rank;
        std::string note;
      };
      std::vector<Cand> hi;
      if (k.r1_ladder || k.r1_c4) {
        hi.push_back({3LL * g - 3 - k.codim, 0,
                      "exact dimension of the small-codimension stratum (codim " +
                          std::to_string(k.codim) + ")"});
      }
      for (const Axiom* a : k.injectors) {
        if (a->dim_hi) hi.push_back({*a->dim_hi, 1, "axiom " + a->id});
      }
      if (k.purity_bound) {
        hi.push_back({*k.purity_bound, 2,
                      "purity: one below the p-rank stratum bound, off the generic set of axiom " +
                          k.purity_axiom});
      }
      hi.push_back({default_dim_hi(u.keys[i], k.f), 3,
                    g == 1 ? std::string("genus-1 moduli bound")
                           : "p-rank stratum bound (f = " + std::to_string(k.f) + ")"});
      const Cand* best = nullptr;
      for (const auto& c : hi) {
        if (c.value == rec.state.dim_hi && (!best || c.rank < best->rank)) best = &c;
      }
      rec.dim_notes.push_back("dim_hi_all = " + std::to_string(rec.state.dim_hi) +
                              (best ? ": " + best->note : ""));

      if (rec.state.dim_lo) {
        std::vector<Cand> lo;
        if (k.r1_ladder || k.r1_c4) {
          lo.push_back({3LL * g - 3 - k.codim, 0,
                        "exact dimension of the small-codimension stratum"});
        }
        for (const Axiom* a : k.injectors) {
          if (a->dim_lo) lo.push_back({*a->dim_lo, 1, "axiom " + a->id});
        }
        if (rec.occurs_trace && rec.occurs_trace->rule == RuleId::R2Prop31) {
          lo.push_back({k.e, 2, "e-dimension bound from the splitting rule"});
        }
        if (rec.occurs_trace && rec.occurs_trace->rule == RuleId::R3OortCase) {
          lo.push_back({2LL * *k.oort_d - 2, 2, "splitting rule via the nu premise"});
        }
        const Cand* lbest = nullptr;
        for (const auto& c : lo) {
          if (c.value == *rec.state.dim_lo && (!lbest || c.rank < lbest->rank)) lbest = &c;
        }
        rec.dim_notes.push_back("dim_lo_some = " + std::to_string(*rec.state.dim_lo) +
                                (lbest ? ": " + lbest->note : ""));
      }
    }
  }
  return table;
}

/* ---------- FactTable ---------- */

namespace {

nlohmann::json check_to_json(const PartitionCheck& c) {
  nlohmann::json j;
  j["e"] = c.e;
  j["left"] = c.left.format();
  j["line"] = c.line();
  j["passed"] = c.passed;
  j["right"] = c.right.format();
  j["td_left"] = c.td_left;
  j["td_right"] = c.td_right;
  return j;
}

nlohmann::json trace_to_json(const FactRecord& rec) {
  if (!rec.raw_trace.is_null()) return rec.raw_trace;
  nlohmann::json t;
  t["dim_notes"] = rec.dim_notes;
  auto blockers = nlohmann::json::array();
  for (const auto& b : rec.blockers) {
    nlohmann::json j;
    switch (b.kind) {
      case Blocker::Kind::NoPartition:
        j["kind"] = "hypothesis-a";
        j["reason"] = "no partition exists";
        break;
      case Blocker::Kind::NoNonemptyPair:
        j["kind"] = "hypothesis-a";
        j["reason"] = "no partition with both sides nonempty";
        break;
      case Blocker::Kind::HypothesisB: {
        j["kind"] = "hypothesis-b";
        j["witness"] = check_to_json(*b.witness);
        auto failing = nlohmann::json::array();
        for (const auto& c : b.failing) failing.push_back(check_to_json(c));
        j["failing"] = failing;
        break;
      }
    }
    blockers.push_back(std::move(j));
  }
  t["blockers"] = blockers;
  if (rec.occurs_trace) {
    const auto& p = *rec.occurs_trace;
    nlohmann::json o;
    o["rule"] = rule_name(p.rule);
    switch (p.rule) {
      case RuleId::AxiomInjection:
        o["axiom"] = p.axiom_id;
        o["citation"] = p.citation;
        break;
      case RuleId::R1SmallCodim:
        o["codim"] = p.codim;
        o["dim"] = p.dim_exact;
        break;
      case RuleId::R2Prop31: {
        o["e"] = p.e;
        nlohmann::json w;
        w["left"] = p.witness->left.format();
        w["right"] = p.witness->right.format();
        o["witness"] = w;
        auto checks = nlohmann::json::array();
        for (const auto& c : p.checks) checks.push_back(check_to_json(c));
        o["checks"] = checks;
        break;
      }
      case RuleId::R3OortCase:
        o["d"] = p.d;
        o["dim_lo"] = p.dim_lo;
        o["premise"] = p.premise;
        o["premise_condition"] = p.premise_condition.to_json();
        break;
      case RuleId::R4Purity:
        break;
    }
    t["occurs"] = std::move(o);
  } else {
    t["occurs"] = nullptr;
  }
  return t;
}

}  // namespace

bool FactTable::contains(int g, const NewtonPolygon& xi) const {
  FactKey key{g, xi};
  auto it = std::lower_bound(records_.begin(), records_.end(), key,
                             [](const FactRecord& r, const FactKey& k) { return r.key < k; });
  return it != records_.end() && it->key == key;
}

std::size_t FactTable::index_of(int g, const NewtonPolygon& xi) const {
  FactKey key{g, xi};
  auto it = std::lower_bound(records_.begin(), records_.end(), key,
                             [](const FactRecord& r, const FactKey& k) { return r.key < k; });
  if (it == records_.end() || !(it->key == key)) {
    throw EngineError(EngineError::Code::KeyOutOfUniverse,
                      "no fact for genus " + std::to_string(g) + " polygon " + xi.format() +
                          " (closure universe covers genus 1.." + std::to_string(g_max_) + ")");
  }
  return static_cast<std::size_t>(it - records_.begin());
}

const FactRecord& FactTable::at(int g, const NewtonPolygon& xi) const {
  return records_[index_of(g, xi)];
}

bool FactTable::nonempty_ct(int g, const NewtonPolygon& xi) const {
  return ne_[index_of(g, xi)] != 0;
}

long long FactTable::td_max(int g, const NewtonPolygon& xi) const {
  return td_[index_of(g, xi)];
}

/* Recompute nonempty_ct / td_max from the record states alone (imported
 * tables carry no engine internals).  Records are sorted by key, so both
 * sides of any partition come earlier in the scan. */
void FactTable::rebuild_derived() {
  ne_.assign(records_.size(), 0);
  td_.assign(records_.size(), 0);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const FactRecord& rec = records_[i];
    bool ne = rec.state.occurs.established();
    long long td = rec.state.dim_hi;
    for (const auto& part : rec.key.xi.partitions()) {
      std::size_t li, ri;
      try {
        li = index_of(part.left.genus(), part.left);
        ri = index_of(part.right.genus(), part.right);
      } catch (const EngineError&) {
        throw EngineError(EngineError::Code::Parse,
                          "fact table is not closed under partitions: " + rec.key.xi.format() +
                              " splits into absent " + part.left.format() + " / " +
                              part.right.format());
      }
      ne = ne || (ne_[li] != 0 && ne_[ri] != 0);
      td = std::max(td, td_[li] + td_[ri]);
    }
    ne_[i] = ne ? 1 : 0;
    td_[i] = td;
  }
}

nlohmann::json FactTable::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& rec : records_) {
    nlohmann::json j;
    j["g"] = rec.key.g;
    j["polygon"] = rec.key.xi.format();
    j["status"] = rec.state.occurs.established() ? "yes" : "unknown";
    j["condition"] = rec.state.occurs.to_json();
    if (rec.state.dim_lo) {
      j["dim_lo_some"] = *rec.state.dim_lo;
    } else {
      j["dim_lo_some"] = nullptr;
    }
    j["dim_hi_all"] = rec.state.dim_hi;
    j["trace"] = trace_to_json(rec);
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string FactTable::export_text() const { return to_json().dump(2) + "\n"; }

FactTable FactTable::from_json(const nlohmann::json& doc) {
  if (!doc.is_array())
    throw EngineError(EngineError::Code::Parse, "fact table document must be an array");
  FactTable table;
  for (const auto& j : doc) {
    if (!j.is_object())
      throw EngineError(EngineError::Code::Parse, "fact table entries must be objects");
    for (const auto& field :
         {"g", "polygon", "status", "condition", "dim_lo_some", "dim_hi_all", "trace"}) {
      if (!j.contains(field))
        throw EngineError(EngineError::Code::Parse,
                          std::string("fact table entry missing field '") + field + "'");
    }
    for (const auto& [key, value] : j.items()) {
      (void)value;
      static const std::set<std::string> known = {"g",           "polygon",     "status",
                                                  "condition",   "dim_lo_some", "dim_hi_all",
                                                  "trace"};
      if (!known.count(key))
        throw EngineError(EngineError::Code::Parse,
                          "fact table entry has unknown field '" + key + "'");
    }
    const int stated_g = j["g"].get<int>();
    std::optional<NewtonPolygon> xi;
    try {
      xi = NewtonPolygon::parse(j["polygon"].get<std::string>());
    } catch (const PolygonError& e) {
      throw EngineError(EngineError::Code::Parse, std::string("bad polygon: ") + e.what());
    }
    FactRecord rec{FactKey{stated_g, std::move(*xi)}, {}, {}, {}, {}, {}};
    if (rec.key.xi.genus() != rec.key.g)
      throw EngineError(EngineError::Code::Parse,
                        "polygon " + rec.key.xi.format() + " does not have the stated genus");
    rec.state.occurs = ConditionSet::from_json(j["condition"]);
    std::string status = j["status"].get<std::string>();
    if ((status == "yes") != rec.state.occurs.established())
      throw EngineError(EngineError::Code::Parse,
                        "status of " + rec.key.xi.format() + " disagrees with its condition");
    if (!j["dim_lo_some"].is_null()) rec.state.dim_lo = j["dim_lo_some"].get<long long>();
    rec.state.dim_hi = j["dim_hi_all"].get<long long>();
    rec.raw_trace = j["trace"];
    table.g_max_ = std::max(table.g_max_, rec.key.g);
    table.records_.push_back(std::move(rec));
  }
  std::sort(table.records_.begin(), table.records_.end(),
            [](const FactRecord& a, const FactRecord& b) { return a.key < b.key; });
  for (std::size_t i = 1; i < table.records_.size(); ++i) {
    if (table.records_[i - 1].key == table.records_[i].key)
      throw EngineError(EngineError::Code::Parse,
                        "fact table lists " + table.records_[i].key.xi.format() + " twice");
  }
  table.rebuild_derived();
  return table;
}

/* ---------- rendering ---------- */

std::string render_fact(const FactRecord& rec, bool with_trace) {
  std::ostringstream out;
  out << rec.key.xi.format() << "  (genus " << rec.key.g << ", p-rank " << rec.key.xi.p_rank()
      << ")\n";
  if (rec.state.occurs.established()) {
    out << "  status: occurs  [" << rec.state.occurs.text() << "]\n";
  } else {
    out << "  status: unknown\n";
  }
  if (rec.state.dim_lo) {
    out << "  dim_lo_some: " << *rec.state.dim_lo << "\n";
  }
  out << "  dim_hi_all: " << rec.state.dim_hi << "\n";
  if (with_trace && rec.occurs_trace) {
    const auto& p = *rec.occurs_trace;
    out << "  trace:\n";
    switch (p.rule) {
      case RuleId::AxiomInjection:
        out << "    axiom " << p.axiom_id << ": " << p.citation << "\n";
        break;
      case RuleId::R1SmallCodim:
        out << "    R1-small-codim: codim " << p.codim
            << (p.codim <= 3 ? " <= 3" : " (distinguished codim-4 polygon)")
            << "; stratum dimension exactly " << p.dim_exact << "\n";
        break;
      case RuleId::R2Prop31:
        out << "    R2-prop31: e = " << p.e << "; hypothesis (a) witness: ("
            << p.witness->left.format() << ", " << p.witness->right.format() << ")\n";
        for (const auto& c : p.checks) {
          out << "      (" << c.left.format() << ", " << c.right.format() << "): " << c.line()
              << "\n";
        }
        break;
      case RuleId::R3OortCase:
        out << "    R3-oort-case: d = " << p.d << "; premise " << p.premise << " occurs ["
            << p.premise_condition.text() << "]; dim_lo_some " << p.dim_lo << "\n";
        break;
      case RuleId::R4Purity:
        break;
    }
  }
  if (with_trace && !rec.dim_notes.empty()) {
    out << "  dimensions:\n";
    for (const auto& n : rec.dim_notes) out << "    " << n << "\n";
  }
  if (!rec.blockers.empty()) {
    out << "  blockers:\n";
    for (const auto& b : rec.blockers) {
      out << "    - " << b.text() << "\n";
      if (with_trace && b.kind == Blocker::Kind::HypothesisB) {
        for (const auto& c : b.failing) {
          out << "      failing (" << c.left.format() << ", " << c.right.format()
              << "): " << c.line() << "\n";
        }
      }
    }
  }
  return out.str();
}

}  // namespace npstrata
