// Acceptance harness: re-checks the headline numbers end to end and prints
// one PASS/FAIL line per criterion.  Exits nonzero if anything fails.

#include <algorithm>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "npstrata/axioms.hpp"
#include "npstrata/engine.hpp"
#include "npstrata/oracle.hpp"
#include "npstrata/polygon.hpp"
#include "npstrata/strata.hpp"

using namespace npstrata;

namespace {

NewtonPolygon P(const std::string& s) { return NewtonPolygon::parse(s); }

NewtonPolygon ord_pad(int k, const std::string& tail) {
  NewtonPolygon t = P(tail);
  return k == 0 ? t : ordinary_polygon(k).direct_sum(t);
}

struct Probe {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

/* 1. Exact codimension anchors. */
void criterion1(Probe& t) {
  t.expect(codim_ag(P("ss^4")) == 6, "codim(ss^4) != 6");
  for (int d = 3; d <= 8; ++d) {
    const std::string nu = "nu" + std::to_string(d);
    t.expect(codim_ag(P(nu)) == d, "codim(" + nu + ") != " + std::to_string(d));
    t.expect(codim_ag(P(nu + "+ss")) == d + 2,
             "codim(" + nu + "+ss) != " + std::to_string(d + 2));
  }
  for (int g = 4; g <= 10; ++g) {
    t.expect(codim_ag(ord_pad(g - 3, "ss^3")) == 4,
             "codim(ord^" + std::to_string(g - 3) + "+ss^3) != 4");
    t.expect(codim_ag(ord_pad(g - 4, "nu3+ss")) == 5,
             "codim(ord^" + std::to_string(g - 4) + "+nu3+ss) != 5");
    t.expect(codim_ag(ord_pad(g - 4, "ss^4")) == 6,
             "codim(ord^" + std::to_string(g - 4) + "+ss^4) != 6");
  }
}

/* 2. dim A_g minus the supersingular codimension is floor(g^2/4). */
void criterion2(Probe& t) {
  for (int g = 1; g <= 12; ++g) {
    const long long lhs = dim_ag(g) - codim_ag(supersingular_polygon(g));
    t.expect(lhs == static_cast<long long>(g) * g / 4,
             "g=" + std::to_string(g) + ": dim A_g - codim(ss^g) = " + std::to_string(lhs) +
                 ", want floor(g^2/4)");
    t.expect(supersingular_dim_identity(g),
             "supersingular_dim_identity(" + std::to_string(g) + ") is false");
  }
}

/* 3. The independent brute-force oracles agree with the main path. */
void criterion3(Probe& t) {
  const std::vector<std::size_t> small_counts = {2, 3, 5, 8};
  for (int g = 1; g <= 8; ++g) {
    auto ours = enumerate_polygons(g);
    auto brute = brute_enumerate(g);
    t.expect(ours == brute, "enumerate vs brute_enumerate differ at g=" + std::to_string(g));
    if (g <= 4) {
      t.expect(brute.size() == small_counts[g - 1],
               "brute count at g=" + std::to_string(g) + " is " + std::to_string(brute.size()));
    }
    for (const auto& xi : ours) {
      t.expect(codim_ag(xi) == brute_codim(xi), "codim vs brute_codim differ on " + xi.format());
    }
    if (g <= 7) {
      for (const auto& xi : ours) {
        t.expect(xi.partitions() == brute_partitions(xi),
                 "partitions vs brute_partitions differ on " + xi.format());
      }
    }
  }
}

/* 4. ss^4 is rederived from the rest of the base when its axiom is removed. */
void criterion4(Probe& t) {
  auto axioms = builtin_axioms(12);
  std::erase_if(axioms, [](const Axiom& a) { return a.id == "A11"; });
  auto table = closure(4, QueryContext::all(), axioms);
  const FactRecord& rec = table.at(4, P("ss^4"));
  t.expect(rec.state.occurs.established() && rec.state.occurs.text() == "all primes",
           "ss^4 should occur for all primes without A11");
  t.expect(rec.state.dim_lo == 3, "dim_lo_some(ss^4) should be 3");
  const bool split = rec.occurs_trace && rec.occurs_trace->rule == RuleId::R2Prop31;
  t.expect(split, "the ss^4 trace should come from the splitting rule");
  if (split) {
    t.expect(rec.occurs_trace->checks.size() == 2, "ss^4 should have two partition checks");
    for (const auto& c : rec.occurs_trace->checks) {
      t.expect(c.passed && c.td_left + c.td_right == 2 && c.e == 3,
               "check '" + c.line() + "' is not a 2 < 3 comparison");
    }
  }
}

/* 5. Every polygon with p-rank >= g-4 occurs, 4 <= g <= 10; in particular
 * all of genus 4 and everything of positive p-rank in genus 5. */
void criterion5(Probe& t) {
  auto table = closure(10, QueryContext::all(), builtin_axioms(12));
  for (int g = 4; g <= 10; ++g) {
    for (const auto& xi : enumerate_polygons(g)) {
      if (xi.p_rank() < g - 4) continue;
      t.expect(table.at(g, xi).state.occurs.established(),
               "g=" + std::to_string(g) + " " + xi.format() + " (f >= g-4) should occur");
    }
  }
  auto g4 = enumerate_polygons(4);
  t.expect(g4.size() == 8, "genus 4 should have exactly 8 polygons");
  for (const auto& xi : g4) {
    t.expect(table.at(4, xi).state.occurs.established(),
             "genus-4 " + xi.format() + " should occur");
  }
  for (const auto& xi : enumerate_polygons(5)) {
    if (xi.p_rank() == 0) continue;
    t.expect(table.at(5, xi).state.occurs.established(),
             "genus-5 " + xi.format() + " (f > 0) should occur");
  }
}

/* 6. The nu5+ss / nu6+ss chains switch on and off with the residue class. */
void criterion6(Probe& t) {
  auto status = [](int g, const std::string& s, const QueryContext& ctx) {
    return closure(g, ctx, builtin_axioms(12)).at(g, P(s)).state.occurs.established();
  };
  for (long long p : {3LL, 5LL, 47LL}) {
    t.expect(status(6, "nu5+ss", QueryContext::prime(p)),
             "nu5+ss should occur at p=" + std::to_string(p));
  }
  for (long long p : {2LL, 13LL}) {
    t.expect(!status(6, "nu5+ss", QueryContext::prime(p)),
             "nu5+ss should be unknown at p=" + std::to_string(p));
  }
  t.expect(!status(6, "nu5+ss", QueryContext::all()),
           "nu5+ss should be unknown under all primes");
  for (long long p : {2LL, 11LL}) {
    t.expect(status(7, "nu6+ss", QueryContext::prime(p)),
             "nu6+ss should occur at p=" + std::to_string(p));
  }
  t.expect(!status(7, "nu6+ss", QueryContext::prime(13)), "nu6+ss should be unknown at p=13");
}

/* 7. The genus-5 p-rank-0 survey, statuses and blockers exactly. */
void criterion7(Probe& t) {
  auto table = closure(5, QueryContext::all(), builtin_axioms(12));

  std::vector<std::string> order;
  for (const auto& xi : enumerate_polygons(5)) {
    if (xi.p_rank() == 0) order.push_back(xi.format());
  }
  t.expect(order == std::vector<std::string>{"nu5", "nu4+ss", "nu3+ss^2", "G(3,2)+G(2,3)",
                                             "ss^5"},
           "the genus-5 p-rank-0 survey order drifted");

  auto blocked_a = [&](const std::string& s) {
    const FactRecord& rec = table.at(5, P(s));
    return !rec.state.occurs.established() && rec.blockers.size() == 1 &&
           rec.blockers[0].kind == Blocker::Kind::NoPartition;
  };
  t.expect(blocked_a("nu5"), "nu5 should be unknown, blocked as indecomposable");
  t.expect(blocked_a("G(3,2)+G(2,3)"),
           "G(3,2)+G(2,3) should be unknown, blocked as indecomposable");
  t.expect(table.at(5, P("nu4+ss")).state.occurs.established(), "nu4+ss should occur");

  auto blocked_b = [&](const std::string& s, const std::string& left, const std::string& right,
                       long long sum, long long e) {
    const FactRecord& rec = table.at(5, P(s));
    if (rec.state.occurs.established() || rec.blockers.size() != 1) return false;
    const Blocker& b = rec.blockers[0];
    return b.kind == Blocker::Kind::HypothesisB && b.witness &&
           b.witness->left == P(left) && b.witness->right == P(right) &&
           b.witness->td_left + b.witness->td_right == sum && b.witness->e == e &&
           !b.witness->passed;
  };
  t.expect(blocked_b("nu3+ss^2", "ss", "nu3+ss", 5, 5),
           "nu3+ss^2 should fail hypothesis (b) on the (nu3+ss, ss) split with 5 + 0 !< 5");
  t.expect(blocked_b("ss^5", "ss^2", "ss^3", 3, 3),
           "ss^5 should fail hypothesis (b) on the (ss^2, ss^3) split with 1 + 2 !< 3");

  auto p3 = closure(5, QueryContext::prime(3), builtin_axioms(12));
  t.expect(p3.at(5, P("nu5")).state.occurs.established(), "nu5 should occur at p=3");
  t.expect(p3.at(5, P("G(3,2)+G(2,3)")).state.occurs.established(),
           "G(3,2)+G(2,3) should occur at p=3");
}

/* 8. The dimension inequality agrees with its codimension reformulations
 * whenever their hypotheses (c_i <= 3 g_i - 3) hold. */
void criterion8(Probe& t) {
  long long seen1 = 0, seen2 = 0, seen3 = 0;
  for (int g0 = 2; g0 <= 8; ++g0) {
    for (const auto& xi0 : enumerate_polygons(g0)) {
      const long long c0 = codim_ag(xi0);
      const long long e0 = e_dim(xi0);
      for (const auto& part : xi0.partitions()) {
        const NewtonPolygon* sides[2][2] = {{&part.left, &part.right},
                                            {&part.right, &part.left}};
        for (const auto& side : sides) {
          const NewtonPolygon& xi1 = *side[0];
          const NewtonPolygon& xi2 = *side[1];
          const int g1 = xi1.genus();
          const int g2 = xi2.genus();
          const long long c1 = codim_ag(xi1);
          const long long c2 = codim_ag(xi2);
          const bool e_based = e_dim(xi1) + e_dim(xi2) < e0;
          const std::string inst =
              xi0.format() + " = " + xi1.format() + " + " + xi2.format();
          if (xi1 == ordinary_polygon(g1)) {
            ++seen1;
            t.expect(e_based, "(1) should always hold: " + inst);
          }
          if (xi1 == supersingular_polygon(1) && c0 <= 3LL * g0 - 3 && c2 <= 3LL * g2 - 3) {
            ++seen2;
            t.expect(e_based == (c0 < c2 + 3), "(2) disagrees on " + inst);
          }
          if (c0 <= 3LL * g0 - 3 && c1 <= 3LL * g1 - 3 && c2 <= 3LL * g2 - 3) {
            ++seen3;
            t.expect(e_based == (c0 < c1 + c2 + 3), "(3) disagrees on " + inst);
          }
        }
      }
    }
  }
  t.expect(seen1 > 0 && seen2 > 0 && seen3 > 0, "no applicable instances were found");
}

/* 9. Byte-identical exports across rule orders and job counts. */
void criterion9(Probe& t) {
  const auto axioms = builtin_axioms(12);
  ClosureOptions alt;
  alt.rule_order = {RuleId::R3OortCase, RuleId::R2Prop31, RuleId::R4Purity,
                    RuleId::R1SmallCodim, RuleId::AxiomInjection};
  ClosureOptions jobs4;
  jobs4.jobs = 4;

  const std::string base = closure(8, QueryContext::all(), axioms).export_text();
  t.expect(!base.empty(), "the export should not be empty");
  t.expect(closure(8, QueryContext::all(), axioms, alt).export_text() == base,
           "a different rule order changed the export");
  t.expect(closure(8, QueryContext::all(), axioms, jobs4).export_text() == base,
           "a different job count changed the export");
}

struct Criterion {
  int id;
  std::string title;
  std::function<void(Probe&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "codimension anchors", criterion1},
      {2, "supersingular dimension identity", criterion2},
      {3, "brute-force oracle equivalence", criterion3},
      {4, "genus-4 supersingular rederivation", criterion4},
      {5, "occurrence for p-rank >= g-4 up to genus 10", criterion5},
      {6, "congruence-gated occurrences", criterion6},
      {7, "genus-5 p-rank-0 survey", criterion7},
      {8, "codimension reformulations of the dimension inequality", criterion8},
      {9, "deterministic exports", criterion9},
  };

  bool all_ok = true;
  for (const auto& c : criteria) {
    Probe probe;
    try {
      c.run(probe);
    } catch (const std::exception& e) {
      probe.failures.push_back(std::string("unexpected exception: ") + e.what());
    }
    const bool ok = probe.failures.empty();
    all_ok = all_ok && ok;
    std::cout << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << "  " << c.title
              << "\n";
    for (const auto& f : probe.failures) {
      std::cout << "    - " << f << "\n";
    }
  }
  std::cout << (all_ok ? "acceptance: ok" : "acceptance: FAILED") << "\n";
  return all_ok ? 0 : 1;
}
