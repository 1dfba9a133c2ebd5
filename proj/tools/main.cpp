// npstrata command-line driver: enumeration, stratum metrics, occurrence
// queries against the deduction engine, fact-table exports, report targets,
// and oracle self-checks.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "npstrata/axioms.hpp"
#include "npstrata/engine.hpp"
#include "npstrata/oracle.hpp"
#include "npstrata/polygon.hpp"
#include "npstrata/rational.hpp"
#include "npstrata/strata.hpp"

namespace {

using namespace npstrata;

// Shared option bundles -----------------------------------------------------

struct ContextOpts {
  long long prime = 0;
  bool all_primes = false;

  QueryContext resolve() const {
    return all_primes ? QueryContext::all() : QueryContext::prime(prime);
  }
};

struct AxiomOpts {
  std::string path;                    // --axioms
  std::vector<std::string> disabled;   // --disable-axiom, repeatable
};

struct OutOpts {
  std::string path;  // --out; empty = stdout
};

void add_context_opts(CLI::App* sub, ContextOpts& ctx) {
  auto* grp = sub->add_option_group("prime context", "exactly one of --prime / --all-primes");
  grp->add_option("--prime", ctx.prime, "query at one concrete prime p");
  grp->add_flag("--all-primes", ctx.all_primes, "query uniformly over all primes");
  grp->require_option(1);
}

void add_axiom_opts(CLI::App* sub, AxiomOpts& ax) {
  sub->add_option("--axioms", ax.path,
                  "axiom file (JSON); default: $NPSTRATA_AXIOMS, else the built-in base");
  sub->add_option("--disable-axiom", ax.disabled, "drop an axiom by id (repeatable)");
}

std::vector<Axiom> resolve_axioms(const AxiomOpts& ax, int gmax_needed) {
  std::vector<Axiom> axioms;
  std::string path = ax.path;
  if (path.empty()) {
    if (const char* env = std::getenv("NPSTRATA_AXIOMS"); env && *env) path = env;
  }
  if (!path.empty()) {
    axioms = load_axioms(path);
  } else {
    axioms = builtin_axioms(std::max(12, gmax_needed));
  }
  for (const auto& id : ax.disabled) {
    auto it = std::find_if(axioms.begin(), axioms.end(),
                           [&](const Axiom& a) { return a.id == id; });
    if (it == axioms.end())
      throw AxiomError(AxiomError::Code::Validation, "--disable-axiom: no axiom with id '" + id + "'");
    axioms.erase(it);
  }
  return axioms;
}

void emit(const OutOpts& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw AxiomError(AxiomError::Code::Io, "cannot open '" + out.path + "' for writing");
  f << text;
  if (!f.good()) throw AxiomError(AxiomError::Code::Io, "write to '" + out.path + "' failed");
}

NewtonPolygon parse_poly(const std::string& expr, std::optional<int> g_flag) {
  NewtonPolygon xi = NewtonPolygon::parse(expr);
  if (g_flag && *g_flag != xi.genus())
    throw PolygonError(PolygonError::Code::GenusMismatch,
                       "--g " + std::to_string(*g_flag) + " does not match the polygon's genus " +
                           std::to_string(xi.genus()));
  return xi;
}

nlohmann::json record_json(const FactTable& table, const FactKey& key) {
  nlohmann::json arr = table.to_json();
  for (auto& row : arr) {
    if (row["g"].get<int>() == key.g && row["polygon"].get<std::string>() == key.xi.format())
      return row;
  }
  throw EngineError(EngineError::Code::KeyOutOfUniverse,
                    key.xi.format() + " not present in the fact table");
}

// Subcommands ---------------------------------------------------------------

int run_enum(int g, bool json, const OutOpts& out) {
  auto polys = enumerate_polygons(g);
  std::ostringstream os;
  if (json) {
    nlohmann::ordered_json doc;
    doc["g"] = g;
    doc["count"] = polys.size();
    auto& arr = doc["polygons"] = nlohmann::json::array();
    for (const auto& xi : polys) arr.push_back(xi.format());
    os << doc.dump(2) << "\n";
  } else {
    for (const auto& xi : polys) os << xi.format() << "\n";
    os << "count: " << polys.size() << "\n";
  }
  emit(out, os.str());
  return 0;
}

int run_codim(const std::string& expr, std::optional<int> g_flag, bool json, const OutOpts& out) {
  NewtonPolygon xi = parse_poly(expr, g_flag);
  const int g = xi.genus();
  std::vector<long long> terms;
  for (int x = 1; x <= g; ++x) terms.push_back(rational_ceil(xi.value_at(x)));
  const long long c = codim_ag(xi);
  std::ostringstream os;
  if (json) {
    nlohmann::ordered_json doc;
    doc["polygon"] = xi.format();
    doc["g"] = g;
    doc["p_rank"] = xi.p_rank();
    doc["dim_ag"] = dim_ag(g);
    doc["ceil_terms"] = terms;
    doc["codim_ag"] = c;
    os << doc.dump(2) << "\n";
  } else {
    os << "polygon: " << xi.format() << "  (genus " << g << ", p-rank " << xi.p_rank() << ")\n";
    os << "lattice points below xi, column x = 1.." << g << ": ";
    for (std::size_t i = 0; i < terms.size(); ++i) os << (i ? " + " : "") << terms[i];
    os << " = " << c << "\n";
    os << "codim_Ag = " << c << "   (dim A_" << g << " = " << dim_ag(g) << ")\n";
  }
  emit(out, os.str());
  return 0;
}

int run_edim(const std::string& expr, std::optional<int> g_flag, bool json, const OutOpts& out) {
  NewtonPolygon xi = parse_poly(expr, g_flag);
  const int g = xi.genus();
  const long long c = codim_ag(xi);
  const long long e = e_dim(xi);
  std::ostringstream os;
  if (json) {
    nlohmann::ordered_json doc;
    doc["polygon"] = xi.format();
    doc["g"] = g;
    doc["p_rank"] = xi.p_rank();
    doc["codim_ag"] = c;
    doc["dim_mg"] = 3LL * g - 3;
    doc["e_dim"] = e;
    os << doc.dump(2) << "\n";
  } else {
    os << "polygon: " << xi.format() << "  (genus " << g << ", p-rank " << xi.p_rank() << ")\n";
    os << "codim_Ag = " << c << ", 3g-3 = " << 3 * g - 3 << "\n";
    os << "e(xi, M_g) = max{0, 3g-3 - codim} = " << e;
    if (g == 1 && xi.p_rank() == 1) os << "   (genus-1 ordinary convention: e = dim M_1,1 = 1)";
    os << "\n";
  }
  emit(out, os.str());
  return 0;
}

int run_occurs(const std::string& expr, std::optional<int> g_flag, const ContextOpts& ctx,
               const AxiomOpts& ax, bool trace, bool json, int jobs, const OutOpts& out) {
  NewtonPolygon xi = parse_poly(expr, g_flag);
  const int g = xi.genus();
  ClosureOptions opts;
  opts.jobs = jobs;
  FactTable table = closure(g, ctx.resolve(), resolve_axioms(ax, g), opts);
  const FactRecord& rec = table.at(g, xi);
  std::ostringstream os;
  if (json) {
    os << record_json(table, rec.key).dump(2) << "\n";
  } else {
    os << "context: " << ctx.resolve().text() << "\n" << render_fact(rec, trace);
  }
  emit(out, os.str());
  return 0;
}

int run_closure(int gmax, const ContextOpts& ctx, const AxiomOpts& ax, bool trace, bool json,
                int jobs, const OutOpts& out) {
  ClosureOptions opts;
  opts.jobs = jobs;
  FactTable table = closure(gmax, ctx.resolve(), resolve_axioms(ax, gmax), opts);
  std::ostringstream os;
  if (json) {
    os << table.export_text();
  } else {
    os << "context: " << ctx.resolve().text() << ", g <= " << gmax << "\n";
    std::size_t yes = 0;
    for (const auto& rec : table.records()) {
      if (trace) {
        os << "\n" << render_fact(rec, true);
        if (rec.state.occurs.established()) ++yes;
        continue;
      }
      std::ostringstream head;
      head << "g=" << rec.key.g << "  " << rec.key.xi.format();
      os << std::left << std::setw(28) << head.str();
      if (rec.state.occurs.established()) {
        ++yes;
        os << "  occurs   [" << rec.state.occurs.text() << "]";
      } else {
        os << "  unknown";
      }
      os << "  dim [" << (rec.state.dim_lo ? std::to_string(*rec.state.dim_lo) : std::string("?"))
         << ", " << rec.state.dim_hi << "]\n";
    }
    os << (trace ? "\n" : "") << table.records().size() << " facts: " << yes << " occur, "
       << table.records().size() - yes << " unknown\n";
  }
  emit(out, os.str());
  return 0;
}

int run_report(const std::string& target, int gmax, const ContextOpts& ctx, const AxiomOpts& ax,
               bool json, int jobs, const OutOpts& out) {
  const int min_gmax = target == "genus4-complete" ? 4 : target == "prank-ge-g-minus-4" ? 4 : 5;
  if (gmax < min_gmax)
    throw StrataError(StrataError::Code::OutOfRange,
                      "report target '" + target + "' needs --gmax >= " + std::to_string(min_gmax));
  ClosureOptions opts;
  opts.jobs = jobs;
  FactTable table = closure(gmax, ctx.resolve(), resolve_axioms(ax, gmax), opts);

  std::ostringstream os;
  nlohmann::ordered_json doc;
  doc["target"] = target;
  doc["context"] = ctx.resolve().text();
  bool pass = true;

  auto count_claim = [&](const std::string& claim, int g_lo, int g_hi, auto&& in_scope) {
    os << "claim: " << claim << "\n";
    auto& rows = doc["rows"] = nlohmann::json::array();
    for (int g = g_lo; g <= g_hi; ++g) {
      long long total = 0, occur = 0;
      for (const auto& rec : table.records()) {
        if (rec.key.g != g || !in_scope(rec)) continue;
        ++total;
        if (rec.state.occurs.established()) ++occur;
      }
      const bool ok = occur == total;
      pass = pass && ok;
      os << "g=" << g << ": " << occur << "/" << total << " occur  " << (ok ? "PASS" : "FAIL")
         << "\n";
      rows.push_back({{"g", g}, {"total", total}, {"occur", occur}, {"pass", ok}});
    }
    os << "report: " << (pass ? "PASS" : "FAIL") << "\n";
    doc["pass"] = pass;
  };

  if (target == "prank-ge-g-minus-4") {
    count_claim("every genus-g polygon with p-rank >= g-4 occurs, 4 <= g <= " +
                    std::to_string(gmax),
                4, gmax,
                [](const FactRecord& r) { return r.key.xi.p_rank() >= r.key.g - 4; });
  } else if (target == "genus4-complete") {
    count_claim("every genus-4 polygon occurs", 4, 4, [](const FactRecord&) { return true; });
  } else if (target == "genus5-positive-prank") {
    count_claim("every genus-5 polygon with positive p-rank occurs", 5, 5,
                [](const FactRecord& r) { return r.key.xi.p_rank() > 0; });
  } else {  // genus5-prank0-survey
    os << "survey: genus-5 p-rank-0 occurrence statuses, context " << ctx.resolve().text()
       << "\n";
    auto& rows = doc["rows"] = nlohmann::json::array();
    for (const auto& rec : table.records()) {
      if (rec.key.g != 5 || rec.key.xi.p_rank() != 0) continue;
      os << "\n" << render_fact(rec, false);
      rows.push_back(nlohmann::ordered_json(record_json(table, rec.key)));
    }
    doc["pass"] = true;  // a survey reports statuses, it asserts nothing
  }

  emit(out, json ? doc.dump(2) + "\n" : os.str());
  return pass ? 0 : 1;
}

int run_selfcheck(const OutOpts& out) {
  std::ostringstream os;
  bool ok = true;

  os << "enumerate vs brute_enumerate, g <= 8:";
  for (int g = 1; g <= 8; ++g) {
    auto main_list = enumerate_polygons(g);
    auto brute = brute_enumerate(g);
    std::sort(brute.begin(), brute.end());
    const bool same = main_list == brute;
    ok = ok && same;
    os << " " << main_list.size() << (same ? "" : "(MISMATCH)");
  }
  os << (ok ? "  ok" : "  FAIL") << "\n";

  long long checked = 0;
  bool codim_ok = true;
  for (int g = 1; g <= 8; ++g) {
    for (const auto& xi : enumerate_polygons(g)) {
      ++checked;
      if (codim_ag(xi) != brute_codim(xi)) {
        codim_ok = false;
        os << "  codim mismatch at " << xi.format() << "\n";
      }
    }
  }
  ok = ok && codim_ok;
  os << "codim vs brute_codim on " << checked << " polygons, g <= 8: "
     << (codim_ok ? "ok" : "FAIL") << "\n";

  checked = 0;
  bool part_ok = true;
  for (int g = 1; g <= 7; ++g) {
    for (const auto& xi : enumerate_polygons(g)) {
      ++checked;
      auto main_parts = xi.partitions();
      auto brute = brute_partitions(xi);
      std::sort(brute.begin(), brute.end());
      if (main_parts != brute) {
        part_ok = false;
        os << "  partitions mismatch at " << xi.format() << "\n";
      }
    }
  }
  ok = ok && part_ok;
  os << "partitions vs brute_partitions on " << checked << " polygons, g <= 7: "
     << (part_ok ? "ok" : "FAIL") << "\n";

  bool ss_ok = true;
  for (int g = 1; g <= 12; ++g) ss_ok = ss_ok && supersingular_dim_identity(g);
  ok = ok && ss_ok;
  os << "supersingular dimension identity, g <= 12: " << (ss_ok ? "ok" : "FAIL") << "\n";

  os << "selfcheck: " << (ok ? "ok" : "FAIL") << "\n";
  emit(out, os.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symmetric Newton polygon strata: exact metrics and an occurrence deduction engine"};
  app.require_subcommand(1);

  // enum
  auto* cmd_enum = app.add_subcommand("enum", "list all symmetric Newton polygons of genus g");
  int enum_g = 0;
  bool enum_json = false;
  OutOpts enum_out;
  cmd_enum->add_option("--g", enum_g, "genus")->required()->check(CLI::PositiveNumber);
  cmd_enum->add_flag("--json", enum_json, "structured output");
  cmd_enum->add_option("--out", enum_out.path, "write output to a file");

  // codim / edim
  std::string metric_poly;
  std::optional<int> metric_g;
  bool metric_json = false;
  OutOpts metric_out;
  auto add_metric_opts = [&](CLI::App* sub) {
    sub->add_option("--poly", metric_poly, "polygon expression, e.g. \"ord^2+nu3\"")->required();
    sub->add_option("--g", metric_g, "genus cross-check (must match the expression)");
    sub->add_flag("--json", metric_json, "structured output");
    sub->add_option("--out", metric_out.path, "write output to a file");
  };
  auto* cmd_codim = app.add_subcommand("codim", "codimension of the Newton stratum in A_g");
  add_metric_opts(cmd_codim);
  auto* cmd_edim = app.add_subcommand("edim", "expected dimension of the stratum in M_g");
  add_metric_opts(cmd_edim);

  // occurs
  auto* cmd_occurs = app.add_subcommand("occurs", "query occurrence of a polygon on M_g");
  std::string occurs_poly;
  std::optional<int> occurs_g;
  ContextOpts occurs_ctx;
  AxiomOpts occurs_ax;
  bool occurs_trace = false, occurs_json = false;
  int occurs_jobs = 1;
  OutOpts occurs_out;
  cmd_occurs->add_option("--poly", occurs_poly, "polygon expression")->required();
  cmd_occurs->add_option("--g", occurs_g, "genus cross-check (must match the expression)");
  add_context_opts(cmd_occurs, occurs_ctx);
  add_axiom_opts(cmd_occurs, occurs_ax);
  cmd_occurs->add_flag("--trace", occurs_trace, "show the derivation trace");
  cmd_occurs->add_flag("--json", occurs_json, "structured output (fact-table row)");
  cmd_occurs->add_option("--jobs", occurs_jobs, "worker threads")->check(CLI::Range(1, 64));
  cmd_occurs->add_option("--out", occurs_out.path, "write output to a file");

  // closure
  auto* cmd_closure = app.add_subcommand("closure", "derive all facts for genus <= gmax");
  int closure_gmax = 0;
  ContextOpts closure_ctx;
  AxiomOpts closure_ax;
  bool closure_trace = false, closure_json = false;
  int closure_jobs = 1;
  OutOpts closure_out;
  cmd_closure->add_option("--gmax", closure_gmax, "largest genus")->required()
      ->check(CLI::PositiveNumber);
  add_context_opts(cmd_closure, closure_ctx);
  add_axiom_opts(cmd_closure, closure_ax);
  cmd_closure->add_flag("--trace", closure_trace, "full per-fact rendering (text mode)");
  cmd_closure->add_flag("--json", closure_json, "emit the fact table (JSON)");
  cmd_closure->add_option("--jobs", closure_jobs, "worker threads")->check(CLI::Range(1, 64));
  cmd_closure->add_option("--out", closure_out.path, "write output to a file");

  // report
  auto* cmd_report = app.add_subcommand("report", "check a documented claim against the engine");
  std::string report_target;
  int report_gmax = 0;
  ContextOpts report_ctx;
  AxiomOpts report_ax;
  bool report_json = false;
  int report_jobs = 1;
  OutOpts report_out;
  cmd_report->add_option("--target", report_target, "claim to check")
      ->required()
      ->check(CLI::IsMember({"prank-ge-g-minus-4", "genus4-complete", "genus5-positive-prank",
                             "genus5-prank0-survey"}));
  cmd_report->add_option("--gmax", report_gmax, "largest genus")->required()
      ->check(CLI::PositiveNumber);
  add_context_opts(cmd_report, report_ctx);
  add_axiom_opts(cmd_report, report_ax);
  cmd_report->add_flag("--json", report_json, "structured output");
  cmd_report->add_option("--jobs", report_jobs, "worker threads")->check(CLI::Range(1, 64));
  cmd_report->add_option("--out", report_out.path, "write output to a file");

  // selfcheck
  auto* cmd_selfcheck =
      app.add_subcommand("selfcheck", "run the brute-force oracle and identity checks");
  OutOpts selfcheck_out;
  cmd_selfcheck->add_option("--out", selfcheck_out.path, "write output to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_enum)) return run_enum(enum_g, enum_json, enum_out);
    if (app.got_subcommand(cmd_codim)) return run_codim(metric_poly, metric_g, metric_json, metric_out);
    if (app.got_subcommand(cmd_edim)) return run_edim(metric_poly, metric_g, metric_json, metric_out);
    if (app.got_subcommand(cmd_occurs))
      return run_occurs(occurs_poly, occurs_g, occurs_ctx, occurs_ax, occurs_trace, occurs_json,
                        occurs_jobs, occurs_out);
    if (app.got_subcommand(cmd_closure))
      return run_closure(closure_gmax, closure_ctx, closure_ax, closure_trace, closure_json,
                         closure_jobs, closure_out);
    if (app.got_subcommand(cmd_report))
      return run_report(report_target, report_gmax, report_ctx, report_ax, report_json,
                        report_jobs, report_out);
    if (app.got_subcommand(cmd_selfcheck)) return run_selfcheck(selfcheck_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
