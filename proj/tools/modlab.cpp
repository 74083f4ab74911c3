// modlab: command-line front end.
// Exit codes: 0 verdict true / no violations, 1 verdict false / violations or
// mismatches, 2 error (JSON {"error": code, "message": ...} on stdout).

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "modlab/certificate.hpp"
#include "modlab/instance.hpp"
#include "modlab/suites.hpp"
#include "modlab/version.hpp"

using namespace modlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::int64_t max_size = 0;
  unsigned workers = 1;
  bool json_out = false;
};

struct CheckArgs {
  std::string property, module, codomain;
  bool strong = false, strict = false, dual = false, audit = false, timing = false;
};

struct ClassifyArgs {
  std::int64_t p = 2;
  int max_sum = 6;
  std::int64_t max_order = 0;
  std::string property = "dual-cs-baer";
  bool strong = false;
  std::string out;
};

struct VerifyArgs {
  std::string suite, dir;
};

struct CorpusArgs {
  std::string dir, property;
  bool strong = false, strict = false, dual = false;
};

CheckOptions check_options(const Common& c) {
  CheckOptions o;
  o.guard = default_size_guard();
  return o;
}

SuiteOptions suite_options(const Common& c) {
  SuiteOptions o;
  o.check = check_options(c);
  o.workers = c.workers;
  return o;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

int run_check(const CheckArgs& a, const Common& c) {
  Property p = make_property(a.property, a.strong, a.strict, a.dual);
  RModule m = read_instance(a.module).module;
  std::optional<RModule> n;
  if (!a.codomain.empty()) n = read_instance(a.codomain).module;
  if (is_relative(p.id) && !n) n = m;
  if (!is_relative(p.id) && n && n->name() != m.name())
    throw Error(ErrorCode::precondition, std::string(to_string(p.id)) + " is a property of one module");
  if (!is_relative(p.id)) n.reset();
  if (n) require_same_context(m, *n);
  CheckOptions o = check_options(c);
  if (a.audit) o.entry_cap = 0;

  auto t0 = std::chrono::steady_clock::now();
  Certificate cert = check(p, m, n, o);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Replay r = replay(cert, m, n);

  json out = to_json(cert);
  out["engine"] = engine_version;
  out["instance"] = n ? m.name() + " -> " + n->name() : m.name();
  out["certificate_hash"] = hex64(certificate_hash(cert));
  out["replay"] = r.ok;
  if (!r.ok) out["replay_failure"] = r.failure;
  if (a.timing) out["wall_time_s"] = secs;
  print(out);
  if (!r.ok) return 2;
  return cert.verdict ? 0 : 1;
}

int run_classify(const ClassifyArgs& a, const Common& c) {
  auto pid = parse_property_id(a.property);
  if (!pid || *pid != PropertyId::dual_cs_baer)
    throw Error(ErrorCode::invalid_property, "classify covers dual_cs_baer only");
  SuiteOptions o = suite_options(c);
  std::string table;
  json summary;
  std::size_t mismatches = 0;
  if (a.max_order > 0) {
    if (a.strong) throw Error(ErrorCode::invalid_property, "the mixed sweep has no strong predicate");
    MixedTable t = classify_mixed(a.max_order, o);
    table = t.table();
    mismatches = t.mismatches();
    summary = json{{"sweep", "mixed"}, {"max_order", a.max_order}, {"groups", t.rows.size()}};
    if (c.json_out) summary["table"] = t.to_json();
  } else {
    ClassTable t = classify_p_groups(a.p, a.max_sum, a.strong, o);
    table = t.table();
    mismatches = t.mismatches();
    summary = json{{"sweep", "p-groups"},
                   {"p", a.p},
                   {"max_sum", a.max_sum},
                   {"property", to_string(Property{PropertyId::dual_cs_baer, a.strong})},
                   {"partitions", t.rows.size()}};
    if (c.json_out) summary["table"] = t.to_json();
  }
  summary["engine"] = engine_version;
  summary["mismatches"] = mismatches;
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + a.out);
    f << table;
    summary["table_file"] = a.out;
  }
  if (c.json_out || !a.out.empty())
    print(summary);
  else
    std::cout << table;
  return mismatches == 0 ? 0 : 1;
}

int run_verify(const VerifyArgs& a, const Common& c) {
  if (a.suite != "all" && std::find(suite_ids().begin(), suite_ids().end(), a.suite) == suite_ids().end())
    throw Error(ErrorCode::unknown_suite, "unknown suite '" + a.suite + "'");
  Corpus corpus = load_corpus(a.dir);
  SuiteReport r = run_suite(a.suite, corpus, suite_options(c));
  if (c.json_out) {
    json j = r.to_json();
    j["engine"] = engine_version;
    print(j);
  } else {
    std::cout << r.table();
  }
  return r.violations() == 0 ? 0 : 1;
}

int run_corpus_list(const CorpusArgs& a, const Common& c) {
  Corpus corpus = load_corpus(a.dir);
  if (c.json_out) {
    json mods = json::array(), pairs = json::array();
    for (auto& i : corpus.modules)
      mods.push_back(json{{"name", i.module.name()}, {"order", i.module.order()}, {"context", i.module.context().name}});
    for (auto& p : corpus.pairs) pairs.push_back(json{{"name", p.name}, {"source", p.source}, {"target", p.target}});
    print(json{{"engine", engine_version}, {"modules", mods}, {"pairs", pairs}});
    return 0;
  }
  for (auto& i : corpus.modules)
    std::cout << "module  " << i.module.name() << "  order " << i.module.order() << "  " << i.module.context().name
              << "  " << i.notes << "\n";
  for (auto& p : corpus.pairs) std::cout << "pair    " << p.source << " -> " << p.target << "  " << p.notes << "\n";
  return 0;
}

int run_corpus_run(const CorpusArgs& a, const Common& c) {
  Property p = make_property(a.property, a.strong, a.strict, a.dual);
  Corpus corpus = load_corpus(a.dir);
  std::vector<std::pair<const RModule*, const RModule*>> inst;
  for (auto& i : corpus.modules) inst.emplace_back(&i.module, nullptr);
  if (is_relative(p.id))
    for (auto& q : corpus.pairs) inst.emplace_back(&corpus.module(q.source), &corpus.module(q.target));
  std::vector<json> rows(inst.size());
  CheckOptions o = check_options(c);
  parallel_for(inst.size(), c.workers, [&](std::size_t i) {
    auto [m, n] = inst[i];
    std::optional<RModule> nn = n ? std::optional<RModule>(*n) : std::nullopt;
    std::string key = n ? m->name() + " -> " + n->name() : m->name();
    try {
      Certificate cert = check(p, *m, nn, o);
      rows[i] = json{{"instance", key}, {"verdict", cert.verdict}, {"certificate_hash", hex64(certificate_hash(cert))}};
    } catch (const Error& e) {
      rows[i] = json{{"instance", key}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
  });
  if (c.json_out) {
    print(json{{"engine", engine_version}, {"property", to_string(p)}, {"results", rows}});
  } else {
    for (auto& r : rows) {
      std::cout << r["instance"].get<std::string>() << "  ";
      if (r.contains("error"))
        std::cout << "error " << r["error"].get<std::string>() << "\n";
      else
        std::cout << (r["verdict"].get<bool>() ? "true " : "false") << "  " << r["certificate_hash"].get<std::string>()
                  << "\n";
    }
  }
  return 0;
}

int run_corpus_generate(const CorpusArgs& a) {
  write_corpus(standard_corpus(), a.dir);
  Corpus c = load_corpus(a.dir);
  print(json{{"engine", engine_version}, {"modules", c.modules.size()}, {"pairs", c.pairs.size()}, {"dir", a.dir}});
  return 0;
}

int fail(ErrorCode code, const std::string& message) {
  print(json{{"engine", engine_version}, {"error", std::string(to_string(code))}, {"message", message}});
  std::cerr << "modlab: " << message << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite module laboratory: CS-Baer and related properties with replayable certificates"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--max-size", common.max_size, "largest cardinality enumerated (default MODLAB_MAX_SIZE or 2^20)");
  app.add_option("--workers", common.workers, "worker threads for sweeps and suites")->check(CLI::Range(1u, 256u));
  app.add_flag("--json", common.json_out, "machine-readable output");

  CheckArgs ca;
  auto* check_cmd = app.add_subcommand("check", "decide one property and print its certificate");
  check_cmd->add_option("property", ca.property, "property id, e.g. cs-baer or dual_cs_baer")->required();
  check_cmd->add_option("module", ca.module, "module file")->required();
  check_cmd->add_option("--codomain", ca.codomain, "codomain module file for relative properties");
  check_cmd->add_flag("--strong", ca.strong);
  check_cmd->add_flag("--strict", ca.strict);
  check_cmd->add_flag("--dual", ca.dual);
  check_cmd->add_flag("--audit", ca.audit, "keep full witness lists");
  check_cmd->add_flag("--timing", ca.timing, "report wall time (output is then not reproducible)");

  ClassifyArgs cl;
  auto* classify_cmd = app.add_subcommand("classify", "classification sweep against the adjacent-exponent predicate");
  classify_cmd->add_option("--p", cl.p, "prime");
  classify_cmd->add_option("--max-sum", cl.max_sum, "largest exponent sum");
  classify_cmd->add_option("--max-order", cl.max_order, "sweep all abelian groups up to this order instead");
  classify_cmd->add_option("--property", cl.property);
  classify_cmd->add_flag("--strong", cl.strong);
  classify_cmd->add_option("--out", cl.out, "write the table to this file");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "run a theorem suite over a corpus");
  verify_cmd->add_option("--suite", va.suite, "suite id or 'all'")->required();
  verify_cmd->add_option("dir", va.dir, "corpus directory")->required();

  CorpusArgs co;
  auto* corpus_cmd = app.add_subcommand("corpus", "corpus management");
  corpus_cmd->require_subcommand(1);
  auto* list_cmd = corpus_cmd->add_subcommand("list", "list modules and pairs");
  list_cmd->add_option("dir", co.dir)->required();
  auto* run_cmd = corpus_cmd->add_subcommand("run", "check one property on every instance");
  run_cmd->add_option("dir", co.dir)->required();
  run_cmd->add_option("--property", co.property)->required();
  run_cmd->add_flag("--strong", co.strong);
  run_cmd->add_flag("--strict", co.strict);
  run_cmd->add_flag("--dual", co.dual);
  auto* gen_cmd = corpus_cmd->add_subcommand("generate", "write the standard corpus");
  gen_cmd->add_option("dir", co.dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fail(ErrorCode::malformed_input, e.what());
  }

  try {
    if (common.max_size > 0) set_default_size_guard(common.max_size);
    if (check_cmd->parsed()) return run_check(ca, common);
    if (classify_cmd->parsed()) return run_classify(cl, common);
    if (verify_cmd->parsed()) return run_verify(va, common);
    if (list_cmd->parsed()) return run_corpus_list(co, common);
    if (run_cmd->parsed()) return run_corpus_run(co, common);
    if (gen_cmd->parsed()) return run_corpus_generate(co);
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::precondition, e.what());
  }
  return 2;
}
