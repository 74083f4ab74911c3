#include "modlab/instance.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "modlab/catalog.hpp"
#include "modlab/properties.hpp"

namespace modlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::malformed_input, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Int integer(const json& v) {
  try {
    return int_from_json(v);
  } catch (const std::exception&) {
    malformed("expected an integer");
  }
}

}  // namespace

Instance instance_from_json(const json& j) {
  std::string name = string_field(j, "name");
  if (name.empty()) malformed("empty module name");
  std::string notes = j.contains("notes") ? string_field(j, "notes") : "";
  const json& ord = field(j, "orders");
  if (!ord.is_array()) malformed("'orders' must be a list");
  Vec orders;
  for (auto& o : ord) {
    Int v = integer(o);
    if (v < 1) malformed("orders must be positive");
    orders.push_back(v);
  }
  FiniteAbelianGroup g(orders);
  if (!j.contains("ring")) return Instance{RModule::abelian(g, name), notes};
  const json& ring = j.at("ring");
  RingContext ctx;
  ctx.name = string_field(ring, "name");
  std::vector<GroupHom> actions;
  const json& gens = field(ring, "generators");
  if (!gens.is_array()) malformed("'generators' must be a list");
  for (auto& gen : gens) {
    ctx.labels.push_back(string_field(gen, "label"));
    const json& rows = field(gen, "matrix");
    if (!rows.is_array() || rows.size() != g.rank()) malformed("matrix must have one row per coordinate");
    Vec flat;
    for (auto& r : rows) {
      if (!r.is_array() || r.size() != g.rank()) malformed("matrix must be square");
      for (auto& v : r) flat.push_back(integer(v));
    }
    actions.emplace_back(g, g, flat);
  }
  return Instance{RModule(name, ctx, g, actions), notes};
}

json to_json(const Instance& inst) {
  const RModule& m = inst.module;
  json orders = json::array();
  for (Int o : m.group().orders()) orders.push_back(json_int(o));
  json out{{"name", m.name()}, {"notes", inst.notes}, {"orders", orders}};
  if (m.context() == RingContext{}) return out;
  json gens = json::array();
  std::size_t r = m.group().rank();
  for (std::size_t i = 0; i < m.actions().size(); ++i) {
    json rows = json::array();
    for (std::size_t a = 0; a < r; ++a) {
      json row = json::array();
      for (std::size_t b = 0; b < r; ++b) row.push_back(json_int(m.actions()[i].entry(a, b)));
      rows.push_back(row);
    }
    gens.push_back(json{{"label", m.context().labels[i]}, {"matrix", rows}});
  }
  out["ring"] = json{{"name", m.context().name}, {"generators", gens}};
  return out;
}

PairInstance pair_from_json(const json& j) {
  PairInstance p{string_field(j, "name"), string_field(j, "source"), string_field(j, "target"),
                 j.contains("notes") ? string_field(j, "notes") : ""};
  return p;
}

json to_json(const PairInstance& p) {
  return json{{"name", p.name}, {"notes", p.notes}, {"source", p.source}, {"target", p.target}};
}

std::string canonical_text(const json& j) { return j.dump() + "\n"; }

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

Instance read_instance(const fs::path& path) { return instance_from_json(read_json_file(path)); }

const RModule& Corpus::module(std::string_view name) const {
  for (auto& i : modules)
    if (i.module.name() == name) return i.module;
  throw Error(ErrorCode::malformed_input, "no module named '" + std::string(name) + "' in the corpus");
}

namespace {

std::vector<fs::path> json_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void sort_corpus(Corpus& c) {
  std::sort(c.modules.begin(), c.modules.end(), [](const Instance& a, const Instance& b) {
    if (a.module.order() != b.module.order()) return a.module.order() < b.module.order();
    return a.module.name() < b.module.name();
  });
  std::sort(c.pairs.begin(), c.pairs.end(), [](auto& a, auto& b) { return a.name < b.name; });
}

}  // namespace

Corpus load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::io_error, "no corpus directory " + dir.string());
  if (!fs::is_directory(dir / "modules")) throw Error(ErrorCode::io_error, dir.string() + " has no modules/");
  Corpus c;
  std::set<std::string> names;
  for (auto& f : json_files(dir / "modules")) {
    c.modules.push_back(read_instance(f));
    if (!names.insert(c.modules.back().module.name()).second)
      throw Error(ErrorCode::malformed_input, "duplicate module name in " + f.string());
  }
  for (auto& f : json_files(dir / "pairs")) {
    c.pairs.push_back(pair_from_json(read_json_file(f)));
    auto& p = c.pairs.back();
    if (!names.count(p.source) || !names.count(p.target))
      throw Error(ErrorCode::malformed_input, f.string() + " names a module outside the corpus");
    require_same_context(c.module(p.source), c.module(p.target));
  }
  sort_corpus(c);
  return c;
}

void write_corpus(const Corpus& c, const fs::path& dir) {
  fs::create_directories(dir / "modules");
  fs::create_directories(dir / "pairs");
  auto write = [](const fs::path& p, const json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + p.string());
    out << canonical_text(j);
  };
  for (auto& i : c.modules) write(dir / "modules" / (i.module.name() + ".json"), to_json(i));
  for (auto& p : c.pairs) write(dir / "pairs" / (p.name + ".json"), to_json(p));
}

Corpus standard_corpus() {
  Corpus c;
  std::map<std::string, Instance> mods;
  auto add = [&](RModule m, std::string notes) {
    auto name = m.name();
    mods.emplace(name, Instance{std::move(m), std::move(notes)});
  };
  auto ascending = [](Vec o) {
    std::sort(o.begin(), o.end());
    return o;
  };
  add(abelian_module({}), "zero module; every property holds vacuously");
  for (Int n = 2; n <= 30; ++n) add(abelian_module({n}), "cyclic group");
  for (int s = 1; s <= 6; ++s)
    for (auto& lambda : partitions(s)) add(abelian_module(ascending(p_group(2, lambda))), "abelian 2-group");
  for (int s = 1; s <= 3; ++s)
    for (auto& lambda : partitions(s)) add(abelian_module(ascending(p_group(3, lambda))), "abelian 3-group");
  mods.at("z4_z8").notes = "adjacent exponents 2, 3; extending but not weak duo";
  mods.at("z2_z16").notes = "exponents 1, 4 not adjacent; summands are dual self-CS-Baer, the sum is not";
  add(abelian_module({2, 6}), "mixed: 2-part (1,1), 3-part (1)");
  add(abelian_module({2, 12}), "mixed: 2-part (2,1) adjacent");
  add(abelian_module({4, 9}), "cyclic of order 36 in split coordinates");
  add(abelian_module({2, 8, 9}), "mixed: 2-part exponents 1, 3 not adjacent");
  add(swap_module(), "Z2 + Z2 with the coordinate swap as ring action");
  add(triangular_regular_module(), "regular module of upper-triangular 2x2 matrices over F2");
  add(cyclic_regular_module(12), "regular module of Z12");
  for (auto& s : skew_candidates()) add(s.module, "skew group ring candidate: " + s.convention);
  for (auto& [name, inst] : mods) c.modules.push_back(std::move(inst));

  auto pair = [&](const std::string& a, const std::string& b, std::string notes) {
    c.pairs.push_back(PairInstance{a + "__" + b, a, b, std::move(notes)});
  };
  pair("z6", "z4", "Z4 is strongly Z6-CS-Baer");
  pair("z4", "z2", "Hom nonzero, kernel 2Z4 not a summand");
  pair("z2", "z4", "image 2Z4 not a summand of Z4");
  pair("z2", "z3", "Hom zero");
  pair("z4", "z8", "monomorphisms exist");
  pair("z8", "z4", "epimorphisms exist");
  pair("z8", "z2_z4", "cyclic source, two-summand target");
  pair("z12", "z6", "mixed orders");
  pair("z2_z8", "z3", "Hom zero, source not extending");
  pair("z4_z8", "z2", "many kernels, elementary target");
  pair("z2_z2", "z2_z2_z2", "elementary abelian pair");
  pair("z16", "z2", "one nonzero map");
  pair("skew_right_conj", "skew_left_conj", "two skew conventions over one ring");
  sort_corpus(c);
  return c;
}

}  // namespace modlab
