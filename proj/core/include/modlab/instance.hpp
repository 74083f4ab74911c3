#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "modlab/ring_module.hpp"

namespace modlab {

// Module file:
//   {"name": "...", "notes": "...", "orders": [4, 8],
//    "ring": {"name": "T2(F2)", "generators": [{"label": "e11", "matrix": [[1,0],[0,0]]}]}}
// "ring" is omitted for Z-modules. Pair file:
//   {"name": "...", "notes": "...", "source": "<module name>", "target": "<module name>"}
// Canonical text is the compact dump (sorted keys) plus a newline.
struct Instance {
  RModule module;
  std::string notes;
};

struct PairInstance {
  std::string name;
  std::string source;
  std::string target;
  std::string notes;
};

Instance instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Instance& inst);
PairInstance pair_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PairInstance& p);

std::string canonical_text(const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);  // io_error, parse_error
Instance read_instance(const std::filesystem::path& path);

struct Corpus {
  std::vector<Instance> modules;  // by (order, name)
  std::vector<PairInstance> pairs;  // by name
  const RModule& module(std::string_view name) const;
};

// Reads <dir>/modules/*.json and <dir>/pairs/*.json.
Corpus load_corpus(const std::filesystem::path& dir);
void write_corpus(const Corpus& c, const std::filesystem::path& dir);
// The shipped corpus, generated from the catalog.
Corpus standard_corpus();

}  // namespace modlab
