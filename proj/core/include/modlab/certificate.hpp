#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "modlab/properties.hpp"

namespace modlab {

// Confirms a certificate from its witness. The checker does not use Analysis:
// summands are tested by purity (scalar actions) or complement lookup, essential
// extensions through prime-order elements, smallness through the radical, full
// invariance against generators of End. Quantified claims (a complete list of
// candidates, a positive verdict over a whole family) are recounted with the
// checker's own family criteria.
struct Replay {
  bool ok = true;
  std::string failure;  // first failed claim
};

Replay replay(const Certificate& c, const RModule& m, const std::optional<RModule>& n = std::nullopt);

// {"property", "strong", "strict", "module", "codomain", "verdict", "certificate"}
nlohmann::json to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

// FNV-1a over the compact dump; stable across platforms.
std::uint64_t certificate_hash(const Certificate& c);
std::string hex64(std::uint64_t v);

}  // namespace modlab
