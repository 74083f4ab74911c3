#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "modlab/instance.hpp"
#include "modlab/properties.hpp"

namespace modlab {

enum class CheckStatus { pass, violation, skipped };
std::string_view to_string(CheckStatus s);

// One theorem statement evaluated on one instance.
struct SuiteCheck {
  std::string instance;
  std::string statement;
  CheckStatus status = CheckStatus::pass;
  std::string detail;  // the evaluated predicates, or why it was skipped
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteCheck> checks;

  std::size_t count(CheckStatus s) const;
  std::size_t violations() const { return count(CheckStatus::violation); }
  nlohmann::json to_json() const;
  std::string table() const;  // aligned columns, one row per check
};

struct SuiteOptions {
  CheckOptions check;
  unsigned workers = 1;
  // Constructed modules beyond these orders are skipped. Sums have their whole
  // lattice enumerated; powers N^k only enter through Hom(M, N^k).
  Int max_sum_order = 128;
  Int max_power_order = Int{1} << 16;
};

// "hypothesis unmet - skipped" is reported when a theorem's embedding hypothesis fails.
inline constexpr std::string_view hypothesis_unmet = "hypothesis unmet - skipped";

// Every summand of M embeds in N iff M does; every summand of N is a factor of
// M iff N is. Z-linear pairs are decided from invariant factors, others by a
// search through Hom(M, N). nullopt when Hom is too large to search.
std::optional<bool> has_monomorphism(const RModule& m, const RModule& n, Int guard = default_size_guard());
std::optional<bool> has_epimorphism(const RModule& m, const RModule& n, Int guard = default_size_guard());

// Per-instance verifiers. Self versions take n = nullopt.
std::vector<SuiteCheck> verify_diagram(const RModule& m, const SuiteOptions& o = {});
std::vector<SuiteCheck> verify_st00(const RModule& m, const SuiteOptions& o = {});
std::vector<SuiteCheck> verify_st0(const RModule& m, const RModule& n, const SuiteOptions& o = {});
std::vector<SuiteCheck> verify_nonsingular_equiv(const RModule& m, const std::optional<RModule>& n,
                                                 const SuiteOptions& o = {});
// cs_baer(M, N) against cs_rickart(M, N^k) for k = 1, 2 and k*, and dually.
std::vector<SuiteCheck> verify_product_reduction(const RModule& m, const std::optional<RModule>& n,
                                                 const SuiteOptions& o = {});
// Sum theorems for M = parts[0] + ... (at most three parts).
std::vector<SuiteCheck> verify_dsum_self(const std::vector<RModule>& parts, const SuiteOptions& o = {});
// cs_baer(M, N_1 + ... + N_n) against the parts, and dual_cs_baer(M_1 + ... + M_n, N).
std::vector<SuiteCheck> verify_dsum_pair(const RModule& m, const std::vector<RModule>& parts,
                                         const SuiteOptions& o = {});
std::vector<SuiteCheck> verify_essip_bridge(const RModule& m, const std::optional<RModule>& n,
                                            const SuiteOptions& o = {});
std::vector<SuiteCheck> verify_cononsingular_bridge(const RModule& m, const std::optional<RModule>& n,
                                                    const SuiteOptions& o = {});
// R given as its regular module.
std::vector<SuiteCheck> verify_ring_theorems(const RModule& r, const SuiteOptions& o = {});
// M + R over R = Z/p^k, M any abelian group of exponent dividing p^k.
std::vector<SuiteCheck> verify_sum_with_ring(const Vec& orders, Int pk, const SuiteOptions& o = {});
std::vector<SuiteCheck> verify_transfer(const RModule& m, const std::optional<RModule>& n,
                                        const SuiteOptions& o = {});

const std::vector<std::string>& suite_ids();  // without "all"
// Throws unknown_suite. "all" runs every suite into one report.
SuiteReport run_suite(std::string_view id, const Corpus& corpus, const SuiteOptions& o = {});

// Finite part of the dual self-CS-Baer classification.
struct ClassRow {
  std::vector<int> partition;
  std::string module;
  bool verdict = false;
  bool predicate = false;
  std::string hash;  // certificate hash
};
struct ClassTable {
  Int p = 0;
  int max_sum = 0;
  bool strong = false;
  std::vector<ClassRow> rows;
  std::size_t mismatches() const;
  nlohmann::json to_json() const;
  std::string table() const;
};
// Distinct exponents form {n} or {n, n+1}; the strong predicate is s <= 1.
bool adjacent_exponents(const std::vector<int>& partition);
ClassTable classify_p_groups(Int p, int max_sum, bool strong, const SuiteOptions& o = {});

struct MixedRow {
  std::string module;
  Int order = 0;
  bool verdict = false;
  bool predicate = false;
};
struct MixedTable {
  Int max_order = 0;
  std::vector<MixedRow> rows;
  std::size_t mismatches() const;
  nlohmann::json to_json() const;
  std::string table() const;
};
MixedTable classify_mixed(Int max_order, const SuiteOptions& o = {});

// Runs fn(i) for i < n on `workers` threads; results land by index.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace modlab
