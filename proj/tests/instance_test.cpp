#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "modlab/catalog.hpp"
#include "modlab/instance.hpp"

using namespace modlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("modlab_instance_test_" + name);
  fs::remove_all(p);
  return p;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::precondition;
}

}  // namespace

TEST(InstanceFile, RoundTripIsByteIdentical) {
  for (auto& inst : standard_corpus().modules) {
    auto text = canonical_text(to_json(inst));
    auto back = instance_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(canonical_text(to_json(back)), text) << inst.module.name();
    EXPECT_EQ(back.module.group(), inst.module.group());
    EXPECT_EQ(back.module.context(), inst.module.context());
    EXPECT_EQ(back.module.actions(), inst.module.actions());
  }
}

TEST(InstanceFile, WhitespaceAndKeyOrderDoNotMatter) {
  auto a = nlohmann::json::parse(R"({ "orders" : [4, 8], "name": "z4_z8" })");
  auto b = nlohmann::json::parse(R"({"name":"z4_z8","orders":[4,8]})");
  EXPECT_EQ(canonical_text(to_json(instance_from_json(a))), canonical_text(to_json(instance_from_json(b))));
  EXPECT_EQ(canonical_text(to_json(instance_from_json(a))), R"({"name":"z4_z8","notes":"","orders":[4,8]})" "\n");
}

TEST(InstanceFile, RingActionsSurvive) {
  auto t = triangular_regular_module();
  auto j = to_json(Instance{t, ""});
  EXPECT_EQ(j["ring"]["name"], "T2(F2)");
  EXPECT_EQ(j["ring"]["generators"].size(), 3u);
  auto back = instance_from_json(j).module;
  EXPECT_FALSE(back.scalar_actions());
  EXPECT_EQ(r_submodules(back).size(), r_submodules(t).size());
}

TEST(InstanceFile, MalformedInput) {
  auto bad = [](const char* text) {
    return code_of([&] { instance_from_json(nlohmann::json::parse(text)); });
  };
  EXPECT_EQ(bad(R"({"orders":[2]})"), ErrorCode::malformed_input);
  EXPECT_EQ(bad(R"({"name":"x","orders":[0]})"), ErrorCode::malformed_input);
  EXPECT_EQ(bad(R"({"name":"x","orders":"2"})"), ErrorCode::malformed_input);
  EXPECT_EQ(bad(R"({"name":"x","orders":[2,2],"ring":{"name":"R","generators":[{"label":"a","matrix":[[1,0]]}]}})"),
            ErrorCode::malformed_input);
  // action not compatible with the group: Z2 -> Z4 sending 1 to 1
  EXPECT_EQ(bad(R"({"name":"x","orders":[2,4],"ring":{"name":"R","generators":[{"label":"a","matrix":[[0,0],[1,0]]}]}})"),
            ErrorCode::malformed_input);
}

TEST(InstanceFile, FileErrors) {
  auto dir = scratch("files");
  fs::create_directories(dir);
  std::ofstream(dir / "broken.json") << "{\"name\": ";
  EXPECT_EQ(code_of([&] { read_instance(dir / "broken.json"); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([&] { read_instance(dir / "absent.json"); }), ErrorCode::io_error);
  EXPECT_EQ(code_of([&] { load_corpus(dir / "missing-dir"); }), ErrorCode::io_error);
  fs::remove_all(dir);
}

TEST(Corpus, WriteThenLoadIsStable) {
  auto dir = scratch("corpus");
  auto c = standard_corpus();
  write_corpus(c, dir);
  auto back = load_corpus(dir);
  ASSERT_EQ(back.modules.size(), c.modules.size());
  ASSERT_EQ(back.pairs.size(), c.pairs.size());
  for (std::size_t i = 0; i < c.modules.size(); ++i)
    EXPECT_EQ(canonical_text(to_json(back.modules[i])), canonical_text(to_json(c.modules[i])));
  auto bad = dir / "pairs" / "dangling.json";
  std::ofstream(bad) << R"({"name":"dangling","source":"z4","target":"nowhere"})";
  EXPECT_EQ(code_of([&] { load_corpus(dir); }), ErrorCode::malformed_input);
  fs::remove_all(dir);
}

TEST(Corpus, Completeness) {
  auto c = standard_corpus();
  for (Int n = 2; n <= 30; ++n) EXPECT_NO_THROW(c.module(abelian_name({n})));
  for (Int k = 1; k <= 6; ++k)
    for (auto& o : abelian_groups_of_order(Int{1} << k)) {
      Vec asc = o;
      std::sort(asc.begin(), asc.end());
      EXPECT_NO_THROW(c.module(abelian_name(asc))) << abelian_name(asc);
    }
  for (auto name : {"z4_z8", "z2_z16", "swap_z2_z2", "t2f2_regular", "z12_regular"}) EXPECT_NO_THROW(c.module(name));
  for (auto& s : skew_candidates()) EXPECT_NO_THROW(c.module(s.module.name()));
  bool has_pair = false;
  for (auto& p : c.pairs) has_pair |= p.source == "z6" && p.target == "z4";
  EXPECT_TRUE(has_pair);
}

#ifdef MODLAB_CORPUS_DIR
TEST(Corpus, ShippedFilesMatchGenerator) {
  auto shipped = load_corpus(MODLAB_CORPUS_DIR);
  auto fresh = standard_corpus();
  ASSERT_EQ(shipped.modules.size(), fresh.modules.size());
  ASSERT_EQ(shipped.pairs.size(), fresh.pairs.size());
  for (std::size_t i = 0; i < fresh.modules.size(); ++i) {
    auto name = fresh.modules[i].module.name();
    std::ifstream in(fs::path(MODLAB_CORPUS_DIR) / "modules" / (name + ".json"), std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(text, canonical_text(to_json(fresh.modules[i]))) << name;
  }
  for (std::size_t i = 0; i < fresh.pairs.size(); ++i)
    EXPECT_EQ(canonical_text(to_json(shipped.pairs[i])), canonical_text(to_json(fresh.pairs[i])));
}
#endif
