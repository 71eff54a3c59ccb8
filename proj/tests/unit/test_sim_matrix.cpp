#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "tsmin/artifacts.hpp"
#include "tsmin/error.hpp"
#include "tsmin/sim_matrix.hpp"

using namespace tsmin;
namespace fs = std::filesystem;

namespace {

struct Corpus {
  std::vector<MatrixMember> roster;
  std::vector<AstTree> trees;
};

Corpus corpus(std::size_t n, std::uint64_t seed) {
  search::Rng rng(seed, 0);
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    c.trees.push_back(oracle::random_tree(rng, 20, 4));
    c.roster.push_back({"T#t" + std::to_string(i), c.trees.back().digest()});
  }
  return c;
}

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("tsmin-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Undefined;
}

}  // namespace

TEST(SimMatrix, ThreeTestsThreePairs) {
  Corpus c = corpus(3, 1);
  BuildReport rep;
  BuildOptions opt;
  opt.measure = sim::Measure::TopDown;
  SimilarityMatrix m = build_matrix(c.roster, c.trees, opt, &rep);
  EXPECT_EQ(rep.computed_pairs, 3u);
  EXPECT_EQ(rep.reused_pairs, 0u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m.value(i, i), 1.0);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(m.exact(i, j), m.exact(j, i));
      EXPECT_GE(m.value(i, j), 0.0);
      EXPECT_LE(m.value(i, j), 1.0);
    }
  }
}

TEST(SimMatrix, IncrementalReuse) {
  Corpus v1 = corpus(10, 2);
  BuildOptions opt;
  opt.measure = sim::Measure::Combined;
  SimilarityMatrix m1 = build_matrix(v1.roster, v1.trees, opt);

  Corpus v2 = v1;
  search::Rng rng(99, 0);
  do v2.trees[4] = oracle::random_tree(rng, 20, 4);
  while (v2.trees[4].digest() == v1.trees[4].digest());
  v2.roster[4].digest = v2.trees[4].digest();

  opt.prior = &m1;
  BuildReport rep;
  SimilarityMatrix m2 = build_matrix(v2.roster, v2.trees, opt, &rep);
  EXPECT_EQ(rep.computed_pairs, 9u);
  EXPECT_EQ(rep.reused_pairs, 36u);

  opt.prior = nullptr;
  SimilarityMatrix fresh = build_matrix(v2.roster, v2.trees, opt);
  EXPECT_TRUE(fresh.same_content(m2));
}

TEST(SimMatrix, FullCacheIsIdempotent) {
  Corpus c = corpus(6, 3);
  BuildOptions opt;
  SimilarityMatrix m1 = build_matrix(c.roster, c.trees, opt);
  opt.prior = &m1;
  BuildReport rep;
  SimilarityMatrix m2 = build_matrix(c.roster, c.trees, opt, &rep);
  EXPECT_EQ(rep.computed_pairs, 0u);
  EXPECT_EQ(serialize_matrix(m1, false), serialize_matrix(m2, false));
}

TEST(SimMatrix, CacheWithOtherMeasureIsIgnored) {
  Corpus c = corpus(4, 4);
  BuildOptions opt;
  opt.measure = sim::Measure::TopDown;
  SimilarityMatrix td = build_matrix(c.roster, c.trees, opt);
  opt.measure = sim::Measure::TreeEditDistance;
  opt.prior = &td;
  BuildReport rep;
  build_matrix(c.roster, c.trees, opt, &rep);
  EXPECT_EQ(rep.computed_pairs, 6u);
  ASSERT_EQ(rep.warnings.size(), 1u);
}

TEST(SimMatrix, JobsDoNotChangeOutput) {
  Corpus c = corpus(25, 5);
  BuildOptions opt;
  opt.measure = sim::Measure::TreeEditDistance;
  opt.jobs = 1;
  std::string one = serialize_matrix(build_matrix(c.roster, c.trees, opt), false);
  opt.jobs = 8;
  std::string eight = serialize_matrix(build_matrix(c.roster, c.trees, opt), false);
  EXPECT_EQ(one, eight);
}

TEST(SimMatrix, SaveLoadRoundTrip) {
  fs::path dir = temp_dir("matrix");
  Corpus c = corpus(7, 6);
  SimilarityMatrix m = build_matrix(c.roster, c.trees, {});
  save_matrix(m, dir / "m.json");
  SimilarityMatrix back = load_matrix(dir / "m.json");
  EXPECT_TRUE(back.same_content(m));
  EXPECT_EQ(serialize_matrix(back), serialize_matrix(m));
  EXPECT_NO_THROW(load_matrix_for(dir / "m.json", c.roster));
}

TEST(SimMatrix, TruncatedFileIsParseError) {
  fs::path dir = temp_dir("trunc");
  Corpus c = corpus(5, 7);
  std::string text = serialize_matrix(build_matrix(c.roster, c.trees, {}));
  write_file(dir / "m.json", text.substr(0, text.size() / 2));
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "m.json"); }), ErrorKind::Parse);
}

TEST(SimMatrix, BadEntriesRejected) {
  Corpus c = corpus(3, 8);
  std::string text = serialize_matrix(build_matrix(c.roster, c.trees, {}));
  auto pos = text.find("\"upper\": [\n    [\"");
  ASSERT_NE(pos, std::string::npos);
  std::string bad = text;
  bad.insert(pos + 17, "9");  // numerator grows past the denominator or breaks format
  EXPECT_THROW(deserialize_matrix(bad), Error);
}

TEST(SimMatrix, ReorderedRosterIsStale) {
  fs::path dir = temp_dir("stale");
  Corpus c = corpus(4, 9);
  save_matrix(build_matrix(c.roster, c.trees, {}), dir / "m.json");
  auto permuted = c.roster;
  std::swap(permuted[0], permuted[1]);
  EXPECT_EQ(kind_of([&] { load_matrix_for(dir / "m.json", permuted); }), ErrorKind::Stale);
  auto changed = c.roster;
  changed[2].digest = sha256("other");
  EXPECT_EQ(kind_of([&] { load_matrix_for(dir / "m.json", changed); }), ErrorKind::Stale);
  changed.pop_back();
  EXPECT_EQ(kind_of([&] { load_matrix_for(dir / "m.json", changed); }), ErrorKind::Stale);
}

TEST(Artifacts, MissingAstNamesTest) {
  fs::path dir = temp_dir("roster");
  Roster r;
  r.tests.push_back({"A#t", "A.java", "t", 1, "asts/A/t.ast.json", sha256("x")});
  try {
    load_trees(r, dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
    EXPECT_NE(std::string(e.what()).find("A#t"), std::string::npos);
  }
}

TEST(Artifacts, RosterRoundTrip) {
  Roster r;
  r.tests.push_back({"A#t", "pkg/A.java", "t", 12, "asts/pkg/A/t.ast.json", sha256("x")});
  r.config = {{"k", 1}};
  Roster back = deserialize_roster(serialize_roster(r));
  EXPECT_EQ(back.tests, r.tests);
  EXPECT_EQ(back.config, r.config);
}
