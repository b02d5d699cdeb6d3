#include <gtest/gtest.h>

#include <set>

#include "erasure/config.hpp"
#include "erasure/dataset.hpp"
#include "erasure/deletion.hpp"
#include "support.hpp"

using namespace erasure;

namespace {

Schema small_schema() {
  return Schema({{"age", ColumnKind::numeric}, {"city", ColumnKind::categorical}, {"y", ColumnKind::categorical}},
                "y", {"age", "city"});
}

}  // namespace

TEST(Schema, Validation) {
  EXPECT_THROW(Schema({{"a", ColumnKind::numeric}, {"a", ColumnKind::numeric}}, "a", {}), Error);
  EXPECT_THROW(Schema({{"a", ColumnKind::numeric}}, "b", {}), Error);
  EXPECT_THROW(Schema({{"a", ColumnKind::numeric}, {"b", ColumnKind::numeric}}, "a", {"a"}), Error);
  EXPECT_THROW(Schema({{"a", ColumnKind::numeric}, {"b", ColumnKind::numeric}}, "a", {"c"}), Error);
  EXPECT_THROW(Schema({{"a", ColumnKind::numeric}, {"b", ColumnKind::numeric}}, "a", {"b", "b"}), Error);
  const auto s = small_schema();
  EXPECT_EQ(s.require("city"), 1u);
  EXPECT_FALSE(s.index_of("nope"));
  EXPECT_THROW(s.require("nope"), Error);
}

TEST(LoadCsv, ReadsAnyColumnOrderAndDropsMissing) {
  test::TempDir dir;
  test::WarningLog log;
  const auto p = dir.write("d.csv", "city,y,age\nWien,yes,30\n?,no,40\nGraz,no,\nLinz,\"yes\",50\n");
  const auto ds = load_csv(p, small_schema());
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.dropped_rows, 2u);
  EXPECT_EQ(ds.numeric("age"), (std::vector<double>{30, 50}));
  EXPECT_EQ(ds.categorical("city"), (std::vector<std::string>{"Wien", "Linz"}));
  EXPECT_EQ(ds.row_ids(), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(log.contains("dropped 2"));
}

TEST(LoadCsv, ExtraColumnsIgnoredEvenWhenIncomplete) {
  test::TempDir dir;
  const auto p = dir.write("d.csv", "age,unused,city,y\n30,,Wien,yes\n40,7,Graz,no\n");
  const auto ds = load_csv(p, small_schema());
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.dropped_rows, 0u);
}

TEST(LoadCsv, StripsByteOrderMark) {
  test::TempDir dir;
  const auto p = dir.write("d.csv", "\xEF\xBB\xBF" "age,city,y\n1,a,b\n");
  EXPECT_EQ(load_csv(p, small_schema()).size(), 1u);
}

TEST(LoadCsv, Errors) {
  test::TempDir dir;
  const auto s = small_schema();
  EXPECT_THROW(load_csv(dir.path() / "missing.csv", s), Error);
  EXPECT_THROW(load_csv(dir.write("a.csv", "age,city\n1,a\n"), s), Error);
  EXPECT_THROW(load_csv(dir.write("b.csv", "age,city,y,age\n1,a,b,2\n"), s), Error);
  EXPECT_THROW(load_csv(dir.write("c.csv", "age,city,y\nold,a,b\n"), s), Error);
  EXPECT_THROW(load_csv(dir.write("d.csv", "age,city,y\n1,a\n"), s), Error);
  EXPECT_THROW(load_csv(dir.write("e.csv", ""), s), Error);
  try {
    load_csv(dir.write("f.csv", "age,city,y\n"), s);
    FAIL() << "header-only file accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("zero rows"), std::string::npos);
  }
}

TEST(LoadCsv, AdultRowCount) {
  if (!test::have_data("adult.csv")) GTEST_SKIP() << "adult.csv not present";
  test::WarningLog log;
  const auto spec = builtin_dataset("adult");
  const auto ds = load_csv(test::data_file("adult.csv"), spec.schema);
  EXPECT_EQ(ds.size(), 30162u);
  EXPECT_EQ(ds.dropped_rows, 32561u - 30162u);
}

TEST(LoadCsv, CmcRowCount) {
  if (!test::have_data("cmc.csv")) GTEST_SKIP() << "cmc.csv not present";
  EXPECT_EQ(load_csv(test::data_file("cmc.csv"), builtin_dataset("cmc").schema).size(), 1473u);
}

TEST(LoadCsv, MgmRowCount) {
  if (!test::have_data("mgm.csv")) GTEST_SKIP() << "mgm.csv not present";
  test::WarningLog log;
  EXPECT_EQ(load_csv(test::data_file("mgm.csv"), builtin_dataset("mgm").schema).size(), 830u);
}

TEST(LoadCsv, CahousingRowCount) {
  if (!test::have_data("cahousing.csv")) GTEST_SKIP() << "cahousing.csv not present";
  EXPECT_EQ(load_csv(test::data_file("cahousing.csv"), builtin_dataset("cahousing").schema).size(), 20640u);
}

TEST(Preprocess, OneHotGroupsSumToOne) {
  std::vector<std::string> colour{"red", "blue", "green", "red", "blue", "green", "red", "red", "blue", "green"};
  std::vector<std::string> y(10, "a");
  y[3] = "b";
  Schema s({{"colour", ColumnKind::categorical}, {"y", ColumnKind::categorical}}, "y", {"colour"});
  const Dataset ds(s, {colour, y}, test::iota_ids(10));
  const auto pd = preprocess(ds, {});
  ASSERT_EQ(pd.dimension(), 3u);
  for (std::size_t r = 0; r < 10; ++r) {
    double sum = 0;
    for (double v : pd.features.row(r)) sum += v;
    EXPECT_EQ(sum, 1.0);
  }
  // lexicographic: blue, green, red
  EXPECT_EQ(pd.features(0, 2), 1.0);
  EXPECT_EQ(pd.features(1, 0), 1.0);
  EXPECT_EQ(pd.features(2, 1), 1.0);
  EXPECT_EQ(pd.class_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(pd.labels[3], 1);
}

TEST(Preprocess, NumericOnlyIsIdentity) {
  std::vector<double> a{1.5, -2, 3e6}, b{0, 7, 8};
  std::vector<std::string> y{"p", "q", "p"};
  Schema s({{"a", ColumnKind::numeric}, {"b", ColumnKind::numeric}, {"y", ColumnKind::categorical}}, "y",
           {"a", "b"});
  const auto pd = preprocess(Dataset(s, {a, b, y}, test::iota_ids(3)), {});
  ASSERT_EQ(pd.dimension(), 2u);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(pd.features(r, 0), a[r]);
    EXPECT_EQ(pd.features(r, 1), b[r]);
  }
}

TEST(Preprocess, GroupsFollowSchemaOrderNotFeatureListOrder) {
  std::vector<double> a{1, 2};
  std::vector<std::string> c{"u", "v"}, y{"p", "q"};
  Schema s({{"c", ColumnKind::categorical}, {"a", ColumnKind::numeric}, {"y", ColumnKind::categorical}}, "y",
           {"a", "c"});
  const auto enc = fit_encoding(Dataset(s, {c, a, y}, test::iota_ids(2)), {});
  ASSERT_EQ(enc.groups.size(), 2u);
  EXPECT_EQ(enc.groups[0].column, "c");
  EXPECT_EQ(enc.groups[1].offset, 2u);
}

TEST(Preprocess, ClassMergeLikeCahousing) {
  std::vector<double> v{1, 2, 3, 4, 5};
  std::vector<std::string> y{"<1H OCEAN", "INLAND", "NEAR OCEAN", "NEAR BAY", "ISLAND"};
  Schema s({{"v", ColumnKind::numeric}, {"ocean_proximity", ColumnKind::categorical}}, "ocean_proximity", {"v"});
  const Dataset ds(s, {v, y}, test::iota_ids(5));
  const auto pd = preprocess(ds, builtin_dataset("cahousing").preprocess);
  EXPECT_EQ(pd.class_names, (std::vector<std::string>{"<1H OCEAN", "INLAND", "NEAR OCEAN"}));
  EXPECT_EQ(pd.labels, (std::vector<int>{0, 1, 2, 2, 2}));
}

TEST(Preprocess, MergeKeyMatchingNothingIsAnError) {
  std::vector<double> v{1, 2};
  std::vector<std::string> y{"a", "b"};
  Schema s({{"v", ColumnKind::numeric}, {"y", ColumnKind::categorical}}, "y", {"v"});
  PreprocessConfig cfg;
  cfg.class_merge = {{"zzz", "qqq"}};
  EXPECT_THROW(fit_encoding(Dataset(s, {v, y}, test::iota_ids(2)), cfg), Error);
}

TEST(Preprocess, SingleValuedCategoricalWarns) {
  test::WarningLog log;
  std::vector<std::string> c{"only", "only"}, y{"a", "b"};
  Schema s({{"c", ColumnKind::categorical}, {"y", ColumnKind::categorical}}, "y", {"c"});
  const auto pd = preprocess(Dataset(s, {c, y}, test::iota_ids(2)), {});
  EXPECT_EQ(pd.dimension(), 1u);
  EXPECT_EQ(pd.features(0, 0), 1.0);
  EXPECT_TRUE(log.contains("single value"));
}

TEST(Preprocess, FrozenEncodingKeepsDimensionAfterDeletion) {
  const auto ds = test::synthetic(60);
  const auto enc = fit_encoding(ds, {});
  std::vector<std::size_t> only_a;
  const auto& g = ds.categorical("group");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (g[i] == "a") only_a.push_back(i);
  }
  const auto sub = encode(ds.take(only_a), enc);
  EXPECT_EQ(sub.dimension(), enc.dimension());
  // unseen category -> all-zero group
  std::vector<std::string> grp{"zzz"}, lab{"pos"};
  const Dataset odd(ds.schema(), {std::vector<double>{0}, std::vector<double>{0}, std::vector<double>{30}, grp, lab},
                    {0});
  const auto pd = encode(odd, enc);
  double sum = 0;
  for (double v : pd.features.row(0)) sum += v;
  EXPECT_EQ(sum, 30.0);
}

TEST(Preprocess, PositiveClassResolved) {
  const auto ds = test::synthetic(20);
  PreprocessConfig cfg;
  cfg.positive_class = "pos";
  EXPECT_EQ(fit_encoding(ds, cfg).positive_class, 1);
  cfg.positive_class = "maybe";
  EXPECT_THROW(fit_encoding(ds, cfg), Error);
}

TEST(Preprocess, Deterministic) {
  const auto ds = test::synthetic(50);
  const auto a = preprocess(ds, {});
  const auto b = preprocess(ds, {});
  EXPECT_TRUE(a.features == b.features);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(Preprocess, AdultOneHotGroupsExhaustive) {
  if (!test::have_data("adult.csv")) GTEST_SKIP() << "adult.csv not present";
  test::WarningLog log;
  const auto spec = builtin_dataset("adult");
  const auto ds = load_csv(test::data_file("adult.csv"), spec.schema);
  const auto enc = fit_encoding(ds, spec.preprocess);
  const auto pd = encode(ds, enc);
  EXPECT_EQ(pd.class_names, (std::vector<std::string>{"<=50K", ">50K"}));
  EXPECT_EQ(enc.positive_class, 1);
  for (const auto& g : enc.groups) {
    if (g.kind != ColumnKind::categorical) continue;
    for (std::size_t r = 0; r < pd.size(); ++r) {
      double sum = 0;
      for (std::size_t c = 0; c < g.width(); ++c) sum += pd.features(r, g.offset + c);
      ASSERT_EQ(sum, 1.0) << g.column << " row " << r;
    }
  }
}

TEST(Split, SizesAndPartition) {
  const auto s = train_test_split(100, 0.7, 42);
  EXPECT_EQ(s.train.size(), 70u);
  EXPECT_EQ(s.test.size(), 30u);
  EXPECT_EQ(s.seed, 42u);
  const auto small = train_test_split(10, 0.5, 99);
  std::set<std::size_t> all(small.train.begin(), small.train.end());
  for (auto i : small.test) EXPECT_TRUE(all.insert(i).second);
  EXPECT_EQ(all.size(), 10u);
  EXPECT_EQ(*all.rbegin(), 9u);
  EXPECT_TRUE(std::is_sorted(small.train.begin(), small.train.end()));
}

TEST(Split, RoundsHalfToEven) {
  EXPECT_EQ(train_test_split(5, 0.5, 1).train.size(), 2u);  // 2.5
  EXPECT_EQ(train_test_split(7, 0.5, 1).train.size(), 4u);  // 3.5
  EXPECT_EQ(train_test_split(30162, 0.7, 1).train.size(), 21113u);
}

TEST(Split, DeterministicAndSeedSensitive) {
  const auto a = train_test_split(200, 0.7, 5);
  const auto b = train_test_split(200, 0.7, 5);
  const auto c = train_test_split(200, 0.7, 6);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);
}

TEST(Split, Errors) {
  EXPECT_THROW(train_test_split(10, 0.0, 1), Error);
  EXPECT_THROW(train_test_split(10, 1.0, 1), Error);
  EXPECT_THROW(train_test_split(10, -0.3, 1), Error);
  EXPECT_THROW(train_test_split(1, 0.5, 1), Error);
}

TEST(Split, RoughlyUniformMembership) {
  // each position lands in train about 70% of the time
  std::vector<int> hits(20, 0);
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    for (auto i : train_test_split(20, 0.7, seed).train) ++hits[i];
  }
  for (int h : hits) EXPECT_NEAR(h / 4000.0, 0.7, 0.03);
}
