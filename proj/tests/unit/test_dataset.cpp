#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "twinforge/dataset.hpp"
#include "twinforge/error.hpp"

namespace tf = twinforge;

namespace {

tf::Dataset parse(const std::string& text, tf::LoadOptions opts = {}) {
  std::istringstream in(text);
  return tf::parse_dataset(in, "mem.csv", opts);
}

}  // namespace

TEST(CsvLoad, ThreeRowsTwoDims) {
  const auto d = parse("x,y,label\n1,2,1\n3,4,-1\n5,6,1\n");
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.labels(), (std::vector<int>{1, -1, 1}));
  EXPECT_DOUBLE_EQ(d.features()(1, 1), 4.0);
}

TEST(CsvLoad, NanCellReportsItsLine) {
  try {
    parse("a,b,label\n1,2,1\n3,nan,-1\n");
    FAIL() << "expected a parse error";
  } catch (const tf::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(CsvLoad, MalformedRowsAreParseErrors) {
  EXPECT_THROW(parse("a,b,label\n1,2\n"), tf::ParseError);
  EXPECT_THROW(parse("a,b,label\n1,x,1\n"), tf::ParseError);
  EXPECT_THROW(parse("a,b,label\n1,2,0.5\n"), tf::ParseError);
  EXPECT_THROW(parse("a,b,y\n1,2,1\n"), tf::ParseError);
  EXPECT_THROW(parse("a,b,label\n1,inf,1\n"), tf::ParseError);
}

TEST(CsvLoad, ZeroOneLabelsBecomeSigned) {
  const auto d = parse("a,label\n0.5,0\n1.5,1\n2.5,0\n");
  EXPECT_EQ(d.labels(), (std::vector<int>{-1, 1, -1}));
}

TEST(CsvLoad, MixedEncodingsRejected) {
  EXPECT_THROW(parse("a,label\n0.5,0\n1.5,1\n2.5,-1\n"), tf::SchemaError);
  EXPECT_THROW(parse("a,label\n0.5,2\n1.5,1\n"), tf::SchemaError);
}

TEST(CsvLoad, MultiClassLabels) {
  tf::LoadOptions opts;
  opts.num_classes = 3;
  const auto d = parse("a,label\n0,0\n1,1\n2,2\n3,1\n", opts);
  EXPECT_EQ(d.classes(), (std::vector<int>{0, 1, 2}));
  EXPECT_FALSE(d.is_binary());
  EXPECT_THROW(parse("a,label\n0,0\n1,3\n", opts), tf::SchemaError);
}

TEST(CsvLoad, SourceColumn) {
  const auto d = parse("a,source,label\n1,siteA,1\n2,siteB,-1\n");
  ASSERT_TRUE(d.has_sources());
  EXPECT_EQ(d.sources()[1], "siteB");
  EXPECT_EQ(d.dim(), 1u);
}

TEST(CsvLoad, EmbeddingHeaderIsStrict) {
  tf::LoadOptions opts;
  opts.format = tf::DataFormat::embedding_csv;
  EXPECT_EQ(parse("d0,d1,label\n1,2,1\n3,4,-1\n", opts).dim(), 2u);
  EXPECT_THROW(parse("d0,d2,label\n1,2,1\n", opts), tf::ParseError);
  EXPECT_THROW(parse("d0,source,label\n1,s,1\n", opts), tf::ParseError);
}

TEST(CsvLoad, ImbalanceOfBenchmarkSizedTrainSplit) {
  std::ostringstream text;
  text << "d0,label\n";
  for (int i = 0; i < 1181; ++i) text << i * 0.5 << ',' << (i < 105 ? 1 : -1) << '\n';
  tf::LoadOptions opts;
  opts.format = tf::DataFormat::embedding_csv;
  const auto stats = tf::imbalance(parse(text.str(), opts));
  EXPECT_EQ(stats.counts_per_class.at(1), 105u);
  EXPECT_EQ(stats.counts_per_class.at(-1), 1076u);
  EXPECT_NEAR(stats.imbalance_factor, 10.247, 1e-3);
}

TEST(Imbalance, InvariantUnderDuplication) {
  const auto d = tf::gen_synthetic(tf::SyntheticKind::gaussian_pair, 70, 9, tf::Geometry{}, 3);
  const auto doubled = tf::Dataset::concat(d, d);
  EXPECT_DOUBLE_EQ(tf::imbalance(d).imbalance_factor, tf::imbalance(doubled).imbalance_factor);
}

TEST(CsvWrite, RoundTripIsExact) {
  const auto d = tf::gen_synthetic(tf::SyntheticKind::ring_imbalance, 40, 7, tf::Geometry{}, 12);
  std::stringstream buf;
  tf::write_dataset(buf, d);
  tf::LoadOptions opts;
  opts.format = tf::DataFormat::embedding_csv;
  const auto back = tf::parse_dataset(buf, "buf", opts);
  EXPECT_EQ(back.labels(), d.labels());
  EXPECT_TRUE(back.features() == d.features());
}

TEST(CsvWrite, FileHashIsStable) {
  const auto dir = std::filesystem::temp_directory_path() / "twinforge_hash_test";
  std::filesystem::create_directories(dir);
  const auto d = tf::gen_synthetic(tf::SyntheticKind::gaussian_pair, 30, 5, tf::Geometry{}, 1);
  tf::write_dataset(dir / "a.csv", d);
  tf::write_dataset(dir / "b.csv", d);
  EXPECT_EQ(tf::content_hash(dir / "a.csv"), tf::content_hash(dir / "b.csv"));
  tf::write_dataset(dir / "c.csv", tf::gen_synthetic(tf::SyntheticKind::gaussian_pair, 30, 5, tf::Geometry{}, 2));
  EXPECT_NE(tf::content_hash(dir / "a.csv"), tf::content_hash(dir / "c.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Dataset, ConstructorValidates) {
  tf::RowMatrix x(2, 1);
  x << 1, 2;
  EXPECT_THROW(tf::Dataset(x, {1}), tf::ShapeError);
  x(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(tf::Dataset(x, {1, -1}), tf::SchemaError);
  x(0, 0) = 0.0;
  EXPECT_THROW(tf::Dataset(x, {1, -1}, {}, {-1, 1, 2}), tf::SchemaError);
}

TEST(Dataset, SwappedLabels) {
  const auto d = tf::gen_synthetic(tf::SyntheticKind::gaussian_pair, 20, 4, tf::Geometry{}, 0);
  const auto s = d.with_swapped_labels();
  EXPECT_EQ(s.count(1), d.count(-1));
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(s.label(i), -d.label(i));
}
