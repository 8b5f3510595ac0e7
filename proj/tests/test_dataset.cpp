#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "downwash/dataset.hpp"
#include "test_support.hpp"

using namespace downwash;
using namespace downwash::learning;

namespace {

Dataset random_dataset(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset d;
  for (int i = 0; i < n; ++i) {
    DatasetRow r;
    r.t = 0.1 * i + 1.0 / 3.0;
    r.x = downwash::testing::random_state(rng);
    r.f_label = downwash::testing::random_vec(rng, 3.0);
    r.stage = i % 3;
    d.rows.push_back(r);
  }
  return d;
}

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_dataset_csv(in);
}

}  // namespace

TEST(Dataset, CsvRoundTripIsBitExact) {
  const Dataset d = random_dataset(50, 1);
  std::stringstream ss;
  write_dataset_csv(d, ss);
  const Dataset back = read_dataset_csv(ss);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.rows[i].t, d.rows[i].t);
    EXPECT_EQ(back.rows[i].x.delta_p, d.rows[i].x.delta_p);
    EXPECT_EQ(back.rows[i].x.v_leader, d.rows[i].x.v_leader);
    EXPECT_EQ(back.rows[i].x.v_follower, d.rows[i].x.v_follower);
    EXPECT_EQ(back.rows[i].f_label, d.rows[i].f_label);
    EXPECT_EQ(back.rows[i].stage, d.rows[i].stage);
  }
}

TEST(Dataset, RejectsMalformedCsv) {
  const std::string header = std::string(kDatasetColumns) + "\n";
  EXPECT_THROW(parse(""), std::runtime_error);
  EXPECT_THROW(parse("t,x\n"), std::runtime_error);
  EXPECT_THROW(parse(header + "0,1,2\n"), std::runtime_error);
  EXPECT_THROW(parse(header + "0,0,0,0,0,0,0,0,0,0,0,0,0,3\n"), std::runtime_error);
  EXPECT_THROW(parse(header + "0,0,0,0,0,0,0,0,0,0,0,0,0,0.5\n"), std::runtime_error);
  EXPECT_THROW(parse(header + "0,0,0,0,0,0,0,abc,0,0,0,0,0,0\n"), std::runtime_error);
  EXPECT_THROW(parse(header + "0,0,0,0,0,0,0,nan,0,0,0,0,0,0\n"), std::runtime_error);
  EXPECT_EQ(parse("# comment\n" + header + "\n0,0,0,0,0,0,0,0,0,0,0,0,0,1\n").stage_size(1), 1u);
}

TEST(Dataset, TruncationKeepsEachStagePrefix) {
  const Dataset d = random_dataset(30, 2);
  const Dataset half = d.truncated(0.5);
  for (int s = 0; s < 3; ++s) {
    EXPECT_EQ(half.stage_size(s), 5u);
    const Dataset full_stage = d.stage_rows(s);
    const Dataset half_stage = half.stage_rows(s);
    for (std::size_t i = 0; i < half_stage.size(); ++i) EXPECT_EQ(half_stage.rows[i].t, full_stage.rows[i].t);
  }
  EXPECT_EQ(d.truncated(1.0).size(), d.size());
  EXPECT_TRUE(d.truncated(0.0).empty());
  EXPECT_THROW(d.truncated(1.5), std::invalid_argument);
}

TEST(Dataset, AppendAndAccessors) {
  Dataset a = random_dataset(4, 3);
  const Dataset b = random_dataset(2, 4);
  a.append(b);
  EXPECT_EQ(a.size(), 6u);
  EXPECT_EQ(a.labels()[5], b.rows[1].f_label);
  EXPECT_EQ(a.inputs()[4].delta_p, b.rows[0].x.delta_p);
}
