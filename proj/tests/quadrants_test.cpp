// Copyright 2026 The cvskit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "cvskit/quadrants.hpp"
#include "fixtures.hpp"

namespace {

using cvs::CertaintyValidityMatrix;
using cvs::PredictionRecord;
using cvs::Quadrant;

std::vector<PredictionRecord> random_records(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> cls(0, 3), flag(0, 3);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  std::vector<PredictionRecord> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    PredictionRecord r{"r" + std::to_string(i), cls(rng), cls(rng), conf(rng),
                       std::nullopt};
    // Exact threshold ties and explicit flags both show up.
    if (i % 97 == 0) r.confidence = 0.7;
    if (const int f = flag(rng); f == 0) r.committed = true;
    else if (f == 1) r.committed = false;
    out.push_back(r);
  }
  return out;
}

// Per-record oracle written straight from the quadrant definitions.
CertaintyValidityMatrix brute_force(const std::vector<PredictionRecord>& recs,
                                    double threshold) {
  long long cc = 0, ci = 0, uc = 0, ui = 0;
  for (const auto& r : recs) {
    bool certain;
    if (r.committed.has_value()) certain = *r.committed;
    else certain = !(r.confidence < threshold);
    const bool valid = r.predicted == r.actual;
    if (certain && valid) ++cc;
    if (certain && !valid) ++ci;
    if (!certain && valid) ++uc;
    if (!certain && !valid) ++ui;
  }
  return {cc, ci, uc, ui};
}

cvs::AnalysisConfig at(double threshold) {
  cvs::AnalysisConfig c;
  c.certainty_threshold = threshold;
  return c;
}

TEST(Classify, Examples) {
  const auto c = at(0.7);
  EXPECT_EQ(cvs::classify_record({"a", 1, 1, 0.9, {}}, c), Quadrant::CC);
  EXPECT_EQ(cvs::classify_record({"b", 0, 1, 0.69, {}}, c), Quadrant::UI);
  EXPECT_EQ(cvs::classify_record({"c", 1, 1, 0.2, true}, c), Quadrant::CC);
  EXPECT_EQ(cvs::classify_record({"d", 0, 1, 0.95, false}, c), Quadrant::UI);
}

TEST(Classify, ThresholdTieIsCertain) {
  EXPECT_EQ(cvs::classify_record({"t", 1, 0, 0.7, {}}, at(0.7)), Quadrant::CI);
}

TEST(Accumulate, OnePerQuadrantAndEmpty) {
  const std::vector<PredictionRecord> recs{{"a", 1, 1, 0.9, {}},
                                           {"b", 1, 0, 0.9, {}},
                                           {"c", 1, 1, 0.1, {}},
                                           {"d", 1, 0, 0.1, {}}};
  const auto m = cvs::accumulate_matrix(recs, at(0.7));
  EXPECT_EQ(m, (CertaintyValidityMatrix{1, 1, 1, 1}));
  EXPECT_EQ(m.total(), 4);
  EXPECT_EQ(cvs::accumulate_matrix({}, at(0.7)), CertaintyValidityMatrix{});
}

TEST(Accumulate, MatchesBruteForceOnRandomRecords) {
  std::mt19937_64 rng(20260101);
  const auto recs = random_records(rng, 10000);
  for (double thr : {0.3, 0.5, 0.7, 0.9}) {
    EXPECT_EQ(cvs::accumulate_matrix(recs, at(thr)), brute_force(recs, thr));
  }
}

TEST(Accumulate, CountsShiftMonotonicallyWithThreshold) {
  std::mt19937_64 rng(3);
  auto recs = random_records(rng, 2000);
  for (auto& r : recs) r.committed.reset();
  long long prev_committed = -1;
  for (double thr = 0.95; thr > 0.04; thr -= 0.05) {
    const auto m = cvs::accumulate_matrix(recs, at(thr));
    EXPECT_GE(m.committed(), prev_committed);
    prev_committed = m.committed();
  }
}

TEST(Merge, Examples) {
  const CertaintyValidityMatrix a{1, 0, 0, 0}, b{0, 1, 0, 0};
  EXPECT_EQ(cvs::merge_matrices(a, b), (CertaintyValidityMatrix{1, 1, 0, 0}));
  const CertaintyValidityMatrix m{5, 6, 7, 8};
  EXPECT_EQ(m + CertaintyValidityMatrix{}, m);
}

TEST(Merge, RandomChunkingsMatchSequential) {
  std::mt19937_64 rng(99);
  const auto recs = random_records(rng, 3000);
  const auto cfg = at(0.7);
  const auto whole = cvs::accumulate_matrix(recs, cfg);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> nk(1, 40);
    std::uniform_int_distribution<std::size_t> cut(0, recs.size());
    std::vector<std::size_t> cuts(static_cast<std::size_t>(nk(rng)));
    for (auto& c : cuts) c = cut(rng);
    cuts.push_back(0);
    cuts.push_back(recs.size());
    std::sort(cuts.begin(), cuts.end());
    CertaintyValidityMatrix folded;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      std::span<const PredictionRecord> chunk(recs.data() + cuts[i],
                                              cuts[i + 1] - cuts[i]);
      folded = folded + cvs::accumulate_matrix(chunk, cfg);
    }
    ASSERT_EQ(folded, whole) << "trial " << trial;
  }
}

TEST(Metrics, EpochOneOfImdb) {
  const auto s = cvs::derive_metrics({13462, 1507, 3007, 2082});
  EXPECT_NEAR(*s.accuracy, 0.8211, 5e-4);
  EXPECT_NEAR(*s.commit_acc, 0.8993, 5e-4);
  EXPECT_NEAR(*s.approp_uncert, 0.5801, 5e-4);
  EXPECT_NEAR(*s.coverage, 0.7463, 5e-4);
  EXPECT_NEAR(*s.cvs, 0.5217, 5e-4);
}

TEST(Metrics, EpochNineOfImdb) {
  const auto s = cvs::derive_metrics({16857, 2275, 453, 473});
  EXPECT_NEAR(*s.commit_acc, 0.8811, 5e-4);
  EXPECT_NEAR(*s.approp_uncert, 0.1721, 5e-4);
  EXPECT_NEAR(*s.coverage, 0.9538, 5e-4);
  EXPECT_NEAR(*s.cvs, 0.1517, 5e-4);
}

TEST(Metrics, HandArithmetic) {
  // {8,2,3,7}: 11/20, 8/10, 7/9, 10/20, 8/10 * 7/9.
  const auto s = cvs::derive_metrics({8, 2, 3, 7});
  EXPECT_DOUBLE_EQ(*s.accuracy, 0.55);
  EXPECT_DOUBLE_EQ(*s.commit_acc, 0.8);
  EXPECT_NEAR(*s.approp_uncert, 7.0 / 9.0, 1e-15);
  EXPECT_DOUBLE_EQ(*s.coverage, 0.5);
  EXPECT_NEAR(*s.cvs, 0.6222, 5e-5);
  EXPECT_NEAR(*s.miscommunication_ratio, 2.0 / 9.0, 1e-15);
}

TEST(Metrics, FullTableAgainstPublishedValues) {
  for (std::size_t i = 0; i < fixtures::kImdbCounts.size(); ++i) {
    const auto s = cvs::derive_metrics(fixtures::matrix_of(fixtures::kImdbCounts[i]));
    const auto& want = fixtures::kImdbMetrics[i];
    SCOPED_TRACE("epoch " + std::to_string(i + 1));
    EXPECT_NEAR(*s.commit_acc, want.commit_acc_pct / 100, 5e-4);
    EXPECT_NEAR(*s.approp_uncert, want.approp_uncert_pct / 100, 5e-4);
    EXPECT_NEAR(*s.coverage, want.coverage_pct / 100, 5e-4);
    EXPECT_NEAR(*s.cvs, want.cvs, 5e-4);
    EXPECT_NEAR(*s.accuracy, fixtures::kImdbCounts[i].test_pct / 100, 5e-4);
  }
}

TEST(Metrics, ZeroDenominators) {
  const auto empty = cvs::derive_metrics({});
  EXPECT_FALSE(empty.accuracy || empty.commit_acc || empty.approp_uncert ||
               empty.coverage || empty.cvs || empty.miscommunication_ratio);

  const auto none_committed = cvs::derive_metrics({0, 0, 5, 5});
  EXPECT_FALSE(none_committed.commit_acc);
  EXPECT_FALSE(none_committed.cvs);
  EXPECT_DOUBLE_EQ(*none_committed.coverage, 0.0);
  EXPECT_DOUBLE_EQ(*none_committed.approp_uncert, 1.0);

  const auto no_errors = cvs::derive_metrics({4, 0, 6, 0});
  EXPECT_DOUBLE_EQ(*no_errors.approp_uncert, 1.0);
  EXPECT_DOUBLE_EQ(*no_errors.miscommunication_ratio, 0.0);
  EXPECT_DOUBLE_EQ(*no_errors.cvs, 1.0);
}

TEST(Metrics, RandomMatricesStayInRange) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long long> n(0, 50);
  for (int i = 0; i < 1000; ++i) {
    const CertaintyValidityMatrix m{n(rng), n(rng), n(rng), n(rng)};
    const auto s = cvs::derive_metrics(m);
    for (const auto& v : {s.accuracy, s.commit_acc, s.approp_uncert,
                          s.coverage, s.cvs, s.miscommunication_ratio}) {
      if (v) {
        EXPECT_GE(*v, 0.0);
        EXPECT_LE(*v, 1.0);
      }
    }
    if (s.cvs) {
      EXPECT_LE(*s.cvs, std::min(*s.commit_acc, *s.approp_uncert));
    }
    if (s.approp_uncert && s.miscommunication_ratio) {
      EXPECT_NEAR(*s.approp_uncert + *s.miscommunication_ratio, 1.0, 1e-12);
    }
  }
}

TEST(Metrics, NegativeCountsRejected) {
  EXPECT_THROW(cvs::derive_metrics({1, 2, -3, 4}), cvs::InvalidArgument);
}

TEST(Metrics, AttachFillsEveryEpoch) {
  auto t = fixtures::load("imdb_filtered.csv");
  for (auto& e : t.epochs) e.metrics.reset();
  cvs::attach_metrics(t);
  for (const auto& e : t.epochs) EXPECT_TRUE(e.metrics && e.metrics->cvs);
}

}  // namespace
