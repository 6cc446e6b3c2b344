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

#ifndef CVSKIT_TESTS_FIXTURES_HPP
#define CVSKIT_TESTS_FIXTURES_HPP

// Reference values transcribed from the published IMDB and MNIST runs, plus
// helpers to load the CSV fixtures under data/.

#include <array>
#include <fstream>
#include <stdexcept>
#include <string>

#include "cvskit/io.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) {
  return std::string(CVSKIT_DATA_DIR) + "/" + name;
}

inline cvs::Trajectory load(const std::string& name) {
  std::ifstream in(data_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  return cvs::parse_trajectory_table(in, name);
}

struct CountsRow {
  int epoch;
  double train_pct, test_pct;
  long long cc, ci, uc, ui;
};

// Filtered IMDB, threshold 0.7.
inline constexpr std::array<CountsRow, 10> kImdbCounts{{
    {1, 74.86, 82.11, 13462, 1507, 3007, 2082},
    {2, 89.48, 82.70, 14748, 2029, 1840, 1441},
    {3, 92.59, 68.29, 12585, 5177, 1113, 1183},
    {4, 94.42, 85.39, 16012, 2077, 1115, 854},
    {5, 95.80, 87.03, 16576, 1932, 881, 669},
    {6, 96.89, 86.00, 16568, 2253, 681, 556},
    {7, 97.38, 63.46, 12109, 6689, 619, 641},
    {8, 98.03, 85.09, 16496, 2513, 572, 477},
    {9, 98.70, 86.30, 16857, 2275, 453, 473},
    {10, 98.68, 85.55, 16751, 2527, 409, 371},
}};

struct MetricsRow {
  double commit_acc_pct, approp_uncert_pct, coverage_pct, cvs;
};

// Published derived metrics for the same ten epochs.
inline constexpr std::array<MetricsRow, 10> kImdbMetrics{{
    {89.93, 58.01, 74.63, 0.5217},
    {87.91, 41.53, 83.64, 0.3651},
    {70.85, 18.60, 88.55, 0.1318},
    {88.52, 29.14, 90.18, 0.2579},
    {89.56, 25.72, 92.27, 0.2304},
    {88.03, 19.79, 93.83, 0.1742},
    {64.42, 8.74, 93.72, 0.0563},
    {86.78, 15.95, 94.77, 0.1384},
    {88.11, 17.21, 95.38, 0.1517},
    {86.89, 12.80, 96.11, 0.1112},
}};

inline cvs::CertaintyValidityMatrix matrix_of(const CountsRow& r) {
  return {r.cc, r.ci, r.uc, r.ui};
}

}  // namespace fixtures

#endif  // CVSKIT_TESTS_FIXTURES_HPP
