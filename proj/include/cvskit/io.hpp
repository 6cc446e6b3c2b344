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

// Readers and writers for the two on-disk formats:
//
//  * prediction logs: UTF-8 JSONL, one object per line with keys
//    "id" (string), "pred" (int), "true" (int), "conf" (float) and an
//    optional "committed" (bool);
//  * trajectory tables: CSV with header
//    epoch,train_acc,test_acc,train_loss,cc,ci,uc,ui
//    optionally followed by derived metric columns (as written by
//    write_summary_table).

#ifndef CVSKIT_IO_HPP
#define CVSKIT_IO_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <span>
#include <string_view>
#include <vector>

#include "cvskit/datamodel.hpp"
#include "cvskit/quadrants.hpp"
#include "json.hpp"

namespace cvs {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

inline std::string at_line(std::size_t line_no) {
  return ", line " + std::to_string(line_no);
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
  return value;
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_exact(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline std::string format_fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
  return buf.data();
}

inline double accuracy_fraction(double v, std::size_t line_no,
                                std::string_view column) {
  if (!(v >= 0.0) || v > 100.0) {
    throw ParseError(std::string(column) + " out of range" + at_line(line_no));
  }
  return v > 1.0 ? v / 100.0 : v;
}

}  // namespace detail

/// Parses a JSONL prediction log. Blank lines are skipped; line numbers in
/// error messages count every physical line starting at 1.
inline std::vector<PredictionRecord> parse_prediction_log(
    std::istream& in, std::optional<std::int64_t> num_classes = {}) {
  using nlohmann::json;
  std::vector<PredictionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error&) {
      throw ParseError("malformed JSON" + detail::at_line(line_no));
    }
    if (!obj.is_object()) {
      throw ParseError("expected a JSON object" + detail::at_line(line_no));
    }
    for (const auto& [key, _] : obj.items()) {
      if (key != "id" && key != "pred" && key != "true" && key != "conf" &&
          key != "committed") {
        throw ParseError("unknown key '" + key + "'" +
                         detail::at_line(line_no));
      }
    }
    for (const char* key : {"id", "pred", "true", "conf"}) {
      if (!obj.contains(key)) {
        throw ParseError(std::string("missing key '") + key + "'" +
                         detail::at_line(line_no));
      }
    }
    const auto& id = obj["id"];
    const auto& pred = obj["pred"];
    const auto& actual = obj["true"];
    const auto& conf = obj["conf"];
    if (!id.is_string()) {
      throw ParseError("id must be a string" + detail::at_line(line_no));
    }
    if (!pred.is_number_integer() || !actual.is_number_integer()) {
      throw ParseError("pred and true must be integers" +
                       detail::at_line(line_no));
    }
    if (!conf.is_number()) {
      throw ParseError("conf must be a number" + detail::at_line(line_no));
    }
    PredictionRecord r;
    r.sample_id = id.get<std::string>();
    r.predicted = pred.get<std::int64_t>();
    r.actual = actual.get<std::int64_t>();
    r.confidence = conf.get<double>();
    if (obj.contains("committed")) {
      if (!obj["committed"].is_boolean()) {
        throw ParseError("committed must be a boolean" +
                         detail::at_line(line_no));
      }
      r.committed = obj["committed"].get<bool>();
    }
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw ParseError("conf out of range" + detail::at_line(line_no));
    }
    if (r.predicted < 0 || r.actual < 0 ||
        (num_classes &&
         (r.predicted >= *num_classes || r.actual >= *num_classes))) {
      throw ParseError("class index out of range" + detail::at_line(line_no));
    }
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<PredictionRecord> parse_prediction_log(
    std::string_view text, std::optional<std::int64_t> num_classes = {}) {
  std::istringstream in{std::string(text)};
  return parse_prediction_log(in, num_classes);
}

inline void write_prediction_log(std::ostream& out,
                                 std::span<const PredictionRecord> records) {
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    obj["id"] = r.sample_id;
    obj["pred"] = r.predicted;
    obj["true"] = r.actual;
    obj["conf"] = r.confidence;
    if (r.committed) obj["committed"] = *r.committed;
    out << obj.dump() << '\n';
  }
}

inline constexpr std::array<std::string_view, 8> kTrajectoryColumns = {
    "epoch", "train_acc", "test_acc", "train_loss", "cc", "ci", "uc", "ui"};

inline constexpr std::array<std::string_view, 5> kDerivedColumns = {
    "accuracy", "commit_acc", "approp_uncert", "coverage", "cvs"};

/// Parses a trajectory table. Accuracy values above 1 are read as percents.
/// Derived columns are accepted after the base columns; when a row carries
/// matrix counts the metrics are recomputed from them, otherwise any
/// derived values present in the row are kept as given.
inline Trajectory parse_trajectory_table(std::istream& in,
                                         std::string dataset_label = {}) {
  Trajectory t;
  t.dataset_label = std::move(dataset_label);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> extra;  // derived column names, in order
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    if (!have_header) {
      if (cells.size() < kTrajectoryColumns.size()) {
        throw ParseError("bad header" + detail::at_line(line_no));
      }
      for (std::size_t i = 0; i < kTrajectoryColumns.size(); ++i) {
        if (cells[i] != kTrajectoryColumns[i]) {
          throw ParseError("bad header: expected '" +
                           std::string(kTrajectoryColumns[i]) + "'" +
                           detail::at_line(line_no));
        }
      }
      for (std::size_t i = kTrajectoryColumns.size(); i < cells.size(); ++i) {
        bool known = false;
        for (auto name : kDerivedColumns) known = known || cells[i] == name;
        if (!known) {
          throw ParseError("unknown column '" + std::string(cells[i]) + "'" +
                           detail::at_line(line_no));
        }
        extra.push_back(*std::find(kDerivedColumns.begin(),
                                   kDerivedColumns.end(), cells[i]));
      }
      have_header = true;
      continue;
    }
    if (cells.size() != kTrajectoryColumns.size() + extra.size()) {
      throw ParseError("wrong number of fields" + detail::at_line(line_no));
    }

    EpochSummary e;
    const auto epoch = detail::parse_number<int>(cells[0]);
    if (!epoch || *epoch < 1) {
      throw ParseError("bad epoch" + detail::at_line(line_no));
    }
    e.epoch = *epoch;
    if (!t.epochs.empty()) {
      const int prev = t.epochs.back().epoch;
      if (e.epoch == prev) {
        throw ParseError("duplicate epoch " + std::to_string(e.epoch) +
                         detail::at_line(line_no));
      }
      if (e.epoch < prev) {
        throw ParseError("decreasing epoch " + std::to_string(e.epoch) +
                         detail::at_line(line_no));
      }
    }

    const auto train = detail::parse_number<double>(cells[1]);
    const auto test = detail::parse_number<double>(cells[2]);
    if (!train || !test) {
      throw ParseError("missing or bad accuracy" + detail::at_line(line_no));
    }
    e.train_acc = detail::accuracy_fraction(*train, line_no, "train_acc");
    e.test_acc = detail::accuracy_fraction(*test, line_no, "test_acc");

    if (!cells[3].empty()) {
      const auto loss = detail::parse_number<double>(cells[3]);
      if (!loss || *loss < 0.0) {
        throw ParseError("bad train_loss" + detail::at_line(line_no));
      }
      e.train_loss = *loss;
    }

    int blank = 0;
    for (std::size_t i = 4; i < 8; ++i) blank += cells[i].empty() ? 1 : 0;
    if (blank == 0) {
      std::array<std::int64_t, 4> counts{};
      for (std::size_t i = 0; i < 4; ++i) {
        const auto v = detail::parse_number<std::int64_t>(cells[4 + i]);
        if (!v) throw ParseError("bad count" + detail::at_line(line_no));
        if (*v < 0) throw ParseError("negative count" + detail::at_line(line_no));
        counts[i] = *v;
      }
      e.matrix = CertaintyValidityMatrix{counts[0], counts[1], counts[2],
                                         counts[3]};
      e.metrics = derive_metrics(*e.matrix);
    } else if (blank != 4) {
      throw ParseError("matrix columns must be all present or all blank" +
                       detail::at_line(line_no));
    } else {
      MetricSet ms;
      bool any = false;
      for (std::size_t i = 0; i < extra.size(); ++i) {
        const auto cell = cells[kTrajectoryColumns.size() + i];
        if (cell.empty()) continue;
        const auto v = detail::parse_number<double>(cell);
        if (!v || *v < 0.0 || *v > 1.0) {
          throw ParseError("bad " + std::string(extra[i]) +
                           detail::at_line(line_no));
        }
        any = true;
        if (extra[i] == "accuracy") ms.accuracy = v;
        if (extra[i] == "commit_acc") ms.commit_acc = v;
        if (extra[i] == "approp_uncert") ms.approp_uncert = v;
        if (extra[i] == "coverage") ms.coverage = v;
        if (extra[i] == "cvs") ms.cvs = v;
      }
      if (any) e.metrics = ms;
    }
    t.epochs.push_back(std::move(e));
  }
  if (!have_header) throw ParseError("missing header");
  return t;
}

inline Trajectory parse_trajectory_table(std::string_view text,
                                         std::string dataset_label = {}) {
  std::istringstream in{std::string(text)};
  return parse_trajectory_table(in, std::move(dataset_label));
}

/// Writes the base columns plus derived metrics. Accuracies are written as
/// fractions in shortest round-trip form; derived metrics use six decimals
/// and are blank when undefined or absent.
inline std::string write_summary_table(const Trajectory& t) {
  std::string out;
  for (auto c : kTrajectoryColumns) {
    out += c;
    out += ',';
  }
  for (std::size_t i = 0; i < kDerivedColumns.size(); ++i) {
    out += kDerivedColumns[i];
    out += i + 1 < kDerivedColumns.size() ? ',' : '\n';
  }
  auto opt = [](const std::optional<double>& v) {
    return v ? detail::format_fixed(*v, 6) : std::string();
  };
  for (const auto& e : t.epochs) {
    out += std::to_string(e.epoch) + ',';
    out += detail::format_exact(e.train_acc) + ',';
    out += detail::format_exact(e.test_acc) + ',';
    out += (e.train_loss ? detail::format_exact(*e.train_loss) : "") + ',';
    if (e.matrix) {
      out += std::to_string(e.matrix->cc) + ',' + std::to_string(e.matrix->ci) +
             ',' + std::to_string(e.matrix->uc) + ',' +
             std::to_string(e.matrix->ui) + ',';
    } else {
      out += ",,,,";
    }
    std::optional<MetricSet> ms = e.metrics;
    if (e.matrix) ms = derive_metrics(*e.matrix);
    if (ms) {
      out += opt(ms->accuracy) + ',' + opt(ms->commit_acc) + ',' +
             opt(ms->approp_uncert) + ',' + opt(ms->coverage) + ',' +
             opt(ms->cvs);
    } else {
      out += ",,,,";
    }
    out += '\n';
  }
  return out;
}

}  // namespace cvs

#endif  // CVSKIT_IO_HPP
