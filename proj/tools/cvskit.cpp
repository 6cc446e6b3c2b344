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

// cvskit: command-line front end for the certainty/validity analyses and the
// synthetic commitment lab. JSON goes to stdout, summaries to stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvskit/cvskit.hpp"

namespace fs = std::filesystem;

namespace {

// Raised for anything that should end the run with a message and exit 1.
struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open " + path);
  return in;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("cannot write " + path.string());
  out << content;
  if (!out) throw CliError("write failed: " + path.string());
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError("cannot create " + dir + ": " + ec.message());
}

std::vector<cvs::PredictionRecord> load_log(const std::string& path) {
  auto in = open_input(path);
  try {
    return cvs::parse_prediction_log(in, std::nullopt);
  } catch (const cvs::ParseError& e) {
    throw CliError(path + ": " + e.what());
  }
}

cvs::Trajectory load_trajectory(const std::string& path) {
  auto in = open_input(path);
  try {
    return cvs::parse_trajectory_table(in, fs::path(path).stem().string());
  } catch (const cvs::ParseError& e) {
    throw CliError(path + ": " + e.what());
  }
}

cvs::lab::LabConfig load_config(const std::string& path) {
  if (!fs::exists(path)) throw CliError("cannot open " + path);
  try {
    return cvs::lab::load_lab_config(path);
  } catch (const cvs::ParseError& e) {
    throw CliError(path + ": " + e.what());
  } catch (const cvs::InvalidArgument& e) {
    throw CliError(path + ": " + e.what());
  }
}

std::string csv_cell(const std::optional<double>& v) {
  return v ? cvs::detail::format_fixed(*v, 6) : std::string();
}

void print_json(const cvs::Json& j) { std::cout << j.dump(2) << '\n'; }

// -- subcommands ------------------------------------------------------------

struct MatrixArgs {
  std::string log;
  double threshold = 0.7;
  bool json = false;
  bool csv = false;
};

int run_matrix(const MatrixArgs& a) {
  cvs::AnalysisConfig config;
  config.certainty_threshold = a.threshold;
  config.validate();
  const auto records = load_log(a.log);
  const auto m = cvs::accumulate_matrix(records, config);
  const auto s = cvs::derive_metrics(m);
  if (a.csv) {
    std::cout << "cc,ci,uc,ui,total,accuracy,commit_acc,approp_uncert,"
                 "coverage,cvs,miscommunication_ratio\n"
              << m.cc << ',' << m.ci << ',' << m.uc << ',' << m.ui << ','
              << m.total() << ',' << csv_cell(s.accuracy) << ','
              << csv_cell(s.commit_acc) << ',' << csv_cell(s.approp_uncert)
              << ',' << csv_cell(s.coverage) << ',' << csv_cell(s.cvs) << ','
              << csv_cell(s.miscommunication_ratio) << '\n';
  } else {
    print_json(cvs::Json{{"threshold", a.threshold},
                         {"matrix", cvs::to_json(m)},
                         {"metrics", cvs::to_json(s)}});
  }
  std::cerr << records.size() << " records, CC " << m.cc << " CI " << m.ci
            << " UC " << m.uc << " UI " << m.ui << '\n';
  return 0;
}

struct TrajectoryArgs {
  std::string csv;
  double spike_delta = 2.0;
  double collapse_delta = 10.0;
};

int run_trajectory(const TrajectoryArgs& a) {
  cvs::AnalysisConfig config;
  config.spike_delta = a.spike_delta;
  config.collapse_delta = a.collapse_delta;
  config.validate();
  const auto t = load_trajectory(a.csv);
  cvs::validate_trajectory(t);

  cvs::Json out;
  out["dataset"] = t.dataset_label;
  out["epochs"] = t.size();
  const auto spike = cvs::platonic_spike(t, config);
  out["platonic_spike"] = {{"present", spike.present}, {"gap", spike.gap}};
  out["stability"] = cvs::to_json(cvs::stability_report(t, config));

  cvs::Json migrations = cvs::Json::array();
  bool all_matrices = true;
  for (const auto& e : t.epochs) all_matrices = all_matrices && e.matrix;
  if (all_matrices) {
    for (const auto& r : cvs::migration_series(t)) {
      migrations.push_back(cvs::to_json(r));
    }
  }
  out["migrations"] = std::move(migrations);
  out["benign_onset"] = cvs::opt(cvs::benign_onset(t, config));

  cvs::Json hyp = cvs::Json::array();
  for (const auto& e : t.epochs) {
    if (!e.matrix) continue;
    const auto h = cvs::hypothesis_discriminant(*e.matrix);
    cvs::Json row{{"epoch", e.epoch}};
    if (h) {
      row.update(cvs::to_json(*h));
    } else {
      row["ui_share"] = nullptr;
      row["verdict"] = nullptr;
    }
    hyp.push_back(std::move(row));
  }
  out["hypothesis"] = std::move(hyp);
  print_json(out);

  std::cerr << t.dataset_label << ": " << t.size() << " epochs, spike "
            << (spike.present ? "present" : "absent") << '\n';
  return 0;
}

struct SelectArgs {
  std::string csv;
  std::string policy;
  double weight = 0.5;
};

int run_select(const SelectArgs& a) {
  const auto t = load_trajectory(a.csv);
  cvs::CheckpointPolicy policy;
  if (a.policy == "max-acc") {
    policy = cvs::CheckpointPolicy::max_accuracy();
  } else if (a.policy == "max-cvs") {
    policy = cvs::CheckpointPolicy::max_cvs();
  } else {
    policy = cvs::CheckpointPolicy::joint(a.weight);
  }
  const int epoch = cvs::select_checkpoint(t, policy);
  std::cout << epoch << '\n';
  std::cerr << "policy " << a.policy << " selects epoch " << epoch << '\n';
  return 0;
}

struct RouteArgs {
  std::string log;
  double threshold = 0.7;
};

int run_route(const RouteArgs& a) {
  cvs::AnalysisConfig config;
  config.certainty_threshold = a.threshold;
  config.validate();
  const auto records = load_log(a.log);
  const auto r = cvs::simulate_routing(cvs::accumulate_matrix(records, config));
  print_json(cvs::to_json(r));
  std::cerr << r.automated_count << " automated, " << r.review_count
            << " to review\n";
  return 0;
}

struct CeilingArgs {
  bool fit = false;
  std::optional<double> p_clean;
  std::optional<double> plateau;
  double chance = 0.5;
  double clean_acc = 1.0;
};

int run_ceiling(const CeilingArgs& a) {
  double value = 0.0;
  if (a.fit) {
    if (!a.plateau) throw CliError("ceiling --fit needs --plateau");
    value = cvs::fit_clean_fraction(*a.plateau, a.clean_acc, a.chance);
    std::cerr << "clean fraction that explains the plateau\n";
  } else {
    if (!a.p_clean) throw CliError("ceiling needs --p-clean (or --fit)");
    cvs::CeilingModel m{*a.p_clean, a.clean_acc, a.chance};
    value = cvs::predicted_plateau(m);
    std::cerr << "predicted plateau accuracy\n";
  }
  std::cout << cvs::detail::format_fixed(value, 4) << '\n';
  return 0;
}

struct PhaseArgs {
  std::string csv;
  std::string svg;
  std::string points;
};

int run_phase(const PhaseArgs& a) {
  const auto t = load_trajectory(a.csv);
  const auto d = cvs::build_phase_diagram(t, cvs::AnalysisConfig{});
  write_file(a.svg, cvs::render_phase_svg(d));
  if (!a.points.empty()) write_file(a.points, cvs::export_phase_csv(d));
  cvs::Json pts = cvs::Json::array();
  for (const auto& p : d.points) {
    pts.push_back({{"epoch", p.epoch},
                   {"divergence", p.divergence},
                   {"cvs", p.cvs},
                   {"region", std::string(cvs::to_string(*p.region))}});
  }
  print_json({{"threshold", d.excitability_threshold}, {"points", pts}});
  std::cerr << "wrote " << a.svg << '\n';
  return 0;
}

struct LabRunArgs {
  std::string config;
  std::string out;
};

int run_lab(const LabRunArgs& a) {
  const auto config = load_config(a.config);
  make_dir(a.out);
  const auto result = cvs::lab::run_experiment(config);
  const fs::path dir(a.out);
  for (std::size_t i = 0; i < result.logs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "epoch_%03zu.jsonl", i + 1);
    std::ostringstream s;
    cvs::write_prediction_log(s, result.logs[i]);
    write_file(dir / name, s.str());
  }
  write_file(dir / "trajectory.csv",
             cvs::write_summary_table(result.trajectory));

  cvs::Json out{{"epochs", result.trajectory.size()},
                {"trajectory", (dir / "trajectory.csv").string()}};
  if (!result.trajectory.empty()) {
    const auto& last = result.trajectory.epochs.back();
    out["final_test_acc"] = last.test_acc;
    out["final_metrics"] = cvs::to_json(*last.metrics);
    out["plateau_accuracy"] = cvs::lab::plateau_accuracy(result.trajectory);
  }
  print_json(out);
  std::cerr << "wrote " << result.logs.size() << " epoch logs to " << a.out
            << '\n';
  return 0;
}

struct LabSweepArgs {
  std::string config;
  std::vector<double> taus;
  std::string out;
};

int run_sweep(const LabSweepArgs& a) {
  const auto config = load_config(a.config);
  make_dir(a.out);
  const auto rows = cvs::lab::tau_sweep(config, a.taus);
  std::string csv =
      "tau,best_epoch,best_accuracy,best_epoch_cvs,plateau_accuracy,"
      "plateau_cvs\n";
  cvs::Json j = cvs::Json::array();
  for (const auto& r : rows) {
    csv += cvs::detail::format_exact(r.tau) + ',' +
           std::to_string(r.best_epoch) + ',' +
           cvs::detail::format_fixed(r.best_accuracy, 6) + ',' +
           csv_cell(r.best_epoch_cvs) + ',' +
           cvs::detail::format_fixed(r.plateau_accuracy, 6) + ',' +
           csv_cell(r.plateau_cvs) + '\n';
    j.push_back(cvs::to_json(r));
  }
  const fs::path path = fs::path(a.out) / "sweep.csv";
  write_file(path, csv);
  print_json(j);
  const auto best = cvs::lab::best_tau_by_cvs(rows);
  std::cerr << "wrote " << path.string();
  if (best) std::cerr << "; highest plateau CVS at tau " << *best;
  std::cerr << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certainty/validity analysis of training trajectories", "cvskit"};
  app.require_subcommand(1);

  MatrixArgs matrix;
  auto* m = app.add_subcommand("matrix", "certainty/validity matrix of a log");
  m->add_option("--log", matrix.log, "JSONL prediction log")->required();
  m->add_option("--threshold", matrix.threshold, "certainty threshold")
      ->capture_default_str();
  auto* mj = m->add_flag("--json", matrix.json, "JSON output (default)");
  m->add_flag("--csv", matrix.csv, "CSV output")->excludes(mj);

  TrajectoryArgs traj;
  auto* t = app.add_subcommand("trajectory", "stability and migration report");
  t->add_option("--csv", traj.csv, "trajectory table")->required();
  t->add_option("--spike-delta", traj.spike_delta, "epoch-1 gap threshold, pp")
      ->capture_default_str();
  t->add_option("--collapse-delta", traj.collapse_delta,
                 "drop that marks a collapse, pp")
      ->capture_default_str();

  SelectArgs sel;
  auto* s = app.add_subcommand("select", "checkpoint selection");
  s->add_option("--csv", sel.csv, "trajectory table")->required();
  s->add_option("--policy", sel.policy)
      ->required()
      ->check(CLI::IsMember({"max-acc", "max-cvs", "joint"}));
  s->add_option("--weight", sel.weight, "accuracy weight for joint")
      ->capture_default_str();

  RouteArgs route;
  auto* r = app.add_subcommand("route", "automate/review routing");
  r->add_option("--log", route.log, "JSONL prediction log")->required();
  r->add_option("--threshold", route.threshold, "certainty threshold")
      ->capture_default_str();

  CeilingArgs ceil;
  auto* c = app.add_subcommand("ceiling", "ambiguity ceiling");
  auto* fit = c->add_flag("--fit", ceil.fit, "fit p_clean to a plateau");
  c->add_option("--p-clean", ceil.p_clean)->excludes(fit);
  c->add_option("--plateau", ceil.plateau)->needs(fit);
  c->add_option("--chance", ceil.chance)->required();
  c->add_option("--clean-acc", ceil.clean_acc, "accuracy on clean samples")
      ->capture_default_str();

  PhaseArgs phase;
  auto* p = app.add_subcommand("phase", "excitability phase diagram");
  p->add_option("--csv", phase.csv, "trajectory table with CVS")->required();
  p->add_option("--svg", phase.svg, "SVG output path")->required();
  p->add_option("--points", phase.points, "phase CSV output path");

  LabRunArgs lab;
  auto* lr = app.add_subcommand("lab-run", "one synthetic lab run");
  lr->add_option("--config", lab.config, "lab config JSON")->required();
  lr->add_option("--out", lab.out, "output directory")->required();

  LabSweepArgs sweep;
  auto* ls = app.add_subcommand("lab-sweep", "temperature sweep");
  ls->add_option("--config", sweep.config, "lab config JSON")->required();
  ls->add_option("--taus", sweep.taus, "comma-separated temperatures")
      ->required()
      ->delimiter(',');
  ls->add_option("--out", sweep.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (m->parsed()) return run_matrix(matrix);
    if (t->parsed()) return run_trajectory(traj);
    if (s->parsed()) return run_select(sel);
    if (r->parsed()) return run_route(route);
    if (c->parsed()) return run_ceiling(ceil);
    if (p->parsed()) return run_phase(phase);
    if (lr->parsed()) return run_lab(lab);
    if (ls->parsed()) return run_sweep(sweep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
