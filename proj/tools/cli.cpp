#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pitch/catalog.hpp"
#include "pitch/codec.hpp"
#include "pitch/eval.hpp"
#include "pitch/metrics.hpp"
#include "pitch/records.hpp"
#include "pitch/service.hpp"

namespace pitch::cli {

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad temperature '" + item + "' in --t-grid");
    }
    grid.push_back(value);
  }
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "--t-grid is empty");
  return grid;
}

std::set<int> parse_challenge_filter(const std::string& text) {
  std::set<int> ids;
  if (text == "qualified") {
    const auto q = catalog::Catalog::embedded().qualified_ids();
    return {q.begin(), q.end()};
  }
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const int id = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      ids.insert(id);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad challenge id '" + item + "' in --challenges");
    }
  }
  return ids;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorCode::StorageError, "cannot write " + path);
}

struct Calibration {
  decision::CalibrationConfig cfg;

  void add_to(CLI::App* app) {
    app->add_option("--tau", cfg.tau_base, "Decision threshold on m")->capture_default_str();
    app->add_option("--temperature", cfg.temperature, "Calibration temperature T")->capture_default_str();
    app->add_option("--auto-threshold", cfg.auto_threshold, "Calibrated confidence needed to automate")
        ->capture_default_str();
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Challenge-response deepfake call screening: evaluation tools and verification service", "pitch"};
  app.require_subcommand(1);

  auto* eval = app.add_subcommand("eval", "Batch evaluation on score and decision datasets");
  eval->require_subcommand(1);

  // eval scores
  std::string scores_file, scores_json;
  Calibration scores_cal;
  auto* scores = eval->add_subcommand("scores", "Per-challenge AUROC and accuracy table");
  scores->add_option("file", scores_file, "Score records (JSONL)")->required();
  scores_cal.add_to(scores);
  scores->add_option("--json", scores_json, "Also write the report as JSON to this path");

  // eval subset
  std::string subset_file, subset_out, subset_challenges;
  eval::SubsetConfig subset_cfg;
  auto* subset = eval->add_subcommand("subset", "Hard-balanced subset by speaker match and pMOS");
  subset->add_option("file", subset_file, "Score records (JSONL)")->required();
  subset->add_option("--match-threshold", subset_cfg.match_threshold)->capture_default_str();
  subset->add_option("--pmos-center", subset_cfg.pmos_center)->capture_default_str();
  subset->add_option("--pmos-halfwidth", subset_cfg.pmos_halfwidth)->capture_default_str();
  subset->add_option("--per-challenge", subset_cfg.per_challenge)->capture_default_str();
  subset->add_option("--seed", subset_cfg.seed)->capture_default_str();
  subset->add_option("--challenges", subset_challenges,
                     "Restrict to these ids (comma list, or 'qualified') before sampling");
  subset->add_option("--out", subset_out, "Write the subset here instead of stdout");

  // eval replay
  std::string replay_file, replay_json;
  Calibration replay_cal;
  auto* replay = eval->add_subcommand("replay", "Human-only, assisted and collaborative accuracy");
  replay->add_option("file", replay_file, "Decision records (JSONL)")->required();
  replay_cal.add_to(replay);
  replay->add_option("--json", replay_json, "Also write the result as JSON to this path");

  // eval sweep
  std::string sweep_file, sweep_grid, sweep_csv, sweep_svg;
  Calibration sweep_cal;
  auto* sweep = eval->add_subcommand("sweep", "Accuracy against automation over a temperature grid");
  sweep->add_option("file", sweep_file, "Decision records (JSONL)")->required();
  sweep->add_option("--t-grid", sweep_grid, "Comma-separated temperatures")->required();
  sweep_cal.add_to(sweep);
  sweep->add_option("--csv", sweep_csv, "Write the points as CSV");
  sweep->add_option("--svg", sweep_svg, "Write a line chart as SVG");

  // wil
  std::string wil_ref, wil_hyp;
  auto* wil = app.add_subcommand("wil", "Word information lost between two texts");
  wil->add_option("reference", wil_ref)->required();
  wil->add_option("hypothesis", wil_hyp)->required();

  // serve
  std::string config_path;
  auto* serve = app.add_subcommand("serve", "Run the session service over HTTP");
  serve->add_option("--config", config_path, "Service config (JSON)")->required();

  // catalog
  auto* catalog_cmd = app.add_subcommand("catalog", "Print the embedded challenge catalog");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    for (auto& c : message) {
      if (c == '\n') c = ' ';
    }
    err << "error: code=InvalidArgument message=" << message << '\n';
    return 2;
  }

  try {
    if (scores->parsed()) {
      const auto records = load_score_records(scores_file);
      const auto report = eval::evaluate_scores(records, scores_cal.cfg);
      out << eval::format_score_table(report);
      if (!scores_json.empty()) write_file(scores_json, eval::report_to_json(report));
    } else if (subset->parsed()) {
      auto records = load_score_records(subset_file);
      if (!subset_challenges.empty()) {
        const auto keep = parse_challenge_filter(subset_challenges);
        std::erase_if(records, [&](const ScoreRecord& r) { return !keep.contains(r.challenge_id); });
      }
      const auto chosen = eval::build_balanced_subset(records, subset_cfg);
      if (subset_out.empty()) {
        write_score_records(out, chosen);
      } else {
        std::ofstream file(subset_out, std::ios::binary);
        write_score_records(file, chosen);
        if (!file) throw Error(ErrorCode::StorageError, "cannot write " + subset_out);
        out << "wrote " << chosen.size() << " records to " << subset_out << '\n';
      }
    } else if (replay->parsed()) {
      const auto records = load_decision_records(replay_file);
      const auto result = eval::collaborative_replay(records, replay_cal.cfg);
      out << eval::format_replay_table(result);
      if (!replay_json.empty()) write_file(replay_json, eval::replay_to_json(result));
    } else if (sweep->parsed()) {
      const auto records = load_decision_records(sweep_file);
      const auto grid = parse_grid(sweep_grid);
      const auto points = eval::temperature_sweep(records, grid, sweep_cal.cfg);
      const std::string csv = eval::sweep_to_csv(points);
      out << csv;
      if (!sweep_csv.empty()) write_file(sweep_csv, csv);
      if (!sweep_svg.empty()) write_file(sweep_svg, eval::sweep_to_svg(points));
    } else if (wil->parsed()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", metrics::wil(wil_ref, wil_hyp));
      out << buf << '\n';
    } else if (serve->parsed()) {
      auto config = service::load_config(config_path);
      service::apply_env_overrides(config);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      return service::serve(config, &g_stop);
    } else if (catalog_cmd->parsed()) {
      for (const auto& c : catalog::Catalog::embedded().challenges()) {
        out << codec::encode(c).dump() << '\n';
      }
    }
  } catch (const Error& e) {
    err << "error: code=" << to_string(e.code()) << " message=" << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: code=InvalidArgument message=" << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pitch::cli
