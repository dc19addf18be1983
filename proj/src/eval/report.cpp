#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "pitch/catalog.hpp"
#include "pitch/eval.hpp"

namespace pitch::eval {

namespace {

using nlohmann::json;

std::string challenge_name(int id) {
  if (id < 0 || id >= catalog::kChallengeCount) return "#" + std::to_string(id);
  return catalog::Catalog::embedded().challenge(id).name;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

std::string pct(const std::optional<double>& v) { return v ? pct(*v) : std::string("n/a"); }

std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

json stats_json(const ChallengeStats& s) {
  json j;
  j["auc"] = s.auc ? json(*s.auc) : json(nullptr);
  j["accuracy"] = s.accuracy;
  j["mean_m_fake"] = s.mean_m_fake;
  j["mean_m_real"] = s.mean_m_real;
  j["n_fake"] = s.n_fake;
  j["n_real"] = s.n_real;
  return j;
}

json replay_json(const ReplayStats& s) {
  return {{"human_only_acc", s.human_only_acc},
          {"assisted_acc", s.assisted_acc},
          {"collaborative_acc", s.collaborative_acc},
          {"machine_acc", s.machine_acc},
          {"automated_fraction", s.automated_fraction},
          {"n", s.n}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string format_score_table(const EvalReport& report) {
  std::ostringstream out;
  out << pad("No.", 4) << "  " << pad("Challenge", 16, true) << pad("M(F)", 7) << pad("M(O)", 7)
      << pad("AUC", 7) << pad("Acc", 7) << pad("nF", 7) << pad("nO", 7) << '\n';
  for (const auto& [id, s] : report.per_challenge) {
    out << pad("#" + std::to_string(id), 4) << "  " << pad(challenge_name(id), 16, true)
        << pad(pct(s.mean_m_fake), 7) << pad(pct(s.mean_m_real), 7) << pad(pct(s.auc), 7)
        << pad(pct(s.accuracy), 7) << pad(std::to_string(s.n_fake), 7)
        << pad(std::to_string(s.n_real), 7) << '\n';
  }
  out << pad("", 4) << "  " << pad("Average", 16, true) << pad("", 14) << pad(pct(report.all_mean_auc), 7)
      << pad(pct(report.all_mean_accuracy), 7) << '\n';
  out << pad("", 4) << "  " << pad("Average (top-10)", 16, true) << pad("", 14)
      << pad(pct(report.top10_mean_auc), 7) << pad(pct(report.top10_mean_accuracy), 7) << '\n';
  out << pad("", 4) << "  " << pad("Pooled", 16, true) << pad(pct(report.overall.mean_m_fake), 7)
      << pad(pct(report.overall.mean_m_real), 7) << pad(pct(report.overall.auc), 7)
      << pad(pct(report.overall.accuracy), 7) << pad(std::to_string(report.overall.n_fake), 7)
      << pad(std::to_string(report.overall.n_real), 7) << '\n';
  for (const auto& note : report.notes) out << "note: " << note << '\n';
  return out.str();
}

std::string format_replay_table(const ReplayResult& result) {
  std::ostringstream out;
  auto boost = [](double base, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.1f%%", base > 0.0 ? 100.0 * (v - base) / base : 0.0);
    return std::string(buf);
  };
  auto row = [&](const std::string& name, const ReplayStats& s) {
    out << pad(name, 16, true) << pad(pct(s.human_only_acc), 9) << pad(pct(s.assisted_acc), 9)
        << pad(boost(s.human_only_acc, s.assisted_acc), 9) << pad(pct(s.collaborative_acc), 9)
        << pad(boost(s.human_only_acc, s.collaborative_acc), 9) << pad(pct(s.automated_fraction), 8)
        << pad(std::to_string(s.n), 7) << '\n';
  };
  out << pad("Challenge", 16, true) << pad("Vanilla", 9) << pad("Assisted", 9) << pad("", 9)
      << pad("Collab.", 9) << pad("", 9) << pad("Auto", 8) << pad("n", 7) << '\n';
  for (const auto& [id, s] : result.per_challenge) row(challenge_name(id), s);
  row("Overall", result.overall);
  return out.str();
}

std::string report_to_json(const EvalReport& report) {
  json j;
  json per = json::object();
  for (const auto& [id, s] : report.per_challenge) {
    auto entry = stats_json(s);
    entry["name"] = challenge_name(id);
    per[std::to_string(id)] = entry;
  }
  j["per_challenge"] = per;
  j["overall"] = stats_json(report.overall);
  j["top10_mean_auc"] = optional_json(report.top10_mean_auc);
  j["all_mean_auc"] = optional_json(report.all_mean_auc);
  j["top10_mean_accuracy"] = optional_json(report.top10_mean_accuracy);
  j["all_mean_accuracy"] = optional_json(report.all_mean_accuracy);
  j["config"] = {{"tau_base", report.config.tau_base},
                 {"temperature", report.config.temperature},
                 {"auto_threshold", report.config.auto_threshold}};
  j["notes"] = report.notes;
  return j.dump(2);
}

std::string replay_to_json(const ReplayResult& result) {
  json j;
  j["overall"] = replay_json(result.overall);
  json per = json::object();
  for (const auto& [id, s] : result.per_challenge) per[std::to_string(id)] = replay_json(s);
  j["per_challenge"] = per;
  return j.dump(2);
}

std::string sweep_to_csv(std::span<const TradeoffPoint> points) {
  std::ostringstream out;
  out << "temperature,automated_fraction,accuracy\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6f,%.6f\n", p.temperature, p.automated_fraction, p.accuracy);
    out << buf;
  }
  return out.str();
}

std::string sweep_to_svg(std::span<const TradeoffPoint> points) {
  constexpr double kW = 640, kH = 400, kL = 60, kR = 20, kT = 30, kB = 50;
  double t_min = points.empty() ? 0.0 : points.front().temperature;
  double t_max = points.empty() ? 1.0 : points.back().temperature;
  if (t_max <= t_min) t_max = t_min + 1.0;
  auto x = [&](double t) { return kL + (t - t_min) / (t_max - t_min) * (kW - kL - kR); };
  auto y = [&](double v) { return kT + (1.0 - v) * (kH - kT - kB); };

  std::ostringstream out;
  char buf[160];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                kL, kH - kB, kW - kR, kH - kB);
  out << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                kL, kT, kL, kH - kB);
  out << buf;
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = tick / 4.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%d%%</text>\n", kL - 6,
                  y(v) + 4, tick * 25);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">temperature</text>\n",
                (kL + kW - kR) / 2, kH - 12);
  out << buf;

  auto polyline = [&](auto value, const char* colour, const char* label, double label_y) {
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : points) {
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", x(p.temperature), y(value(p)));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s</text>\n", kW - kR - 200,
                  label_y, colour, label);
    out << buf;
  };
  polyline([](const TradeoffPoint& p) { return p.accuracy; }, "#1f77b4", "accuracy", kT + 14);
  polyline([](const TradeoffPoint& p) { return 1.0 - p.automated_fraction; }, "#ff7f0e",
           "human decision retention", kT + 30);
  const std::size_t stride = points.size() / 10 + 1;
  for (std::size_t i = 0; i < points.size(); i += stride) {
    const auto& p = points[i];
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.2g</text>\n",
                  x(p.temperature), kH - kB + 16, p.temperature);
    out << buf;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace pitch::eval
