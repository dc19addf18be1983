// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "pitch/decision.hpp"
#include "pitch/eval.hpp"
#include "pitch/metrics.hpp"
#include "pitch/records.hpp"
#include "pitch/review.hpp"
#include "pitch/session.hpp"
#include "support.hpp"

using namespace pitch;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects failure descriptions, keeping the first few for the report.
struct Failures {
  std::size_t count = 0;
  std::string first;

  void add(const std::string& what) {
    if (count++ == 0) first = what;
  }
  Outcome outcome(const std::string& summary) const {
    if (count == 0) return {true, summary};
    return {false, summary + "; " + std::to_string(count) + " failure(s), first: " + first};
  }
};

std::string fmt_double(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome formula_exactness() {
  std::ifstream in(std::string(PITCH_TEST_DATA) + "/formula_golden.json");
  if (!in) return {false, "cannot read formula_golden.json"};
  const json golden = json::parse(in);
  const double tol = golden.at("tolerance").get<double>();
  if (tol != 1e-9) return {false, "golden file tolerance is not 1e-9"};

  const auto start = std::chrono::steady_clock::now();
  Failures f;
  std::size_t n = 0;
  for (const auto& c : golden.at("cases")) {
    ++n;
    const std::string kind = c.at("kind");
    const std::string name = c.at("name");
    const double expected = c.at("expected").get<double>();
    double got = 0.0;
    try {
      if (kind == "machine_degradation") {
        metrics::ComponentScores s;
        s.compliance = c.at("compliance").get<int>();
        s.wil = c.at("wil").get<double>();
        s.realism_pmos = c.at("pmos").get<double>();
        s.wil_applicable = c.at("wil_applicable").get<bool>();
        const auto r = metrics::machine_degradation(s);
        got = r.m;
        if (metrics::to_string(r.dominant) != c.at("dominant").get<std::string>()) {
          f.add(name + ": dominant " + std::string(metrics::to_string(r.dominant)));
        }
      } else if (kind == "human_degradation") {
        got = metrics::human_degradation({c.at("compliant").get<int>(), c.at("likert").get<int>()});
      } else if (kind == "raw_confidence") {
        decision::CalibrationConfig cfg;
        cfg.tau_base = c.at("tau").get<double>();
        got = decision::raw_confidence(c.at("m").get<double>(), cfg);
      } else if (kind == "calibrate") {
        decision::CalibrationConfig cfg;
        cfg.temperature = c.at("temperature").get<double>();
        got = decision::calibrate(c.at("c").get<double>(), cfg);
      } else {
        f.add(name + ": unknown kind " + kind);
        continue;
      }
    } catch (const std::exception& e) {
      f.add(name + ": threw " + e.what());
      continue;
    }
    if (!(std::abs(got - expected) <= tol)) {
      f.add(name + ": got " + fmt_double(got, 12) + " expected " + fmt_double(expected, 12));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (n != 20) f.add("golden file has " + std::to_string(n) + " cases, expected 20");
  if (secs >= 1.0) f.add("runtime " + fmt_double(secs, 3) + " s");
  return f.outcome(std::to_string(n) + " cases within 1e-9 in " + fmt_double(secs, 4) + " s");
}

// ---------------------------------------------------------------------------

Outcome wil_oracle_equivalence() {
  const std::array<std::string, 4> words = {"alpha", "bravo", "charlie", "delta"};
  std::vector<std::vector<int>> seqs{{}};
  for (std::size_t begin = 0, len = 1; len <= 6; ++len) {
    const std::size_t end = seqs.size();
    for (std::size_t i = begin; i < end; ++i) {
      if (seqs[i].size() != len - 1) continue;
      for (int w = 0; w < 4; ++w) {
        auto next = seqs[i];
        next.push_back(w);
        seqs.push_back(std::move(next));
      }
    }
    begin = end;
  }
  std::vector<std::vector<std::string>> texts;
  texts.reserve(seqs.size());
  for (const auto& s : seqs) {
    std::vector<std::string> t;
    for (int w : s) t.push_back(words[static_cast<std::size_t>(w)]);
    texts.push_back(std::move(t));
  }

  // The oracle only depends on the pattern of equal words, so results are
  // cached under a relabeling by first appearance.
  std::unordered_map<std::uint32_t, int> hits_cache;
  hits_cache.reserve(1 << 21);
  auto canonical = [](const std::vector<int>& a, const std::vector<int>& b) {
    int relabel[4] = {-1, -1, -1, -1};
    int next = 0;
    std::uint32_t key = static_cast<std::uint32_t>(a.size()) | static_cast<std::uint32_t>(b.size()) << 3;
    int shift = 6;
    for (const auto* s : {&a, &b}) {
      for (int w : *s) {
        if (relabel[w] < 0) relabel[w] = next++;
        key |= static_cast<std::uint32_t>(relabel[w]) << shift;
        shift += 2;
      }
    }
    return key;
  };

  const auto start = std::chrono::steady_clock::now();
  Failures f;
  std::size_t pairs = 0;
  for (std::size_t r = 0; r < seqs.size(); ++r) {
    if (seqs[r].empty()) continue;
    for (std::size_t h = 0; h < seqs.size(); ++h) {
      ++pairs;
      const double got = metrics::wil(std::span<const std::string>(texts[r]), std::span<const std::string>(texts[h]));
      double expected = 1.0;
      if (!seqs[h].empty()) {
        const auto key = canonical(seqs[r], seqs[h]);
        auto it = hits_cache.find(key);
        if (it == hits_cache.end()) {
          it = hits_cache.emplace(key, oracle::best_alignment(seqs[r], seqs[h]).second).first;
        }
        const double hits = it->second;
        expected = 1.0 - (hits * hits) / (static_cast<double>(seqs[r].size()) * static_cast<double>(seqs[h].size()));
      }
      if (got != expected) {
        std::string where = "ref len " + std::to_string(seqs[r].size()) + " #" + std::to_string(r) + ", hyp #" +
                            std::to_string(h) + ": got " + fmt_double(got, 17) + " expected " +
                            fmt_double(expected, 17);
        f.add(where);
      }
    }
  }
  bool empty_ref_rejected = false;
  try {
    metrics::wil(std::span<const std::string>(texts[0]), std::span<const std::string>(texts[1]));
  } catch (const Error& e) {
    empty_ref_rejected = e.code() == ErrorCode::InvalidReference;
  }
  if (!empty_ref_rejected) f.add("empty reference not rejected with InvalidReference");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 60.0) f.add("runtime " + fmt_double(secs, 1) + " s");
  return f.outcome(std::to_string(pairs) + " pairs exact (" + std::to_string(hits_cache.size()) +
                   " distinct oracle alignments) in " + fmt_double(secs, 1) + " s");
}

// ---------------------------------------------------------------------------

Outcome auroc_oracle_equivalence() {
  std::mt19937_64 rng(20240901);
  Failures f;
  double worst = 0.0;
  for (int set = 0; set < 1000; ++set) {
    const int n = std::uniform_int_distribution<int>(2, 50)(rng);
    const bool coarse = set % 2 == 0;  // coarse sets produce many ties
    std::vector<metrics::LabeledScore> scores;
    std::vector<double> pos, neg;
    for (int i = 0; i < n; ++i) {
      const Label label = i == 0 ? Label::Fake : i == 1 ? Label::Real
                                   : (rng() & 1 ? Label::Fake : Label::Real);
      const double s = coarse ? static_cast<double>(std::uniform_int_distribution<int>(0, 5)(rng)) / 5.0
                              : std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      scores.push_back({s, label});
      (label == Label::Fake ? pos : neg).push_back(s);
    }
    std::shuffle(scores.begin(), scores.end(), rng);
    const double got = metrics::auroc(scores);
    const double expected = oracle::auroc(pos, neg);
    worst = std::max(worst, std::abs(got - expected));
    if (!(std::abs(got - expected) <= 1e-12)) {
      f.add("set " + std::to_string(set) + ": got " + fmt_double(got, 15) + " expected " + fmt_double(expected, 15));
    }
  }
  char worst_text[32];
  std::snprintf(worst_text, sizeof worst_text, "%.1e", worst);
  return f.outcome("1000 sets within 1e-12 (max deviation " + std::string(worst_text) + ")");
}

// ---------------------------------------------------------------------------

Outcome routing_monotonicity() {
  std::mt19937_64 rng(77);
  std::vector<double> grid;
  for (int k = 1; k <= 30; ++k) grid.push_back(k / 10.0);
  Failures f;
  std::size_t checks = 0;
  for (int ds = 0; ds < 200; ++ds) {
    const int n = std::uniform_int_distribution<int>(1, 200)(rng);
    std::vector<DecisionRecord> records;
    std::vector<double> ms;
    for (int i = 0; i < n; ++i) {
      double m = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (i % 17 == 0) m = 0.25;
      if (i % 23 == 0) m = 0.0;
      ms.push_back(m);
      DecisionRecord d;
      d.sample_id = "s" + std::to_string(i);
      d.reviewer_id = "r";
      d.machine_m = m;
      d.truth_label = rng() & 1 ? Label::Fake : Label::Real;
      records.push_back(d);
    }
    decision::CalibrationConfig cfg;
    // Set inclusion of the Automated set between neighbouring temperatures.
    std::vector<bool> previous(ms.size(), false);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      cfg.temperature = grid[k];
      for (std::size_t i = 0; i < ms.size(); ++i) {
        const bool automated =
            decision::decide(ms[i], metrics::Rationale::None, cfg).routing == decision::Routing::Automated;
        ++checks;
        if (k > 0 && previous[i] && !automated) {
          f.add("dataset " + std::to_string(ds) + " m=" + fmt_double(ms[i], 6) + " leaves Automated at T=" +
                fmt_double(grid[k], 1));
        }
        previous[i] = automated;
      }
    }
    const auto points = eval::temperature_sweep(records, grid, decision::CalibrationConfig{});
    for (std::size_t k = 1; k < points.size(); ++k) {
      if (points[k].automated_fraction < points[k - 1].automated_fraction) {
        f.add("dataset " + std::to_string(ds) + " sweep fraction drops at T=" + fmt_double(points[k].temperature, 1));
      }
    }
  }
  return f.outcome("200 datasets x 30 temperatures, " + std::to_string(checks) + " routing checks, zero violations");
}

// ---------------------------------------------------------------------------

Outcome scenario_bijection_and_rates() {
  Failures f;
  std::map<std::tuple<bool, bool, bool>, review::Scenario> seen;
  for (int bits = 0; bits < 16; ++bits) {
    const Label i = bits & 1 ? Label::Fake : Label::Real;
    const Label m = bits & 2 ? Label::Fake : Label::Real;
    const Label fin = bits & 4 ? Label::Fake : Label::Real;
    const Label t = bits & 8 ? Label::Fake : Label::Real;
    const auto s = review::classify_scenario(i, m, fin, t);
    const auto triple = std::make_tuple(i == t, m == t, fin == t);
    if (std::make_tuple(s.initial_correct, s.machine_correct, s.final_correct) != triple) {
      f.add("wrong correctness triple for label combination " + std::to_string(bits));
    }
    const auto [it, inserted] = seen.emplace(triple, s.name);
    if (!inserted && it->second != s.name) f.add("triple maps to two scenarios");
  }
  std::set<review::Scenario> names;
  for (const auto& [triple, name] : seen) names.insert(name);
  if (seen.size() != 8 || names.size() != 8) f.add("not a bijection over the 8 triples");

  review::ScenarioCounts counts{};
  const std::array<std::size_t, 8> table = {5362, 781, 5, 510, 27, 216, 939, 532};
  for (std::size_t k = 0; k < 8; ++k) counts[static_cast<std::size_t>(review::kAllScenarios[k])] = table[k];
  const auto rates = review::interaction_rates(counts);
  if (!rates.machine_correction_rate || !rates.machine_misled_rate) return {false, "rates undefined"};
  const double correction = 100.0 * *rates.machine_correction_rate;
  const double misled = 100.0 * *rates.machine_misled_rate;
  if (!(std::abs(correction - 45.4) <= 0.05)) f.add("correction rate " + fmt_double(correction, 3));
  if (!(std::abs(misled - 29.8) <= 0.05)) f.add("misled rate " + fmt_double(misled, 3));
  return f.outcome("8/8 triples; correction " + fmt_double(correction, 3) + "% (45.4 +/- 0.05), misled " +
                   fmt_double(misled, 3) + "% (29.8 +/- 0.05)");
}

// ---------------------------------------------------------------------------

Outcome table_aggregate_replay() {
  Failures f;
  const auto decisions = load_decision_records(std::string(PITCH_FIXTURE_DIR) + "/decisions.jsonl");
  decision::CalibrationConfig cfg;  // T=0.7, tau=0.25, threshold 0.7
  const auto replay = eval::collaborative_replay(decisions, cfg).overall;
  auto check = [&f](const char* what, double value, double target, double tol) {
    if (!(std::abs(100.0 * value - target) <= tol)) {
      f.add(std::string(what) + " " + fmt_double(100.0 * value, 2) + " not within " + fmt_double(tol, 1) +
            "pp of " + fmt_double(target, 1));
    }
  };
  check("human-only", replay.human_only_acc, 72.6, 0.2);
  check("assisted", replay.assisted_acc, 79.4, 0.2);
  check("collaborative", replay.collaborative_acc, 84.3, 0.5);

  const auto scores = load_score_records(std::string(PITCH_FIXTURE_DIR) + "/scores.jsonl");
  const auto report = eval::evaluate_scores(scores, cfg);
  double top10 = std::nan(""), none = std::nan("");
  if (report.top10_mean_auc) top10 = *report.top10_mean_auc;
  if (const auto it = report.per_challenge.find(0); it != report.per_challenge.end() && it->second.auc) {
    none = *it->second.auc;
  }
  check("top-10 AUC", top10, 88.7, 0.5);
  check("no-challenge AUC", none, 56.0, 1.0);

  return f.outcome("human-only " + fmt_double(100 * replay.human_only_acc, 2) + "%, assisted " +
                   fmt_double(100 * replay.assisted_acc, 2) + "%, collaborative " +
                   fmt_double(100 * replay.collaborative_acc, 2) + "% (" +
                   fmt_double(100 * replay.automated_fraction, 1) + "% automated); top-10 AUC " +
                   fmt_double(100 * top10, 2) + "%, no-challenge AUC " + fmt_double(100 * none, 2) + "%");
}

// ---------------------------------------------------------------------------

using session::State;

/// The session transition relation, written out independently of the
/// library. PendingReview -> ChallengeIssued is the escalation path for a
/// session whose review has not started.
bool relation(State from, State to) {
  static const std::set<std::pair<State, State>> allowed = {
      {State::Created, State::ChallengeIssued},        {State::ChallengeIssued, State::ResponseReceived},
      {State::ResponseReceived, State::Scored},        {State::Scored, State::AutoDecided},
      {State::Scored, State::PendingReview},           {State::Scored, State::ChallengeIssued},
      {State::PendingReview, State::Finalized},        {State::AutoDecided, State::Finalized},
      {State::PendingReview, State::ChallengeIssued},
  };
  return allowed.contains({from, to});
}

/// What the test expects the manager to do, tracked alongside it.
struct Model {
  State state = State::Created;
  int issued = 0;
  bool initial = false;
  bool revealed = false;
  std::string token;
  std::vector<double> scored_m;
  bool any_response = false;
  Label predicted = Label::Real;
};

struct SampleSpec {
  const char* id;
  double m;  // negative: scoring fails
};

constexpr SampleSpec kSamples[] = {
    {"m000", 0.0}, {"m050", 0.5}, {"m033", 1.0 / 3.0}, {"m020", 0.2}, {"down", -1}, {"nosuch", -1},
};

Outcome session_state_machine() {
  const decision::CalibrationConfig cal;
  auto automated_by_hand = [&cal](double m) {
    return std::pow(std::abs(m - cal.tau_base) / cal.tau_base, 1.0 / cal.temperature) > cal.auto_threshold;
  };

  auto log = std::make_shared<testing_support::FlakyLog>();
  session::SessionConfig config;
  session::SessionManager manager(config, testing_support::suite_of(testing_support::standard_scorer()), log,
                                  testing_support::deterministic_options(99));
  std::mt19937_64 rng(4242);
  auto pick = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

  Failures f;
  std::size_t calls = 0, rejects = 0, accepts = 0, storage_faults = 0;
  std::map<State, std::size_t> final_states;

  for (int seq = 0; seq < 10000; ++seq) {
    const Platform platform = pick(2) ? Platform::Desktop : Platform::Mobile;
    const std::string id = manager.create_session(platform).session_id;
    Model model;
    const std::string tag = "sequence " + std::to_string(seq) + " (" + id + ")";
    const int steps = 1 + pick(14);

    for (int step = 0; step < steps; ++step) {
      // Half the calls follow the happy path for the current state so that
      // sequences get deep; the rest are arbitrary.
      int op = pick(6);
      if (pick(2) == 0) {
        switch (model.state) {
          case State::Created: op = 0; break;
          case State::ChallengeIssued: op = 1; break;
          case State::AutoDecided: op = 2; break;
          case State::PendingReview: op = pick(4) == 0 ? 0 : !model.initial ? 3 : !model.revealed ? 4 : 5; break;
          default: break;
        }
      }
      const bool fault = pick(20) == 0;
      if (fault) log->failures = 1;
      const auto before = manager.get(id);
      const std::size_t events_before = manager.audit_trail(id).size();
      ++calls;

      bool expect_ok = false;
      bool commits = true;
      std::optional<ErrorCode> expect_code;
      Model next = model;
      std::function<void()> call;

      switch (op) {
        case 0: {  // request a challenge
          const auto policy = pick(2) ? catalog::IssuePolicy::usability_ordered()
                                      : catalog::IssuePolicy::random_qualified();
          const bool escalation = model.state == State::PendingReview && !model.initial;
          expect_ok = (model.state == State::Created || escalation) && model.issued < config.escalation_k;
          if (escalation && model.issued >= config.escalation_k) expect_code = ErrorCode::ExhaustedChallenges;
          next.state = State::ChallengeIssued;
          ++next.issued;
          call = [&, policy] { manager.request_challenge(id, policy); };
          break;
        }
        case 1: {  // submit a response
          const SampleSpec sample = kSamples[pick(6)];
          expect_ok = model.state == State::ChallengeIssued;
          next.any_response = true;
          if (sample.m < 0) {
            next.state = State::PendingReview;
          } else {
            next.scored_m.push_back(sample.m);
            const double agg = *std::max_element(next.scored_m.begin(), next.scored_m.end());
            next.predicted = agg > cal.tau_base ? Label::Fake : Label::Real;
            next.state = automated_by_hand(agg) ? State::AutoDecided : State::PendingReview;
          }
          call = [&, sample] {
            const auto verdict = manager.submit_response(id, {sample.id, std::nullopt, 0, ""});
            const bool automated = verdict.routing == decision::Routing::Automated;
            if (automated != (next.state == State::AutoDecided)) f.add(tag + ": unexpected routing");
            if (automated && verdict.predicted != next.predicted) f.add(tag + ": unexpected label");
          };
          break;
        }
        case 2: {  // finalize an automated decision
          expect_ok = model.state == State::AutoDecided;
          next.state = State::Finalized;
          call = [&] { manager.finalize_auto(id); };
          break;
        }
        case 3: {  // stage one of a review
          const bool valid = pick(5) != 0;
          const int confidence = valid ? pick(101) : (pick(2) ? 101 : -1);
          expect_ok = model.state == State::PendingReview && !model.initial && valid;
          next.initial = true;
          call = [&, confidence] {
            const auto receipt = manager.record_initial_decision(id, "rev", pick(2) ? Label::Fake : Label::Real,
                                                                 confidence);
            next.token = receipt.token;
          };
          break;
        }
        case 4: {  // read the verdict
          const int which = pick(3);  // none, wrong, right
          std::optional<std::string> token;
          if (which == 1) token = "0123456789abcdef";
          if (which == 2) token = model.token;
          if (model.state == State::PendingReview) {
            expect_ok = model.initial && which == 2;
            commits = !model.revealed;
            next.revealed = true;
          } else {
            expect_ok = model.any_response;
            commits = false;
          }
          if (model.state == State::PendingReview && !expect_ok) expect_code = ErrorCode::VerdictSealed;
          call = [&, token] { manager.get_verdict(id, token); };
          break;
        }
        case 5: {  // stage three of a review
          const bool right = pick(4) != 0;
          const bool valid = pick(6) != 0;
          const Label final_label = pick(2) ? Label::Fake : Label::Real;
          expect_ok = model.state == State::PendingReview && model.initial && model.revealed && right && valid;
          next.state = State::Finalized;
          next.predicted = final_label;
          call = [&, right, valid, final_label] {
            manager.submit_review(id, right ? model.token : std::string("nope"), final_label, valid ? 70 : 200,
                                  pick(2) == 1);
          };
          break;
        }
      }
      if (fault && expect_ok && commits) {
        expect_ok = false;
        expect_code = ErrorCode::StorageError;
        ++storage_faults;
      }

      std::optional<ErrorCode> thrown;
      try {
        call();
      } catch (const Error& e) {
        thrown = e.code();
      }
      log->failures = 0;

      if (expect_ok) {
        if (thrown) {
          f.add(tag + " step " + std::to_string(step) + ": op " + std::to_string(op) + " failed with " +
                std::string(to_string(*thrown)));
          break;
        }
        model = next;
        if (manager.get(id).state != model.state) {
          f.add(tag + ": state " + std::string(session::to_string(manager.get(id).state)) + ", model " +
                std::string(session::to_string(model.state)));
          break;
        }
      } else {
        if (!thrown) {
          f.add(tag + " step " + std::to_string(step) + ": op " + std::to_string(op) + " succeeded unexpectedly");
          break;
        }
        if (expect_code && *thrown != *expect_code) {
          f.add(tag + ": expected " + std::string(to_string(*expect_code)) + ", got " +
                std::string(to_string(*thrown)));
        }
        if (!(manager.get(id) == before) || manager.audit_trail(id).size() != events_before) {
          f.add(tag + ": failed call changed the session");
          break;
        }
      }
    }

    // Whole-trail checks.
    const auto record = manager.get(id);
    const auto events = manager.audit_trail(id);
    std::optional<State> state;
    bool passed_scored = false;
    int notifications = 0;
    for (std::size_t k = 0; k < events.size(); ++k) {
      const auto& e = events[k];
      if (e.session_seq != k) f.add(tag + ": session_seq gap");
      if (e.type == session::EventType::CustomerNotified) ++notifications;
      const auto to = session::target_state(e.type);
      if (!to) continue;
      if (!state) {
        if (e.type != session::EventType::SessionCreated) f.add(tag + ": trail does not start with SessionCreated");
      } else if (!relation(*state, *to)) {
        f.add(tag + ": transition " + std::string(session::to_string(*state)) + " -> " +
              std::string(session::to_string(*to)));
      }
      if (*to == State::Scored) passed_scored = true;
      if (*to == State::Finalized && !passed_scored) f.add(tag + ": finalized without being scored");
      state = to;
    }
    if (state != record.state) f.add(tag + ": trail ends in a different state");
    if (record.final_decision == session::FinalDecision::Reject) {
      ++rejects;
      if (notifications != 1) f.add(tag + ": Reject with " + std::to_string(notifications) + " notifications");
    } else if (record.final_decision == session::FinalDecision::Accept) {
      ++accepts;
    }
    if (record.state == State::Finalized && !record.final_decision) f.add(tag + ": finalized without a decision");
    ++final_states[record.state];

    if (!(session::replay(events) == record)) f.add(tag + ": replay differs from live state");
    std::vector<session::AuditEvent> reparsed;
    for (const auto& e : events) {
      reparsed.push_back(session::event_from_json(json::parse(session::event_to_json(e).dump())));
    }
    if (!(session::replay(reparsed) == record)) f.add(tag + ": replay of serialized trail differs");
  }

  // The shared log holds every session's events in commit order.
  const auto all = log->read_all();
  for (std::size_t k = 1; k < all.size(); ++k) {
    if (all[k].seq <= all[k - 1].seq) {
      f.add("global seq not increasing at " + std::to_string(k));
      break;
    }
  }
  std::map<std::string, std::vector<session::AuditEvent>> by_session;
  for (const auto& e : all) by_session[e.session_id].push_back(e);
  std::size_t replayed = 0;
  for (const auto& [sid, events] : by_session) {
    if (!(session::replay(events) == manager.get(sid))) f.add(sid + ": replay from the shared log differs");
    ++replayed;
  }
  if (replayed != 10000) f.add("log holds " + std::to_string(replayed) + " sessions");

  return f.outcome("10000 sequences, " + std::to_string(calls) + " calls (" + std::to_string(storage_faults) +
                   " storage faults), " + std::to_string(rejects) + " rejects, " + std::to_string(accepts) +
                   " accepts, " + std::to_string(final_states[State::PendingReview]) +
                   " left pending; transitions, notifications and replay all hold");
}

// ---------------------------------------------------------------------------

Outcome balanced_subset_determinism() {
  const auto records = load_score_records(std::string(PITCH_FIXTURE_DIR) + "/scores.jsonl");
  eval::SubsetConfig cfg;
  cfg.seed = 2024;
  Failures f;

  const auto a = eval::build_balanced_subset(records, cfg);
  const auto b = eval::build_balanced_subset(records, cfg);
  if (a != b) f.add("same seed gave different subsets");
  auto shuffled = records;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(3));
  if (eval::build_balanced_subset(shuffled, cfg) != a) f.add("input order changed the subset");
  cfg.seed = 2025;
  if (eval::build_balanced_subset(records, cfg) == a) f.add("a different seed gave the same subset");
  cfg.seed = 2024;

  // Naive re-filter: interval form of the pMOS band, checked per record.
  auto naive = [](const ScoreRecord& r) {
    return r.speaker_match >= 0.50 && r.pmos >= 4.25 && r.pmos <= 4.75;
  };
  std::map<int, std::size_t> eligible, chosen;
  std::map<std::string, const ScoreRecord*> by_id;
  for (const auto& r : records) {
    by_id[r.sample_id] = &r;
    if (naive(r) != eval::subset_eligible(r, cfg)) f.add("filter disagrees on " + r.sample_id);
    if (naive(r)) ++eligible[r.challenge_id];
    eligible.try_emplace(r.challenge_id, 0);
  }
  std::set<std::string> seen;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& r = a[k];
    const auto it = by_id.find(r.sample_id);
    if (it == by_id.end() || !(*it->second == r)) f.add(r.sample_id + " is not an input record");
    if (!naive(r)) f.add(r.sample_id + " fails the naive filter");
    if (!seen.insert(r.sample_id).second) f.add(r.sample_id + " chosen twice");
    if (k > 0 && std::make_pair(a[k - 1].challenge_id, a[k - 1].sample_id) >= std::make_pair(r.challenge_id, r.sample_id)) {
      f.add("output not ordered at " + r.sample_id);
    }
    ++chosen[r.challenge_id];
  }
  std::size_t min_pool = SIZE_MAX;
  for (const auto& [cid, n] : eligible) {
    min_pool = std::min(min_pool, n);
    if (chosen[cid] != cfg.per_challenge) {
      f.add("challenge " + std::to_string(cid) + " got " + std::to_string(chosen[cid]) + " records");
    }
  }
  return f.outcome(std::to_string(a.size()) + " records over " + std::to_string(eligible.size()) +
                   " challenges, " + std::to_string(records.size()) + " records re-filtered (smallest pool " +
                   std::to_string(min_pool) + ")");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"formula-exactness", formula_exactness},
      {"wil-oracle-equivalence", wil_oracle_equivalence},
      {"auroc-oracle-equivalence", auroc_oracle_equivalence},
      {"routing-monotonicity", routing_monotonicity},
      {"scenario-bijection-and-rates", scenario_bijection_and_rates},
      {"table-aggregate-replay", table_aggregate_replay},
      {"session-state-machine", session_state_machine},
      {"balanced-subset-determinism", balanced_subset_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.2f s]\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str(), secs);
    std::fflush(stdout);
    failed += outcome.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
