#pragma once

// Scripted scorers and audit logs shared by the session, service and
// acceptance tests.

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "pitch/scoring.hpp"
#include "pitch/session.hpp"

namespace testing_support {

using namespace pitch;

/// Per-sample scorer outputs. The transcript echoes the reference text, so
/// WIL is 0 and m = ((1 - compliance) + (1 - pmos / 5)) / 3.
struct Scripted {
  double compliance = 1.0;
  double pmos = 5.0;
  bool fail = false;
};

class ScriptedScorer final : public scoring::ComplianceScorer,
                             public scoring::RealismScorer,
                             public scoring::Transcriber,
                             public scoring::SpeakerMatcher {
 public:
  void set(const std::string& id, Scripted s) {
    std::lock_guard lock(mutex_);
    samples_[id] = s;
  }

  double score_compliance(const scoring::SampleRef& sample) override { return lookup(sample).compliance; }
  double score_realism(const scoring::SampleRef& sample) override { return lookup(sample).pmos; }
  std::string transcribe(const scoring::SampleRef& sample) override {
    lookup(sample);
    return sample.reference_text;
  }
  double match_speaker(const scoring::SampleRef& sample, const scoring::SampleRef&) override {
    lookup(sample);
    return 1.0;
  }

 private:
  Scripted lookup(const scoring::SampleRef& sample) {
    std::lock_guard lock(mutex_);
    const auto it = samples_.find(sample.sample_id);
    if (it == samples_.end()) throw Error(ErrorCode::SampleNotFound, "unknown sample " + sample.sample_id);
    if (it->second.fail) throw Error(ErrorCode::AdapterUnavailable, "scripted outage");
    return it->second;
  }

  std::mutex mutex_;
  std::map<std::string, Scripted> samples_;
};

inline scoring::ScorerSuite suite_of(const std::shared_ptr<ScriptedScorer>& s) { return {s, s, s, s}; }

/// Samples every test can rely on.
inline std::shared_ptr<ScriptedScorer> standard_scorer() {
  auto s = std::make_shared<ScriptedScorer>();
  s->set("m000", {1.0, 5.0});   // m = 0: confident Real
  s->set("m050", {0.0, 2.5});   // m = 0.5: confident Fake
  s->set("m033", {0.0, 5.0});   // m = 1/3: Fake, sent to review
  s->set("m020", {1.0, 2.0});   // m = 0.2: Real, sent to review
  s->set("down", {1.0, 5.0, true});
  return s;
}

/// Memory log that can be told to reject the next appends.
class FlakyLog final : public session::AuditLog {
 public:
  void append(std::span<const session::AuditEvent> batch) override {
    if (failures > 0) {
      --failures;
      throw Error(ErrorCode::StorageError, "disk full");
    }
    inner_.append(batch);
  }
  std::vector<session::AuditEvent> read_all() const override { return inner_.read_all(); }

  std::atomic<int> failures{0};

 private:
  session::MemoryAuditLog inner_;
};

inline session::ManagerOptions deterministic_options(std::uint64_t seed = 1) {
  session::ManagerOptions o;
  auto tick = std::make_shared<std::atomic<Timestamp>>(1'000'000);
  o.clock = [tick] { return tick->fetch_add(10); };
  o.seed = seed;
  o.seed_from_entropy = false;
  return o;
}

}  // namespace testing_support
