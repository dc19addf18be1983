#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "pitch/catalog.hpp"
#include "pitch/decision.hpp"
#include "pitch/rng.hpp"
#include "pitch/scoring.hpp"

namespace pitch::session {

enum class State {
  Created,
  ChallengeIssued,
  ResponseReceived,
  Scored,
  AutoDecided,
  PendingReview,
  Finalized,
};

enum class FinalDecision { Accept, Reject };

std::string_view to_string(State state);
std::string_view to_string(FinalDecision decision);
State parse_state(std::string_view text);
FinalDecision parse_final(std::string_view text);

/// The transition relation every session obeys.
bool transition_allowed(State from, State to);

struct ResponseEntry {
  catalog::ChallengeRequest request;
  scoring::SampleRef sample;
  std::optional<metrics::DegradationResult> degradation;
  /// Verdict on the aggregate over all successfully scored responses so far.
  decision::Verdict verdict;
  bool scoring_failed = false;
  std::string failure;

  bool operator==(const ResponseEntry&) const = default;
};

/// Stage-one review data captured before the machine verdict is revealed.
struct PendingReview {
  std::string token;
  std::string reviewer_id;
  Label initial_decision = Label::Real;
  int initial_confidence = 50;
  Timestamp initial_at = 0;
  std::optional<Timestamp> revealed_at;

  bool operator==(const PendingReview&) const = default;
};

struct ReviewOutcome {
  std::string reviewer_id;
  Label initial_decision = Label::Real;
  int initial_confidence = 50;
  Timestamp initial_at = 0;
  decision::Verdict machine_shown;
  Timestamp revealed_at = 0;
  Label final_decision = Label::Real;
  int final_confidence = 50;
  bool rationale_shown = true;

  bool operator==(const ReviewOutcome&) const = default;
};

struct SessionRecord {
  std::string session_id;
  State state = State::Created;
  Platform platform = Platform::Desktop;
  std::uint64_t seed = 0;
  std::vector<catalog::ChallengeRequest> issued;
  std::vector<ResponseEntry> responses;
  std::optional<PendingReview> pending_review;
  std::optional<ReviewOutcome> review;
  std::optional<FinalDecision> final_decision;
  /// Set when any response could not be scored.
  bool flagged = false;
  Timestamp created_at = 0;
  Timestamp updated_at = 0;
  /// When the session last entered PendingReview; orders the review queue.
  std::optional<Timestamp> queued_at;

  const decision::Verdict* latest_verdict() const {
    return responses.empty() ? nullptr : &responses.back().verdict;
  }

  bool operator==(const SessionRecord&) const = default;
};

enum class EventType {
  SessionCreated,
  ChallengeIssued,
  ResponseReceived,
  Scored,
  AutoDecided,
  RoutedToReview,
  InitialDecisionRecorded,
  VerdictRevealed,
  Finalized,
  CustomerNotified,
};

std::string_view to_string(EventType type);
EventType parse_event_type(std::string_view text);

/// The state an event moves its session into, or empty for bookkeeping
/// events that leave the state unchanged.
std::optional<State> target_state(EventType type);

struct AuditEvent {
  std::uint64_t seq = 0;
  std::string session_id;
  std::uint64_t session_seq = 0;
  EventType type = EventType::SessionCreated;
  Timestamp at = 0;
  nlohmann::json payload;

  bool operator==(const AuditEvent&) const = default;
};

nlohmann::json event_to_json(const AuditEvent& event);
AuditEvent event_from_json(const nlohmann::json& j);

/// Applies one event. This is the only code path that mutates a
/// SessionRecord, for live operation and for replay alike.
void apply(SessionRecord& record, const AuditEvent& event);

/// Rebuilds a session from its own events, in session_seq order.
SessionRecord replay(std::span<const AuditEvent> events);

nlohmann::json to_json(const SessionRecord& record);

/// Append-only event store. A batch is appended atomically or not at all.
class AuditLog {
 public:
  virtual ~AuditLog() = default;
  virtual void append(std::span<const AuditEvent> batch) = 0;
  virtual std::vector<AuditEvent> read_all() const = 0;
};

class MemoryAuditLog final : public AuditLog {
 public:
  void append(std::span<const AuditEvent> batch) override;
  std::vector<AuditEvent> read_all() const override;

 private:
  mutable std::mutex mutex_;
  std::vector<AuditEvent> events_;
};

/// One JSON object per line, flushed per batch.
class FileAuditLog final : public AuditLog {
 public:
  explicit FileAuditLog(std::filesystem::path path);
  void append(std::span<const AuditEvent> batch) override;
  std::vector<AuditEvent> read_all() const override;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
};

enum class Aggregation { Max, Mean };

struct SessionConfig {
  decision::CalibrationConfig calibration;
  /// Maximum challenges per session, counting the first.
  int escalation_k = 3;
  Aggregation aggregation = Aggregation::Max;

  void validate() const;
};

struct InitialDecisionReceipt {
  std::string token;
  Timestamp initial_at = 0;
};

struct ManagerOptions {
  /// Defaults to the system clock. Timestamps handed out are made strictly
  /// increasing regardless of the source.
  std::function<Timestamp()> clock;
  /// Defaults to random hex ids; a colliding id is regenerated.
  std::function<std::string()> id_generator;
  /// Seeds session nonces and review tokens when seed_from_entropy is off.
  std::uint64_t seed = 0;
  bool seed_from_entropy = true;
};

/// Runs the call-verification workflow for many concurrent sessions.
/// Operations on one session are serialized; different sessions proceed
/// independently. Every state change is appended to the audit log before it
/// takes effect in memory, so a storage failure leaves the session unchanged
/// and the call can be retried.
class SessionManager {
 public:
  using Clock = std::function<Timestamp()>;
  using IdGenerator = std::function<std::string()>;
  using Options = ManagerOptions;

  SessionManager(SessionConfig config, scoring::ScorerSuite suite, std::shared_ptr<AuditLog> log,
                 Options options = {});

  SessionRecord create_session(Platform platform);
  catalog::ChallengeRequest request_challenge(const std::string& session_id, catalog::IssuePolicy policy);
  decision::Verdict submit_response(const std::string& session_id, scoring::SampleRef sample);

  /// Stage one of a human review; returns the token that unlocks the verdict.
  InitialDecisionReceipt record_initial_decision(const std::string& session_id,
                                                 const std::string& reviewer_id, Label decision,
                                                 int confidence);

  /// The current machine verdict. Sessions awaiting review require the
  /// token from record_initial_decision; otherwise VerdictSealed.
  decision::Verdict get_verdict(const std::string& session_id,
                                const std::optional<std::string>& token = std::nullopt);

  SessionRecord submit_review(const std::string& session_id, const ReviewOutcome& outcome);

  /// Stage three via the token flow: the outcome is assembled from the
  /// recorded initial decision and reveal time.
  SessionRecord submit_review(const std::string& session_id, const std::string& token,
                              Label final_decision, int final_confidence, bool rationale_shown);

  SessionRecord finalize_auto(const std::string& session_id);

  SessionRecord get(const std::string& session_id) const;
  std::vector<SessionRecord> list_pending_reviews() const;
  std::vector<AuditEvent> audit_trail(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;

  const SessionConfig& config() const { return config_; }

 private:
  struct Entry {
    std::mutex mutex;
    SessionRecord record;
    std::vector<AuditEvent> events;
  };

  std::shared_ptr<Entry> find(const std::string& session_id) const;
  Timestamp now();
  AuditEvent make_event(const Entry& entry, std::uint64_t offset, EventType type, nlohmann::json payload,
                        Timestamp at) const;
  /// Persists then applies a batch of events to one session.
  void commit(Entry& entry, std::vector<AuditEvent> batch);
  std::vector<AuditEvent> route_to_review_events(const Entry& entry, std::uint64_t offset, Timestamp at) const;
  std::vector<AuditEvent> finalize_events(const Entry& entry, FinalDecision final_decision,
                                          const std::optional<ReviewOutcome>& review, Timestamp at) const;

  SessionConfig config_;
  scoring::ScorerSuite suite_;
  std::shared_ptr<AuditLog> log_;
  Clock clock_;
  IdGenerator id_generator_;

  mutable std::shared_mutex sessions_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;

  std::mutex clock_mutex_;
  Timestamp last_timestamp_ = 0;

  std::mutex seq_mutex_;
  std::uint64_t next_seq_ = 1;

  std::mutex rng_mutex_;
  SeededRng rng_{0};
};

}  // namespace pitch::session
