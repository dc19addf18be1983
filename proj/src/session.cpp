#include "pitch/session.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "pitch/codec.hpp"

namespace pitch::session {

using nlohmann::json;

namespace {

[[noreturn]] void bad_transition(State from, std::string_view op) {
  throw Error(ErrorCode::InvalidTransition,
              std::string(op) + " is not allowed in state " + std::string(to_string(from)));
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

json encode_pending(const PendingReview& p) {
  return {{"token", p.token},
          {"reviewer_id", p.reviewer_id},
          {"initial_decision", to_string(p.initial_decision)},
          {"initial_confidence", p.initial_confidence},
          {"initial_at", p.initial_at},
          {"revealed_at", p.revealed_at ? json(*p.revealed_at) : json(nullptr)}};
}

json encode_review(const ReviewOutcome& r) {
  return {{"reviewer_id", r.reviewer_id},
          {"initial_decision", to_string(r.initial_decision)},
          {"initial_confidence", r.initial_confidence},
          {"initial_at", r.initial_at},
          {"machine_shown", codec::encode(r.machine_shown)},
          {"revealed_at", r.revealed_at},
          {"final_decision", to_string(r.final_decision)},
          {"final_confidence", r.final_confidence},
          {"rationale_shown", r.rationale_shown}};
}

Label decode_label(const json& j, const char* name) {
  const auto text = codec::get<std::string>(j, name);
  try {
    return parse_label(text);
  } catch (const Error&) {
    throw Error(ErrorCode::SchemaError, std::string("field '") + name + "' must be Real or Fake");
  }
}

ReviewOutcome decode_review(const json& j) {
  ReviewOutcome r;
  r.reviewer_id = codec::get<std::string>(j, "reviewer_id");
  r.initial_decision = decode_label(j, "initial_decision");
  r.initial_confidence = codec::get<int>(j, "initial_confidence");
  r.initial_at = codec::get<Timestamp>(j, "initial_at");
  r.machine_shown = codec::decode_verdict(j.at("machine_shown"));
  r.revealed_at = codec::get<Timestamp>(j, "revealed_at");
  r.final_decision = decode_label(j, "final_decision");
  r.final_confidence = codec::get<int>(j, "final_confidence");
  r.rationale_shown = codec::get<bool>(j, "rationale_shown");
  return r;
}

void check_confidence(int value, const char* what) {
  if (value < 0 || value > 100) {
    throw Error(ErrorCode::InvalidReview, std::string(what) + " must be an integer in 0..100");
  }
}

Timestamp system_now() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string_view to_string(State state) {
  switch (state) {
    case State::Created: return "Created";
    case State::ChallengeIssued: return "ChallengeIssued";
    case State::ResponseReceived: return "ResponseReceived";
    case State::Scored: return "Scored";
    case State::AutoDecided: return "AutoDecided";
    case State::PendingReview: return "PendingReview";
    case State::Finalized: return "Finalized";
  }
  return "Created";
}

std::string_view to_string(FinalDecision decision) {
  return decision == FinalDecision::Accept ? "Accept" : "Reject";
}

State parse_state(std::string_view text) {
  for (State s : {State::Created, State::ChallengeIssued, State::ResponseReceived, State::Scored,
                  State::AutoDecided, State::PendingReview, State::Finalized}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::SchemaError, "unknown session state '" + std::string(text) + "'");
}

FinalDecision parse_final(std::string_view text) {
  if (text == "Accept") return FinalDecision::Accept;
  if (text == "Reject") return FinalDecision::Reject;
  throw Error(ErrorCode::SchemaError, "unknown final decision '" + std::string(text) + "'");
}

bool transition_allowed(State from, State to) {
  switch (from) {
    case State::Created: return to == State::ChallengeIssued;
    case State::ChallengeIssued: return to == State::ResponseReceived;
    case State::ResponseReceived: return to == State::Scored;
    case State::Scored:
      return to == State::AutoDecided || to == State::PendingReview || to == State::ChallengeIssued;
    case State::AutoDecided: return to == State::Finalized;
    case State::PendingReview: return to == State::Finalized || to == State::ChallengeIssued;
    case State::Finalized: return false;
  }
  return false;
}

std::string_view to_string(EventType type) {
  switch (type) {
    case EventType::SessionCreated: return "SessionCreated";
    case EventType::ChallengeIssued: return "ChallengeIssued";
    case EventType::ResponseReceived: return "ResponseReceived";
    case EventType::Scored: return "Scored";
    case EventType::AutoDecided: return "AutoDecided";
    case EventType::RoutedToReview: return "RoutedToReview";
    case EventType::InitialDecisionRecorded: return "InitialDecisionRecorded";
    case EventType::VerdictRevealed: return "VerdictRevealed";
    case EventType::Finalized: return "Finalized";
    case EventType::CustomerNotified: return "CustomerNotified";
  }
  return "SessionCreated";
}

EventType parse_event_type(std::string_view text) {
  for (int i = 0; i <= static_cast<int>(EventType::CustomerNotified); ++i) {
    const auto type = static_cast<EventType>(i);
    if (to_string(type) == text) return type;
  }
  throw Error(ErrorCode::SchemaError, "unknown audit event type '" + std::string(text) + "'");
}

std::optional<State> target_state(EventType type) {
  switch (type) {
    case EventType::SessionCreated: return State::Created;
    case EventType::ChallengeIssued: return State::ChallengeIssued;
    case EventType::ResponseReceived: return State::ResponseReceived;
    case EventType::Scored: return State::Scored;
    case EventType::AutoDecided: return State::AutoDecided;
    case EventType::RoutedToReview: return State::PendingReview;
    case EventType::Finalized: return State::Finalized;
    case EventType::InitialDecisionRecorded:
    case EventType::VerdictRevealed:
    case EventType::CustomerNotified: return std::nullopt;
  }
  return std::nullopt;
}

json event_to_json(const AuditEvent& event) {
  return {{"seq", event.seq},
          {"session_id", event.session_id},
          {"session_seq", event.session_seq},
          {"type", to_string(event.type)},
          {"at", event.at},
          {"payload", event.payload}};
}

AuditEvent event_from_json(const json& j) {
  AuditEvent e;
  e.seq = codec::get<std::uint64_t>(j, "seq");
  e.session_id = codec::get<std::string>(j, "session_id");
  e.session_seq = codec::get<std::uint64_t>(j, "session_seq");
  e.type = parse_event_type(codec::get<std::string>(j, "type"));
  e.at = codec::get<Timestamp>(j, "at");
  if (!j.contains("payload")) throw Error(ErrorCode::SchemaError, "missing field 'payload'");
  e.payload = j.at("payload");
  return e;
}

void apply(SessionRecord& record, const AuditEvent& event) {
  const json& p = event.payload;
  if (event.type == EventType::SessionCreated) {
    if (!record.session_id.empty()) {
      throw Error(ErrorCode::InvalidTransition, "session " + record.session_id + " already exists");
    }
    record = SessionRecord{};
    record.session_id = event.session_id;
    record.platform = parse_platform(codec::get<std::string>(p, "platform"));
    record.seed = codec::get<std::uint64_t>(p, "seed");
    record.created_at = event.at;
    record.updated_at = event.at;
    return;
  }
  if (record.session_id != event.session_id) {
    throw Error(ErrorCode::InvalidTransition, "event for session " + event.session_id +
                                                  " applied to session " + record.session_id);
  }
  if (const auto to = target_state(event.type); to && !transition_allowed(record.state, *to)) {
    throw Error(ErrorCode::InvalidTransition, "event " + std::string(to_string(event.type)) +
                                                  " cannot follow state " +
                                                  std::string(to_string(record.state)));
  }

  switch (event.type) {
    case EventType::SessionCreated: break;
    case EventType::ChallengeIssued:
      record.issued.push_back(codec::decode_request(p.at("request")));
      record.queued_at.reset();
      break;
    case EventType::ResponseReceived: {
      ResponseEntry entry;
      entry.request = record.issued.back();
      entry.sample = codec::decode_sample(p.at("sample"));
      record.responses.push_back(std::move(entry));
      break;
    }
    case EventType::Scored: {
      ResponseEntry& entry = record.responses.back();
      if (p.contains("degradation") && !p.at("degradation").is_null()) {
        entry.degradation = codec::decode_degradation(p.at("degradation"));
      }
      entry.verdict = codec::decode_verdict(p.at("verdict"));
      entry.scoring_failed = codec::get<bool>(p, "scoring_failed");
      entry.failure = codec::get<std::string>(p, "failure");
      if (entry.scoring_failed) record.flagged = true;
      break;
    }
    case EventType::AutoDecided: break;
    case EventType::RoutedToReview: record.queued_at = event.at; break;
    case EventType::InitialDecisionRecorded: {
      if (record.state != State::PendingReview || record.pending_review) {
        throw Error(ErrorCode::InvalidTransition, "initial decision cannot be recorded now");
      }
      PendingReview pending;
      pending.token = codec::get<std::string>(p, "token");
      pending.reviewer_id = codec::get<std::string>(p, "reviewer_id");
      pending.initial_decision = decode_label(p, "decision");
      pending.initial_confidence = codec::get<int>(p, "confidence");
      pending.initial_at = event.at;
      record.pending_review = std::move(pending);
      break;
    }
    case EventType::VerdictRevealed:
      if (record.state != State::PendingReview || !record.pending_review ||
          record.pending_review->revealed_at) {
        throw Error(ErrorCode::InvalidTransition, "verdict cannot be revealed now");
      }
      record.pending_review->revealed_at = event.at;
      break;
    case EventType::Finalized:
      record.final_decision = parse_final(codec::get<std::string>(p, "final"));
      if (p.contains("review") && !p.at("review").is_null()) record.review = decode_review(p.at("review"));
      break;
    case EventType::CustomerNotified:
      if (record.state != State::Finalized || record.final_decision != FinalDecision::Reject) {
        throw Error(ErrorCode::InvalidTransition, "notification requires a rejected session");
      }
      break;
  }
  if (const auto to = target_state(event.type)) record.state = *to;
  record.updated_at = event.at;
}

SessionRecord replay(std::span<const AuditEvent> events) {
  std::vector<const AuditEvent*> ordered;
  ordered.reserve(events.size());
  for (const auto& e : events) ordered.push_back(&e);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const AuditEvent* a, const AuditEvent* b) { return a->session_seq < b->session_seq; });
  SessionRecord record;
  for (const AuditEvent* e : ordered) apply(record, *e);
  return record;
}

json to_json(const SessionRecord& record) {
  json issued = json::array();
  for (const auto& r : record.issued) issued.push_back(codec::encode(r));
  json responses = json::array();
  for (const auto& r : record.responses) {
    responses.push_back({{"request", codec::encode(r.request)},
                         {"sample", codec::encode(r.sample)},
                         {"degradation", r.degradation ? codec::encode(*r.degradation) : json(nullptr)},
                         {"verdict", codec::encode(r.verdict)},
                         {"scoring_failed", r.scoring_failed},
                         {"failure", r.failure}});
  }
  return {{"session_id", record.session_id},
          {"state", to_string(record.state)},
          {"platform", to_string(record.platform)},
          {"issued", issued},
          {"responses", responses},
          {"pending_review", record.pending_review ? encode_pending(*record.pending_review) : json(nullptr)},
          {"review", record.review ? encode_review(*record.review) : json(nullptr)},
          {"final", record.final_decision ? json(to_string(*record.final_decision)) : json(nullptr)},
          {"flagged", record.flagged},
          {"created_at", record.created_at},
          {"updated_at", record.updated_at},
          {"queued_at", record.queued_at ? json(*record.queued_at) : json(nullptr)}};
}

void MemoryAuditLog::append(std::span<const AuditEvent> batch) {
  std::lock_guard lock(mutex_);
  events_.insert(events_.end(), batch.begin(), batch.end());
}

std::vector<AuditEvent> MemoryAuditLog::read_all() const {
  std::lock_guard lock(mutex_);
  return events_;
}

FileAuditLog::FileAuditLog(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  std::ofstream touch(path_, std::ios::app);
  if (!touch) throw Error(ErrorCode::StorageError, "cannot open audit log " + path_.string());
}

void FileAuditLog::append(std::span<const AuditEvent> batch) {
  std::string buffer;
  for (const auto& e : batch) {
    buffer += event_to_json(e).dump();
    buffer += '\n';
  }
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::StorageError, "cannot open audit log " + path_.string());
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::StorageError, "write to audit log " + path_.string() + " failed");
}

std::vector<AuditEvent> FileAuditLog::read_all() const {
  std::lock_guard lock(mutex_);
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw Error(ErrorCode::StorageError, "cannot read audit log " + path_.string());
  std::vector<AuditEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      events.push_back(event_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::StorageError,
                  path_.string() + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::StorageError,
                  path_.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return events;
}

void SessionConfig::validate() const {
  calibration.validate();
  if (escalation_k < 1) throw Error(ErrorCode::ConfigError, "escalation_k must be at least 1");
}

SessionManager::SessionManager(SessionConfig config, scoring::ScorerSuite suite,
                               std::shared_ptr<AuditLog> log, Options options)
    : config_(config),
      suite_(std::move(suite)),
      log_(std::move(log)),
      clock_(std::move(options.clock)),
      id_generator_(std::move(options.id_generator)) {
  config_.validate();
  suite_.validate();
  if (!log_) throw Error(ErrorCode::ConfigError, "an audit log is required");

  std::uint64_t seed = options.seed;
  if (options.seed_from_entropy) {
    std::random_device device;
    seed = (static_cast<std::uint64_t>(device()) << 32) ^ device();
  }
  rng_ = SeededRng(seed);
  if (!clock_) clock_ = system_now;
  if (!id_generator_) {
    id_generator_ = [this] {
      std::lock_guard lock(rng_mutex_);
      return rng_.hex_token(16);
    };
  }

  std::map<std::string, std::vector<AuditEvent>> by_session;
  for (auto& event : log_->read_all()) {
    next_seq_ = std::max(next_seq_, event.seq + 1);
    last_timestamp_ = std::max(last_timestamp_, event.at);
    by_session[event.session_id].push_back(std::move(event));
  }
  for (auto& [id, events] : by_session) {
    auto entry = std::make_shared<Entry>();
    entry->record = replay(events);
    std::stable_sort(events.begin(), events.end(),
                     [](const AuditEvent& a, const AuditEvent& b) { return a.session_seq < b.session_seq; });
    entry->events = std::move(events);
    sessions_.emplace(id, std::move(entry));
  }
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::SessionNotFound, "no session '" + session_id + "'");
  return it->second;
}

Timestamp SessionManager::now() {
  std::lock_guard lock(clock_mutex_);
  last_timestamp_ = std::max(clock_(), last_timestamp_ + 1);
  return last_timestamp_;
}

AuditEvent SessionManager::make_event(const Entry& entry, std::uint64_t offset, EventType type, json payload,
                                      Timestamp at) const {
  AuditEvent e;
  e.session_id = entry.record.session_id;
  e.session_seq = entry.events.size() + offset;
  e.type = type;
  e.at = at;
  e.payload = std::move(payload);
  return e;
}

void SessionManager::commit(Entry& entry, std::vector<AuditEvent> batch) {
  SessionRecord next = entry.record;
  for (const auto& e : batch) apply(next, e);
  {
    std::lock_guard lock(seq_mutex_);
    std::uint64_t seq = next_seq_;
    for (auto& e : batch) e.seq = seq++;
    log_->append(batch);
    next_seq_ = seq;
  }
  entry.record = std::move(next);
  entry.events.insert(entry.events.end(), std::make_move_iterator(batch.begin()),
                      std::make_move_iterator(batch.end()));
}

std::vector<AuditEvent> SessionManager::route_to_review_events(const Entry& entry, std::uint64_t offset,
                                                               Timestamp at) const {
  return {make_event(entry, offset, EventType::RoutedToReview, json::object(), at)};
}

std::vector<AuditEvent> SessionManager::finalize_events(const Entry& entry, FinalDecision final_decision,
                                                        const std::optional<ReviewOutcome>& review,
                                                        Timestamp at) const {
  std::vector<AuditEvent> batch;
  batch.push_back(make_event(entry, 0, EventType::Finalized,
                             {{"final", to_string(final_decision)},
                              {"review", review ? encode_review(*review) : json(nullptr)}},
                             at));
  if (final_decision == FinalDecision::Reject) {
    batch.push_back(make_event(entry, 1, EventType::CustomerNotified, {{"reason", "rejected"}}, at));
  }
  return batch;
}

SessionRecord SessionManager::create_session(Platform platform) {
  std::uint64_t seed = 0;
  {
    std::lock_guard lock(rng_mutex_);
    seed = rng_.next();
  }
  auto entry = std::make_shared<Entry>();
  std::unique_lock lock(sessions_mutex_);
  std::string id;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 1000) throw Error(ErrorCode::StorageError, "could not generate a unique session id");
    id = id_generator_();
    if (!id.empty() && !sessions_.contains(id)) break;
  }
  AuditEvent created;
  created.session_id = id;
  created.session_seq = 0;
  created.type = EventType::SessionCreated;
  created.at = now();
  created.payload = {{"platform", to_string(platform)}, {"seed", seed}};
  commit(*entry, {created});
  sessions_.emplace(id, entry);
  return entry->record;
}

catalog::ChallengeRequest SessionManager::request_challenge(const std::string& session_id,
                                                            catalog::IssuePolicy policy) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  const SessionRecord& record = entry->record;
  const State state = record.state;
  if (state != State::Created && state != State::Scored && state != State::PendingReview) {
    bad_transition(state, "request_challenge");
  }
  if (state == State::PendingReview && record.pending_review) {
    throw Error(ErrorCode::InvalidTransition, "a review of this session is already in progress");
  }

  const auto exhausted = [&](const std::string& message) -> catalog::ChallengeRequest {
    if (state == State::Scored) commit(*entry, route_to_review_events(*entry, 0, now()));
    throw Error(ErrorCode::ExhaustedChallenges, message);
  };
  if (static_cast<int>(record.issued.size()) >= config_.escalation_k) {
    return exhausted("session already issued " + std::to_string(record.issued.size()) + " challenges");
  }

  catalog::IssueContext context;
  for (const auto& r : record.issued) {
    context.already_issued.insert(r.challenge_id);
    if (r.script) context.used_scripts.insert(r.script->text);
  }
  context.now = now();
  catalog::ChallengeRequest request;
  try {
    request = catalog::issue_challenge(catalog::Catalog::embedded(), policy, record.platform,
                                       mix(record.seed ^ record.issued.size()), context);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ExhaustedChallenges) return exhausted(e.what());
    throw;
  }
  commit(*entry, {make_event(*entry, 0, EventType::ChallengeIssued, {{"request", codec::encode(request)}},
                             context.now)});
  return request;
}

decision::Verdict SessionManager::submit_response(const std::string& session_id, scoring::SampleRef sample) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  const SessionRecord& record = entry->record;
  if (record.state != State::ChallengeIssued) bad_transition(record.state, "submit_response");

  const catalog::ChallengeRequest& request = record.issued.back();
  sample.challenge_id = request.challenge_id;
  sample.reference_text = request.script ? request.script->text : std::string();
  const Timestamp received_at = now();

  std::optional<metrics::DegradationResult> degradation;
  std::string failure;
  try {
    degradation = metrics::machine_degradation(scoring::score_components(suite_, sample));
  } catch (const std::exception& e) {
    failure = e.what();
  }

  decision::Verdict verdict;
  if (!degradation) {
    verdict = decision::decide(config_.calibration.tau_base, decision::Rationale::None, config_.calibration);
  } else {
    std::vector<metrics::DegradationResult> scored;
    for (const auto& r : record.responses) {
      if (r.degradation) scored.push_back(*r.degradation);
    }
    scored.push_back(*degradation);
    const auto top = std::max_element(scored.begin(), scored.end(),
                                      [](const auto& a, const auto& b) { return a.m < b.m; });
    double m = top->m;
    if (config_.aggregation == Aggregation::Mean) {
      double sum = 0.0;
      for (const auto& d : scored) sum += d.m;
      m = sum / static_cast<double>(scored.size());
    }
    verdict = decision::decide(m, top->dominant, config_.calibration);
  }

  const Timestamp scored_at = now();
  std::vector<AuditEvent> batch;
  batch.push_back(make_event(*entry, 0, EventType::ResponseReceived, {{"sample", codec::encode(sample)}},
                             received_at));
  batch.push_back(make_event(*entry, 1, EventType::Scored,
                             {{"degradation", degradation ? codec::encode(*degradation) : json(nullptr)},
                              {"verdict", codec::encode(verdict)},
                              {"scoring_failed", !degradation.has_value()},
                              {"failure", failure}},
                             scored_at));
  if (degradation && verdict.routing == decision::Routing::Automated) {
    batch.push_back(make_event(*entry, 2, EventType::AutoDecided, json::object(), scored_at));
  } else {
    auto routed = route_to_review_events(*entry, 2, scored_at);
    batch.insert(batch.end(), routed.begin(), routed.end());
  }
  commit(*entry, std::move(batch));
  return verdict;
}

InitialDecisionReceipt SessionManager::record_initial_decision(const std::string& session_id,
                                                               const std::string& reviewer_id,
                                                               Label decision, int confidence) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  const SessionRecord& record = entry->record;
  if (record.state != State::PendingReview) bad_transition(record.state, "record_initial_decision");
  if (record.pending_review) {
    throw Error(ErrorCode::InvalidReview, "an initial decision was already recorded for this session");
  }
  if (reviewer_id.empty()) throw Error(ErrorCode::InvalidReview, "reviewer_id must not be empty");
  check_confidence(confidence, "initial_confidence");

  std::string token;
  {
    std::lock_guard rng_lock(rng_mutex_);
    token = rng_.hex_token(16);
  }
  const Timestamp at = now();
  commit(*entry, {make_event(*entry, 0, EventType::InitialDecisionRecorded,
                             {{"token", token},
                              {"reviewer_id", reviewer_id},
                              {"decision", to_string(decision)},
                              {"confidence", confidence}},
                             at)});
  return {token, at};
}

decision::Verdict SessionManager::get_verdict(const std::string& session_id,
                                              const std::optional<std::string>& token) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  const SessionRecord& record = entry->record;
  if (record.state == State::PendingReview) {
    if (!record.pending_review || !token || *token != record.pending_review->token) {
      throw Error(ErrorCode::VerdictSealed,
                  "the machine verdict is shown only after the initial decision is recorded");
    }
    if (!record.pending_review->revealed_at) {
      commit(*entry, {make_event(*entry, 0, EventType::VerdictRevealed, json::object(), now())});
    }
  }
  const decision::Verdict* verdict = entry->record.latest_verdict();
  if (verdict == nullptr) bad_transition(record.state, "get_verdict");
  return *verdict;
}

SessionRecord SessionManager::submit_review(const std::string& session_id, const ReviewOutcome& outcome) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  if (entry->record.state != State::PendingReview) bad_transition(entry->record.state, "submit_review");
  if (outcome.reviewer_id.empty()) throw Error(ErrorCode::InvalidReview, "reviewer_id must not be empty");
  check_confidence(outcome.initial_confidence, "initial_confidence");
  check_confidence(outcome.final_confidence, "final_confidence");
  if (!(outcome.initial_at < outcome.revealed_at)) {
    throw Error(ErrorCode::InvalidReview, "the initial decision must be recorded before the verdict is revealed");
  }
  const auto final_decision =
      outcome.final_decision == Label::Fake ? FinalDecision::Reject : FinalDecision::Accept;
  commit(*entry, finalize_events(*entry, final_decision, outcome, now()));
  return entry->record;
}

SessionRecord SessionManager::submit_review(const std::string& session_id, const std::string& token,
                                            Label final_decision, int final_confidence,
                                            bool rationale_shown) {
  ReviewOutcome outcome;
  {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    const SessionRecord& record = entry->record;
    if (record.state != State::PendingReview) bad_transition(record.state, "submit_review");
    if (!record.pending_review || token != record.pending_review->token) {
      throw Error(ErrorCode::VerdictSealed, "a valid initial-decision token is required");
    }
    const PendingReview& pending = *record.pending_review;
    if (!pending.revealed_at) {
      throw Error(ErrorCode::InvalidReview, "the machine verdict has not been revealed yet");
    }
    outcome.reviewer_id = pending.reviewer_id;
    outcome.initial_decision = pending.initial_decision;
    outcome.initial_confidence = pending.initial_confidence;
    outcome.initial_at = pending.initial_at;
    outcome.machine_shown = *record.latest_verdict();
    outcome.revealed_at = *pending.revealed_at;
  }
  outcome.final_decision = final_decision;
  outcome.final_confidence = final_confidence;
  outcome.rationale_shown = rationale_shown;
  return submit_review(session_id, outcome);
}

SessionRecord SessionManager::finalize_auto(const std::string& session_id) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  const SessionRecord& record = entry->record;
  if (record.state != State::AutoDecided) bad_transition(record.state, "finalize_auto");
  const auto final_decision =
      record.latest_verdict()->predicted == Label::Fake ? FinalDecision::Reject : FinalDecision::Accept;
  commit(*entry, finalize_events(*entry, final_decision, std::nullopt, now()));
  return entry->record;
}

SessionRecord SessionManager::get(const std::string& session_id) const {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  return entry->record;
}

std::vector<SessionRecord> SessionManager::list_pending_reviews() const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(sessions_mutex_);
    for (const auto& [id, entry] : sessions_) entries.push_back(entry);
  }
  std::vector<SessionRecord> pending;
  for (const auto& entry : entries) {
    std::lock_guard lock(entry->mutex);
    if (entry->record.state == State::PendingReview) pending.push_back(entry->record);
  }
  std::sort(pending.begin(), pending.end(), [](const SessionRecord& a, const SessionRecord& b) {
    if (a.queued_at != b.queued_at) return a.queued_at < b.queued_at;
    return a.session_id < b.session_id;
  });
  return pending;
}

std::vector<AuditEvent> SessionManager::audit_trail(const std::string& session_id) const {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  return entry->events;
}

std::vector<std::string> SessionManager::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, entry] : sessions_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace pitch::session
