#include "pitch/service.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "pitch/codec.hpp"

namespace pitch::service {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

void reject_unknown_keys(const json& object, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, value] : object.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) config_error(std::string("unknown key '") + key + "' in " + where);
  }
}

template <class T>
T config_value(const json& object, const char* name, T fallback) {
  const auto it = object.find(name);
  if (it == object.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    config_error(std::string("config key '") + name + "' has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

ServiceConfig parse_config(const json& document, const std::filesystem::path& base_dir) {
  if (!document.is_object()) config_error("config must be a JSON object");
  reject_unknown_keys(document,
                      {"adapters", "calibration", "escalation_k", "aggregation", "compliance_heuristics",
                       "foreign_wer_threshold", "storage_path", "listen"},
                      "config");
  ServiceConfig config;

  if (document.contains("adapters")) {
    const json& a = document.at("adapters");
    if (!a.is_object()) config_error("'adapters' must be an object");
    reject_unknown_keys(a, {"kind", "fixture_path", "url", "timeout_ms"}, "adapters");
    config.adapters.kind = config_value<std::string>(a, "kind", "fixture");
    config.adapters.fixture_path =
        resolve(base_dir, config_value<std::string>(a, "fixture_path", ""));
    config.adapters.url = config_value<std::string>(a, "url", "");
    config.adapters.timeout_ms = config_value<int>(a, "timeout_ms", 10000);
  }
  if (document.contains("calibration")) {
    const json& c = document.at("calibration");
    if (!c.is_object()) config_error("'calibration' must be an object");
    reject_unknown_keys(c, {"tau_base", "temperature", "auto_threshold"}, "calibration");
    auto& cal = config.session.calibration;
    cal.tau_base = config_value<double>(c, "tau_base", cal.tau_base);
    cal.temperature = config_value<double>(c, "temperature", cal.temperature);
    cal.auto_threshold = config_value<double>(c, "auto_threshold", cal.auto_threshold);
  }
  config.session.escalation_k = config_value<int>(document, "escalation_k", config.session.escalation_k);
  const auto aggregation = config_value<std::string>(document, "aggregation", "max");
  if (aggregation == "max") {
    config.session.aggregation = session::Aggregation::Max;
  } else if (aggregation == "mean") {
    config.session.aggregation = session::Aggregation::Mean;
  } else {
    config_error("aggregation must be \"max\" or \"mean\"");
  }
  config.compliance_heuristics = config_value<bool>(document, "compliance_heuristics", true);
  config.foreign_wer_threshold = config_value<double>(document, "foreign_wer_threshold", 0.5);
  if (document.contains("storage_path")) {
    config.storage_path = resolve(base_dir, config_value<std::string>(document, "storage_path", ""));
  }
  config.listen = config_value<std::string>(document, "listen", config.listen);

  if (config.adapters.kind == "fixture") {
    if (config.adapters.fixture_path.empty()) config_error("fixture adapters need 'fixture_path'");
  } else if (config.adapters.kind == "remote") {
    if (config.adapters.url.empty()) config_error("remote adapters need 'url'");
  } else {
    config_error("adapters.kind must be \"fixture\" or \"remote\"");
  }
  if (config.adapters.timeout_ms <= 0) config_error("adapters.timeout_ms must be positive");
  if (!(config.foreign_wer_threshold > 0.0)) config_error("foreign_wer_threshold must be positive");
  try {
    config.session.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  parse_listen(config.listen);
  return config;
}

ServiceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
  return parse_config(document, path.parent_path());
}

void apply_env_overrides(ServiceConfig& config, const std::function<const char*(const char*)>& getenv) {
  if (const char* storage = getenv("PITCH_STORAGE_PATH"); storage && *storage) config.storage_path = storage;
  if (const char* listen = getenv("PITCH_LISTEN"); listen && *listen) {
    parse_listen(listen);
    config.listen = listen;
  }
}

std::pair<std::string, int> parse_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) config_error("listen must be host:port, got '" + listen + "'");
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(listen.substr(colon + 1), &used);
    if (used != listen.size() - colon - 1) port = -1;
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) config_error("listen port out of range in '" + listen + "'");
  return {listen.substr(0, colon), port};
}

RemoteScorer::RemoteScorer(std::string url, int timeout_ms) : timeout_ms_(timeout_ms) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) config_error("adapter url needs a scheme: '" + url + "'");
  const auto slash = url.find('/', scheme + 3);
  origin_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? std::string() : url.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/v1/score";
}

json RemoteScorer::call(const char* task, const scoring::SampleRef& sample,
                        const scoring::SampleRef* target) const {
  httplib::Client client(origin_);
  const auto timeout = std::chrono::milliseconds(timeout_ms_);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const json body = {{"task", task},
                     {"sample", codec::encode(sample)},
                     {"target", target ? codec::encode(*target) : json(nullptr)}};
  const auto result = client.Post(path_, body.dump(), "application/json");
  if (!result) {
    throw Error(ErrorCode::AdapterUnavailable,
                std::string(task) + " adapter unreachable: " + httplib::to_string(result.error()));
  }
  if (result->status == 404) {
    throw Error(ErrorCode::SampleNotFound, "adapter has no sample '" + sample.sample_id + "'");
  }
  if (result->status != 200) {
    throw Error(ErrorCode::AdapterUnavailable,
                std::string(task) + " adapter returned HTTP " + std::to_string(result->status));
  }
  try {
    return json::parse(result->body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::AdapterUnavailable, std::string(task) + " adapter sent malformed JSON: " + e.what());
  }
}

double RemoteScorer::value(const char* task, const scoring::SampleRef& sample,
                           const scoring::SampleRef* target) const {
  const json reply = call(task, sample, target);
  if (!reply.is_object() || !reply.contains("value") || !reply.at("value").is_number()) {
    throw Error(ErrorCode::AdapterUnavailable, std::string(task) + " adapter reply lacks a numeric 'value'");
  }
  return reply.at("value").get<double>();
}

double RemoteScorer::score_compliance(const scoring::SampleRef& sample) {
  return value("compliance", sample, nullptr);
}

double RemoteScorer::score_realism(const scoring::SampleRef& sample) { return value("realism", sample, nullptr); }

std::string RemoteScorer::transcribe(const scoring::SampleRef& sample) {
  const json reply = call("transcribe", sample, nullptr);
  if (!reply.is_object() || !reply.contains("text") || !reply.at("text").is_string()) {
    throw Error(ErrorCode::AdapterUnavailable, "transcribe adapter reply lacks a string 'text'");
  }
  return reply.at("text").get<std::string>();
}

double RemoteScorer::match_speaker(const scoring::SampleRef& sample, const scoring::SampleRef& target) {
  return value("speaker_match", sample, &target);
}

scoring::ScorerSuite build_suite(const ServiceConfig& config) {
  scoring::ScorerSuite suite;
  if (config.adapters.kind == "remote") {
    auto remote = std::make_shared<RemoteScorer>(config.adapters.url, config.adapters.timeout_ms);
    suite = {remote, remote, remote, remote};
  } else {
    auto fixture = std::make_shared<scoring::FixtureScorer>(load_score_records(config.adapters.fixture_path));
    suite = {fixture, fixture, fixture, fixture};
  }
  if (config.compliance_heuristics) {
    suite.compliance = std::make_shared<scoring::HeuristicComplianceScorer>(
        suite.transcriber, suite.compliance, config.foreign_wer_threshold);
  }
  suite.validate();
  return suite;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::SessionNotFound:
    case ErrorCode::SampleNotFound: return 404;
    case ErrorCode::InvalidTransition:
    case ErrorCode::ExhaustedChallenges: return 409;
    case ErrorCode::InvalidReview: return 422;
    case ErrorCode::VerdictSealed: return 403;
    case ErrorCode::AdapterUnavailable:
    case ErrorCode::StorageError: return 503;
    default: return 400;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status(code), {{"error", {{"code", to_string(code)}, {"message", message}}}});
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw Error(ErrorCode::SchemaError, "request body must be a JSON object");
    return body;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed JSON body: ") + e.what());
  }
}

Label label_field(const json& body, const char* name) {
  const auto text = codec::get<std::string>(body, name);
  if (text == "Real") return Label::Real;
  if (text == "Fake") return Label::Fake;
  throw Error(ErrorCode::SchemaError, std::string("field '") + name + "' must be Real or Fake");
}

bool sealed(const session::SessionRecord& record) {
  return record.state == session::State::PendingReview &&
         !(record.pending_review && record.pending_review->revealed_at);
}

/// Session view for the wire: the review token never leaves the server
/// except in the initial-decision reply, and machine output stays hidden
/// while a review is pending and the verdict has not been revealed.
json session_view(const session::SessionRecord& record) {
  json view = session::to_json(record);
  if (!view.at("pending_review").is_null()) view["pending_review"].erase("token");
  const bool hide = sealed(record);
  if (hide) {
    for (auto& response : view["responses"]) {
      response["degradation"] = nullptr;
      response["verdict"] = nullptr;
    }
  }
  view["verdict_sealed"] = hide;
  return view;
}

json event_view(const session::AuditEvent& event) {
  json view = session::event_to_json(event);
  if (event.type == session::EventType::InitialDecisionRecorded) view["payload"].erase("token");
  return view;
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      spdlog::error("unhandled error on {} {}: {}", req.method, req.path, e.what());
      send_error(res, ErrorCode::StorageError, e.what());
    }
  };
}

catalog::IssuePolicy policy_of(const json& body) {
  const auto name = codec::get_or<std::string>(body, "policy", "usability");
  if (name == "usability") return catalog::IssuePolicy::usability_ordered();
  if (name == "random") return catalog::IssuePolicy::random_qualified();
  if (name == "fixed") return catalog::IssuePolicy::fixed(codec::get<int>(body, "challenge_id"));
  throw Error(ErrorCode::SchemaError, "policy must be usability, random or fixed");
}

}  // namespace

void HttpService::mount(httplib::Server& server) {
  auto& m = manager_;

  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  server.Get("/v1/catalog", guarded([](const httplib::Request&, httplib::Response& res) {
               json challenges = json::array();
               for (const auto& c : catalog::Catalog::embedded().challenges()) {
                 challenges.push_back(codec::encode(c));
               }
               send_json(res, 200, {{"challenges", challenges}});
             }));

  server.Post("/v1/sessions", guarded([&m](const httplib::Request& req, httplib::Response& res) {
                const json body = body_of(req);
                Platform platform = Platform::Desktop;
                const auto name = codec::get_or<std::string>(body, "platform", "Desktop");
                if (name == "Desktop") {
                  platform = Platform::Desktop;
                } else if (name == "Mobile") {
                  platform = Platform::Mobile;
                } else {
                  throw Error(ErrorCode::SchemaError, "platform must be Desktop or Mobile");
                }
                send_json(res, 201, session_view(m.create_session(platform)));
              }));

  server.Get("/v1/sessions/:id", guarded([&m](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, session_view(m.get(req.path_params.at("id"))));
             }));

  server.Post("/v1/sessions/:id/challenges", guarded([&m](const httplib::Request& req, httplib::Response& res) {
                const auto request = m.request_challenge(req.path_params.at("id"), policy_of(body_of(req)));
                const auto& spec = catalog::Catalog::embedded().challenge(request.challenge_id);
                json reply = codec::encode(request);
                reply["name"] = spec.name;
                reply["instruction"] = spec.instruction;
                send_json(res, 201, reply);
              }));

  server.Post("/v1/sessions/:id/responses", guarded([&m](const httplib::Request& req, httplib::Response& res) {
                const json body = body_of(req);
                scoring::SampleRef sample;
                sample.sample_id = codec::get<std::string>(body, "sample_id");
                if (sample.sample_id.empty()) throw Error(ErrorCode::SchemaError, "sample_id must not be empty");
                if (body.contains("audio_uri") && !body.at("audio_uri").is_null()) {
                  sample.audio_uri = codec::get<std::string>(body, "audio_uri");
                }
                const std::string id = req.path_params.at("id");
                const auto verdict = m.submit_response(id, sample);
                const auto record = m.get(id);
                json reply = {{"session_id", id}, {"state", session::to_string(record.state)}};
                if (record.state == session::State::PendingReview) {
                  reply["verdict"] = nullptr;
                  reply["verdict_sealed"] = true;
                } else {
                  reply["verdict"] = codec::encode(verdict);
                  reply["verdict_sealed"] = false;
                }
                send_json(res, 200, reply);
              }));

  server.Post("/v1/sessions/:id/review/initial",
              guarded([&m](const httplib::Request& req, httplib::Response& res) {
                const json body = body_of(req);
                const auto receipt = m.record_initial_decision(
                    req.path_params.at("id"), codec::get<std::string>(body, "reviewer_id"),
                    label_field(body, "decision"), codec::get<int>(body, "confidence"));
                send_json(res, 201, {{"token", receipt.token}, {"initial_at", receipt.initial_at}});
              }));

  server.Get("/v1/sessions/:id/verdict", guarded([&m](const httplib::Request& req, httplib::Response& res) {
               std::optional<std::string> token;
               if (req.has_param("token")) token = req.get_param_value("token");
               const std::string id = req.path_params.at("id");
               const auto verdict = m.get_verdict(id, token);
               json reply = codec::encode(verdict);
               const auto record = m.get(id);
               if (record.pending_review && record.pending_review->revealed_at) {
                 reply["revealed_at"] = *record.pending_review->revealed_at;
               }
               send_json(res, 200, reply);
             }));

  server.Post("/v1/sessions/:id/review", guarded([&m](const httplib::Request& req, httplib::Response& res) {
                const json body = body_of(req);
                const auto record = m.submit_review(
                    req.path_params.at("id"), codec::get<std::string>(body, "token"),
                    label_field(body, "final_decision"), codec::get<int>(body, "final_confidence"),
                    codec::get_or<bool>(body, "rationale_shown", true));
                send_json(res, 200, session_view(record));
              }));

  server.Post("/v1/sessions/:id/finalize", guarded([&m](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, session_view(m.finalize_auto(req.path_params.at("id"))));
              }));

  server.Get("/v1/reviews/pending", guarded([&m](const httplib::Request&, httplib::Response& res) {
               json items = json::array();
               for (const auto& record : m.list_pending_reviews()) {
                 json challenges = json::array();
                 for (const auto& r : record.issued) challenges.push_back(r.challenge_id);
                 items.push_back({{"session_id", record.session_id},
                                  {"platform", to_string(record.platform)},
                                  {"queued_at", record.queued_at ? json(*record.queued_at) : json(nullptr)},
                                  {"challenges", challenges},
                                  {"flagged", record.flagged},
                                  {"initial_recorded", record.pending_review.has_value()}});
               }
               send_json(res, 200, {{"pending", items}});
             }));

  server.Get("/v1/sessions/:id/audit", guarded([&m](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.path_params.at("id");
               if (sealed(m.get(id))) {
                 throw Error(ErrorCode::VerdictSealed,
                             "the audit trail contains the machine verdict and is sealed until it is revealed");
               }
               json events = json::array();
               for (const auto& e : m.audit_trail(id)) events.push_back(event_view(e));
               send_json(res, 200, {{"session_id", id}, {"events", events}});
             }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      const auto code = res.status == 404 ? ErrorCode::InvalidArgument : ErrorCode::SchemaError;
      const int status = res.status;
      send_error(res, code, "no route for this request");
      res.status = status;
    }
  });
}

int serve(const ServiceConfig& config, const std::atomic<bool>* stop) {
  auto log = std::make_shared<session::FileAuditLog>(config.storage_path);
  session::SessionManager manager(config.session, build_suite(config), log);
  httplib::Server server;
  HttpService(manager).mount(server);

  const auto [host, port] = parse_listen(config.listen);
  std::atomic<bool> done{false};
  std::thread watcher;
  if (stop != nullptr) {
    watcher = std::thread([&server, &done, stop] {
      while (!stop->load() && !done.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
      server.stop();
    });
  }
  spdlog::info("listening on {}:{} (audit log {})", host, port, config.storage_path.string());
  const bool ok = server.listen(host, port);
  done = true;
  if (watcher.joinable()) watcher.join();
  if (!ok && !(stop != nullptr && stop->load())) {
    spdlog::error("could not listen on {}:{}", host, port);
    return 1;
  }
  return 0;
}

}  // namespace pitch::service
