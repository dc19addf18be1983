#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include <json.hpp>

#include "pitch/scoring.hpp"
#include "pitch/session.hpp"

namespace httplib {
class Server;
}

namespace pitch::service {

struct AdapterConfig {
  /// "fixture" or "remote".
  std::string kind = "fixture";
  std::filesystem::path fixture_path;
  std::string url;
  int timeout_ms = 10000;
};

struct ServiceConfig {
  session::SessionConfig session;
  AdapterConfig adapters;
  /// Transcript checks for the foreign-words and question challenges.
  bool compliance_heuristics = true;
  double foreign_wer_threshold = 0.5;
  std::filesystem::path storage_path = "pitch-audit.jsonl";
  std::string listen = "127.0.0.1:8080";
};

/// Relative paths in the document resolve against `base_dir`. Unknown keys
/// and out-of-domain values raise ConfigError.
ServiceConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir = {});
ServiceConfig load_config(const std::filesystem::path& path);

/// PITCH_STORAGE_PATH and PITCH_LISTEN replace the configured values.
void apply_env_overrides(ServiceConfig& config,
                         const std::function<const char*(const char*)>& getenv = [](const char* name) {
                           return std::getenv(name);
                         });

/// "host:port" split; throws ConfigError.
std::pair<std::string, int> parse_listen(const std::string& listen);

/// Client for the scoring protocol in docs/adapter_protocol.md. One
/// connection per request, so concurrent calls do not share state.
class RemoteScorer final : public scoring::ComplianceScorer,
                           public scoring::RealismScorer,
                           public scoring::Transcriber,
                           public scoring::SpeakerMatcher {
 public:
  RemoteScorer(std::string url, int timeout_ms = 10000);

  double score_compliance(const scoring::SampleRef& sample) override;
  double score_realism(const scoring::SampleRef& sample) override;
  std::string transcribe(const scoring::SampleRef& sample) override;
  double match_speaker(const scoring::SampleRef& sample, const scoring::SampleRef& target) override;

 private:
  nlohmann::json call(const char* task, const scoring::SampleRef& sample,
                      const scoring::SampleRef* target) const;
  double value(const char* task, const scoring::SampleRef& sample, const scoring::SampleRef* target) const;

  std::string origin_;
  std::string path_;
  int timeout_ms_;
};

scoring::ScorerSuite build_suite(const ServiceConfig& config);

int http_status(ErrorCode code);

/// Wire API routes over a SessionManager (docs/wire_api.md).
class HttpService {
 public:
  explicit HttpService(session::SessionManager& manager) : manager_(manager) {}
  void mount(httplib::Server& server);

 private:
  session::SessionManager& manager_;
};

/// Builds the manager from `config` and serves until `stop` becomes true or
/// the server fails. Returns a process exit code.
int serve(const ServiceConfig& config, const std::atomic<bool>* stop = nullptr);

}  // namespace pitch::service
