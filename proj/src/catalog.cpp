#include "pitch/catalog.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "pitch/rng.hpp"

namespace pitch::catalog {

namespace detail {
extern const std::string_view kEmbeddedCatalog;
}

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, "catalog: " + message);
}

Category parse_category(std::string_view text) {
  static constexpr std::pair<std::string_view, Category> kNames[] = {
      {"NoChallenge", Category::NoChallenge},
      {"VocalDistortion", Category::VocalDistortion},
      {"Waveform", Category::Waveform},
      {"LanguageArticulation", Category::LanguageArticulation},
      {"ToneOfVoice", Category::ToneOfVoice},
      {"Noise", Category::Noise},
      {"Playback", Category::Playback},
  };
  for (const auto& [name, value] : kNames) {
    if (name == text) return value;
  }
  config_error("unknown category '" + std::string(text) + "'");
}

}  // namespace

std::string_view to_string(Category category) {
  switch (category) {
    case Category::NoChallenge: return "NoChallenge";
    case Category::VocalDistortion: return "VocalDistortion";
    case Category::Waveform: return "Waveform";
    case Category::LanguageArticulation: return "LanguageArticulation";
    case Category::ToneOfVoice: return "ToneOfVoice";
    case Category::Noise: return "Noise";
    case Category::Playback: return "Playback";
  }
  return "Unknown";
}

std::string_view to_string(SentencePool pool) {
  switch (pool) {
    case SentencePool::General: return "General";
    case SentencePool::Questions: return "Questions";
    case SentencePool::Foreign: return "Foreign";
    case SentencePool::NonVerbal: return "NonVerbal";
  }
  return "Unknown";
}

SentencePool parse_pool(std::string_view text) {
  if (text == "General") return SentencePool::General;
  if (text == "Questions") return SentencePool::Questions;
  if (text == "Foreign") return SentencePool::Foreign;
  if (text == "NonVerbal") return SentencePool::NonVerbal;
  throw Error(ErrorCode::ConfigError, "catalog: unknown sentence pool '" + std::string(text) + "'");
}

Catalog Catalog::parse(std::string_view jsonl) {
  Catalog catalog;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json record = json::parse(line);
      const std::string kind = record.at("kind").get<std::string>();
      if (kind == "catalog") {
        catalog.version_ = record.at("version").get<int>();
      } else if (kind == "challenge") {
        ChallengeSpec spec;
        spec.id = record.at("id").get<int>();
        spec.name = record.at("name").get<std::string>();
        spec.category = parse_category(record.at("category").get<std::string>());
        spec.qualified = record.at("qualified").get<bool>();
        spec.desktop_only = record.at("desktop_only").get<bool>();
        spec.sentence_pool = parse_pool(record.at("sentence_pool").get<std::string>());
        spec.usability_rank = record.at("usability_rank").get<int>();
        spec.instruction = record.value("instruction", "");
        catalog.challenges_.push_back(std::move(spec));
      } else if (kind == "script") {
        SentenceScript script;
        script.pool = parse_pool(record.at("pool").get<std::string>());
        script.index = record.at("index").get<int>();
        script.text = record.at("text").get<std::string>();
        script.language = record.value("language", "");
        switch (script.pool) {
          case SentencePool::General: catalog.general_.push_back(std::move(script)); break;
          case SentencePool::Questions: catalog.questions_.push_back(std::move(script)); break;
          case SentencePool::Foreign: catalog.foreign_.push_back(std::move(script)); break;
          case SentencePool::NonVerbal: config_error("non-verbal pool carries no scripts");
        }
      } else {
        config_error("unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      config_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::sort(catalog.challenges_.begin(), catalog.challenges_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (auto* pool : {&catalog.general_, &catalog.questions_, &catalog.foreign_}) {
    std::sort(pool->begin(), pool->end(),
              [](const auto& a, const auto& b) { return a.index < b.index; });
  }
  catalog.validate();
  return catalog;
}

void Catalog::validate() const {
  if (version_ < 1) config_error("missing catalog header");
  if (challenges_.size() != kChallengeCount) {
    config_error("expected 21 challenges, found " + std::to_string(challenges_.size()));
  }
  int qualified = 0;
  for (int id = 0; id < kChallengeCount; ++id) {
    const auto& spec = challenges_[static_cast<std::size_t>(id)];
    if (spec.id != id) config_error("challenge ids must be 0..20 and unique");
    if (spec.qualified) ++qualified;
    if (spec.desktop_only != (id >= 18)) config_error("desktop_only must hold exactly for 18, 19, 20");
    SentencePool expected = SentencePool::General;
    if (id == kForeignWords) expected = SentencePool::Foreign;
    if (id == kQuestion) expected = SentencePool::Questions;
    if (id == kCoughWhistle) expected = SentencePool::NonVerbal;
    if (spec.sentence_pool != expected) {
      config_error("challenge " + std::to_string(id) + " has the wrong sentence pool");
    }
    if (spec.usability_rank < 1) config_error("usability ranks start at 1");
  }
  if (challenges_[kNoChallenge].qualified) config_error("the no-challenge control cannot be qualified");
  if (challenges_[kCoughWhistle].qualified) config_error("cough/whistle is not randomizable");
  if (qualified != 10) config_error("expected 10 qualified challenges");
  for (const auto* pool : {&general_, &questions_, &foreign_}) {
    if (pool->size() != 10) config_error("each sentence pool holds exactly 10 scripts");
    for (std::size_t i = 0; i < pool->size(); ++i) {
      if ((*pool)[i].index != static_cast<int>(i)) config_error("script indices must be 0..9");
    }
  }
}

const Catalog& Catalog::embedded() {
  static const Catalog catalog = Catalog::parse(detail::kEmbeddedCatalog);
  return catalog;
}

const ChallengeSpec& Catalog::challenge(int id) const {
  if (id < 0 || id >= kChallengeCount) {
    throw Error(ErrorCode::InvalidArgument, "no challenge with id " + std::to_string(id));
  }
  return challenges_[static_cast<std::size_t>(id)];
}

std::span<const SentenceScript> Catalog::scripts(SentencePool pool) const {
  switch (pool) {
    case SentencePool::General: return general_;
    case SentencePool::Questions: return questions_;
    case SentencePool::Foreign: return foreign_;
    case SentencePool::NonVerbal: return {};
  }
  return {};
}

std::vector<int> Catalog::qualified_ids() const {
  std::vector<int> ids;
  for (const auto& spec : challenges_) {
    if (spec.qualified) ids.push_back(spec.id);
  }
  return ids;
}

const std::vector<ChallengeSpec>& load_catalog() { return Catalog::embedded().challenges(); }

std::vector<int> eligible_challenges(const Catalog& catalog, Platform platform,
                                     const std::set<int>& already_issued) {
  std::vector<int> ids;
  for (const auto& spec : catalog.challenges()) {
    if (!spec.qualified) continue;
    if (platform == Platform::Mobile && spec.desktop_only) continue;
    if (already_issued.contains(spec.id)) continue;
    ids.push_back(spec.id);
  }
  return ids;
}

ChallengeRequest issue_challenge(const Catalog& catalog, IssuePolicy policy, Platform platform,
                                 std::uint64_t rng_seed, const IssueContext& context) {
  SeededRng rng(rng_seed);
  int chosen = -1;

  switch (policy.kind) {
    case IssuePolicy::Kind::Fixed: {
      const ChallengeSpec& spec = catalog.challenge(policy.fixed_id);
      if (!spec.qualified && spec.id != kNoChallenge) {
        throw Error(ErrorCode::InvalidArgument,
                    "challenge " + std::to_string(spec.id) + " is not qualified for issuance");
      }
      if (platform == Platform::Mobile && spec.desktop_only) {
        throw Error(ErrorCode::InvalidArgument,
                    "challenge " + std::to_string(spec.id) + " requires a desktop caller");
      }
      if (context.already_issued.contains(spec.id)) {
        throw Error(ErrorCode::ExhaustedChallenges,
                    "challenge " + std::to_string(spec.id) + " was already issued");
      }
      chosen = spec.id;
      break;
    }
    case IssuePolicy::Kind::UsabilityOrdered: {
      const auto ids = eligible_challenges(catalog, platform, context.already_issued);
      if (ids.empty()) throw Error(ErrorCode::ExhaustedChallenges, "no eligible challenge remains");
      chosen = *std::min_element(ids.begin(), ids.end(), [&](int a, int b) {
        const int ra = catalog.challenge(a).usability_rank;
        const int rb = catalog.challenge(b).usability_rank;
        return ra != rb ? ra < rb : a < b;
      });
      break;
    }
    case IssuePolicy::Kind::RandomQualified: {
      const auto ids = eligible_challenges(catalog, platform, context.already_issued);
      if (ids.empty()) throw Error(ErrorCode::ExhaustedChallenges, "no eligible challenge remains");
      chosen = ids[rng.uniform_index(ids.size())];
      break;
    }
  }

  ChallengeRequest request;
  request.challenge_id = chosen;
  request.issued_at = context.now;

  const auto pool = catalog.scripts(catalog.challenge(chosen).sentence_pool);
  if (!pool.empty()) {
    std::vector<const SentenceScript*> fresh;
    for (const auto& script : pool) {
      if (!context.used_scripts.contains(script.text)) fresh.push_back(&script);
    }
    if (fresh.empty()) {
      for (const auto& script : pool) fresh.push_back(&script);
    }
    request.script = *fresh[rng.uniform_index(fresh.size())];
  }
  request.nonce = rng.hex_token(16);
  return request;
}

}  // namespace pitch::catalog
