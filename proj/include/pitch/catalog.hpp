#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pitch/common.hpp"

namespace pitch::catalog {

enum class Category {
  NoChallenge,
  VocalDistortion,
  Waveform,
  LanguageArticulation,
  ToneOfVoice,
  Noise,
  Playback,
};

enum class SentencePool { General, Questions, Foreign, NonVerbal };

std::string_view to_string(Category category);
std::string_view to_string(SentencePool pool);
SentencePool parse_pool(std::string_view text);

struct ChallengeSpec {
  int id = 0;
  std::string name;
  Category category = Category::NoChallenge;
  bool qualified = false;
  bool desktop_only = false;
  SentencePool sentence_pool = SentencePool::General;
  int usability_rank = 1;
  std::string instruction;

  bool operator==(const ChallengeSpec&) const = default;
};

struct SentenceScript {
  SentencePool pool = SentencePool::General;
  int index = 0;
  std::string text;
  /// Source language for the foreign pool, empty otherwise.
  std::string language;

  bool operator==(const SentenceScript&) const = default;
};

struct ChallengeRequest {
  int challenge_id = 0;
  std::optional<SentenceScript> script;
  Timestamp issued_at = 0;
  std::string nonce;

  bool operator==(const ChallengeRequest&) const = default;
};

inline constexpr int kChallengeCount = 21;
inline constexpr int kNoChallenge = 0;
inline constexpr int kForeignWords = 12;
inline constexpr int kQuestion = 15;
inline constexpr int kCoughWhistle = 16;

/// Immutable challenge taxonomy plus the sentence pools used for
/// randomized scripts. Construction validates every structural invariant
/// and throws ConfigError on violation.
class Catalog {
 public:
  /// Parses the line-delimited catalog format (see docs/catalog_format.md).
  static Catalog parse(std::string_view jsonl);

  /// The catalog compiled into the binary from data/catalog.jsonl.
  static const Catalog& embedded();

  int version() const { return version_; }
  const std::vector<ChallengeSpec>& challenges() const { return challenges_; }
  const ChallengeSpec& challenge(int id) const;
  std::span<const SentenceScript> scripts(SentencePool pool) const;

  /// Ids of qualified challenges, ascending.
  std::vector<int> qualified_ids() const;

 private:
  Catalog() = default;
  void validate() const;

  int version_ = 0;
  std::vector<ChallengeSpec> challenges_;
  std::vector<SentenceScript> general_;
  std::vector<SentenceScript> questions_;
  std::vector<SentenceScript> foreign_;
};

/// Returns the 21 entries of the embedded catalog.
const std::vector<ChallengeSpec>& load_catalog();

struct IssuePolicy {
  enum class Kind { UsabilityOrdered, RandomQualified, Fixed };

  Kind kind = Kind::UsabilityOrdered;
  int fixed_id = 0;

  static IssuePolicy usability_ordered() { return {Kind::UsabilityOrdered, 0}; }
  static IssuePolicy random_qualified() { return {Kind::RandomQualified, 0}; }
  static IssuePolicy fixed(int id) { return {Kind::Fixed, id}; }
};

struct IssueContext {
  std::set<int> already_issued;
  /// Script texts already read in this session; issuance avoids them.
  std::set<std::string> used_scripts;
  Timestamp now = 0;
};

/// Challenges a platform may ever be issued (qualified, platform-compatible).
std::vector<int> eligible_challenges(const Catalog& catalog, Platform platform,
                                     const std::set<int>& already_issued);

/// Picks a challenge and a script. Pure function of its arguments.
/// Throws ExhaustedChallenges when nothing eligible remains and
/// InvalidArgument for a Fixed policy naming an unissuable challenge.
ChallengeRequest issue_challenge(const Catalog& catalog, IssuePolicy policy, Platform platform,
                                 std::uint64_t rng_seed, const IssueContext& context = {});

}  // namespace pitch::catalog
