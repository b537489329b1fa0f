#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "georef/gazetteer.hpp"
#include "georef/graph.hpp"
#include "georef/spatial.hpp"

namespace georef {

/// Symmetric word-pair similarities plus abbreviation pairs (similarity 1).
class SemanticDictionary {
 public:
  /// Shipped dictionary (data/semantic_dictionary.tsv).
  static const SemanticDictionary& defaults();

  /// Lines `token<TAB>token<TAB>score` or `abbr<TAB>short<TAB>full`; '#' comments.
  static SemanticDictionary from_tsv(std::string_view text);
  static SemanticDictionary from_file(const std::filesystem::path& path);

  void add_similarity(std::string_view a, std::string_view b, double score);
  void add_abbreviation(std::string_view short_form, std::string_view full_form);

  bool is_abbreviation(std::string_view a, std::string_view b) const;
  /// Stored score; 1 for identical tokens; nullopt when the pair is unknown.
  std::optional<double> similarity(std::string_view a, std::string_view b) const;

  std::size_t size() const noexcept { return pairs_.size() + abbreviations_.size(); }

 private:
  using Key = std::pair<std::string, std::string>;
  static Key key(std::string_view a, std::string_view b);

  std::map<Key, double, std::less<>> pairs_;
  std::set<Key, std::less<>> abbreviations_;
};

struct Token {
  std::string text;
  /// The token was written with a trailing period ("Sq.").
  bool abbreviation_hint = false;

  bool operator==(const Token&) const = default;
};

/// Folds the text, splits on whitespace and punctuation (apostrophes inside a word are kept),
/// strips trailing periods into `abbreviation_hint`.
std::vector<Token> tokenize(std::string_view text);

/// Reference tokens without the connectives {of, the, a, an, and}; unchanged if nothing would remain.
std::vector<Token> content_tokens(std::string_view reference);

/// Unrestricted Damerau-Levenshtein distance over code points.
std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b);

/// Edit-distance similarity 1 - DL / max length.
double edit_similarity(std::string_view a, std::string_view b);

double token_similarity(const Token& a, const Token& b, const SemanticDictionary& dict);
double token_similarity(std::string_view a, std::string_view b, const SemanticDictionary& dict);

/// Mean over reference tokens of the best token match among name and tag-value tokens.
/// Throws Error when the entry name is empty.
double reference_similarity(std::string_view reference, const GazetteerEntry& entry, const SemanticDictionary& dict);

struct MatchWeights {
  double reference = 0.7;
  double spatial = 0.3;

  /// Rescales two non-negative weights to sum to one. Throws ValidationError.
  static MatchWeights normalized(double reference, double spatial);
};

double overall_similarity(double reference_sim, double spatial_sim, const MatchWeights& w);

struct ScoreRow {
  std::string reference;
  std::string entry_id;
  double reference_sim = 0.0;
  double spatial_sim = 0.0;
  double overall = 0.0;
};

enum class MatchStatus { matched, unconstrained, no_candidates };

struct MatchResult {
  std::string place_id;
  MatchStatus status = MatchStatus::unconstrained;
  std::optional<std::string> entry_id;
  std::string best_reference;
  double score = 0.0;
  double reference_sim = 0.0;
  double spatial_sim = 0.0;
  Alr alr;
  std::vector<SearchSpace> spaces;
  std::size_t candidate_count = 0;
  std::vector<ScoreRow> table;
  std::vector<std::string> notes;
};

/// Derives the ALR from `constraints`, retrieves every entry intersecting it and keeps the
/// (reference, entry) pair with the highest overall similarity. Ties prefer the higher
/// reference similarity, then the smaller entry id.
MatchResult best_match(const PlaceNode& place, std::span<const Constraint> constraints, const Gazetteer& gazetteer,
                       const SpatialConfig& spatial, const MatchWeights& weights, const SemanticDictionary& dict);

}  // namespace georef
