#include "georef/matching.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "georef/errors.hpp"
#include "georef/text.hpp"

namespace georef {

namespace detail {
extern const std::string_view kDefaultSemanticDictionary;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto tab = line.find('\t');
    out.push_back(trim(line.substr(0, tab)));
    if (tab == std::string_view::npos) break;
    line = line.substr(tab + 1);
  }
  return out;
}

std::string fold_token(std::string_view t) {
  auto toks = tokenize(t);
  if (toks.size() != 1) return fold_name(t);
  return toks.front().text;
}

bool is_word_char(char32_t c) {
  if (c >= 0x80) return true;
  return (c >= U'a' && c <= U'z') || (c >= U'0' && c <= U'9') || (c >= U'A' && c <= U'Z');
}

}  // namespace

SemanticDictionary::Key SemanticDictionary::key(std::string_view a, std::string_view b) {
  std::string x(a), y(b);
  if (y < x) std::swap(x, y);
  return {std::move(x), std::move(y)};
}

void SemanticDictionary::add_similarity(std::string_view a, std::string_view b, double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw ValidationError("dictionary score must lie in [0, 1]");
  pairs_.insert_or_assign(key(fold_token(a), fold_token(b)), score);
}

void SemanticDictionary::add_abbreviation(std::string_view short_form, std::string_view full_form) {
  abbreviations_.insert(key(fold_token(short_form), fold_token(full_form)));
}

bool SemanticDictionary::is_abbreviation(std::string_view a, std::string_view b) const {
  return abbreviations_.contains(key(a, b));
}

std::optional<double> SemanticDictionary::similarity(std::string_view a, std::string_view b) const {
  if (a == b) return 1.0;
  const auto it = pairs_.find(key(a, b));
  if (it == pairs_.end()) return std::nullopt;
  return it->second;
}

SemanticDictionary SemanticDictionary::from_tsv(std::string_view text) {
  SemanticDictionary dict;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto cols = split_tabs(line);
    const auto where = "dictionary line " + std::to_string(line_no);
    if (cols.size() != 3) throw ValidationError(where + ": expected three tab-separated columns");
    if (cols[0] == "abbr") {
      dict.add_abbreviation(cols[1], cols[2]);
      continue;
    }
    double score = 0.0;
    try {
      std::size_t used = 0;
      score = std::stod(std::string(cols[2]), &used);
      if (used != cols[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ValidationError(where + ": score is not a number");
    }
    dict.add_similarity(cols[0], cols[1], score);
  }
  return dict;
}

SemanticDictionary SemanticDictionary::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read dictionary '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_tsv(buf.str());
}

const SemanticDictionary& SemanticDictionary::defaults() {
  static const SemanticDictionary dict = from_tsv(detail::kDefaultSemanticDictionary);
  return dict;
}

std::vector<Token> tokenize(std::string_view text) {
  const auto cps = utf8_to_u32(fold_name(text));
  std::vector<Token> out;
  std::u32string current;
  const auto flush = [&](bool hint) {
    if (!current.empty()) out.push_back({u32_to_utf8(current), hint});
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (is_word_char(c)) {
      current.push_back(c);
    } else if (c == U'\'' && !current.empty() && i + 1 < cps.size() && is_word_char(cps[i + 1])) {
      current.push_back(c);
    } else {
      flush(c == U'.');
    }
  }
  flush(false);
  return out;
}

std::vector<Token> content_tokens(std::string_view reference) {
  static const std::set<std::string, std::less<>> stop = {"of", "the", "a", "an", "and"};
  auto tokens = tokenize(reference);
  std::vector<Token> kept;
  for (const auto& t : tokens) {
    if (!stop.contains(t.text)) kept.push_back(t);
  }
  return kept.empty() ? tokens : kept;
}

std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t inf = n + m;
  // (n + 2) x (m + 2) table, Lowrance-Wagner formulation.
  std::vector<std::size_t> d((n + 2) * (m + 2), 0);
  const auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 2) + j]; };
  at(0, 0) = inf;
  for (std::size_t i = 0; i <= n; ++i) {
    at(i + 1, 0) = inf;
    at(i + 1, 1) = i;
  }
  for (std::size_t j = 0; j <= m; ++j) {
    at(0, j + 1) = inf;
    at(1, j + 1) = j;
  }
  std::unordered_map<char32_t, std::size_t> last_row;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t last_col = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      const auto it = last_row.find(b[j - 1]);
      const std::size_t i1 = it == last_row.end() ? 0 : it->second;
      const std::size_t j1 = last_col;
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      if (cost == 0) last_col = j;
      at(i + 1, j + 1) = std::min({at(i, j) + cost, at(i + 1, j) + 1, at(i, j + 1) + 1,
                                   at(i1, j1) + (i - i1 - 1) + 1 + (j - j1 - 1)});
    }
    last_row[a[i - 1]] = i;
  }
  return at(n + 1, m + 1);
}

double edit_similarity(std::string_view a, std::string_view b) {
  const auto ua = utf8_to_u32(a);
  const auto ub = utf8_to_u32(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(damerau_levenshtein(ua, ub)) / static_cast<double>(longest);
}

double token_similarity(const Token& a, const Token& b, const SemanticDictionary& dict) {
  if (a.text == b.text) return 1.0;
  if (dict.is_abbreviation(a.text, b.text)) return 1.0;
  if (auto s = dict.similarity(a.text, b.text)) return *s;
  const auto prefix_of = [](const Token& shorter, const Token& longer) {
    return shorter.abbreviation_hint && shorter.text.size() >= 2 && longer.text.size() > shorter.text.size() &&
           longer.text.compare(0, shorter.text.size(), shorter.text) == 0;
  };
  if (prefix_of(a, b) || prefix_of(b, a)) return 1.0;
  return edit_similarity(a.text, b.text);
}

double token_similarity(std::string_view a, std::string_view b, const SemanticDictionary& dict) {
  const auto as_token = [](std::string_view s) {
    auto toks = tokenize(s);
    if (toks.size() == 1) return toks.front();
    return Token{fold_name(s), false};
  };
  return token_similarity(as_token(a), as_token(b), dict);
}

double reference_similarity(std::string_view reference, const GazetteerEntry& entry, const SemanticDictionary& dict) {
  if (trim(entry.name).empty()) throw Error("gazetteer entry '" + entry.id + "' has an empty name");
  const auto ref_tokens = content_tokens(reference);
  if (ref_tokens.empty()) return 0.0;
  auto pool = tokenize(entry.name);
  for (const auto& [k, v] : entry.tags) {
    auto more = tokenize(v);
    pool.insert(pool.end(), more.begin(), more.end());
  }
  double total = 0.0;
  for (const auto& rt : ref_tokens) {
    double best = 0.0;
    for (const auto& ct : pool) best = std::max(best, token_similarity(rt, ct, dict));
    total += best;
  }
  return total / static_cast<double>(ref_tokens.size());
}

MatchWeights MatchWeights::normalized(double reference, double spatial) {
  if (!(reference >= 0.0) || !(spatial >= 0.0)) throw ValidationError("similarity weights must be non-negative");
  const double sum = reference + spatial;
  if (!(sum > 0.0)) throw ValidationError("similarity weights must not both be zero");
  return {reference / sum, spatial / sum};
}

double overall_similarity(double reference_sim, double spatial_sim, const MatchWeights& w) {
  return w.reference * reference_sim + w.spatial * spatial_sim;
}

MatchResult best_match(const PlaceNode& place, std::span<const Constraint> constraints, const Gazetteer& gazetteer,
                       const SpatialConfig& spatial, const MatchWeights& weights, const SemanticDictionary& dict) {
  MatchResult out;
  out.place_id = place.id;
  if (constraints.empty()) {
    out.status = MatchStatus::unconstrained;
    return out;
  }

  const Box window = clipping_window(constraints, spatial);
  for (const auto& c : constraints) {
    try {
      out.spaces.push_back(search_space(c.kind, c.relatum, window, spatial));
    } catch (const NoSearchSpace& e) {
      out.notes.push_back(e.what());
    }
  }
  if (out.spaces.empty()) {
    out.alr.region = Region(Region::from_box(window).shape(), true);
    out.alr.low_confidence = true;
  } else {
    out.alr = derive_alr(out.spaces, window);
  }
  if (out.alr.low_confidence) out.notes.push_back("no constraining search space; ALR is the clipping window");
  for (auto i : out.alr.dropped) {
    out.notes.push_back("relaxed: dropped " + std::string(canonical_label(out.spaces[i].relation)) + " " +
                        out.spaces[i].relatum_id);
  }

  auto candidates = gazetteer.query_region(out.alr.region);
  std::erase_if(candidates, [&](const GazetteerEntry* e) {
    return std::any_of(constraints.begin(), constraints.end(),
                       [&](const Constraint& c) { return c.relatum.entry_id == e->id; });
  });
  out.candidate_count = candidates.size();
  if (candidates.empty()) {
    out.status = MatchStatus::no_candidates;
    return out;
  }

  out.status = MatchStatus::matched;
  bool have_best = false;
  for (const auto* entry : candidates) {
    const SpatialScore spat = spatial_similarity(entry->footprint, constraints, spatial);
    for (const auto& reference : place.references) {
      const double ref = reference_similarity(reference, *entry, dict);
      const double overall = overall_similarity(ref, spat.value, weights);
      out.table.push_back({reference, entry->id, ref, spat.value, overall});
      const bool better = !have_best || overall > out.score ||
                          (overall == out.score && (ref > out.reference_sim ||
                                                    (ref == out.reference_sim && entry->id < *out.entry_id)));
      if (better) {
        have_best = true;
        out.score = overall;
        out.reference_sim = ref;
        out.spatial_sim = spat.value;
        out.entry_id = entry->id;
        out.best_reference = reference;
      }
    }
  }
  return out;
}

}  // namespace georef
