#include "georef/relation.hpp"

#include "georef/errors.hpp"
#include "georef/text.hpp"

namespace georef {

namespace detail {
extern const std::string_view kDefaultRelationSynonyms;
}

RelationFamily family_of(RelationKind kind) noexcept {
  const auto k = static_cast<int>(kind);
  if (k <= static_cast<int>(RelationKind::south_west_of)) return RelationFamily::cardinal;
  if (kind == RelationKind::near) return RelationFamily::qualitative_distance;
  if (k <= static_cast<int>(RelationKind::right_of)) return RelationFamily::relative_direction;
  return RelationFamily::topological;
}

std::string_view family_name(RelationFamily family) noexcept {
  switch (family) {
    case RelationFamily::cardinal: return "cardinal";
    case RelationFamily::qualitative_distance: return "qualitative_distance";
    case RelationFamily::relative_direction: return "relative_direction";
    case RelationFamily::topological: return "topological";
  }
  return "";
}

std::string_view canonical_label(RelationKind kind) noexcept {
  switch (kind) {
    case RelationKind::north_of: return "north_of";
    case RelationKind::south_of: return "south_of";
    case RelationKind::east_of: return "east_of";
    case RelationKind::west_of: return "west_of";
    case RelationKind::north_east_of: return "north_east_of";
    case RelationKind::south_east_of: return "south_east_of";
    case RelationKind::north_west_of: return "north_west_of";
    case RelationKind::south_west_of: return "south_west_of";
    case RelationKind::near: return "near";
    case RelationKind::in_front_of: return "in_front_of";
    case RelationKind::behind: return "behind";
    case RelationKind::left_of: return "left_of";
    case RelationKind::right_of: return "right_of";
    case RelationKind::inside: return "inside";
    case RelationKind::covered_by: return "covered_by";
    case RelationKind::overlap: return "overlap";
    case RelationKind::meet: return "meet";
    case RelationKind::disjoint: return "disjoint";
    case RelationKind::cover: return "cover";
    case RelationKind::contain: return "contain";
    case RelationKind::equal: return "equal";
  }
  return "";
}

std::optional<RelationKind> parse_canonical_label(std::string_view label) noexcept {
  for (auto kind : kAllRelationKinds) {
    if (canonical_label(kind) == label) return kind;
  }
  return std::nullopt;
}

bool is_composite_direction(RelationKind kind) noexcept {
  return kind == RelationKind::north_east_of || kind == RelationKind::south_east_of ||
         kind == RelationKind::north_west_of || kind == RelationKind::south_west_of;
}

RelationKind topological_converse(RelationKind kind) noexcept {
  switch (kind) {
    case RelationKind::inside: return RelationKind::contain;
    case RelationKind::contain: return RelationKind::inside;
    case RelationKind::covered_by: return RelationKind::cover;
    case RelationKind::cover: return RelationKind::covered_by;
    default: return kind;
  }
}

std::string RelationTable::phrase_key(std::string_view surface) {
  std::string raw(surface);
  for (char& c : raw) {
    if (c == '_' || c == '-') c = ' ';
  }
  return fold_name(raw);
}

RelationTable::RelationTable() {
  for (auto kind : kAllRelationKinds) add(canonical_label(kind), kind);
}

void RelationTable::add(std::string_view phrase, RelationKind kind) {
  auto key = phrase_key(phrase);
  if (key.empty()) throw ValidationError("empty relation phrase");
  phrases_.insert_or_assign(std::move(key), kind);
}

RelationTable RelationTable::from_tsv(std::string_view text) {
  RelationTable table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ValidationError("relation table line " + std::to_string(line_no) + ": expected phrase<TAB>relation");
    }
    const auto label = trim(line.substr(tab + 1));
    const auto kind = parse_canonical_label(label);
    if (!kind) {
      throw ValidationError("relation table line " + std::to_string(line_no) + ": unknown relation '" +
                            std::string(label) + "'");
    }
    table.add(trim(line.substr(0, tab)), *kind);
  }
  return table;
}

const RelationTable& RelationTable::defaults() {
  static const RelationTable table = from_tsv(detail::kDefaultRelationSynonyms);
  return table;
}

std::optional<RelationKind> RelationTable::find(std::string_view surface) const {
  const auto it = phrases_.find(phrase_key(surface));
  if (it == phrases_.end()) return std::nullopt;
  return it->second;
}

RelationKind RelationTable::normalize(std::string_view surface) const {
  if (auto kind = find(surface)) return *kind;
  throw UnknownRelation(std::string(trim(surface)));
}

RelationKind normalize_relation(std::string_view surface) { return RelationTable::defaults().normalize(surface); }

}  // namespace georef
