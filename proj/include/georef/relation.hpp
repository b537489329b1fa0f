#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace georef {

enum class RelationFamily : std::uint8_t { cardinal, qualitative_distance, relative_direction, topological };

enum class RelationKind : std::uint8_t {
  // cardinal direction
  north_of,
  south_of,
  east_of,
  west_of,
  north_east_of,
  south_east_of,
  north_west_of,
  south_west_of,
  // qualitative distance
  near,
  // relative direction
  in_front_of,
  behind,
  left_of,
  right_of,
  // topological
  inside,
  covered_by,
  overlap,
  meet,
  disjoint,
  cover,
  contain,
  equal,
};

inline constexpr std::array<RelationKind, 21> kAllRelationKinds = {
    RelationKind::north_of,      RelationKind::south_of,      RelationKind::east_of,
    RelationKind::west_of,       RelationKind::north_east_of, RelationKind::south_east_of,
    RelationKind::north_west_of, RelationKind::south_west_of, RelationKind::near,
    RelationKind::in_front_of,   RelationKind::behind,        RelationKind::left_of,
    RelationKind::right_of,      RelationKind::inside,        RelationKind::covered_by,
    RelationKind::overlap,       RelationKind::meet,          RelationKind::disjoint,
    RelationKind::cover,         RelationKind::contain,       RelationKind::equal,
};

RelationFamily family_of(RelationKind kind) noexcept;
std::string_view family_name(RelationFamily family) noexcept;

/// Snake-case label, e.g. "north_east_of".
std::string_view canonical_label(RelationKind kind) noexcept;
std::optional<RelationKind> parse_canonical_label(std::string_view label) noexcept;

/// True for the four compound directions (north_east_of etc.).
bool is_composite_direction(RelationKind kind) noexcept;

/// Converse under the topological calculus (inside <-> contain, covered_by <-> cover,
/// symmetric relations map to themselves). Non-topological kinds are returned unchanged.
RelationKind topological_converse(RelationKind kind) noexcept;

/// Phrase -> relation lookup used to normalize surface relation strings.
class RelationTable {
 public:
  /// Table with only the 21 canonical labels.
  RelationTable();

  /// Shipped table (data/relation_synonyms.tsv).
  static const RelationTable& defaults();

  /// Lines `phrase<TAB>canonical_label`; '#' starts a comment. Throws ValidationError.
  static RelationTable from_tsv(std::string_view text);

  void add(std::string_view phrase, RelationKind kind);

  std::optional<RelationKind> find(std::string_view surface) const;

  /// Throws UnknownRelation when the phrase is absent.
  RelationKind normalize(std::string_view surface) const;

  std::size_t size() const noexcept { return phrases_.size(); }
  const std::map<std::string, RelationKind, std::less<>>& phrases() const noexcept { return phrases_; }

  static std::string phrase_key(std::string_view surface);

 private:
  std::map<std::string, RelationKind, std::less<>> phrases_;
};

/// Normalizes with the shipped table.
RelationKind normalize_relation(std::string_view surface);

}  // namespace georef
