#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace ddlpb::frames {

// A numbered (ARG0..ARG5, ARGA) or modifier (ARGM-TMP, ...) argument.
struct Role {
  std::string label;
  std::string description;

  friend bool operator==(const Role&, const Role&) = default;
};

struct ArgumentSpan {
  std::string label;
  std::string text;

  friend bool operator==(const ArgumentSpan&, const ArgumentSpan&) = default;
};

struct FrameExample {
  std::string name;
  std::string text;
  std::vector<ArgumentSpan> argument_spans;

  friend bool operator==(const FrameExample&, const FrameExample&) = default;
};

struct LexLink {
  std::string resource;    // "VerbNet", "FrameNet", ...
  std::string identifier;  // class or frame name in that resource

  friend bool operator==(const LexLink&, const LexLink&) = default;
};

// One predicate sense, e.g. order.02 "request to be delivered".
struct Roleset {
  std::string sense_id;
  std::string lemma;
  std::string definition;
  std::vector<std::string> aliases;
  std::vector<Role> roles;
  std::vector<FrameExample> examples;
  std::vector<LexLink> lexlinks;

  const Role* find_role(std::string_view label) const;

  friend bool operator==(const Roleset&, const Roleset&) = default;
};

// What lemma search returns for each hit.
struct RolesetSummary {
  std::string sense_id;
  std::string definition;
  std::vector<Role> roles;

  friend bool operator==(const RolesetSummary&, const RolesetSummary&) = default;
};

struct LoadReport {
  std::size_t files_seen = 0;
  std::size_t files_parsed = 0;
  std::vector<std::string> failed_files;  // "name: reason"
  std::vector<std::string> warnings;
};

// True when label is ARG0-ARG9, ARGA or ARGM-<uppercase letters>.
bool is_valid_role_label(std::string_view label);

// Parses one frame file's XML text. Accepts the v3.x layout (alias lists,
// <propbank> example blocks, <lexlink> elements) and the older one (vncls
// attributes, <arg n=".."> example children). Rolesets that violate the
// Roleset invariants are dropped with a warning. Throws ParseError when the
// document is not well-formed XML or contains no <frameset>.
std::vector<Roleset> parse_frame_file(std::string_view xml, std::string_view file_name,
                                      std::vector<std::string>* warnings = nullptr);

// Immutable roleset corpus with a lemma/alias inverted index. Cheap to copy
// (shared state) and safe to query from any number of threads.
class FrameIndex {
 public:
  static constexpr std::size_t kDefaultMaxResults = 10;

  FrameIndex();

  // Loads every *.xml file in corpus_dir (or corpus_dir/frames when that
  // subdirectory exists, matching a checkout of the frames repository).
  // Files that fail to parse are listed in the report and skipped. Throws
  // LoadError when the directory is missing or nothing could be parsed.
  static FrameIndex load(const std::filesystem::path& corpus_dir, LoadReport* report = nullptr);

  // Builds an index from in-memory rolesets. Later duplicates of a sense_id
  // are dropped.
  static FrameIndex from_rolesets(std::vector<Roleset> rolesets);

  // Rolesets whose lemma or an alias equals normalize_key(lemma), sense_id
  // ascending, at most max_results entries. Unknown lemmas yield {}.
  std::vector<RolesetSummary> search_by_lemma(std::string_view lemma,
                                              std::size_t max_results = kDefaultMaxResults) const;

  // Full roleset; examples cleared when include_examples is false. Throws
  // NotFoundError for unknown identifiers.
  Roleset search_by_sense_id(std::string_view sense_id, bool include_examples = true) const;

  const Roleset* find(std::string_view sense_id) const;
  bool contains_lemma(std::string_view lemma) const;

  std::size_t size() const;
  std::size_t lemma_count() const;

  // All rolesets, sense_id ascending.
  const std::vector<Roleset>& rolesets() const;

  // Index keys, ascending.
  std::vector<std::string> index_keys() const;

  // Sense ids stored under one normalized key (empty when absent).
  const std::vector<std::string>& sense_ids_for_key(std::string_view key) const;

 private:
  struct State;
  explicit FrameIndex(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;
};

nlohmann::ordered_json to_json(const RolesetSummary& summary);
nlohmann::ordered_json to_json(const Roleset& roleset);
nlohmann::ordered_json to_json(const LoadReport& report);

}  // namespace ddlpb::frames
