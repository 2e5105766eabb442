#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ddlpb/ddl.hpp"
#include "ddlpb/frames.hpp"
#include "ddlpb/lexicon.hpp"
#include "ddlpb/mapping.hpp"

namespace ddlpb::mapper {

// Produces candidate event lemmas for a table. This is the seam where a
// model-backed implementation plugs in; the pipeline only relies on the
// contract below.
//
// Contract: at most num_verbs lemmas, each lowercase, non-empty and
// distinct, most promising first. The pipeline normalizes and truncates the
// result anyway, so a sloppy provider degrades quality, not correctness.
// verbs() may be called concurrently for different tables.
class VerbProvider {
 public:
  virtual ~VerbProvider() = default;
  virtual std::vector<std::string> verbs(const ddl::TableContext& ctx, std::size_t num_verbs) const = 0;
};

// Deterministic provider: table-name words (split on case, digits and
// underscores, singularized) that are lemmas or aliases in the index, then
// lexicon expansions of every word, de-duplicated and truncated.
std::vector<std::string> baseline_verbs(const ddl::TableContext& ctx, std::size_t num_verbs,
                                        const frames::FrameIndex& index,
                                        const Lexicon& lexicon = Lexicon::builtin());

class BaselineVerbProvider final : public VerbProvider {
 public:
  explicit BaselineVerbProvider(frames::FrameIndex index, Lexicon lexicon = Lexicon::builtin())
      : index_(std::move(index)), lexicon_(std::move(lexicon)) {}

  std::vector<std::string> verbs(const ddl::TableContext& ctx, std::size_t num_verbs) const override {
    return baseline_verbs(ctx, num_verbs, index_, lexicon_);
  }

 private:
  frames::FrameIndex index_;
  Lexicon lexicon_;
};

// kappa = clamp01(lemma_match * w.lemma_match + grounded_core_fraction *
// w.grounding + fk_support * w.fk_support)
struct ConfidenceWeights {
  double lemma_match = 0.5;
  double grounding = 0.3;
  double fk_support = 0.2;
};

struct MapperConfig {
  std::size_t max_rolesets_per_table = 15;
  std::size_t num_verbs = 8;
  double min_confidence = 0.0;
  std::size_t max_results_per_lemma = frames::FrameIndex::kDefaultMaxResults;
  ConfidenceWeights weights;
};

// Throws ValidationError listing every out-of-range field.
void validate(const MapperConfig& cfg);

struct GroundedRole {
  std::string value;       // column name, or descriptive text
  bool is_column = false;  // value names a column of the table

  friend bool operator==(const GroundedRole&, const GroundedRole&) = default;
};

using Grounding = std::map<std::string, GroundedRole>;

// A roleset found through one of the provider's lemmas.
struct Candidate {
  frames::Roleset roleset;
  std::string provenance;
};

struct ScoredCandidate {
  frames::Roleset roleset;
  Grounding grounded_roles;
  std::string provenance;
  double raw_score = 0.0;   // weighted sum before clamping
  double confidence = 0.0;  // raw_score clamped to [0, 1]
};

struct ConfidenceFeatures {
  double lemma_match = 0.0;             // 1 for a table-name word, 0.5 otherwise
  double grounded_core_fraction = 0.0;  // of the roleset's ARG0-ARG4 roles
  double fk_support = 0.0;              // 1 when a grounded column is a foreign key
};

// Maps the roleset's roles onto the table's columns, each column used at
// most once:
//   ARG0     FK to a user/person/customer/account table, else any FK
//            column, else the primary key
//   ARG1     FK to a table that is neither agent- nor location-like, else
//            the first plain (non-key, non-temporal) column
//   ARG2..   columns sharing a word with the role description
//   ARGM-TMP first date/time column (added even if the roleset lacks it)
//   ARGM-LOC first FK to a location-like table (likewise)
// Roles left without a column carry their description. ARG0 and ARG1 are
// always present.
Grounding ground_arguments(const frames::Roleset& roleset, const ddl::TableContext& ctx);

std::map<std::string, std::string> role_values(const Grounding& grounding);

ConfidenceFeatures confidence_features(const ScoredCandidate& candidate, const ddl::TableContext& ctx);
double raw_score(const ConfidenceFeatures& f, const ConfidenceWeights& w);
double estimate_confidence(const ScoredCandidate& candidate, const ddl::TableContext& ctx,
                           const ConfidenceWeights& w = {});

// Grounds and scores every candidate. Candidates sharing a sense_id collapse
// into the highest scoring one (the earliest on ties). Output keeps
// first-seen order.
std::vector<ScoredCandidate> rank_rolesets(const std::vector<Candidate>& candidates, const ddl::TableContext& ctx,
                                           const ConfidenceWeights& w = {});

// Filters by min_confidence, orders by confidence then sense_id and keeps
// the top max_rolesets_per_table.
mapping::TableMappingOutput select_mappings(std::vector<ScoredCandidate> scored, const ddl::TableContext& ctx,
                                            const MapperConfig& cfg);

// verbs -> lemma search -> sense lookup -> rank -> select -> write
// {output_dir}/{db_name}/{table}.json atomically. Returns what was written.
// Throws IoError when the file cannot be written.
mapping::TableMappingOutput map_table(const ddl::TableContext& ctx, const frames::FrameIndex& index,
                                      const VerbProvider& verbs, const MapperConfig& cfg,
                                      const std::filesystem::path& output_dir, std::string_view db_name);

}  // namespace ddlpb::mapper
