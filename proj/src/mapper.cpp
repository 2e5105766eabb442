#include "ddlpb/mapper.hpp"

#include <algorithm>
#include <set>

#include "ddlpb/atomic_file.hpp"
#include "ddlpb/error.hpp"
#include "ddlpb/log.hpp"
#include "ddlpb/text.hpp"

namespace ddlpb::mapper {

using ddl::Column;
using ddl::TableContext;
using frames::Roleset;

namespace {

const std::set<std::string, std::less<>> kAgentWords = {"user", "person", "customer", "account"};
const std::set<std::string, std::less<>> kLocationWords = {"location", "place", "address", "city",
                                                           "region", "country", "site"};
const std::set<std::string, std::less<>> kTemporalWords = {"date", "time", "timestamp", "at"};
const std::set<std::string, std::less<>> kStopWords = {"the", "and", "for", "from", "with", "thing",
                                                       "entity", "one", "who", "what", "being"};

// Fallback text for ARG0/ARG1 when the roleset itself does not define them.
std::string generic_role_text(std::string_view label) {
  if (label == "ARG0") return "agent or causer";
  if (label == "ARG1") return "patient or theme";
  if (label == "ARG2") return "instrument, benefactive or attribute";
  if (label == "ARG3") return "starting point or source";
  if (label == "ARG4") return "end point";
  return std::string(label);
}

bool has_any(const std::vector<std::string>& words, const std::set<std::string, std::less<>>& set) {
  return std::any_of(words.begin(), words.end(), [&](const std::string& w) { return set.count(w) != 0; });
}

bool is_core(std::string_view label) { return label.size() == 4 && label[3] >= '0' && label[3] <= '4'; }

std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  for (auto& w : text::name_tokens(s)) {
    if (w.size() >= 3 && !kStopWords.count(w)) out.push_back(std::move(w));
  }
  return out;
}

class Grounder {
 public:
  Grounder(const Roleset& roleset, const TableContext& ctx) : roleset_(roleset), ctx_(ctx) {}

  Grounding run() {
    ground_core("ARG0", [&]() -> const Column* {
      if (auto* c = first([&](const Column& c) { return fk_target_is(c, kAgentWords); })) return c;
      if (auto* c = first([&](const Column& c) { return is_fk(c); })) return c;
      return first([&](const Column& c) { return ctx_.table.is_primary_key(c.name); });
    });
    ground_core("ARG1", [&]() -> const Column* {
      if (auto* c = first([&](const Column& c) {
            return is_fk(c) && !fk_target_is(c, kAgentWords) && !fk_target_is(c, kLocationWords);
          })) {
        return c;
      }
      return first([&](const Column& c) { return !is_key(c) && !is_temporal(c); });
    });

    for (const auto& role : roleset_.roles) {
      if (role.label == "ARG0" || role.label == "ARG1" || role.label.rfind("ARGM-", 0) == 0) continue;
      assign_by_description(role);
    }

    if (auto* c = first([&](const Column& c) { return is_temporal(c); })) {
      assign("ARGM-TMP", *c);
    } else if (auto* r = roleset_.find_role("ARGM-TMP")) {
      out_["ARGM-TMP"] = {r->description, false};
    }
    if (auto* c = first([&](const Column& c) { return fk_target_is(c, kLocationWords); })) {
      assign("ARGM-LOC", *c);
    } else if (auto* r = roleset_.find_role("ARGM-LOC")) {
      out_["ARGM-LOC"] = {r->description, false};
    }

    for (const auto& role : roleset_.roles) {
      if (role.label.rfind("ARGM-", 0) != 0 || out_.count(role.label)) continue;
      assign_by_description(role);
    }
    return std::move(out_);
  }

 private:
  template <typename Pred>
  const Column* first(Pred pred) const {
    for (const auto& c : ctx_.table.columns) {
      if (!used_.count(text::to_lower(c.name)) && pred(c)) return &c;
    }
    return nullptr;
  }

  const ddl::ForeignKey* fk_of(const Column& c) const {
    for (const auto& fk : ctx_.outbound_refs)
      for (const auto& local : fk.local_columns)
        if (text::iequals(local, c.name)) return &fk;
    return nullptr;
  }
  bool is_fk(const Column& c) const { return fk_of(c) != nullptr; }
  bool is_key(const Column& c) const { return is_fk(c) || ctx_.table.is_primary_key(c.name); }
  bool fk_target_is(const Column& c, const std::set<std::string, std::less<>>& words) const {
    auto* fk = fk_of(c);
    return fk && has_any(text::name_tokens(fk->referenced_table), words);
  }
  static bool is_temporal(const Column& c) {
    auto type = text::to_upper(c.declared_type);
    if (type.find("DATE") != std::string::npos || type.find("TIME") != std::string::npos) return true;
    auto words = text::split_identifier(c.name);
    return !words.empty() && kTemporalWords.count(words.back()) != 0;
  }

  void assign(const std::string& label, const Column& c) {
    used_.insert(text::to_lower(c.name));
    out_[label] = {c.name, true};
  }

  template <typename Pick>
  void ground_core(const std::string& label, Pick pick) {
    const auto* role = roleset_.find_role(label);
    if (!role) {
      out_[label] = {generic_role_text(label), false};
      return;
    }
    if (const Column* c = pick()) {
      assign(label, *c);
    } else {
      out_[label] = {role->description.empty() ? generic_role_text(label) : role->description, false};
    }
  }

  void assign_by_description(const frames::Role& role) {
    auto want = content_words(role.description);
    if (auto* c = first([&](const Column& c) {
          auto have = text::name_tokens(c.name);
          return std::any_of(want.begin(), want.end(), [&](const std::string& w) {
            return std::find(have.begin(), have.end(), w) != have.end();
          });
        })) {
      assign(role.label, *c);
    } else {
      out_[role.label] = {role.description.empty() ? generic_role_text(role.label) : role.description, false};
    }
  }

  const Roleset& roleset_;
  const TableContext& ctx_;
  std::set<std::string> used_;
  Grounding out_;
};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void validate(const MapperConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.max_rolesets_per_table < 1) v.push_back("max_rolesets_per_table must be >= 1");
  if (cfg.num_verbs < 1) v.push_back("num_verbs must be >= 1");
  if (cfg.max_results_per_lemma < 1) v.push_back("max_results_per_lemma must be >= 1");
  if (!(cfg.min_confidence >= 0.0 && cfg.min_confidence <= 1.0)) v.push_back("min_confidence must be within [0, 1]");
  if (!v.empty()) throw ValidationError(std::move(v));
}

std::vector<std::string> baseline_verbs(const TableContext& ctx, std::size_t num_verbs,
                                        const frames::FrameIndex& index, const Lexicon& lexicon) {
  std::vector<std::string> out;
  auto add = [&](const std::string& lemma) {
    auto key = text::normalize_key(lemma);
    if (!key.empty() && std::find(out.begin(), out.end(), key) == out.end()) out.push_back(key);
  };
  const auto words = text::name_tokens(ctx.table.name);
  for (const auto& w : words) {
    if (index.contains_lemma(w)) add(w);
  }
  for (const auto& w : words) {
    for (const auto& v : lexicon.expand(w)) add(v);
  }
  if (out.size() > num_verbs) out.resize(num_verbs);
  return out;
}

Grounding ground_arguments(const Roleset& roleset, const TableContext& ctx) { return Grounder(roleset, ctx).run(); }

std::map<std::string, std::string> role_values(const Grounding& grounding) {
  std::map<std::string, std::string> out;
  for (const auto& [label, g] : grounding) out.emplace(label, g.value);
  return out;
}

ConfidenceFeatures confidence_features(const ScoredCandidate& c, const TableContext& ctx) {
  ConfidenceFeatures f;
  const auto words = text::name_tokens(ctx.table.name);
  auto is_table_word = [&](std::string_view s) {
    return std::find(words.begin(), words.end(), text::normalize_key(s)) != words.end();
  };
  f.lemma_match = (is_table_word(c.provenance) || is_table_word(c.roleset.lemma)) ? 1.0 : 0.5;

  std::size_t core = 0;
  std::size_t grounded = 0;
  for (const auto& role : c.roleset.roles) {
    if (!is_core(role.label)) continue;
    ++core;
    auto it = c.grounded_roles.find(role.label);
    if (it != c.grounded_roles.end() && it->second.is_column) ++grounded;
  }
  f.grounded_core_fraction = core == 0 ? 0.0 : static_cast<double>(grounded) / static_cast<double>(core);

  for (const auto& [_, g] : c.grounded_roles) {
    if (!g.is_column) continue;
    for (const auto& fk : ctx.outbound_refs) {
      for (const auto& local : fk.local_columns) {
        if (text::iequals(local, g.value)) f.fk_support = 1.0;
      }
    }
  }
  return f;
}

double raw_score(const ConfidenceFeatures& f, const ConfidenceWeights& w) {
  return w.lemma_match * f.lemma_match + w.grounding * f.grounded_core_fraction + w.fk_support * f.fk_support;
}

double estimate_confidence(const ScoredCandidate& c, const TableContext& ctx, const ConfidenceWeights& w) {
  return clamp01(raw_score(confidence_features(c, ctx), w));
}

std::vector<ScoredCandidate> rank_rolesets(const std::vector<Candidate>& candidates, const TableContext& ctx,
                                           const ConfidenceWeights& w) {
  std::vector<ScoredCandidate> out;
  std::map<std::string, std::size_t> slot;
  for (const auto& cand : candidates) {
    ScoredCandidate sc;
    sc.roleset = cand.roleset;
    sc.provenance = cand.provenance;
    sc.grounded_roles = ground_arguments(cand.roleset, ctx);
    sc.raw_score = raw_score(confidence_features(sc, ctx), w);
    sc.confidence = clamp01(sc.raw_score);

    auto [it, fresh] = slot.emplace(sc.roleset.sense_id, out.size());
    if (fresh) {
      out.push_back(std::move(sc));
    } else if (sc.raw_score > out[it->second].raw_score) {
      out[it->second] = std::move(sc);
    }
  }
  return out;
}

mapping::TableMappingOutput select_mappings(std::vector<ScoredCandidate> scored, const TableContext& ctx,
                                            const MapperConfig& cfg) {
  std::erase_if(scored, [&](const ScoredCandidate& c) { return c.confidence < cfg.min_confidence; });
  std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.roleset.sense_id < b.roleset.sense_id;
  });
  if (scored.size() > cfg.max_rolesets_per_table) scored.resize(cfg.max_rolesets_per_table);

  mapping::TableMappingOutput out;
  out.table_name = ctx.table.name;
  for (const auto& c : scored) {
    out.mappings.push_back(
        {c.roleset.sense_id, c.roleset.lemma, c.roleset.definition, role_values(c.grounded_roles), c.confidence});
  }
  return out;
}

mapping::TableMappingOutput map_table(const TableContext& ctx, const frames::FrameIndex& index,
                                      const VerbProvider& verbs, const MapperConfig& cfg,
                                      const std::filesystem::path& output_dir, std::string_view db_name) {
  validate(cfg);

  std::vector<std::string> lemmas;
  for (const auto& v : verbs.verbs(ctx, cfg.num_verbs)) {
    auto key = text::normalize_key(v);
    if (!key.empty() && std::find(lemmas.begin(), lemmas.end(), key) == lemmas.end()) lemmas.push_back(key);
  }
  if (lemmas.size() > cfg.num_verbs) lemmas.resize(cfg.num_verbs);

  std::vector<Candidate> candidates;
  for (const auto& lemma : lemmas) {
    for (const auto& hit : index.search_by_lemma(lemma, cfg.max_results_per_lemma)) {
      candidates.push_back({index.search_by_sense_id(hit.sense_id, false), lemma});
    }
  }

  auto out = select_mappings(rank_rolesets(candidates, ctx, cfg.weights), ctx, cfg);
  auto path = mapping::mapping_path(output_dir, db_name, ctx.table.name);
  write_file_atomic(path, mapping::serialize_mapping(out));
  logger().info("event=table_mapped table=\"{}\" verbs={} candidates={} mappings={} path=\"{}\"", ctx.table.name,
                lemmas.size(), candidates.size(), out.mappings.size(), path.string());
  return out;
}

}  // namespace ddlpb::mapper
