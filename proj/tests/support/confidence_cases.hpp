#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddlpb/mapper.hpp"

namespace ddlpb::testing {

// One hand-worked confidence case. Expected values were computed on paper
// from the weights 0.5 / 0.3 / 0.2 and the listed features, against the
// rel-avito tables.
struct ConfidenceCase {
  const char* table;
  const char* provenance;
  const char* sense_id;
  std::vector<std::string> roles;
  std::vector<std::pair<std::string, mapper::GroundedRole>> grounding;
  double expected;
};

const std::vector<ConfidenceCase>& confidence_cases();

// Roleset with the given role labels; descriptions are "role <label>".
frames::Roleset make_roleset(const std::string& sense_id, const std::vector<std::string>& labels);

mapper::ScoredCandidate candidate_for(const ConfidenceCase& c);

}  // namespace ddlpb::testing
