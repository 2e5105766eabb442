#include "confidence_cases.hpp"

namespace ddlpb::testing {

using mapper::GroundedRole;

namespace {

GroundedRole col(const char* c) { return {c, true}; }
GroundedRole txt(const char* t) { return {t, false}; }

}  // namespace

const std::vector<ConfidenceCase>& confidence_cases() {
  static const std::vector<ConfidenceCase> cases = {
      // table words: phone, request. UserID and AdID are foreign keys.
      {"PhoneRequests", "phone", "phone.01", {"ARG0", "ARG1"}, {{"ARG0", col("UserID")}, {"ARG1", col("AdID")}}, 1.0},
      {"PhoneRequests", "call", "call.02", {"ARG0", "ARG1"}, {{"ARG0", txt("caller")}, {"ARG1", txt("callee")}}, 0.25},
      {"PhoneRequests", "request", "request.01", {"ARG0", "ARG1", "ARG2"},
       {{"ARG0", col("UserID")}, {"ARG1", col("AdID")}, {"ARG2", txt("asked of")}}, 0.9},
      {"PhoneRequests", "ask", "ask.01", {"ARG0", "ARG1", "ARG2", "ARG3"},
       {{"ARG0", col("IPID")}, {"ARG1", txt("question")}}, 0.325},
      {"PhoneRequests", "ask", "ask.02", {"ARG0", "ARG1", "ARG2", "ARG3"},
       {{"ARG0", col("UserID")}, {"ARG1", txt("thing asked")}}, 0.525},
      {"PhoneRequests", "phone", "phone.01", {"ARGM-TMP"}, {{"ARGM-TMP", col("PhoneRequestDate")}}, 0.5},
      {"PhoneRequests", "phone", "phone.01", {"ARG0", "ARG1", "ARG2", "ARG3", "ARG4"},
       {{"ARG0", col("UserID")}, {"ARG1", col("AdID")}, {"ARG2", col("IPID")}, {"ARG3", col("PhoneRequestDate")},
        {"ARG4", txt("end point")}},
       0.94},
      {"PhoneRequests", "contact", "contact.01", {"ARG0", "ARG1", "ARG2", "ARGM-LOC"},
       {{"ARG0", txt("contacter")}, {"ARG1", txt("contacted")}, {"ARGM-LOC", col("UserID")}}, 0.45},
      {"PhoneRequests", " PHONE ", "phone.01", {"ARG0", "ARG1"}, {{"ARG0", txt("a")}, {"ARG1", txt("b")}}, 0.5},
      {"PhoneRequests", "call", "request.02", {"ARG0", "ARG1"}, {{"ARG0", col("IPID")}, {"ARG1", txt("b")}}, 0.65},
      {"PhoneRequests", "phone", "phone.01", {"ARG0"}, {{"ARG0", col("IPID")}}, 0.8},
      {"PhoneRequests", "ask", "ask.01", {"ARG0", "ARG1", "ARG2"},
       {{"ARG0", col("IPID")}, {"ARG1", col("PhoneRequestDate")}, {"ARG2", txt("c")}}, 0.45},
      {"PhoneRequests", "phone", "phone.01", {"ARG0", "ARGA"}, {{"ARG0", txt("a")}, {"ARGA", col("UserID")}}, 0.7},
      {"PhoneRequests", "call", "call.01", {"ARG0", "ARG1", "ARG2", "ARG3", "ARG4", "ARG5"},
       {{"ARG5", col("IPID")}}, 0.25},
      {"PhoneRequests", "request", "request.01", {"ARG0"}, {{"ARG0", txt("a")}, {"ARG1", col("AdID")}}, 0.7},
      // Users has no foreign keys; its only table word is "user".
      {"Users", "register", "register.01", {"ARG0", "ARG1"},
       {{"ARG0", col("UserID")}, {"ARG1", col("UserAgentID")}}, 0.55},
      // AdInfo words: ad, info. AdID references Ads.
      {"AdInfo", "ad", "advertise.01", {"ARG0", "ARG1"}, {{"ARG0", col("AdID")}, {"ARG1", txt("b")}}, 0.85},
      {"AdInfo", "advertise", "advertise.01", {"ARG0", "ARG1", "ARG2"},
       {{"ARG0", col("AdID")}, {"ARG1", col("Params")}, {"ARG2", col("Title")}}, 0.75},
      // SearchInfo words: search, info. UserID and LocationID are foreign keys.
      {"SearchInfo", "search", "search.01", {"ARG0", "ARG1", "ARG2", "ARG3"},
       {{"ARG0", col("UserID")}, {"ARG1", col("SearchQuery")}, {"ARG2", txt("c")}, {"ARG3", col("LocationID")}},
       0.925},
      {"SearchInfo", "find", "find.01", {"ARG0", "ARG1"}, {{"ARG0", txt("a")}, {"ARG1", col("SearchParams")}}, 0.4},
  };
  return cases;
}

mapper::ScoredCandidate candidate_for(const ConfidenceCase& c) {
  mapper::ScoredCandidate sc;
  sc.roleset = make_roleset(c.sense_id, c.roles);
  sc.provenance = c.provenance;
  for (const auto& [label, g] : c.grounding) sc.grounded_roles[label] = g;
  return sc;
}

frames::Roleset make_roleset(const std::string& sense_id, const std::vector<std::string>& labels) {
  frames::Roleset r;
  r.sense_id = sense_id;
  r.lemma = sense_id.substr(0, sense_id.find('.'));
  r.definition = "test sense";
  for (const auto& l : labels) r.roles.push_back({l, "role " + l});
  return r;
}

}  // namespace ddlpb::testing
