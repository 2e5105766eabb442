#include "ddlpb/lexicon.hpp"

#include <json.hpp>

#include "ddlpb/atomic_file.hpp"
#include "ddlpb/error.hpp"
#include "ddlpb/text.hpp"

namespace ddlpb::mapper {

Lexicon::Lexicon(Entries entries) {
  for (auto& [word, verbs] : entries) {
    auto& dst = entries_[text::normalize_key(word)];
    for (auto& v : verbs) dst.push_back(text::normalize_key(v));
  }
}

const Lexicon& Lexicon::builtin() {
  // Keys are singular table-name words; values are ordered from the most to
  // the least typical event for such a table.
  static const Lexicon lex(Entries{
      {"account", {"open", "register", "close"}},
      {"ad", {"advertise", "post", "sell", "view", "click"}},
      {"address", {"live", "reside", "ship"}},
      {"booking", {"book", "reserve", "cancel"}},
      {"cart", {"add", "buy", "purchase"}},
      {"category", {"categorize", "classify", "group"}},
      {"click", {"click", "view"}},
      {"comment", {"comment", "post", "reply"}},
      {"customer", {"buy", "purchase", "register"}},
      {"employee", {"employ", "hire", "work"}},
      {"event", {"happen", "attend", "organize"}},
      {"info", {"describe", "specify"}},
      {"invoice", {"bill", "pay", "charge"}},
      {"item", {"sell", "list", "offer", "display"}},
      {"location", {"locate", "live", "situate"}},
      {"message", {"message", "send", "receive"}},
      {"order", {"order", "purchase", "request", "fulfill", "cancel", "return"}},
      {"payment", {"pay", "charge", "refund"}},
      {"phone", {"call", "contact"}},
      {"post", {"post", "publish", "write"}},
      {"product", {"sell", "produce", "offer"}},
      {"purchase", {"purchase", "buy", "pay"}},
      {"rating", {"rate", "review"}},
      {"request", {"request", "ask", "demand"}},
      {"review", {"review", "rate", "recommend"}},
      {"search", {"search", "query", "find", "look"}},
      {"session", {"visit", "view"}},
      {"shipment", {"ship", "deliver", "send"}},
      {"subscription", {"subscribe", "renew", "cancel"}},
      {"transaction", {"transact", "pay", "transfer"}},
      {"user", {"register", "use", "visit"}},
      {"visit", {"visit", "view"}},
      {"watch", {"sell", "wear", "buy"}},
  });
  return lex;
}

Lexicon Lexicon::from_json_file(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError(path.string() + ": lexicon must be a JSON object");
  Entries entries;
  for (const auto& [word, verbs] : doc.items()) {
    if (!verbs.is_array()) throw ParseError(path.string() + ": entry \"" + word + "\" must be an array");
    for (const auto& v : verbs) {
      if (!v.is_string()) throw ParseError(path.string() + ": entry \"" + word + "\" must hold strings");
      entries[word].push_back(v.get<std::string>());
    }
  }
  return Lexicon(std::move(entries));
}

const std::vector<std::string>& Lexicon::expand(std::string_view word) const {
  static const std::vector<std::string> kNone;
  auto it = entries_.find(word);
  return it == entries_.end() ? kNone : it->second;
}

}  // namespace ddlpb::mapper
