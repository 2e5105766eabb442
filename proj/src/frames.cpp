#include "ddlpb/frames.hpp"

#include <expat.h>

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "ddlpb/atomic_file.hpp"
#include "ddlpb/error.hpp"
#include "ddlpb/log.hpp"
#include "ddlpb/text.hpp"

namespace fs = std::filesystem;

namespace ddlpb::frames {

const Role* Roleset::find_role(std::string_view label) const {
  for (const auto& r : roles)
    if (r.label == label) return &r;
  return nullptr;
}

bool is_valid_role_label(std::string_view label) {
  if (label.size() == 4 && label.substr(0, 3) == "ARG") {
    char c = label[3];
    return (c >= '0' && c <= '9') || c == 'A';
  }
  if (label.size() > 5 && label.substr(0, 5) == "ARGM-") {
    return std::all_of(label.begin() + 5, label.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
  }
  return false;
}

namespace {

// Role label from the frame-file attribute pair (n, f): n="0" -> ARG0,
// n="A" -> ARGA, n="M" f="LOC" -> ARGM-LOC.
std::string label_from_number(std::string_view n, std::string_view f) {
  auto num = text::trim(n);
  if (num.size() != 1) return {};
  char c = num[0];
  if (c >= '0' && c <= '9') return std::string("ARG") + c;
  if (c == 'A' || c == 'a') return "ARGA";
  if ((c == 'M' || c == 'm') && !text::trim(f).empty()) return "ARGM-" + text::to_upper(text::trim(f));
  return {};
}

// Example argument label from a v3.x `type` attribute ("ARG0", "ARGM-loc").
std::string label_from_type(std::string_view type) {
  auto t = text::trim(type);
  if (t.size() > 5 && text::iequals(t.substr(0, 5), "ARGM-")) return "ARGM-" + text::to_upper(t.substr(5));
  return text::to_upper(t);
}

class FrameFileParser {
 public:
  FrameFileParser(std::string_view file_name, std::vector<std::string>* warnings)
      : file_name_(file_name), warnings_(warnings) {}

  std::vector<Roleset> parse(std::string_view xml) {
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                        &XML_ParserFree);
    if (!parser) throw ParseError("cannot allocate XML parser");
    XML_SetUserData(parser.get(), this);
    XML_SetElementHandler(parser.get(), &on_start, &on_end);
    XML_SetCharacterDataHandler(parser.get(), &on_chars);

    if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
      auto offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get()));
      throw ParseError(std::string(file_name_) + ": " + XML_ErrorString(XML_GetErrorCode(parser.get())) +
                           " at line " + std::to_string(XML_GetCurrentLineNumber(parser.get())),
                       offset);
    }
    if (!saw_frameset_) throw ParseError(std::string(file_name_) + ": no <frameset> element");
    return std::move(out_);
  }

 private:
  using Attrs = std::map<std::string, std::string, std::less<>>;

  static Attrs attrs_of(const XML_Char** raw) {
    Attrs a;
    for (int i = 0; raw[i] != nullptr; i += 2) a.emplace(raw[i], raw[i + 1]);
    return a;
  }
  static std::string get(const Attrs& a, std::string_view key) {
    auto it = a.find(key);
    return it == a.end() ? std::string() : it->second;
  }

  static void on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
    static_cast<FrameFileParser*>(self)->start(name, attrs_of(attrs));
  }
  static void on_end(void* self, const XML_Char* name) { static_cast<FrameFileParser*>(self)->end(name); }
  static void on_chars(void* self, const XML_Char* s, int len) {
    auto* p = static_cast<FrameFileParser*>(self);
    if (p->collecting_) p->chars_.append(s, static_cast<std::size_t>(len));
  }

  void warn(std::string msg) {
    if (warnings_) warnings_->push_back(std::string(file_name_) + ": " + std::move(msg));
  }

  void begin_text() {
    collecting_ = true;
    chars_.clear();
  }
  std::string end_text() {
    collecting_ = false;
    return text::collapse_whitespace(chars_);
  }

  void start(std::string_view name, const Attrs& a) {
    if (name == "frameset") {
      saw_frameset_ = true;
    } else if (name == "predicate") {
      predicate_lemma_ = get(a, "lemma");
    } else if (name == "roleset") {
      roleset_.emplace();
      roleset_->sense_id = std::string(text::trim(get(a, "id")));
      roleset_->definition = text::collapse_whitespace(get(a, "name"));
      add_legacy_links(get(a, "vncls"), "VerbNet");
      add_legacy_links(get(a, "framnet"), "FrameNet");
    } else if (!roleset_) {
      return;
    } else if (name == "alias" && in_aliases_) {
      begin_text();
    } else if (name == "aliases") {
      in_aliases_ = true;
    } else if (name == "role" && !example_) {
      auto label = label_from_number(get(a, "n"), get(a, "f"));
      auto descr = text::collapse_whitespace(get(a, "descr"));
      if (!is_valid_role_label(label)) {
        warn(roleset_->sense_id + ": role with n=\"" + get(a, "n") + "\" f=\"" + get(a, "f") +
             "\" has no valid label, skipped");
      } else if (roleset_->find_role(label)) {
        warn(roleset_->sense_id + ": duplicate role " + label + ", skipped");
      } else {
        roleset_->roles.push_back({label, descr});
      }
    } else if (name == "lexlink") {
      add_link(get(a, "resource"), get(a, "class"));
    } else if (name == "example") {
      example_.emplace();
      example_->name = text::collapse_whitespace(get(a, "name"));
    } else if (example_ && name == "text") {
      begin_text();
    } else if (example_ && name == "arg") {
      auto type = get(a, "type");
      arg_label_ = !type.empty() ? label_from_type(type) : label_from_number(get(a, "n"), get(a, "f"));
      begin_text();
    }
  }

  void end(std::string_view name) {
    if (name == "predicate") {
      predicate_lemma_.clear();
    } else if (!roleset_) {
      return;
    } else if (name == "roleset") {
      finish_roleset();
    } else if (name == "aliases") {
      in_aliases_ = false;
    } else if (name == "alias" && in_aliases_ && collecting_) {
      add_alias(end_text());
    } else if (name == "example" && example_) {
      if (example_->text.empty()) {
        warn(roleset_->sense_id + ": example without text, skipped");
      } else {
        roleset_->examples.push_back(std::move(*example_));
      }
      example_.reset();
    } else if (example_ && name == "text" && collecting_) {
      example_->text = end_text();
    } else if (example_ && name == "arg" && collecting_) {
      auto span = end_text();
      if (!arg_label_.empty() && !span.empty()) example_->argument_spans.push_back({arg_label_, span});
      arg_label_.clear();
    }
  }

  void add_alias(const std::string& alias) {
    if (alias.empty()) return;
    auto& v = roleset_->aliases;
    if (std::find(v.begin(), v.end(), alias) == v.end()) v.push_back(alias);
  }

  void add_link(std::string_view resource, std::string_view id) {
    auto r = text::trim(resource);
    auto i = text::trim(id);
    if (r.empty() || i.empty()) return;
    LexLink link{std::string(r), std::string(i)};
    auto& v = roleset_->lexlinks;
    if (std::find(v.begin(), v.end(), link) == v.end()) v.push_back(std::move(link));
  }

  // Pre-3.0 files carry VerbNet classes and FrameNet frames as roleset
  // attributes, space separated, with "-" meaning none.
  void add_legacy_links(std::string_view value, std::string_view resource) {
    std::size_t pos = 0;
    std::string v(value);
    while (pos < v.size()) {
      auto next = v.find(' ', pos);
      auto item = v.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      if (!item.empty() && item != "-") add_link(resource, item);
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  }

  void finish_roleset() {
    Roleset r = std::move(*roleset_);
    roleset_.reset();
    in_aliases_ = false;

    const auto& id = r.sense_id;
    auto dot = id.find('.');
    if (id.empty() || dot == std::string::npos || dot == 0 || dot + 1 == id.size() ||
        id.find('.', dot + 1) != std::string::npos) {
      warn("roleset id \"" + id + "\" is not of the form lemma.sense, skipped");
      return;
    }
    if (r.definition.empty()) {
      warn(id + ": empty definition, skipped");
      return;
    }
    r.lemma = id.substr(0, dot);
    auto pred = text::collapse_whitespace(predicate_lemma_);
    if (!pred.empty() && text::normalize_key(pred) != text::normalize_key(r.lemma) &&
        std::find(r.aliases.begin(), r.aliases.end(), pred) == r.aliases.end()) {
      r.aliases.push_back(pred);
    }
    out_.push_back(std::move(r));
  }

  std::string_view file_name_;
  std::vector<std::string>* warnings_;
  std::vector<Roleset> out_;

  bool saw_frameset_ = false;
  std::string predicate_lemma_;
  std::optional<Roleset> roleset_;
  std::optional<FrameExample> example_;
  bool in_aliases_ = false;
  std::string arg_label_;

  bool collecting_ = false;
  std::string chars_;
};

}  // namespace

std::vector<Roleset> parse_frame_file(std::string_view xml, std::string_view file_name,
                                      std::vector<std::string>* warnings) {
  return FrameFileParser(file_name, warnings).parse(xml);
}

// ---------------------------------------------------------------------------

struct FrameIndex::State {
  std::vector<Roleset> rolesets;  // sense_id ascending
  std::unordered_map<std::string, std::size_t> by_id;
  std::unordered_map<std::string, std::vector<std::string>> by_key;
};

FrameIndex::FrameIndex() : state_(std::make_shared<State>()) {}
FrameIndex::FrameIndex(std::shared_ptr<const State> state) : state_(std::move(state)) {}

FrameIndex FrameIndex::from_rolesets(std::vector<Roleset> rolesets) {
  auto st = std::make_shared<State>();
  std::set<std::string> seen;
  for (auto& r : rolesets) {
    if (!seen.insert(r.sense_id).second) continue;
    st->rolesets.push_back(std::move(r));
  }
  std::sort(st->rolesets.begin(), st->rolesets.end(),
            [](const Roleset& a, const Roleset& b) { return a.sense_id < b.sense_id; });

  for (std::size_t i = 0; i < st->rolesets.size(); ++i) {
    const auto& r = st->rolesets[i];
    st->by_id.emplace(r.sense_id, i);
    auto add = [&](const std::string& token) {
      auto key = text::normalize_key(token);
      if (key.empty()) return;
      auto& ids = st->by_key[key];
      // Rolesets are visited in sense_id order, so each list stays sorted.
      if (ids.empty() || ids.back() != r.sense_id) ids.push_back(r.sense_id);
    };
    add(r.lemma);
    for (const auto& a : r.aliases) add(a);
  }
  return FrameIndex(std::move(st));
}

FrameIndex FrameIndex::load(const fs::path& corpus_dir, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  rep = LoadReport{};

  std::error_code ec;
  if (!fs::is_directory(corpus_dir, ec)) {
    throw LoadError("frame corpus directory not found: " + corpus_dir.string());
  }
  fs::path dir = corpus_dir;
  if (fs::is_directory(corpus_dir / "frames", ec)) dir = corpus_dir / "frames";

  std::vector<fs::path> files;
  fs::directory_iterator it(dir, ec);
  if (ec) throw LoadError("cannot read frame corpus directory " + dir.string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (entry.path().extension() == ".xml" && entry.is_regular_file(ec)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Roleset> all;
  std::set<std::string> ids;
  for (const auto& file : files) {
    ++rep.files_seen;
    auto name = file.filename().string();
    try {
      auto rolesets = parse_frame_file(read_file(file), name, &rep.warnings);
      for (auto& r : rolesets) {
        if (!ids.insert(r.sense_id).second) {
          rep.warnings.push_back(name + ": duplicate roleset " + r.sense_id + ", skipped");
          continue;
        }
        all.push_back(std::move(r));
      }
      ++rep.files_parsed;
    } catch (const Error& e) {
      rep.failed_files.push_back(name + ": " + e.what());
    }
  }

  for (const auto& f : rep.failed_files) logger().warn("event=frame_file_failed detail=\"{}\"", f);
  for (const auto& w : rep.warnings) logger().debug("event=frame_warning detail=\"{}\"", w);

  if (rep.files_parsed == 0) {
    throw LoadError("no frame files could be parsed in " + dir.string() + " (" +
                    std::to_string(rep.files_seen) + " seen)");
  }
  auto index = from_rolesets(std::move(all));
  logger().info("event=frame_corpus_loaded dir=\"{}\" files_seen={} files_parsed={} files_failed={} "
                "rolesets={} index_keys={} warnings={}",
                dir.string(), rep.files_seen, rep.files_parsed, rep.failed_files.size(), index.size(),
                index.lemma_count(), rep.warnings.size());
  return index;
}

std::vector<RolesetSummary> FrameIndex::search_by_lemma(std::string_view lemma,
                                                         std::size_t max_results) const {
  if (max_results == 0) throw ValidationError({"max_results must be >= 1"});
  std::vector<RolesetSummary> out;
  for (const auto& id : sense_ids_for_key(text::normalize_key(lemma))) {
    if (out.size() >= max_results) break;
    const auto& r = state_->rolesets[state_->by_id.at(id)];
    out.push_back({r.sense_id, r.definition, r.roles});
  }
  return out;
}

Roleset FrameIndex::search_by_sense_id(std::string_view sense_id, bool include_examples) const {
  const Roleset* r = find(sense_id);
  if (!r) {
    throw NotFoundError("roleset not found: " + std::string(sense_id), std::string(sense_id));
  }
  Roleset copy = *r;
  if (!include_examples) copy.examples.clear();
  return copy;
}

const Roleset* FrameIndex::find(std::string_view sense_id) const {
  auto it = state_->by_id.find(std::string(text::trim(sense_id)));
  return it == state_->by_id.end() ? nullptr : &state_->rolesets[it->second];
}

bool FrameIndex::contains_lemma(std::string_view lemma) const {
  return state_->by_key.count(text::normalize_key(lemma)) != 0;
}

std::size_t FrameIndex::size() const { return state_->rolesets.size(); }
std::size_t FrameIndex::lemma_count() const { return state_->by_key.size(); }
const std::vector<Roleset>& FrameIndex::rolesets() const { return state_->rolesets; }

std::vector<std::string> FrameIndex::index_keys() const {
  std::vector<std::string> keys;
  keys.reserve(state_->by_key.size());
  for (const auto& [k, _] : state_->by_key) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

const std::vector<std::string>& FrameIndex::sense_ids_for_key(std::string_view key) const {
  static const std::vector<std::string> kEmpty;
  auto it = state_->by_key.find(std::string(key));
  return it == state_->by_key.end() ? kEmpty : it->second;
}

}  // namespace ddlpb::frames
