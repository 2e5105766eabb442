#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ddlpb::mapper {

// Table-domain lexicon: singular table-name word -> verbs describing the
// events such a table typically records ("order" -> order, purchase, ...).
class Lexicon {
 public:
  using Entries = std::map<std::string, std::vector<std::string>, std::less<>>;

  Lexicon() = default;
  explicit Lexicon(Entries entries);

  // The lexicon shipped with the library.
  static const Lexicon& builtin();

  // Reads a JSON object of {"word": ["verb", ...]}. Throws ParseError or
  // IoError.
  static Lexicon from_json_file(const std::filesystem::path& path);

  const std::vector<std::string>& expand(std::string_view word) const;
  const Entries& entries() const { return entries_; }

 private:
  Entries entries_;
};

}  // namespace ddlpb::mapper
