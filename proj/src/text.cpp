#include "ddlpb/text.hpp"

#include <algorithm>
#include <cctype>

namespace ddlpb::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_alpha(char c) { return is_upper(c) || is_lower(c); }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

std::string normalize_key(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) {
      out += '_';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  char close = 0;
  bool pending_space = false;
  for (char c : trim(s)) {
    if (close != 0) {
      out += c;
      if (c == close) close = 0;
      continue;
    }
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += c;
    if (c == '\'' || c == '"' || c == '`') close = c;
    if (c == '[') close = ']';
  }
  return out;
}

std::vector<std::string> split_identifier(std::string_view ident) {
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) words.push_back(to_lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < ident.size(); ++i) {
    char c = ident[i];
    if (!is_alpha(c)) {
      flush();
      continue;
    }
    if (is_upper(c) && !cur.empty()) {
      bool prev_lower = is_lower(cur.back());
      // "HTTPServer": the 'S' starts a new word because a lowercase letter follows.
      bool acronym_end = is_upper(cur.back()) && i + 1 < ident.size() && is_lower(ident[i + 1]);
      if (prev_lower || acronym_end) flush();
    }
    cur += c;
  }
  flush();
  return words;
}

std::string singularize(std::string_view word) {
  std::string w(word);
  if (w.size() <= 2) return w;
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
  if (ends_with(w, "ies") && w.size() > 3) return w.substr(0, w.size() - 3) + "y";
  if (ends_with(w, "sses") || ends_with(w, "shes") || ends_with(w, "ches") ||
      ends_with(w, "xes") || ends_with(w, "zes")) {
    return w.substr(0, w.size() - 2);
  }
  if (w.back() == 's') return w.substr(0, w.size() - 1);
  return w;
}

std::vector<std::string> name_tokens(std::string_view ident) {
  auto words = split_identifier(ident);
  for (auto& w : words) w = singularize(w);
  return words;
}

}  // namespace ddlpb::text
