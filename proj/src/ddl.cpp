#include "ddlpb/ddl.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "ddlpb/error.hpp"
#include "ddlpb/text.hpp"

namespace ddlpb::ddl {

using text::iequals;

const Column* Table::find_column(std::string_view column) const {
  for (const auto& c : columns)
    if (iequals(c.name, column)) return &c;
  return nullptr;
}

bool Table::is_primary_key(std::string_view column) const {
  return std::any_of(primary_key.begin(), primary_key.end(),
                     [&](const std::string& k) { return iequals(k, column); });
}

const ForeignKey* Table::foreign_key_of(std::string_view column) const {
  for (const auto& fk : foreign_keys)
    for (const auto& c : fk.local_columns)
      if (iequals(c, column)) return &fk;
  return nullptr;
}

const Table* Schema::find_table(std::string_view name) const {
  for (const auto& t : tables)
    if (iequals(t.name, name)) return &t;
  return nullptr;
}

namespace {

enum class Tok { Word, Quoted, String, Number, Punct };

struct Token {
  Tok kind;
  std::string value;  // identifier text with quotes removed; raw text otherwise
  std::size_t begin;
  std::size_t end;
};

bool is_word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || (c & 0x80); }
bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || (c & 0x80);
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto quoted = [&](char close, Tok kind) {
    std::size_t start = i++;
    std::string value;
    while (true) {
      if (i >= s.size()) {
        throw ParseError("unterminated " + std::string(kind == Tok::String ? "string literal" : "quoted identifier") +
                             " starting at byte " + std::to_string(start),
                         start);
      }
      if (s[i] == close) {
        // Doubled closing character escapes itself ('' or "").
        if (close != ']' && i + 1 < s.size() && s[i + 1] == close) {
          value += close;
          i += 2;
          continue;
        }
        ++i;
        break;
      }
      value += s[i++];
    }
    out.push_back({kind, kind == Tok::String ? std::string(s.substr(start, i - start)) : value, start, i});
  };

  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      auto close = s.find("*/", i + 2);
      if (close == std::string_view::npos) {
        throw ParseError("unterminated comment starting at byte " + std::to_string(i), i);
      }
      i = close + 2;
    } else if (c == '\'') {
      quoted('\'', Tok::String);
    } else if (c == '"') {
      quoted('"', Tok::Quoted);
    } else if (c == '`') {
      quoted('`', Tok::Quoted);
    } else if (c == '[') {
      quoted(']', Tok::Quoted);
    } else if (is_word_start(c)) {
      std::size_t start = i;
      while (i < s.size() && is_word_char(s[i])) ++i;
      out.push_back({Tok::Word, std::string(s.substr(start, i - start)), start, i});
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start, i});
    } else {
      out.push_back({Tok::Punct, std::string(1, c), i, i + 1});
      ++i;
    }
  }
  return out;
}

bool is_kw(const Token& t, std::string_view kw) { return t.kind == Tok::Word && iequals(t.value, kw); }
bool is_punct(const Token& t, char c) { return t.kind == Tok::Punct && t.value[0] == c; }
bool is_name(const Token& t) { return t.kind == Tok::Word || t.kind == Tok::Quoted; }

// Half-open token range [lo, hi) within one statement.
struct Span {
  const std::vector<Token>* toks;
  std::size_t lo;
  std::size_t hi;

  const Token& operator[](std::size_t i) const { return (*toks)[i]; }
  bool has(std::size_t i) const { return i < hi; }
};

class StatementParser {
 public:
  StatementParser(std::string_view src, const std::vector<Token>& toks, std::size_t lo, std::size_t hi)
      : src_(src), s_{&toks, lo, hi} {}

  // Returns the table when this statement is a CREATE TABLE, nullopt
  // otherwise.
  std::optional<Table> parse() {
    std::size_t i = s_.lo;
    if (!s_.has(i) || !is_kw(s_[i], "CREATE")) return std::nullopt;
    ++i;
    while (s_.has(i) && (is_kw(s_[i], "TEMP") || is_kw(s_[i], "TEMPORARY") || is_kw(s_[i], "UNLOGGED") ||
                         is_kw(s_[i], "GLOBAL") || is_kw(s_[i], "LOCAL"))) {
      ++i;
    }
    if (!s_.has(i) || !is_kw(s_[i], "TABLE")) return std::nullopt;
    ++i;
    if (s_.has(i + 2) && is_kw(s_[i], "IF") && is_kw(s_[i + 1], "NOT") && is_kw(s_[i + 2], "EXISTS")) i += 3;
    if (!s_.has(i) || !is_name(s_[i])) fail("truncated CREATE TABLE: missing table name", end_offset(i));

    Table table;
    table.name = s_[i].value;
    ++i;
    while (s_.has(i + 1) && is_punct(s_[i], '.') && is_name(s_[i + 1])) {
      table.name = s_[i + 1].value;  // schema-qualified: keep the table part
      i += 2;
    }
    if (s_.has(i) && is_kw(s_[i], "AS")) return std::nullopt;  // CREATE TABLE ... AS SELECT
    if (!s_.has(i) || !is_punct(s_[i], '(')) {
      fail("truncated CREATE TABLE " + table.name + ": expected '(' after table name", end_offset(i));
    }
    std::size_t close = matching(i);
    parse_body(table, i + 1, close);
    validate(table);
    return table;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t offset) const {
    throw ParseError(what + " at byte " + std::to_string(offset) + " in statement at byte " +
                         std::to_string(s_[s_.lo].begin) + " (" + head() + ")",
                     offset);
  }

  std::string head() const {
    std::string h;
    for (std::size_t i = s_.lo; i < s_.hi && i < s_.lo + 4; ++i) {
      if (!h.empty()) h += ' ';
      h += s_[i].kind == Tok::String ? "'...'" : s_[i].value;
    }
    return h;
  }

  std::size_t end_offset(std::size_t i) const {
    if (s_.has(i)) return s_[i].begin;
    return s_[s_.hi - 1].end;
  }

  // Index of the ')' matching the '(' at i. Statement splitting guarantees
  // balance, so running off the end means the statement was truncated.
  std::size_t matching(std::size_t i) const {
    int depth = 0;
    for (std::size_t j = i; j < s_.hi; ++j) {
      if (is_punct(s_[j], '(')) ++depth;
      if (is_punct(s_[j], ')') && --depth == 0) return j;
    }
    fail("unbalanced '('", s_[i].begin);
  }

  // Skips a parenthesised group if one starts at i.
  std::size_t skip_group(std::size_t i, std::size_t hi) const {
    if (i < hi && is_punct(s_[i], '(')) return matching(i) + 1;
    return i + 1;
  }

  std::string source(std::size_t from, std::size_t to_exclusive) const {
    if (from >= to_exclusive) return {};
    auto b = s_[from].begin;
    auto e = s_[to_exclusive - 1].end;
    return text::collapse_whitespace(src_.substr(b, e - b));
  }

  void parse_body(Table& table, std::size_t lo, std::size_t hi) {
    if (lo == hi) return;
    std::size_t item = lo;
    int depth = 0;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j < hi && is_punct(s_[j], '(')) ++depth;
      if (j < hi && is_punct(s_[j], ')')) --depth;
      if (j == hi || (depth == 0 && is_punct(s_[j], ','))) {
        if (item == j) fail("empty column or constraint definition", end_offset(j));
        parse_item(table, item, j);
        item = j + 1;
      }
    }
  }

  // Distinguishes "PRIMARY KEY (a)" or "UNIQUE (a)" from a column that
  // happens to be named like a keyword.
  bool is_table_constraint(std::size_t i, std::size_t hi) const {
    const Token& t = s_[i];
    bool next_is_group = i + 1 < hi && is_punct(s_[i + 1], '(');
    bool next_is_named_group = i + 2 < hi && is_name(s_[i + 1]) && is_punct(s_[i + 2], '(');
    if (is_kw(t, "CONSTRAINT")) return true;
    if (is_kw(t, "PRIMARY") || is_kw(t, "FOREIGN")) return i + 1 < hi && is_kw(s_[i + 1], "KEY");
    if (is_kw(t, "CHECK") || is_kw(t, "EXCLUDE")) return next_is_group;
    for (auto kw : {"UNIQUE", "KEY", "INDEX", "FULLTEXT", "SPATIAL"}) {
      if (is_kw(t, kw)) return next_is_group || next_is_named_group;
    }
    return false;
  }

  static bool is_column_constraint(const Token& t) {
    for (auto kw : {"CONSTRAINT", "NOT", "NULL", "PRIMARY", "REFERENCES", "DEFAULT", "UNIQUE", "CHECK", "COLLATE",
                    "GENERATED", "AUTO_INCREMENT", "AUTOINCREMENT", "IDENTITY", "ON", "COMMENT", "AS"}) {
      if (is_kw(t, kw)) return true;
    }
    return false;
  }

  void parse_item(Table& table, std::size_t lo, std::size_t hi) {
    if (is_table_constraint(lo, hi)) {
      parse_table_constraint(table, lo, hi);
    } else {
      parse_column(table, lo, hi);
    }
  }

  void set_primary_key(Table& table, std::vector<std::string> cols, std::size_t at) {
    if (!table.primary_key.empty()) fail("table " + table.name + " declares more than one primary key", s_[at].begin);
    table.primary_key = std::move(cols);
  }

  void parse_table_constraint(Table& table, std::size_t lo, std::size_t hi) {
    std::size_t i = lo;
    if (is_kw(s_[i], "CONSTRAINT")) i += 2;
    if (i + 1 < hi && is_kw(s_[i], "PRIMARY") && is_kw(s_[i + 1], "KEY")) {
      std::size_t after = 0;
      auto cols = name_list(i + 2, hi, &after);
      set_primary_key(table, std::move(cols), i);
      return;
    }
    if (i + 1 < hi && is_kw(s_[i], "FOREIGN") && is_kw(s_[i + 1], "KEY")) {
      std::size_t after = 0;
      ForeignKey fk;
      fk.local_columns = name_list(i + 2, hi, &after);
      if (after >= hi || !is_kw(s_[after], "REFERENCES")) fail("FOREIGN KEY without REFERENCES", end_offset(after));
      references(after, hi, fk);
      table.foreign_keys.push_back(std::move(fk));
      return;
    }
    table.constraints.push_back(source(lo, hi));
  }

  // '(' name [, name]* ')' starting at i. Per-item modifiers (ASC, length,
  // COLLATE) are ignored.
  std::vector<std::string> name_list(std::size_t i, std::size_t hi, std::size_t* after) {
    if (i >= hi || !is_punct(s_[i], '(')) fail("expected '(' column list", end_offset(i));
    std::size_t close = matching(i);
    std::vector<std::string> names;
    bool expect_name = true;
    int depth = 0;
    for (std::size_t j = i + 1; j < close; ++j) {
      if (is_punct(s_[j], '(')) ++depth;
      if (is_punct(s_[j], ')')) --depth;
      if (depth == 0 && is_punct(s_[j], ',')) {
        if (expect_name) fail("empty entry in column list", s_[j].begin);
        expect_name = true;
        continue;
      }
      if (expect_name) {
        if (!is_name(s_[j])) fail("expected column name", s_[j].begin);
        names.push_back(s_[j].value);
        expect_name = false;
      }
    }
    if (expect_name) fail("empty column list", s_[close].begin);
    *after = close + 1;
    return names;
  }

  // REFERENCES table [(cols)] [ON DELETE|UPDATE action] [MATCH x]
  // [[NOT] DEFERRABLE [INITIALLY x]]. Returns the index after the clause.
  std::size_t references(std::size_t i, std::size_t hi, ForeignKey& fk) {
    ++i;
    if (i >= hi || !is_name(s_[i])) fail("REFERENCES without a table name", end_offset(i));
    fk.referenced_table = s_[i].value;
    ++i;
    while (i + 1 < hi && is_punct(s_[i], '.') && is_name(s_[i + 1])) {
      fk.referenced_table = s_[i + 1].value;
      i += 2;
    }
    if (i < hi && is_punct(s_[i], '(')) fk.referenced_columns = name_list(i, hi, &i);
    while (i < hi) {
      if (i + 1 < hi && is_kw(s_[i], "ON") && (is_kw(s_[i + 1], "DELETE") || is_kw(s_[i + 1], "UPDATE"))) {
        i += 2;
        if (i + 1 < hi && (is_kw(s_[i], "SET") || (is_kw(s_[i], "NO") && is_kw(s_[i + 1], "ACTION")))) {
          i += 2;
        } else {
          ++i;
        }
      } else if (is_kw(s_[i], "MATCH") && i + 1 < hi) {
        i += 2;
      } else if (i + 1 < hi && is_kw(s_[i], "NOT") && is_kw(s_[i + 1], "DEFERRABLE")) {
        i += 2;
      } else if (is_kw(s_[i], "DEFERRABLE")) {
        ++i;
      } else if (i + 1 < hi && is_kw(s_[i], "INITIALLY")) {
        i += 2;
      } else {
        break;
      }
    }
    if (!fk.referenced_columns.empty() && fk.referenced_columns.size() != fk.local_columns.size()) {
      fail("foreign key column count does not match referenced column count", s_[i - 1].begin);
    }
    return i;
  }

  void parse_column(Table& table, std::size_t lo, std::size_t hi) {
    if (!is_name(s_[lo])) fail("expected column name", s_[lo].begin);
    Column col;
    col.name = s_[lo].value;
    std::size_t i = lo + 1;
    while (i < hi && !is_column_constraint(s_[i])) i = skip_group(i, hi);
    col.declared_type = source(lo + 1, i);

    bool primary = false;
    while (i < hi) {
      const Token& t = s_[i];
      if (is_kw(t, "CONSTRAINT") && i + 1 < hi) {
        i += 2;
      } else if (is_kw(t, "NOT") && i + 1 < hi && is_kw(s_[i + 1], "NULL")) {
        col.nullable = false;
        i += 2;
      } else if (is_kw(t, "NULL")) {
        col.nullable = true;
        ++i;
      } else if (is_kw(t, "PRIMARY") && i + 1 < hi && is_kw(s_[i + 1], "KEY")) {
        primary = true;
        i += 2;
        if (i < hi && (is_kw(s_[i], "ASC") || is_kw(s_[i], "DESC"))) ++i;
      } else if (is_kw(t, "REFERENCES")) {
        ForeignKey fk;
        fk.local_columns = {col.name};
        i = references(i, hi, fk);
        table.foreign_keys.push_back(std::move(fk));
      } else if (is_kw(t, "DEFAULT")) {
        std::size_t start = ++i;
        if (i >= hi) fail("DEFAULT without a value", end_offset(i));
        if (is_punct(s_[i], '(')) {
          i = skip_group(i, hi);
        } else if ((is_punct(s_[i], '-') || is_punct(s_[i], '+')) && i + 1 < hi) {
          i += 2;
        } else if (s_[i].kind == Tok::Word && i + 1 < hi && is_punct(s_[i + 1], '(')) {
          i = skip_group(i + 1, hi);
        } else {
          ++i;
        }
        // Postgres-style casts: DEFAULT 'x'::text
        while (i + 2 < hi && is_punct(s_[i], ':') && is_punct(s_[i + 1], ':')) i += 3;
        col.default_expr = source(start, i);
      } else {
        // Opaque constraint: the keyword plus everything up to the next
        // constraint keyword.
        std::size_t start = i;
        i = skip_group(i, hi);
        while (i < hi && !is_column_constraint(s_[i])) i = skip_group(i, hi);
        col.constraints.push_back(source(start, i));
      }
    }

    if (table.find_column(col.name)) {
      fail("duplicate column " + col.name + " in table " + table.name, s_[lo].begin);
    }
    if (primary) set_primary_key(table, {col.name}, lo);
    table.columns.push_back(std::move(col));
  }

  void validate(const Table& table) const {
    for (const auto& k : table.primary_key) {
      if (!table.find_column(k)) {
        fail("primary key names unknown column " + k + " in table " + table.name, s_[s_.lo].begin);
      }
    }
    for (const auto& fk : table.foreign_keys) {
      for (const auto& c : fk.local_columns) {
        if (!table.find_column(c)) {
          fail("foreign key names unknown column " + c + " in table " + table.name, s_[s_.lo].begin);
        }
      }
    }
  }

  std::string_view src_;
  Span s_;
};

std::string quote(std::string_view ident) {
  std::string out = "\"";
  for (char c : ident) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string quote_list(const std::vector<std::string>& names) {
  std::string out = "(";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += quote(names[i]);
  }
  return out + ")";
}

ForeignKey resolve(const Schema& schema, ForeignKey fk) {
  if (fk.referenced_columns.empty()) {
    if (const Table* target = schema.find_table(fk.referenced_table);
        target && target->primary_key.size() == fk.local_columns.size()) {
      fk.referenced_columns = target->primary_key;
    }
  }
  return fk;
}

std::vector<std::string> lowered(const std::vector<std::string>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(text::to_lower(s));
  return out;
}

}  // namespace

Schema parse_ddl(std::string_view text, std::string_view source_name) {
  Schema schema;
  schema.source_name = std::string(source_name);
  const auto toks = tokenize(text);

  std::vector<std::size_t> open;
  std::size_t stmt = 0;
  auto finish = [&](std::size_t end) {
    if (end > stmt) {
      if (auto table = StatementParser(text, toks, stmt, end).parse()) {
        if (schema.find_table(table->name)) {
          throw ParseError("duplicate table " + table->name + " at byte " + std::to_string(toks[stmt].begin),
                           toks[stmt].begin);
        }
        schema.tables.push_back(std::move(*table));
      }
    }
    stmt = end + 1;
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (is_punct(toks[i], '(')) {
      open.push_back(i);
    } else if (is_punct(toks[i], ')')) {
      if (open.empty()) {
        throw ParseError("unbalanced ')' at byte " + std::to_string(toks[i].begin), toks[i].begin);
      }
      open.pop_back();
    } else if (is_punct(toks[i], ';')) {
      if (!open.empty()) {
        auto at = toks[open.back()].begin;
        throw ParseError("unbalanced '(' at byte " + std::to_string(at) + " in statement at byte " +
                             std::to_string(toks[stmt].begin),
                         at);
      }
      finish(i);
    }
  }
  if (!open.empty()) {
    auto at = toks[open.back()].begin;
    throw ParseError("unbalanced '(' at byte " + std::to_string(at) + " in statement at byte " +
                         std::to_string(toks[stmt].begin),
                     at);
  }
  finish(toks.size());
  return schema;
}

std::string to_canonical_ddl(const Schema& schema) {
  std::string out;
  for (const auto& t : schema.tables) {
    if (!out.empty()) out += "\n";
    out += "CREATE TABLE " + quote(t.name) + " (\n";
    std::vector<std::string> lines;
    for (const auto& c : t.columns) {
      std::string line = quote(c.name);
      if (!c.declared_type.empty()) line += " " + c.declared_type;
      if (!c.nullable) line += " NOT NULL";
      if (c.default_expr) line += " DEFAULT " + *c.default_expr;
      for (const auto& k : c.constraints) line += " " + k;
      lines.push_back(std::move(line));
    }
    if (!t.primary_key.empty()) lines.push_back("PRIMARY KEY " + quote_list(t.primary_key));
    for (const auto& fk : t.foreign_keys) {
      std::string line = "FOREIGN KEY " + quote_list(fk.local_columns) + " REFERENCES " + quote(fk.referenced_table);
      if (!fk.referenced_columns.empty()) line += " " + quote_list(fk.referenced_columns);
      lines.push_back(std::move(line));
    }
    for (const auto& k : t.constraints) lines.push_back(k);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      out += "  " + lines[i] + (i + 1 < lines.size() ? ",\n" : "\n");
    }
    out += ");\n";
  }
  return out;
}

TableContext table_context(const Schema& schema, std::string_view table_name) {
  const Table* table = schema.find_table(table_name);
  if (!table) throw NotFoundError("table not found: " + std::string(table_name), std::string(table_name));

  TableContext ctx;
  ctx.table = *table;
  for (const auto& fk : table->foreign_keys) ctx.outbound_refs.push_back(resolve(schema, fk));
  for (const auto& other : schema.tables) {
    for (const auto& fk : other.foreign_keys) {
      if (iequals(fk.referenced_table, table->name)) ctx.inbound_refs.push_back({other.name, resolve(schema, fk)});
    }
  }
  auto key = [](const InboundRef& r) {
    return std::make_tuple(text::to_lower(r.referencing_table), lowered(r.foreign_key.local_columns),
                           lowered(r.foreign_key.referenced_columns));
  };
  std::stable_sort(ctx.inbound_refs.begin(), ctx.inbound_refs.end(),
                   [&](const InboundRef& a, const InboundRef& b) { return key(a) < key(b); });
  return ctx;
}

namespace {

nlohmann::ordered_json fk_json(const ForeignKey& fk) {
  return {{"local_columns", fk.local_columns},
          {"referenced_table", fk.referenced_table},
          {"referenced_columns", fk.referenced_columns}};
}

nlohmann::ordered_json table_json(const Table& t) {
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& c : t.columns) {
    nlohmann::ordered_json col = {{"name", c.name}, {"declared_type", c.declared_type}, {"nullable", c.nullable}};
    col["default"] = c.default_expr ? nlohmann::ordered_json(*c.default_expr) : nlohmann::ordered_json(nullptr);
    col["constraints"] = c.constraints;
    cols.push_back(std::move(col));
  }
  nlohmann::ordered_json fks = nlohmann::ordered_json::array();
  for (const auto& fk : t.foreign_keys) fks.push_back(fk_json(fk));
  return {{"name", t.name},
          {"columns", std::move(cols)},
          {"primary_key", t.primary_key},
          {"foreign_keys", std::move(fks)},
          {"constraints", t.constraints}};
}

}  // namespace

nlohmann::ordered_json to_json(const Schema& schema) {
  nlohmann::ordered_json tables = nlohmann::ordered_json::array();
  for (const auto& t : schema.tables) tables.push_back(table_json(t));
  return {{"source_name", schema.source_name}, {"tables", std::move(tables)}};
}

nlohmann::ordered_json to_json(const TableContext& ctx) {
  nlohmann::ordered_json out = {{"table", table_json(ctx.table)}};
  nlohmann::ordered_json outbound = nlohmann::ordered_json::array();
  for (const auto& fk : ctx.outbound_refs) outbound.push_back(fk_json(fk));
  nlohmann::ordered_json inbound = nlohmann::ordered_json::array();
  for (const auto& r : ctx.inbound_refs) {
    inbound.push_back({{"referencing_table", r.referencing_table}, {"foreign_key", fk_json(r.foreign_key)}});
  }
  out["outbound_refs"] = std::move(outbound);
  out["inbound_refs"] = std::move(inbound);
  return out;
}

}  // namespace ddlpb::ddl
