#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ddlpb::ddl {

struct Column {
  std::string name;
  std::string declared_type;  // as written, whitespace collapsed; may be empty
  bool nullable = true;
  std::optional<std::string> default_expr;
  // Column constraints the parser does not model (UNIQUE, CHECK (...),
  // COLLATE x, GENERATED ...), kept as opaque text.
  std::vector<std::string> constraints;

  friend bool operator==(const Column&, const Column&) = default;
};

struct ForeignKey {
  std::vector<std::string> local_columns;
  std::string referenced_table;
  // Empty when the DDL omits the list; table_context() resolves it to the
  // referenced table's primary key.
  std::vector<std::string> referenced_columns;

  friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::string> primary_key;
  std::vector<ForeignKey> foreign_keys;
  std::vector<std::string> constraints;  // opaque table constraints

  const Column* find_column(std::string_view name) const;
  bool is_primary_key(std::string_view column) const;
  // First foreign key whose local columns include `column`.
  const ForeignKey* foreign_key_of(std::string_view column) const;

  friend bool operator==(const Table&, const Table&) = default;
};

struct Schema {
  std::vector<Table> tables;  // declaration order
  std::string source_name;

  const Table* find_table(std::string_view name) const;  // case-insensitive

  friend bool operator==(const Schema&, const Schema&) = default;
};

struct InboundRef {
  std::string referencing_table;
  ForeignKey foreign_key;

  friend bool operator==(const InboundRef&, const InboundRef&) = default;
};

struct TableContext {
  Table table;
  std::vector<ForeignKey> outbound_refs;  // declaration order, referenced columns resolved
  std::vector<InboundRef> inbound_refs;   // sorted by referencing table, then columns

  friend bool operator==(const TableContext&, const TableContext&) = default;
};

// Parses every CREATE TABLE statement in `text`; other statements are
// skipped. Throws ParseError (with byte offset) for unbalanced parentheses,
// unterminated literals or comments, truncated CREATE TABLE statements,
// duplicate tables or columns, and key clauses naming unknown columns.
Schema parse_ddl(std::string_view text, std::string_view source_name = {});

// Emits the canonical DDL form: one CREATE TABLE per table, every identifier
// double-quoted, table-level PRIMARY KEY / FOREIGN KEY clauses.
// parse_ddl(to_canonical_ddl(s)) == s for any parsed schema s.
std::string to_canonical_ddl(const Schema& schema);

// Throws NotFoundError when no table matches (case-insensitively).
TableContext table_context(const Schema& schema, std::string_view table_name);

nlohmann::ordered_json to_json(const Schema& schema);
nlohmann::ordered_json to_json(const TableContext& ctx);

}  // namespace ddlpb::ddl
