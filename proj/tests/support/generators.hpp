#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ddlpb/mapping.hpp"

namespace ddlpb::testing {

// Counts <roleset ...> start tags with a plain text scan of every *.xml
// file, independent of the XML parser under test.
std::size_t count_roleset_tags(const std::filesystem::path& corpus_dir);

// Sense id -> every lookup token (id prefix, enclosing predicate lemma,
// aliases) in index key form, collected with regular expressions straight
// from the XML text.
std::map<std::string, std::set<std::string>> scan_lookup_tokens(const std::filesystem::path& corpus_dir);

// Random CREATE TABLE script mixing column-level and table-level keys,
// quoting styles, defaults, opaque constraints, comments and non-table
// statements.
std::string random_ddl(std::mt19937& rng);

// Random TableMappingOutput satisfying every mapping invariant.
mapping::TableMappingOutput random_mapping(std::mt19937& rng, const std::string& table_name,
                                           std::size_t max_mappings = 6);

// Random path strings aimed at escaping a sandbox rooted anywhere:
// dot-dot chains, absolute paths, symlink names planted by the caller,
// doubled separators and odd bytes.
std::vector<std::string> traversal_paths(std::mt19937& rng, std::size_t n, const std::vector<std::string>& planted,
                                         const std::string& sandbox_root, const std::string& outside_root);

}  // namespace ddlpb::testing
