#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tsmin/tree.hpp"

namespace tsmin {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// One prepared test case as listed in tests.json.
struct RosterEntry {
  std::string id;
  std::string file;     // corpus-relative, '/' separated
  std::string method;
  int line = 0;
  std::string ast;      // artifacts-relative path of the .ast.json file
  Digest digest;

  friend bool operator==(const RosterEntry&, const RosterEntry&) = default;
};

struct Roster {
  std::vector<RosterEntry> tests;
  nlohmann::ordered_json config;  // effective configuration echo
  std::optional<double> ast_seconds;

  std::size_t size() const noexcept { return tests.size(); }
};

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename. Creates parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Parses JSON text; syntax errors become Error{Parse} naming `what`.
nlohmann::ordered_json parse_json(std::string_view text, const std::string& what);

/// Checks the "format" and "version" fields of an artifact document.
void check_format(const nlohmann::ordered_json& doc, std::string_view format,
                  int version, const std::string& what);

std::string dump_json(const nlohmann::ordered_json& doc);

std::string serialize_roster(const Roster& roster);
Roster deserialize_roster(std::string_view text);
void save_roster(const Roster& roster, const std::filesystem::path& path);
Roster load_roster(const std::filesystem::path& path);

/// Loads every AST listed in `roster` from `artifacts_dir`. A missing file
/// throws Error{Data} naming the test id; a digest mismatch throws
/// Error{Stale}.
std::vector<AstTree> load_trees(const Roster& roster,
                                const std::filesystem::path& artifacts_dir);

}  // namespace tsmin
