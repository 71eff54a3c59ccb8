#include "tsmin/artifacts.hpp"

#include <fstream>
#include <sstream>

#include "tsmin/error.hpp"

namespace tsmin {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "error reading " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "error writing " + path.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot write " + path.string() + ": " + ec.message());
}

ordered_json parse_json(std::string_view text, const std::string& what) {
  try {
    return ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, what + ": " + e.what());
  }
}

void check_format(const ordered_json& doc, std::string_view format, int version,
                  const std::string& what) {
  if (!doc.is_object() || !doc.contains("format") || doc["format"] != format)
    throw Error(ErrorKind::Parse, what + ": not a " + std::string(format) + " document");
  if (!doc.contains("version") || doc["version"] != version)
    throw Error(ErrorKind::Parse, what + ": unsupported version");
}

std::string dump_json(const ordered_json& doc) { return doc.dump(2) + "\n"; }

std::string serialize_roster(const Roster& roster) {
  ordered_json doc;
  doc["format"] = "tsmin-roster";
  doc["version"] = 1;
  doc["tool_version"] = kToolVersion;
  ordered_json tests = ordered_json::array();
  for (const auto& t : roster.tests) {
    tests.push_back({{"id", t.id},
                     {"file", t.file},
                     {"method", t.method},
                     {"line", t.line},
                     {"ast", t.ast},
                     {"digest", t.digest.hex()}});
  }
  doc["tests"] = std::move(tests);
  doc["config"] = roster.config.is_null() ? ordered_json::object() : roster.config;
  if (roster.ast_seconds) doc["timing"] = {{"ast_seconds", *roster.ast_seconds}};
  return dump_json(doc);
}

Roster deserialize_roster(std::string_view text) {
  ordered_json doc = parse_json(text, "roster");
  check_format(doc, "tsmin-roster", 1, "roster");
  Roster r;
  try {
    for (const auto& t : doc.at("tests")) {
      RosterEntry e;
      e.id = t.at("id").get<std::string>();
      e.file = t.at("file").get<std::string>();
      e.method = t.at("method").get<std::string>();
      e.line = t.at("line").get<int>();
      e.ast = t.at("ast").get<std::string>();
      e.digest = Digest::from_hex(t.at("digest").get<std::string>());
      r.tests.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("roster: ") + e.what());
  }
  if (doc.contains("config")) r.config = doc["config"];
  if (doc.contains("timing") && doc["timing"].contains("ast_seconds"))
    r.ast_seconds = doc["timing"]["ast_seconds"].get<double>();
  return r;
}

void save_roster(const Roster& roster, const fs::path& path) {
  write_file(path, serialize_roster(roster));
}

Roster load_roster(const fs::path& path) { return deserialize_roster(read_file(path)); }

std::vector<AstTree> load_trees(const Roster& roster, const fs::path& artifacts_dir) {
  std::vector<AstTree> trees;
  trees.reserve(roster.size());
  for (const auto& t : roster.tests) {
    fs::path p = artifacts_dir / t.ast;
    if (!fs::exists(p))
      throw Error(ErrorKind::Data, "missing AST artifact for test " + t.id + " (" +
                                       p.string() + ")");
    AstTree tree = deserialize(read_file(p));
    if (tree.digest() != t.digest)
      throw Error(ErrorKind::Stale, "AST artifact for test " + t.id +
                                        " does not match the roster digest");
    trees.push_back(std::move(tree));
  }
  return trees;
}

}  // namespace tsmin
