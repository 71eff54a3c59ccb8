#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tsmin/tree.hpp"

namespace tsmin::frontend {

/// Rules for stripping test code down to what exercises the system.
struct PreprocessConfig {
  /// Statement-level calls removed together with their arguments.
  std::set<std::string> assertion_method_names = default_assertion_names();
  /// Regular expressions matched against the receiver chain of a call
  /// (e.g. "System.out") and its root identifier (e.g. "LOG"). A leading
  /// "(?i)" makes the match case-insensitive.
  std::vector<std::string> logging_receiver_patterns = {
      R"(^System\.(out|err)(\.|$))", "(?i)^(log|logger)$"};
  std::set<std::string> logging_method_names = {
      "print", "println", "printf", "trace", "debug",
      "info",  "warn",    "error",  "fatal"};
  std::string rename_target = "test_case";
  /// Keep call/creation arguments of removed assertions as statements.
  bool keep_assertion_args = false;

  static std::set<std::string> default_assertion_names();
};

struct ExtractedMethod {
  std::string name;
  std::string source;  // exact span, including a directly preceding Javadoc
  int line;
};

/// Methods annotated @Test or named test*, in file order.
std::vector<ExtractedMethod> extract_test_methods(std::string_view file_source);

/// Reads `path` and extracts from it. Throws Error{Io} if unreadable.
std::vector<ExtractedMethod> extract_test_methods(const std::filesystem::path& path);

/// Returns the normalized method source. Throws FrontendError on lexically
/// broken input or an unparseable method header.
std::string preprocess(std::string_view method_source,
                       const PreprocessConfig& config = {});

/// Parses already-preprocessed source into an AST.
AstTree to_ast(std::string_view preprocessed_source);

struct TestCase {
  std::string id;  // "FileStem#method"
  std::filesystem::path file;
  std::string method_name;
  std::string preprocessed_source;
  AstTree tree;
  Digest digest;
};

TestCase make_test_case(std::string id, std::filesystem::path file,
                        const ExtractedMethod& method,
                        const PreprocessConfig& config);

/// Joins tokens with whitespace and statement layout. Deterministic in the
/// token texts alone.
std::string format_tokens(const std::vector<std::string>& tokens);

}  // namespace tsmin::frontend
