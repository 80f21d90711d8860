#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ecoreport::cli {

/// Settings shared by every subcommand; also loadable with `--config FILE`.
struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path root;      // default: the manifest's directory
  std::filesystem::path criteria;  // default: built-in criteria
  std::filesystem::path stoplist;  // default: built-in English stop list
  std::filesystem::path model;     // SEM model config
  std::filesystem::path out = "out";
  std::filesystem::path frequencies;  // default: <out>/frequencies.csv
  std::filesystem::path sample;       // default: <out>/sample.csv
  bool stemming = false;
  bool match_before_stoplist = false;
  std::string strategy = "linear";
  std::string elimination = "conjunction";
  std::string language = "en";
  unsigned threads = 1;
};

/// Runs one subcommand (`args` excludes the program name). Returns the exit
/// status: 0 success, 1 runtime or analysis error, 2 usage error.
int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecoreport::cli
