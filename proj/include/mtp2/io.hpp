#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mtp2/certify.hpp"
#include "mtp2/ising.hpp"
#include "mtp2/table.hpp"

namespace mtp2 {

enum class SampleFormat { Auto, Pm1, ZeroOne, Counts };

/// CSV observations ({-1,1} or {0,1} alphabets, optional header, one row per
/// observation) or "mask,count" lines in the counts format. dim_hint is
/// required context only when the counts format cannot reveal d on its own.
SampleCounts parse_sample_text(const std::string& text, SampleFormat format = SampleFormat::Auto,
                               int dim_hint = 0);
SampleCounts parse_sample(const std::string& path, SampleFormat format = SampleFormat::Auto,
                          int dim_hint = 0);

/// Edge list with 1-indexed "i j" lines, or the keyword "complete".
/// Duplicate edges are dropped with a warning.
Graph parse_graph_text(const std::string& text, int d, std::vector<std::string>* warnings = nullptr);
Graph parse_graph(const std::string& path_or_keyword, int d,
                  std::vector<std::string>* warnings = nullptr);

/// "mask,value" lines forming a probability table.
ProbTable parse_table_text(const std::string& text, int dim_hint = 0);
ProbTable parse_table(const std::string& path, int dim_hint = 0);

/// Locale-independent scientific formatting with 12 fractional digits.
std::string format_double(double v);

struct RunConfig {
  std::string command;  // fit | fit-general | fit-symmetric | check-mtp2 | check-existence | certify
  std::string input;
  SampleFormat format = SampleFormat::Auto;
  std::string graph = "complete";
  std::string table;  // candidate table for `certify`
  double epsilon = 1e-10;
  CertifyTolerances tols{};
  bool symmetric = false;
  bool general = false;
  std::string output;  // empty: write the report to `out`
  int max_sweeps = 10000;
  int dim_hint = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNoMle = 2;
inline constexpr int kExitNotConverged = 3;

/// Executes one subcommand; writes the report to cfg.output or `out`,
/// diagnostics to `err`. Returns the process exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace mtp2
