#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scalesim/coefficients.hpp"
#include "scalesim/simulate.hpp"
#include "scalesim/verify.hpp"

namespace scalesim {

inline constexpr const char* kVersion = "0.1.0";
/// Version of the configuration grammar, stamped into every output.
inline constexpr int kConfigGrammar = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Metadata written as `# key=value` lines after a CSV header.
struct CsvMeta {
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;
};

/// Header line, `#` metadata lines, then rows. Doubles use 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header, const CsvMeta& meta);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
  std::size_t width_;
};

void write_hypothesis_report(std::ostream& os, const std::string& spec_name,
                             const HypothesisReport& report);

void write_reports_table(std::ostream& os, const std::vector<TestReport>& reports);
void write_reports_csv(std::ostream& os, const std::vector<TestReport>& reports,
                       const CsvMeta& meta);

/// One line per path (summary fields).
void write_path_summaries(std::ostream& os, const std::vector<PathSummary>& paths,
                          const CsvMeta& meta);
/// Long format: path, time, state for each recorded event.
void write_path_samples(std::ostream& os, const std::vector<PathSample>& paths,
                        const CsvMeta& meta);

/// Two-column (or wider) plot table.
void write_xy(std::ostream& os, const std::string& xname,
              const std::vector<std::string>& ynames, const std::vector<double>& x,
              const std::vector<std::vector<double>>& ys, const CsvMeta& meta);

}  // namespace scalesim
