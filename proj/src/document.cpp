#include "scalesim/document.hpp"

#include <algorithm>
#include <iomanip>

#include "scalesim/errors.hpp"
#include "scalesim/format.hpp"

namespace scalesim {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header,
                     const CsvMeta& meta)
    : os_(os), width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << '\n';
  os_ << "# spec_hash=" << meta.spec_hash << '\n';
  os_ << "# seed=" << meta.seed << '\n';
  os_ << "# version=" << kVersion << " grammar=" << kConfigGrammar << '\n';
  for (const auto& [k, v] : meta.extra) os_ << "# " << k << '=' << v << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw InvalidArgument("csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    os_ << (i ? "," : "") << format_double(values[i]);
  }
  os_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw InvalidArgument("csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string& f = fields[i];
    os_ << (i ? "," : "");
    if (f.find_first_of(",\"") != std::string::npos) {
      os_ << '"';
      for (char c : f) os_ << (c == '"' ? "\"\"" : std::string(1, c));
      os_ << '"';
    } else {
      os_ << f;
    }
  }
  os_ << '\n';
}

void write_hypothesis_report(std::ostream& os, const std::string& spec_name,
                             const HypothesisReport& report) {
  os << "[" << spec_name << "]\n";
  for (const auto& [k, v] : report.records()) os << k << " = " << v << '\n';
}

void write_reports_table(std::ostream& os, const std::vector<TestReport>& reports) {
  std::size_t w = 4;
  for (const auto& r : reports) w = std::max(w, r.name.size());
  os << std::left << std::setw(static_cast<int>(w)) << "test" << "  "
     << std::setw(24) << "observed" << "  " << std::setw(24) << "reference" << "  "
     << std::setw(16) << "provenance" << "  result  band\n";
  for (const auto& r : reports) {
    os << std::left << std::setw(static_cast<int>(w)) << r.name << "  "
       << std::setw(24) << format_double(r.observed) << "  " << std::setw(24)
       << format_double(r.reference) << "  " << std::setw(16) << to_string(r.provenance)
       << "  " << (r.pass ? "PASS  " : "FAIL  ") << "  " << r.band << '\n';
  }
  os << std::right;
}

void write_reports_csv(std::ostream& os, const std::vector<TestReport>& reports,
                       const CsvMeta& meta) {
  CsvWriter w(os, {"name", "observed", "reference", "provenance", "band", "pass"}, meta);
  for (const auto& r : reports) {
    w.row({r.name, format_double(r.observed), format_double(r.reference),
           to_string(r.provenance), r.band, r.pass ? "1" : "0"});
  }
}

void write_path_summaries(std::ostream& os, const std::vector<PathSummary>& paths,
                          const CsvMeta& meta) {
  CsvWriter w(os,
              {"path", "start", "final_state", "absorbed", "absorb_time", "steps", "qv",
               "residual", "residual_qv", "sigma2_time", "clamp_events"},
              meta);
  for (const auto& p : paths) {
    w.row({std::to_string(p.index), format_double(p.start), format_double(p.final_state),
           p.absorbed ? "1" : "0", format_double(p.absorb_time), std::to_string(p.steps),
           format_double(p.qv), format_double(p.residual), format_double(p.residual_qv),
           format_double(p.sigma2_time), std::to_string(p.clamp_events)});
  }
}

void write_path_samples(std::ostream& os, const std::vector<PathSample>& paths,
                        const CsvMeta& meta) {
  CsvWriter w(os, {"path", "scheme", "time", "state"}, meta);
  for (const auto& p : paths) {
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      w.row({std::to_string(p.index), to_string(p.scheme), format_double(p.times[i]),
             format_double(p.states[i])});
    }
  }
}

void write_xy(std::ostream& os, const std::string& xname,
              const std::vector<std::string>& ynames, const std::vector<double>& x,
              const std::vector<std::vector<double>>& ys, const CsvMeta& meta) {
  if (ys.size() != ynames.size()) throw InvalidArgument("plot column count mismatch");
  for (const auto& y : ys) {
    if (y.size() != x.size()) throw InvalidArgument("plot column length mismatch");
  }
  std::vector<std::string> header{xname};
  header.insert(header.end(), ynames.begin(), ynames.end());
  CsvWriter w(os, header, meta);
  std::vector<double> row(header.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    row[0] = x[i];
    for (std::size_t j = 0; j < ys.size(); ++j) row[j + 1] = ys[j][i];
    w.row(row);
  }
}

}  // namespace scalesim
