#include <ostream>
#include <string>

#include "ludrec/conditions.hpp"
#include "ludrec/io.hpp"

namespace ludrec {

namespace {

void WriteText(std::ostream& out, const ConditionReport& r, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  out << pad << r.name << ":\n";
  out << pad << "  verdict: " << (r.label.empty() ? std::string(ToString(r.verdict)) : r.label)
      << '\n';
  for (const auto& [key, value] : r.constants) {
    out << pad << "  " << key << ": " << FormatReal(value) << '\n';
  }
  for (const auto& note : r.details) out << pad << "  note: " << note << '\n';
  for (const auto& child : r.children) WriteText(out, child, depth + 1);
}

// Condition names never contain commas, but notes are not written to CSV
// anyway; only the name needs guarding.
std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

void WriteReportText(std::ostream& out, const ConditionReport& report) {
  WriteText(out, report, 0);
}

void WriteReportCsvHeader(std::ostream& out) {
  out << "condition,verdict,constant_name,constant_value,seed\n";
}

void WriteReportCsv(std::ostream& out, const ConditionReport& report, std::uint64_t seed) {
  out << CsvField(report.name) << ',' << ToString(report.verdict) << ',';
  if (report.constants.empty()) {
    out << ",,";
  } else {
    out << CsvField(report.constants.front().first) << ','
        << FormatReal(report.constants.front().second) << ',';
  }
  out << seed << '\n';
  for (const auto& child : report.children) WriteReportCsv(out, child, seed);
}

}  // namespace ludrec
