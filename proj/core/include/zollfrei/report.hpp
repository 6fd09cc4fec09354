#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace zollfrei::report {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "report-v1";

struct StageResult {
  std::string name;
  bool pass = true;
  double residual = 0.0;  // headline figure of the stage
  std::vector<std::pair<std::string, double>> metrics;
  std::string note;
};

struct CertificationReport {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<StageResult> stages;

  bool all_pass() const {
    for (const auto& s : stages)
      if (!s.pass) return false;
    return true;
  }
};

// JSON report with schema and version fields; key order and number rendering
// are deterministic, so identical runs produce identical bytes.
void write_report(const CertificationReport& rep, const std::string& path);

// CSV with a header row; values rendered round-trip exact.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// One line per stage plus a verdict line, for the terminal.
std::string format_summary(const CertificationReport& rep);

}  // namespace zollfrei::report
