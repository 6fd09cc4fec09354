#include "zollfrei/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "zollfrei/util.hpp"

namespace zollfrei::report {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_report(const CertificationReport& rep, const std::string& path) {
  json j;
  j["schema"] = kReportSchema;
  j["tool"] = "zollfrei";
  j["version"] = kToolVersion;
  j["command"] = rep.command;
  j["config_hash"] = rep.config_hash;
  j["seed"] = rep.seed;
  j["pass"] = rep.all_pass();
  json stages = json::array();
  for (const auto& s : rep.stages) {
    json e;
    e["name"] = s.name;
    e["pass"] = s.pass;
    e["residual"] = s.residual;
    json m;
    for (const auto& [k, v] : s.metrics) m[k] = v;
    e["metrics"] = m;
    if (!s.note.empty()) e["note"] = s.note;
    stages.push_back(e);
  }
  j["stages"] = stages;
  std::ofstream out(path);
  if (!out) throw domain_error("cannot write report to " + path);
  out << j.dump(1) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw domain_error("cannot write CSV to " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << fmt_double(row[i]);
    out << "\n";
  }
}

std::string format_summary(const CertificationReport& rep) {
  std::ostringstream os;
  for (const auto& s : rep.stages) {
    os << (s.pass ? "  pass  " : "  FAIL  ") << s.name
       << "  residual=" << fmt_double(s.residual);
    if (!s.note.empty()) os << "  (" << s.note << ")";
    os << "\n";
  }
  os << (rep.all_pass() ? "PASS" : "FAIL") << " " << rep.command
     << "  [config " << rep.config_hash << "]\n";
  return os.str();
}

}  // namespace zollfrei::report
