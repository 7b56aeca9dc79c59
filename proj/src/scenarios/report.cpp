#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "glharm/errors.hpp"
#include "glharm/scenarios.hpp"

namespace glharm::scenarios {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

std::string table_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + num(row[i]);
    out += "\n";
  }
  return out;
}

std::string report_text(const Report& report) {
  std::ostringstream out;
  for (const auto& s : report.scenarios) {
    out << "scenario " << s.name << " (" << s.kind << "): " << (s.passed() ? "PASS" : "FAIL") << "\n";
    out << "  config:\n";
    std::istringstream echo(s.echo);
    for (std::string line; std::getline(echo, line);) out << "    " << line << "\n";
    if (!s.disclosure.empty()) out << "  connection: " << s.disclosure << "\n";
    out << "  values:\n";
    for (const auto& [name, v] : s.values) out << "    " << name << " = " << num(v) << "\n";
    out << "  verdicts:\n";
    for (const auto& v : s.verdicts)
      out << "    " << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << num(v.value) << " " << v.comparison << " "
          << num(v.tolerance) << " (" << v.tolerance_name << ")\n";
    for (const auto& n : s.notes) out << "  note: " << n << "\n";
  }
  out << "overall: " << (report.passed() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

std::string report_json(const Report& report) {
  nlohmann::ordered_json root;
  root["passed"] = report.passed();
  root["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& s : report.scenarios) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["kind"] = s.kind;
    j["passed"] = s.passed();
    j["config"] = s.echo;
    if (!s.disclosure.empty()) j["connection"] = s.disclosure;
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (const auto& [name, v] : s.values) values[name] = json_number(v);
    j["values"] = values;
    j["verdicts"] = nlohmann::ordered_json::array();
    for (const auto& v : s.verdicts)
      j["verdicts"].push_back({{"name", v.name},
                               {"value", json_number(v.value)},
                               {"comparison", v.comparison},
                               {"tolerance", json_number(v.tolerance)},
                               {"tolerance_name", v.tolerance_name},
                               {"pass", v.pass}});
    j["notes"] = s.notes;
    root["scenarios"].push_back(j);
  }
  return root.dump(2) + "\n";
}

void write_report(const Report& report, const std::filesystem::path& out_dir, bool emit_plots) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());
  write_file(out_dir / "report.txt", report_text(report));
  write_file(out_dir / "report.json", report_json(report));
  for (const auto& s : report.scenarios) {
    for (const auto& t : s.tables) write_file(out_dir / (file_stem(s.name) + "_" + t.name + ".csv"), table_csv(t));
    if (emit_plots)
      for (const auto& p : s.plots)
        write_file(out_dir / (file_stem(s.name) + "_plot_" + p.name + ".csv"), table_csv(p));
  }
}

}  // namespace glharm::scenarios
