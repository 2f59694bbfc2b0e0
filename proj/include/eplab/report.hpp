#pragma once
// Machine-readable experiment reports: a JSON document with config echo,
// results, and verdicts, plus CSV sweep tables whose header is always
// `n,m,t,<norm columns...>`. Readers validate the column schema and refuse
// files with unknown columns. Numbers are printed with round-trip precision,
// so a report is bitwise reproducible from its echoed config and seed
// (runtime metadata is excluded from such comparisons).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "eplab/grid.hpp"

namespace eplab {

using ordered_json = nlohmann::ordered_json;

struct Verdict {
  std::string name;       // short identifier, e.g. "separation_lower_bound"
  std::string invariant;  // the tested property in words
  double observed = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct CsvTable {
  std::string name;  // file stem, e.g. "separation" -> separation.csv
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw error("CsvTable: row width does not match header");
    rows.push_back(std::move(row));
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw error("CsvTable: cannot open " + path);
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    char buf[40];
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", row[c]);
        out << buf << (c + 1 < row.size() ? "," : "\n");
      }
    }
  }

  static CsvTable read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("CsvTable: cannot open " + path);
    CsvTable t;
    t.name = std::filesystem::path(path).stem().string();
    std::string line;
    if (!std::getline(in, line)) throw error("CsvTable: empty file " + path);
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      t.columns.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<double> row;
      std::size_t pos = 0;
      while (pos <= line.size()) {
        const std::size_t comma = line.find(',', pos);
        row.push_back(std::stod(line.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      t.add_row(std::move(row));
    }
    return t;
  }

  // Strict schema check: the file must carry exactly the expected columns, in
  // order. Unknown columns are an error, never silently dropped.
  void require_columns(const std::vector<std::string>& expected) const {
    for (const std::string& col : columns) {
      bool known = false;
      for (const std::string& e : expected) known = known || (e == col);
      if (!known) throw error("CsvTable: unknown column '" + col + "' in " + name);
    }
    if (columns != expected) throw error("CsvTable: column schema mismatch in " + name);
  }

  int column(const std::string& name_) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c] == name_) return static_cast<int>(c);
    throw error("CsvTable: no column '" + name_ + "'");
  }
};

struct ExperimentReport {
  int schema_version = 1;
  std::string experiment;
  ordered_json config_echo;
  ordered_json results;
  std::vector<Verdict> verdicts;
  std::vector<CsvTable> tables;
  double runtime_seconds = 0.0;

  bool all_pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return !verdicts.empty();
  }

  Verdict& add_verdict(const std::string& name, const std::string& invariant, double observed,
                       double threshold, bool pass) {
    verdicts.push_back({name, invariant, observed, threshold, pass});
    return verdicts.back();
  }

  ordered_json to_json() const {
    ordered_json j;
    j["schema_version"] = schema_version;
    j["experiment"] = experiment;
    j["config"] = config_echo;
    j["results"] = results;
    ordered_json vs = ordered_json::array();
    for (const auto& v : verdicts) {
      ordered_json jv;
      jv["name"] = v.name;
      jv["invariant"] = v.invariant;
      jv["observed"] = v.observed;
      jv["threshold"] = v.threshold;
      jv["pass"] = v.pass;
      vs.push_back(jv);
    }
    j["verdicts"] = vs;
    ordered_json ts = ordered_json::array();
    for (const auto& t : tables) ts.push_back(t.name + ".csv");
    j["tables"] = ts;
    j["runtime_seconds"] = runtime_seconds;
    return j;
  }

  // Writes report.json plus one CSV per table into dir (created if needed).
  void write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / "report.json");
    if (!out) throw error("ExperimentReport: cannot write report.json in " + dir);
    out << to_json().dump(2) << "\n";
    for (const auto& t : tables) t.write((std::filesystem::path(dir) / (t.name + ".csv")).string());
  }
};

}  // namespace eplab
