#pragma once

// Result records and their byte-stable JSON / CSV serialization. Numbers are
// printed with 17 significant digits, keys in a fixed order, LF line endings.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pseudospec/metric.hpp"
#include "pseudospec/numkit.hpp"

namespace pseudospec::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

enum class OutputFormat { json, csv };

struct Threshold {
  std::string param;
  double value = 0.0;
  std::string direction;  // "real_to_complex" or "complex_to_real"
  double bracket_low = 0.0;
  double bracket_high = 0.0;
};

struct ResultRecord {
  std::string schema_version = kSchemaVersion;
  std::string command;
  std::string model;
  Json params = Json::object();
  std::vector<Complex> eigenvalues;
  std::string classification;
  std::optional<MetricReport> metric_report;
  std::optional<Threshold> threshold;
  Json extras = Json::object();  // command-specific sections, emitted in insertion order
  long long runtime_ms = 0;
};

inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json complex_json(const Complex& z) {
  Json j = Json::object();
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

inline Json complex_list_json(const std::vector<Complex>& zs) {
  Json arr = Json::array();
  for (const Complex& z : zs) arr.push_back(complex_json(z));
  return arr;
}

inline Json matrix_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<Complex> row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(complex_list_json(row));
  }
  return rows;
}

inline Json metric_report_json(const MetricReport& r) {
  Json j = Json::object();
  j["relation_residual"] = r.relation_residual;
  j["hermiticity_residual"] = r.hermiticity_residual;
  j["min_eig"] = r.min_eig;
  j["verdict"] = std::string(to_string(r.verdict));
  return j;
}

inline Json threshold_json(const Threshold& t) {
  Json j = Json::object();
  j["param"] = t.param;
  j["value"] = t.value;
  j["direction"] = t.direction;
  j["bracket"] = Json::array({t.bracket_low, t.bracket_high});
  return j;
}

inline Json to_json(const ResultRecord& r) {
  Json j = Json::object();
  j["schema_version"] = r.schema_version;
  j["command"] = r.command;
  j["model"] = r.model;
  j["params"] = r.params;
  j["eigenvalues"] = complex_list_json(r.eigenvalues);
  j["classification"] = r.classification;
  if (r.metric_report) j["metric_report"] = metric_report_json(*r.metric_report);
  if (r.threshold) j["threshold"] = threshold_json(*r.threshold);
  for (const auto& [key, value] : r.extras.items()) j[key] = value;
  j["runtime_ms"] = r.runtime_ms;
  return j;
}

namespace detail {

inline bool is_flat(const Json& j) {
  if (!j.is_object() || j.size() > 4) return false;
  for (const auto& [k, v] : j.items()) {
    if (v.is_structured()) return false;
  }
  return true;
}

inline void write_scalar(const Json& j, std::string& out) {
  if (j.is_number_float()) {
    out += format_number(j.get<double>());
  } else {
    out += j.dump();  // strings (escaped), integers, booleans, null
  }
}

inline void write(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    if (is_flat(j)) {
      out += "{";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ", ";
        first = false;
        out += Json(k).dump() + ": ";
        write_scalar(v, out);
      }
      out += "}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += inner + Json(k).dump() + ": ";
      write(v, out, indent + 1);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    bool scalars = true;
    for (const auto& v : j) scalars = scalars && !v.is_structured();
    if (scalars) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        write_scalar(j[i], out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += inner;
      write(j[i], out, indent + 1);
    }
    out += "\n" + pad + "]";
  } else {
    write_scalar(j, out);
  }
}

inline std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  std::string s;
  write_scalar(v, s);
  return s;
}

}  // namespace detail

/// Deterministic pretty printer: small flat objects on one line, floats as %.17g.
inline std::string dump_json(const Json& j) {
  std::string out;
  detail::write(j, out, 0);
  out += "\n";
  return out;
}

/// `# key=value` preamble followed by `index,re,im` rows. A record carrying a
/// `points` array (parameter sweeps) is written as `value,index,re,im`.
inline std::string to_csv(const ResultRecord& r) {
  std::string out;
  auto meta = [&](const std::string& key, const std::string& value) { out += "# " + key + "=" + value + "\n"; };
  meta("schema_version", r.schema_version);
  meta("command", r.command);
  meta("model", r.model);
  for (const auto& [k, v] : r.params.items()) meta("params." + k, detail::scalar_text(v));
  meta("classification", r.classification);
  if (r.metric_report) {
    meta("metric_report.relation_residual", format_number(r.metric_report->relation_residual));
    meta("metric_report.hermiticity_residual", format_number(r.metric_report->hermiticity_residual));
    meta("metric_report.min_eig", format_number(r.metric_report->min_eig));
    meta("metric_report.verdict", std::string(to_string(r.metric_report->verdict)));
  }
  if (r.threshold) {
    meta("threshold.param", r.threshold->param);
    meta("threshold.value", format_number(r.threshold->value));
    meta("threshold.direction", r.threshold->direction);
  }
  for (const auto& [k, v] : r.extras.items()) {
    if (!v.is_structured()) meta(k, detail::scalar_text(v));
  }
  meta("runtime_ms", std::to_string(r.runtime_ms));

  const auto points = r.extras.find("points");
  if (points != r.extras.end() && points->is_array()) {
    out += "value,index,re,im\n";
    for (const auto& p : *points) {
      const std::string value = format_number(p.at("value").get<double>());
      std::size_t i = 0;
      for (const auto& z : p.at("eigenvalues")) {
        out += value + "," + std::to_string(i++) + "," + format_number(z.at("re").get<double>()) + "," +
               format_number(z.at("im").get<double>()) + "\n";
      }
    }
    return out;
  }
  out += "index,re,im\n";
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    out += std::to_string(i) + "," + format_number(r.eigenvalues[i].real()) + "," +
           format_number(r.eigenvalues[i].imag()) + "\n";
  }
  return out;
}

inline std::string emit(const ResultRecord& r, OutputFormat format) {
  return format == OutputFormat::json ? dump_json(to_json(r)) : to_csv(r);
}

}  // namespace pseudospec::cli
