#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "evrp/degradation.hpp"
#include "evrp/model.hpp"
#include "evrp/solver.hpp"

namespace evrp {

/// Malformed or invalid input document.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const char* variant_name(ObjectiveVariant variant) {
  switch (variant) {
    case ObjectiveVariant::base:
      return "base";
    case ObjectiveVariant::quadratic_spread:
      return "quad";
    case ObjectiveVariant::linear_min_dod:
      return "linear";
  }
  return "base";
}

inline std::optional<ObjectiveVariant> variant_from_name(std::string_view name) {
  if (name == "base") return ObjectiveVariant::base;
  if (name == "quad") return ObjectiveVariant::quadratic_spread;
  if (name == "linear") return ObjectiveVariant::linear_min_dod;
  return std::nullopt;
}

struct NodeInfo {
  std::string id;
  std::optional<double> x;
  std::optional<double> y;
};

/// On-disk form of an instance. After parsing, nodes[0] is always the depot;
/// a document listing the depot elsewhere is canonicalized by rotating it to
/// the front and permuting both matrices to match.
struct InstanceDocument {
  int format_version = 1;
  std::vector<NodeInfo> nodes;
  std::string depot;
  std::vector<std::vector<double>> cost_matrix;
  std::vector<std::vector<double>> energy_matrix;
  std::vector<Vehicle> vehicles;
  std::optional<ObjectiveSpec> default_objective;

  Instance to_instance() const {
    Instance inst;
    inst.node_count = static_cast<int>(nodes.size());
    inst.cost = cost_matrix;
    inst.energy = energy_matrix;
    inst.vehicles = vehicles;
    return inst;
  }

  std::vector<std::string> node_ids() const {
    std::vector<std::string> ids;
    ids.reserve(nodes.size());
    for (const NodeInfo& node : nodes) ids.push_back(node.id);
    return ids;
  }
};

namespace iodetail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj,
                                std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError(where + ": unknown member '" + item.key() + "'");
    }
  }
}

inline const json& require_member(const json& obj, const char* key,
                                  const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing required member '" + key + "'");
  }
  return *it;
}

inline double as_number(const json& value, const std::string& where) {
  if (!value.is_number()) throw ParseError(where + ": expected a number");
  return value.get<double>();
}

inline std::string as_string(const json& value, const std::string& where) {
  if (!value.is_string()) throw ParseError(where + ": expected a string");
  return value.get<std::string>();
}

inline std::vector<std::vector<double>> as_matrix(const json& value, int n,
                                                  const std::string& where) {
  if (!value.is_array() || static_cast<int>(value.size()) != n) {
    throw ParseError(where + ": expected " + std::to_string(n) + " rows, got " +
                     std::to_string(value.is_array() ? value.size() : 0));
  }
  std::vector<std::vector<double>> m;
  m.reserve(n);
  for (int i = 0; i < n; ++i) {
    const json& row = value[i];
    const std::string row_where = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ParseError(row_where + ": expected " + std::to_string(n) +
                       " columns, got " +
                       std::to_string(row.is_array() ? row.size() : 0));
    }
    std::vector<double> out_row;
    out_row.reserve(n);
    for (int j = 0; j < n; ++j) {
      out_row.push_back(
          as_number(row[j], row_where + "[" + std::to_string(j) + "]"));
    }
    m.push_back(std::move(out_row));
  }
  return m;
}

/// Fixed-width-free canonical number rendering: integers without a decimal
/// point, everything else with up to six significant digits.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

inline void append_matrix(std::string& out, const char* key,
                          const std::vector<std::vector<double>>& m) {
  out += std::string("  ") + quote(key) + ": [\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += "    [";
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      if (j) out += ", ";
      out += format_number(m[i][j]);
    }
    out += i + 1 < m.size() ? "],\n" : "]\n";
  }
  out += "  ]";
}

}  // namespace iodetail

/// Parses and canonicalizes an instance document. The schema is strict:
/// unknown members, missing members, or dimension mismatches are errors.
inline InstanceDocument parse_instance_document(const std::string& text) {
  namespace d = iodetail;
  d::json root;
  try {
    root = d::json::parse(text);
  } catch (const d::json::parse_error& e) {
    throw ParseError(std::string("document is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("document root must be an object");
  d::reject_unknown_keys(root,
                         {"format_version", "nodes", "depot", "cost_matrix",
                          "energy_matrix", "vehicles", "default_objective"},
                         "document");

  InstanceDocument doc;
  const d::json& version = d::require_member(root, "format_version", "document");
  if (!version.is_number_integer() || version.get<long long>() != 1) {
    throw ParseError("format_version: only version 1 is supported");
  }
  doc.format_version = 1;

  const d::json& nodes = d::require_member(root, "nodes", "document");
  if (!nodes.is_array() || nodes.empty()) {
    throw ParseError("nodes: expected a nonempty array");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const d::json& node = nodes[i];
    if (!node.is_object()) throw ParseError(where + ": expected an object");
    d::reject_unknown_keys(node, {"id", "x", "y"}, where);
    NodeInfo info;
    info.id = d::as_string(d::require_member(node, "id", where), where + ".id");
    if (info.id.empty()) throw ParseError(where + ".id: must be nonempty");
    if (node.contains("x")) info.x = d::as_number(node["x"], where + ".x");
    if (node.contains("y")) info.y = d::as_number(node["y"], where + ".y");
    for (const NodeInfo& seen : doc.nodes) {
      if (seen.id == info.id) {
        throw ParseError(where + ".id: duplicate node id '" + info.id + "'");
      }
    }
    doc.nodes.push_back(std::move(info));
  }
  const int n = static_cast<int>(doc.nodes.size());

  doc.depot = d::as_string(d::require_member(root, "depot", "document"), "depot");
  int depot_index = -1;
  for (int i = 0; i < n; ++i) {
    if (doc.nodes[i].id == doc.depot) depot_index = i;
  }
  if (depot_index < 0) {
    throw ParseError("depot: id '" + doc.depot + "' does not appear in nodes");
  }

  doc.cost_matrix = d::as_matrix(d::require_member(root, "cost_matrix", "document"),
                                 n, "cost_matrix");
  doc.energy_matrix = d::as_matrix(
      d::require_member(root, "energy_matrix", "document"), n, "energy_matrix");

  const d::json& vehicles = d::require_member(root, "vehicles", "document");
  if (!vehicles.is_array() || vehicles.empty()) {
    throw ParseError("vehicles: expected a nonempty array");
  }
  for (std::size_t k = 0; k < vehicles.size(); ++k) {
    const std::string where = "vehicles[" + std::to_string(k) + "]";
    const d::json& vehicle = vehicles[k];
    if (!vehicle.is_object()) throw ParseError(where + ": expected an object");
    d::reject_unknown_keys(vehicle, {"id", "soc_start"}, where);
    Vehicle out;
    out.id = d::as_string(d::require_member(vehicle, "id", where), where + ".id");
    out.soc_start = d::as_number(d::require_member(vehicle, "soc_start", where),
                                 where + ".soc_start");
    doc.vehicles.push_back(std::move(out));
  }

  if (root.contains("default_objective")) {
    const d::json& objective = root["default_objective"];
    if (!objective.is_object()) {
      throw ParseError("default_objective: expected an object");
    }
    d::reject_unknown_keys(objective, {"variant", "alpha"}, "default_objective");
    ObjectiveSpec spec;
    const std::string name =
        d::as_string(d::require_member(objective, "variant", "default_objective"),
                     "default_objective.variant");
    const auto variant = variant_from_name(name);
    if (!variant) {
      throw ParseError("default_objective.variant: unknown variant '" + name +
                       "' (expected base, quad or linear)");
    }
    spec.variant = *variant;
    spec.alpha = d::as_number(
        d::require_member(objective, "alpha", "default_objective"),
        "default_objective.alpha");
    if (!(spec.alpha >= 0.0) || !std::isfinite(spec.alpha)) {
      throw ParseError("default_objective.alpha: must be finite and >= 0");
    }
    doc.default_objective = spec;
  }

  // Canonical order puts the depot first, other nodes in document order.
  if (depot_index != 0) {
    std::vector<int> perm{depot_index};
    for (int i = 0; i < n; ++i) {
      if (i != depot_index) perm.push_back(i);
    }
    InstanceDocument rotated = doc;
    auto permute = [&perm, n](const std::vector<std::vector<double>>& m) {
      std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out[i][j] = m[perm[i]][perm[j]];
      }
      return out;
    };
    for (int i = 0; i < n; ++i) rotated.nodes[i] = doc.nodes[perm[i]];
    rotated.cost_matrix = permute(doc.cost_matrix);
    rotated.energy_matrix = permute(doc.energy_matrix);
    doc = std::move(rotated);
  }
  return doc;
}

/// Canonical serialization: sorted keys, two-space indent, numbers with up
/// to six significant digits. serialize(parse(text)) is a fixed point.
inline std::string serialize_instance(const InstanceDocument& doc) {
  namespace d = iodetail;
  std::string out = "{\n";
  d::append_matrix(out, "cost_matrix", doc.cost_matrix);
  out += ",\n";
  if (doc.default_objective) {
    out += "  \"default_objective\": {\"alpha\": " +
           d::format_number(doc.default_objective->alpha) + ", \"variant\": " +
           d::quote(variant_name(doc.default_objective->variant)) + "},\n";
  }
  out += "  \"depot\": " + d::quote(doc.depot) + ",\n";
  d::append_matrix(out, "energy_matrix", doc.energy_matrix);
  out += ",\n";
  out += "  \"format_version\": 1,\n";
  out += "  \"nodes\": [\n";
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) {
    const NodeInfo& node = doc.nodes[i];
    out += "    {\"id\": " + d::quote(node.id);
    if (node.x) out += ", \"x\": " + d::format_number(*node.x);
    if (node.y) out += ", \"y\": " + d::format_number(*node.y);
    out += i + 1 < doc.nodes.size() ? "},\n" : "}\n";
  }
  out += "  ],\n";
  out += "  \"vehicles\": [\n";
  for (std::size_t k = 0; k < doc.vehicles.size(); ++k) {
    out += "    {\"id\": " + d::quote(doc.vehicles[k].id) +
           ", \"soc_start\": " + d::format_number(doc.vehicles[k].soc_start);
    out += k + 1 < doc.vehicles.size() ? "},\n" : "}\n";
  }
  out += "  ]\n}\n";
  return out;
}

/// Parses, canonicalizes and validates; returns the ready-to-solve instance.
inline Instance parse_instance(const std::string& text) {
  const InstanceDocument doc = parse_instance_document(text);
  const Instance inst = doc.to_instance();
  const auto violations = validate_instance(inst);
  if (!violations.empty()) {
    std::string message = "instance failed validation:";
    for (const Violation& v : violations) {
      message += "\n  " + v.field + ": " + v.message;
    }
    throw ParseError(message);
  }
  return inst;
}

/// One per-alpha block of a solve or sweep report.
struct ReportEntry {
  double alpha = 0.0;
  ObjectiveVariant variant = ObjectiveVariant::base;
  double cost_diff_percent = 0.0;
  double objective = 0.0;
  double route_cost = 0.0;
  std::vector<double> soc_end;
  std::vector<double> dod;
  double dod_max = 0.0;
  double dod_min = 0.0;
  double worst_case_cycles = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::string>> tours;  // node ids, per vehicle
  bool proven_optimal = true;
};

struct ReportDocument {
  int format_version = 1;
  std::string cycles_note =
      "cycle counts are estimates from the calibrated DoD power-law wear model";
  std::vector<ReportEntry> entries;
};

inline ReportEntry make_report_entry(const std::vector<std::string>& node_ids,
                                     const WoehlerCurve& curve,
                                     ObjectiveVariant variant, double alpha,
                                     const SolveResult& result,
                                     double cost_diff_percent) {
  ReportEntry entry;
  entry.alpha = alpha;
  entry.variant = variant;
  entry.cost_diff_percent = cost_diff_percent;
  entry.objective = result.objective;
  entry.route_cost = result.route_cost;
  entry.soc_end = result.fleet.soc_end;
  entry.dod = result.fleet.dod;
  entry.dod_max = result.fleet.dod_max;
  entry.dod_min = result.fleet.dod_min;
  entry.worst_case_cycles = worst_case_cycles(curve, result.fleet);
  for (const Tour& tour : result.solution.tours) {
    std::vector<std::string> ids;
    ids.reserve(tour.size());
    for (int node : tour) ids.push_back(node_ids[node]);
    entry.tours.push_back(std::move(ids));
  }
  entry.proven_optimal = result.proven_optimal;
  return entry;
}

namespace iodetail {

inline void append_percent_list(std::string& out, const std::vector<double>& v) {
  out += "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  out += "]";
}

}  // namespace iodetail

/// Canonical machine-readable report. Infinite cycle estimates (a fleet that
/// never cycled) serialize as null.
inline std::string serialize_report(const ReportDocument& report) {
  namespace d = iodetail;
  std::string out = "{\n";
  out += "  \"cycles_note\": " + d::quote(report.cycles_note) + ",\n";
  out += "  \"entries\": [\n";
  for (std::size_t e = 0; e < report.entries.size(); ++e) {
    const ReportEntry& entry = report.entries[e];
    out += "    {\n";
    out += "      \"alpha\": " + d::format_number(entry.alpha) + ",\n";
    out += "      \"cost_diff_percent\": " +
           d::format_number(entry.cost_diff_percent) + ",\n";
    out += "      \"dod\": ";
    d::append_percent_list(out, entry.dod);
    out += ",\n";
    out += "      \"dod_max\": " + d::format_number(entry.dod_max) + ",\n";
    out += "      \"dod_min\": " + d::format_number(entry.dod_min) + ",\n";
    out += "      \"objective\": " + d::format_number(entry.objective) + ",\n";
    out += "      \"proven_optimal\": ";
    out += entry.proven_optimal ? "true" : "false";
    out += ",\n";
    out += "      \"route_cost\": " + d::format_number(entry.route_cost) + ",\n";
    out += "      \"soc_end\": ";
    d::append_percent_list(out, entry.soc_end);
    out += ",\n";
    out += "      \"tours\": [";
    for (std::size_t k = 0; k < entry.tours.size(); ++k) {
      if (k) out += ", ";
      out += "[";
      for (std::size_t p = 0; p < entry.tours[k].size(); ++p) {
        if (p) out += ", ";
        out += d::quote(entry.tours[k][p]);
      }
      out += "]";
    }
    out += "],\n";
    out += "      \"variant\": " + d::quote(variant_name(entry.variant)) + ",\n";
    out += "      \"worst_case_cycles\": ";
    out += std::isfinite(entry.worst_case_cycles)
               ? d::format_number(entry.worst_case_cycles)
               : "null";
    out += "\n    }";
    out += e + 1 < report.entries.size() ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"format_version\": 1\n}\n";
  return out;
}

namespace iodetail {

inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

inline std::string signed_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f", v);
  return buf;
}

/// Cycle estimates round to the nearest hundred; the bound style rounds up
/// and marks the value as an upper bound.
inline std::string cycles_text(double v, bool bound_style) {
  if (!std::isfinite(v)) return "n/a";
  if (bound_style) {
    const double up = (std::floor(v / 100.0) + 1.0) * 100.0;
    return "<" + format_number(up);
  }
  return format_number(std::floor(v / 100.0 + 0.5) * 100.0);
}

inline std::string brace_list(const std::vector<double>& v) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += percent(v[i]);
  }
  out += "}";
  return out;
}

inline std::string tour_text(const std::string& depot,
                             const std::vector<std::string>& tour) {
  std::string out = depot;
  for (const std::string& id : tour) out += " -> " + id;
  out += " -> " + depot;
  return out;
}

inline void append_table(std::string& out,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) {
        line += std::string(widths[c] - row[c].size() + 2, ' ');
      }
    }
    out += line + "\n";
  }
}

}  // namespace iodetail

/// Human-readable block for a single solve.
inline std::string report_to_text(const ReportDocument& report,
                                  const std::vector<std::string>& vehicle_ids,
                                  const std::string& depot_id,
                                  bool table1_style = false) {
  namespace d = iodetail;
  std::string out;
  if (report.entries.size() == 1) {
    const ReportEntry& entry = report.entries.front();
    out += std::string("variant: ") + variant_name(entry.variant) +
           "   alpha: " + d::format_number(entry.alpha) + "\n";
    out += "objective: " + d::format_number(entry.objective) + "\n";
    out += "route cost: " + d::format_number(entry.route_cost) +
           " (diff vs alpha=0 base: " + d::signed_percent(entry.cost_diff_percent) +
           "%)\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"vehicle", "soc_end [%]", "dod [%]", "tour"});
    for (std::size_t k = 0; k < entry.tours.size(); ++k) {
      rows.push_back({vehicle_ids[k], d::percent(entry.soc_end[k]),
                      d::percent(entry.dod[k]),
                      d::tour_text(depot_id, entry.tours[k])});
    }
    d::append_table(out, rows);
    out += "fleet dod: max " + d::percent(entry.dod_max) + "  min " +
           d::percent(entry.dod_min) + "  spread " +
           d::percent(entry.dod_max - entry.dod_min) + "\n";
    out += "worst-case cycles: " +
           d::cycles_text(entry.worst_case_cycles, table1_style) + "\n";
    out += std::string("proven optimal: ") +
           (entry.proven_optimal ? "yes" : "no") + "\n";
  } else {
    out += std::string("sweep variant: ") +
           variant_name(report.entries.front().variant) + "\n";
    std::vector<std::vector<std::string>> rows(6);
    rows[0].push_back("alpha");
    rows[1].push_back("cost diff [%]");
    rows[2].push_back("soc_end [%]");
    rows[3].push_back("dod [%]");
    rows[4].push_back("dod spread");
    rows[5].push_back("cycles");
    for (const ReportEntry& entry : report.entries) {
      rows[0].push_back(d::format_number(entry.alpha));
      rows[1].push_back(d::signed_percent(entry.cost_diff_percent));
      rows[2].push_back(d::brace_list(entry.soc_end));
      rows[3].push_back(d::brace_list(entry.dod));
      rows[4].push_back(d::percent(entry.dod_max - entry.dod_min));
      rows[5].push_back(d::cycles_text(entry.worst_case_cycles, table1_style));
    }
    d::append_table(out, rows);
    for (const ReportEntry& entry : report.entries) {
      out += "\ntours at alpha=" + d::format_number(entry.alpha) +
             (entry.proven_optimal ? "" : " (not proven optimal)") + ":\n";
      for (std::size_t k = 0; k < entry.tours.size(); ++k) {
        out += "  " + vehicle_ids[k] + ": " +
               d::tour_text(depot_id, entry.tours[k]) + "\n";
      }
    }
  }
  out += "note: " + report.cycles_note + "\n";
  return out;
}

}  // namespace evrp
