// Copyright 2026 The armsizer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Motor and gearbox catalogs. JSON documents hold {"motors": [...],
// "gearboxes": [...]} with the same keys as the CSV columns:
//   motors:    name,rated_torque_Nm,peak_torque_Nm,rated_speed_rpm,max_speed_rpm,
//              rotor_inertia_kgm2,mass_kg,rated_power_W
//   gearboxes: name,ratio,rated_out_Nm,peak_out_Nm,efficiency,mass_kg,max_input_rpm

#pragma once

#include <armsizer/csv.hpp>

#include <nlohmann/json.hpp>

#include <set>
#include <vector>

namespace armsizer::sizing {

struct Motor {
  std::string name;
  double rated_torque = 0.0;   // N*m
  double peak_torque = 0.0;    // N*m
  double rated_speed = 0.0;    // rpm
  double max_speed = 0.0;      // rpm
  double rotor_inertia = 0.0;  // kg*m^2
  double mass = 0.0;           // kg
  double rated_power = 0.0;    // W
};

struct Gearbox {
  std::string name;
  double ratio = 1.0;
  double rated_output_torque = 0.0;  // N*m
  double peak_output_torque = 0.0;   // N*m
  double efficiency = 1.0;
  double mass = 0.0;             // kg
  double max_input_speed = 0.0;  // rpm
};

struct ActuatorCatalog {
  std::vector<Motor> motors;
  std::vector<Gearbox> gearboxes;

  const Motor& motor(const std::string& name) const {
    for (const auto& m : motors) {
      if (m.name == name) return m;
    }
    throw NotFound("unknown motor '" + name + "'");
  }
  const Gearbox& gearbox(const std::string& name) const {
    for (const auto& g : gearboxes) {
      if (g.name == name) return g;
    }
    throw NotFound("unknown gearbox '" + name + "'");
  }
};

inline const std::vector<std::string>& motor_columns() {
  static const std::vector<std::string> c = {"name",          "rated_torque_Nm",    "peak_torque_Nm",
                                             "rated_speed_rpm", "max_speed_rpm",    "rotor_inertia_kgm2",
                                             "mass_kg",       "rated_power_W"};
  return c;
}

inline const std::vector<std::string>& gearbox_columns() {
  static const std::vector<std::string> c = {"name",       "ratio",   "rated_out_Nm", "peak_out_Nm",
                                             "efficiency", "mass_kg", "max_input_rpm"};
  return c;
}

namespace detail {

inline void check_motor(const Motor& m, const std::string& where) {
  auto fail = [&](const std::string& field, const std::string& msg) {
    throw InvalidArgument(where + "." + field + ": " + msg);
  };
  if (m.name.empty()) fail("name", "must not be empty");
  const std::pair<const char*, double> positive[] = {
      {"rated_torque_Nm", m.rated_torque}, {"peak_torque_Nm", m.peak_torque},
      {"rated_speed_rpm", m.rated_speed},  {"max_speed_rpm", m.max_speed},
      {"rotor_inertia_kgm2", m.rotor_inertia}, {"mass_kg", m.mass},
      {"rated_power_W", m.rated_power}};
  for (const auto& [field, v] : positive) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be positive");
  }
  if (m.peak_torque < m.rated_torque) fail("peak_torque_Nm", "must be >= rated_torque_Nm");
  if (m.max_speed < m.rated_speed) fail("max_speed_rpm", "must be >= rated_speed_rpm");
}

inline void check_gearbox(const Gearbox& g, const std::string& where) {
  auto fail = [&](const std::string& field, const std::string& msg) {
    throw InvalidArgument(where + "." + field + ": " + msg);
  };
  if (g.name.empty()) fail("name", "must not be empty");
  if (!(g.ratio > 1.0) || !std::isfinite(g.ratio)) fail("ratio", "must be > 1");
  if (!(g.rated_output_torque > 0.0)) fail("rated_out_Nm", "must be positive");
  if (!(g.peak_output_torque >= g.rated_output_torque) || !std::isfinite(g.peak_output_torque)) {
    fail("peak_out_Nm", "must be >= rated_out_Nm");
  }
  if (!(g.efficiency > 0.0 && g.efficiency <= 1.0)) fail("efficiency", "must be in (0, 1]");
  if (!(g.mass >= 0.0) || !std::isfinite(g.mass)) fail("mass_kg", "must be >= 0");
  if (!(g.max_input_speed > 0.0) || !std::isfinite(g.max_input_speed)) fail("max_input_rpm", "must be positive");
}

/// Rows of a CSV table with the exact header `columns`.
inline std::vector<std::vector<std::string>> read_table(const std::string& text, const std::vector<std::string>& columns,
                                                        const std::string& table) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = csv::split_line(line);
    if (!header) {
      if (cells != columns) throw InvalidArgument(table + " line " + std::to_string(line_no) + ": unexpected header");
      header = true;
      continue;
    }
    if (cells.size() != columns.size()) {
      throw InvalidArgument(table + " line " + std::to_string(line_no) + ": expected " +
                            std::to_string(columns.size()) + " fields, got " + std::to_string(cells.size()));
    }
    cells.push_back(std::to_string(line_no));
    rows.push_back(std::move(cells));
  }
  if (!header) throw InvalidArgument(table + ": missing header");
  return rows;
}

}  // namespace detail

/// Validates schema invariants and name uniqueness.
inline void validate_catalog(const ActuatorCatalog& c) {
  if (c.motors.empty()) throw InvalidArgument("motors: list must not be empty");
  if (c.gearboxes.empty()) throw InvalidArgument("gearboxes: list must not be empty");
  std::set<std::string> names;
  for (std::size_t i = 0; i < c.motors.size(); ++i) {
    detail::check_motor(c.motors[i], "motors[" + std::to_string(i) + "]");
    if (!names.insert(c.motors[i].name).second) {
      throw InvalidArgument("motors[" + std::to_string(i) + "].name: duplicate '" + c.motors[i].name + "'");
    }
  }
  for (std::size_t i = 0; i < c.gearboxes.size(); ++i) {
    detail::check_gearbox(c.gearboxes[i], "gearboxes[" + std::to_string(i) + "]");
    if (!names.insert(c.gearboxes[i].name).second) {
      throw InvalidArgument("gearboxes[" + std::to_string(i) + "].name: duplicate '" + c.gearboxes[i].name + "'");
    }
  }
}

inline nlohmann::json catalog_to_json(const ActuatorCatalog& c) {
  nlohmann::json motors = nlohmann::json::array();
  for (const auto& m : c.motors) {
    motors.push_back({{"name", m.name},
                      {"rated_torque_Nm", m.rated_torque},
                      {"peak_torque_Nm", m.peak_torque},
                      {"rated_speed_rpm", m.rated_speed},
                      {"max_speed_rpm", m.max_speed},
                      {"rotor_inertia_kgm2", m.rotor_inertia},
                      {"mass_kg", m.mass},
                      {"rated_power_W", m.rated_power}});
  }
  nlohmann::json gearboxes = nlohmann::json::array();
  for (const auto& g : c.gearboxes) {
    gearboxes.push_back({{"name", g.name},
                         {"ratio", g.ratio},
                         {"rated_out_Nm", g.rated_output_torque},
                         {"peak_out_Nm", g.peak_output_torque},
                         {"efficiency", g.efficiency},
                         {"mass_kg", g.mass},
                         {"max_input_rpm", g.max_input_speed}});
  }
  return {{"motors", motors}, {"gearboxes", gearboxes}};
}

/// Parses and validates a JSON catalog document.
inline ActuatorCatalog load_catalog(const nlohmann::json& doc) {
  ActuatorCatalog c;
  auto field = [](const nlohmann::json& row, const std::string& where, const char* key) -> const nlohmann::json& {
    if (!row.contains(key)) throw InvalidArgument(where + "." + key + ": missing");
    return row.at(key);
  };
  auto number = [&](const nlohmann::json& row, const std::string& where, const char* key) {
    const auto& v = field(row, where, key);
    if (!v.is_number()) throw InvalidArgument(where + "." + key + ": expected a number");
    return v.get<double>();
  };
  auto text = [&](const nlohmann::json& row, const std::string& where, const char* key) {
    const auto& v = field(row, where, key);
    if (!v.is_string()) throw InvalidArgument(where + "." + key + ": expected a string");
    return v.get<std::string>();
  };
  if (!doc.is_object()) throw InvalidArgument("catalog: expected an object");
  for (const char* list : {"motors", "gearboxes"}) {
    if (!doc.contains(list) || !doc.at(list).is_array()) {
      throw InvalidArgument(std::string(list) + ": expected an array");
    }
  }
  std::size_t i = 0;
  for (const auto& row : doc.at("motors")) {
    const std::string where = "motors[" + std::to_string(i++) + "]";
    c.motors.push_back(Motor{text(row, where, "name"), number(row, where, "rated_torque_Nm"),
                             number(row, where, "peak_torque_Nm"), number(row, where, "rated_speed_rpm"),
                             number(row, where, "max_speed_rpm"), number(row, where, "rotor_inertia_kgm2"),
                             number(row, where, "mass_kg"), number(row, where, "rated_power_W")});
  }
  i = 0;
  for (const auto& row : doc.at("gearboxes")) {
    const std::string where = "gearboxes[" + std::to_string(i++) + "]";
    c.gearboxes.push_back(Gearbox{text(row, where, "name"), number(row, where, "ratio"),
                                  number(row, where, "rated_out_Nm"), number(row, where, "peak_out_Nm"),
                                  number(row, where, "efficiency"), number(row, where, "mass_kg"),
                                  number(row, where, "max_input_rpm")});
  }
  validate_catalog(c);
  return c;
}

/// Parses the two CSV tables (text contents, header row first).
inline ActuatorCatalog load_catalog_csv(const std::string& motors_csv, const std::string& gearboxes_csv) {
  ActuatorCatalog c;
  for (const auto& r : detail::read_table(motors_csv, motor_columns(), "motors.csv")) {
    const std::string where = "motors.csv line " + r.back();
    auto num = [&](std::size_t k) { return csv::parse_number(r[k], where + ", field " + motor_columns()[k]); };
    c.motors.push_back(Motor{r[0], num(1), num(2), num(3), num(4), num(5), num(6), num(7)});
  }
  for (const auto& r : detail::read_table(gearboxes_csv, gearbox_columns(), "gearboxes.csv")) {
    const std::string where = "gearboxes.csv line " + r.back();
    auto num = [&](std::size_t k) { return csv::parse_number(r[k], where + ", field " + gearbox_columns()[k]); };
    c.gearboxes.push_back(Gearbox{r[0], num(1), num(2), num(3), num(4), num(5), num(6)});
  }
  validate_catalog(c);
  return c;
}

inline std::string motors_to_csv(const ActuatorCatalog& c) {
  std::string out;
  for (const auto& col : motor_columns()) out += (out.empty() ? "" : ",") + col;
  out += '\n';
  for (const auto& m : c.motors) {
    out += m.name;
    for (double v : {m.rated_torque, m.peak_torque, m.rated_speed, m.max_speed, m.rotor_inertia, m.mass, m.rated_power}) {
      out += "," + csv::format_number(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string gearboxes_to_csv(const ActuatorCatalog& c) {
  std::string out;
  for (const auto& col : gearbox_columns()) out += (out.empty() ? "" : ",") + col;
  out += '\n';
  for (const auto& g : c.gearboxes) {
    out += g.name;
    for (double v : {g.ratio, g.rated_output_torque, g.peak_output_torque, g.efficiency, g.mass, g.max_input_speed}) {
      out += "," + csv::format_number(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace armsizer::sizing
