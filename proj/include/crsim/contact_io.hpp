#pragma once

#include "crsim/contact.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace crsim {

//! Serializes a contact set. Point order is preserved exactly.
inline nlohmann::json to_json(const ContactSet& set) {
  nlohmann::json points = nlohmann::json::array();
  for (const ContactPoint& p : set.points) {
    points.push_back({{"p", {p.position.x(), p.position.y(), p.position.z()}},
                      {"n", {p.normal.x(), p.normal.y(), p.normal.z()}},
                      {"depth", p.depth},
                      {"scale", p.scale}});
  }
  return {{"stiffness", set.stiffness},
          {"damping", set.damping},
          {"points", points}};
}

inline Vec3 vec3_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3)
    throw SchemaError(key, "expected an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline ContactSet contact_set_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "contact set must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "stiffness" && key != "damping" && key != "points")
      throw SchemaError(key, "unknown key in contact set document");
  }
  if (!j.contains("stiffness"))
    throw SchemaError("stiffness", "missing required key");
  std::vector<ContactPoint> pts;
  if (j.contains("points")) {
    if (!j["points"].is_array())
      throw SchemaError("points", "expected an array");
    for (const auto& jp : j["points"]) {
      for (const auto& [key, value] : jp.items()) {
        (void)value;
        if (key != "p" && key != "n" && key != "depth" && key != "scale")
          throw SchemaError("points." + key, "unknown key in contact point");
      }
      pts.emplace_back(vec3_from_json(jp.at("p"), "points.p"),
                       vec3_from_json(jp.at("n"), "points.n"),
                       jp.at("depth").get<double>(),
                       jp.value("scale", 1.0));
    }
  }
  return ContactSet(std::move(pts), j.at("stiffness").get<double>(),
                    j.value("damping", 0.0));
}

inline ContactSet load_contact_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open contact set file: " + path);
  nlohmann::json j;
  in >> j;
  return contact_set_from_json(j);
}

}  // namespace crsim
