#pragma once

// Scenario files (JSON) for the command-line front end. Every accessor
// reports the JSON path of a bad field through ConfigError.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mcfem/core.hpp"
#include "mcfem/errors.hpp"
#include "mcfem/fem2d.hpp"

namespace mcfem::app {

using json = nlohmann::json;

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
}

/// 64-bit FNV-1a of the compact dump; stable across runs and platforms.
inline std::string config_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

namespace detail {

inline std::string child(const std::string& path, const std::string& key) { return path + "." + key; }

inline const json& require(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(child(path, key), "missing required field");
  return *it;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

inline double number(const json& j, const std::string& path, const std::string& key) {
  return number(require(j, path, key), child(path, key));
}

inline double number_or(const json& j, const std::string& path, const std::string& key, double fallback) {
  return j.contains(key) ? number(j, path, key) : fallback;
}

inline std::size_t count(const json& j, const std::string& path, const std::string& key) {
  const auto& v = require(j, path, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(child(path, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

inline std::size_t count_or(const json& j, const std::string& path, const std::string& key, std::size_t fallback) {
  return j.contains(key) ? count(j, path, key) : fallback;
}

inline bool flag_or(const json& j, const std::string& path, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw ConfigError(child(path, key), "expected true or false");
  return j[key].get<bool>();
}

inline std::vector<double> numbers(const json& j, const std::string& path, const std::string& key) {
  const auto& v = require(j, path, key);
  const std::string p = child(path, key);
  if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], p + "[" + std::to_string(i) + "]"));
  return out;
}

/// Re-raise library argument errors against the config path they came from.
template <typename F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace detail

inline std::vector<Scheme> parse_schemes(const json& j, const std::string& path) {
  std::vector<std::string> names;
  if (j.contains("schemes")) {
    const auto& v = j["schemes"];
    if (!v.is_array() || v.empty()) throw ConfigError(path + ".schemes", "expected a non-empty array");
    for (const auto& s : v) {
      if (!s.is_string()) throw ConfigError(path + ".schemes", "expected scheme names");
      names.push_back(s.get<std::string>());
    }
  } else {
    names = {"galerkin", "averaged"};
  }
  std::vector<Scheme> out;
  for (const auto& n : names)
    out.push_back(detail::at_path(path + ".schemes", [&] { return parse_scheme(n); }));
  return out;
}

/// --scheme {galerkin|averaged|both}; an empty value keeps the config's list.
inline std::vector<Scheme> apply_scheme_override(std::vector<Scheme> from_config, const std::string& flag) {
  if (flag.empty()) return from_config;
  if (flag == "both") return {Scheme::Galerkin, Scheme::ElementAveraged};
  return {detail::at_path("--scheme", [&] { return parse_scheme(flag); })};
}

inline FieldProfile parse_profile(const json& j, const std::string& path) {
  const auto& type_v = detail::require(j, path, "type");
  if (!type_v.is_string()) throw ConfigError(path + ".type", "expected a string");
  const std::string type = type_v.get<std::string>();
  const double amp = detail::number(j, path, "amplitude");
  return detail::at_path(path, [&]() -> FieldProfile {
    if (type == "rect_pulse_1d") return RectPulse1D{detail::number(j, path, "a"), detail::number(j, path, "b"), amp};
    if (type == "rect_pulse_2d")
      return RectPulse2D{detail::number(j, path, "half_z"), detail::number(j, path, "half_y"), amp};
    if (type == "smooth_circle") return SmoothCircle2D{detail::number(j, path, "radius"), amp};
    throw ConfigError(path + ".type", "unknown profile type '" + type + "'");
  });
}

struct MaterialSpec {
  double sigma;
  double mu;
};

inline MaterialSpec parse_material(const json& j, const std::string& path) {
  MaterialSpec m{detail::number(j, path, "sigma"), 0.0};
  if (j.contains("mu"))
    m.mu = detail::number(j, path, "mu");
  else
    m.mu = kMu0 * detail::number_or(j, path, "mu_r", 1.0);
  detail::at_path(path, [&] { return Material(m.sigma, m.mu, 0.0); });
  return m;
}

/// Either a Pe list (velocity derived per run) or explicit velocities.
struct VelocitySpec {
  std::vector<double> peclet;
  std::vector<double> u_z;

  std::size_t size() const { return peclet.empty() ? u_z.size() : peclet.size(); }

  Material material(const MaterialSpec& m, double dz, std::size_t k) const {
    return peclet.empty() ? Material(m.sigma, m.mu, u_z[k]) : Material::for_peclet(m.sigma, m.mu, peclet[k], dz);
  }
};

inline VelocitySpec parse_velocities(const json& j, const std::string& path) {
  VelocitySpec v;
  if (j.contains("peclet")) v.peclet = detail::numbers(j, path, "peclet");
  if (j.contains("u_z")) v.u_z = detail::numbers(j, path, "u_z");
  if (!v.peclet.empty() && !v.u_z.empty()) throw ConfigError(path, "give either 'peclet' or 'u_z', not both");
  if (v.size() == 0) throw ConfigError(path + ".peclet", "empty Peclet list");
  for (std::size_t i = 0; i < v.peclet.size(); ++i)
    if (!(v.peclet[i] >= 0.0)) throw ConfigError(path + ".peclet[" + std::to_string(i) + "]", "Pe must be >= 0");
  for (std::size_t i = 0; i < v.u_z.size(); ++i)
    if (!(v.u_z[i] >= 0.0)) throw ConfigError(path + ".u_z[" + std::to_string(i) + "]", "u_z must be >= 0");
  return v;
}

struct Run1DConfig {
  json raw;
  double length;
  double dz;
  MaterialSpec material;
  FieldProfile profile;
  VelocitySpec velocities;
  std::vector<Scheme> schemes;
  bool svg;

  Mesh1D mesh() const {
    const double cells = length / dz;
    return Mesh1D::from_spacing(dz, static_cast<std::size_t>(std::llround(cells)) + 1);
  }
};

inline void expect_dimension(const json& j, int dim) {
  const auto& d = detail::require(j, "$", "dimension");
  if (!d.is_number_integer() || d.get<int>() != dim)
    throw ConfigError("$.dimension", "expected " + std::to_string(dim));
}

inline Run1DConfig parse_run_1d(const json& j) {
  expect_dimension(j, 1);
  const auto& mesh = detail::require(j, "$", "mesh");
  const double length = detail::number(mesh, "$.mesh", "length");
  const double dz = detail::number(mesh, "$.mesh", "dz");
  if (!(dz > 0.0)) throw ConfigError("$.mesh.dz", "must be > 0");
  const double cells = length / dz;
  if (!(length > 0.0) || std::abs(cells - std::round(cells)) > 1e-9 * cells || std::round(cells) < 2)
    throw ConfigError("$.mesh.length", "must be an integer multiple (>= 2) of dz");
  return {j,
          length,
          dz,
          parse_material(detail::require(j, "$", "material"), "$.material"),
          parse_profile(detail::require(j, "$", "profile"), "$.profile"),
          parse_velocities(j, "$"),
          parse_schemes(j, "$"),
          detail::flag_or(j, "$", "svg", true)};
}

struct SweepConfig {
  json raw;
  PulseLayout layout;
  double dz;
  double amplitude;
  MaterialSpec material;
  std::vector<double> peclet;
  double reference_max_pe;
  std::vector<Scheme> schemes;
  unsigned threads;
  bool svg;
};

inline SweepConfig parse_sweep(const json& j) {
  expect_dimension(j, 1);
  const auto& lay = detail::require(j, "$", "layout");
  PulseLayout layout{detail::count(lay, "$.layout", "m_b"), detail::count(lay, "$.layout", "m_c"),
                     detail::count(lay, "$.layout", "m_d")};
  detail::at_path("$.layout", [&] {
    layout.validate();
    return 0;
  });
  const double dz = detail::number(j, "$", "dz");
  if (!(dz > 0.0)) throw ConfigError("$.dz", "must be > 0");

  const auto& sw = detail::require(j, "$", "sweep");
  std::vector<double> pe;
  if (sw.contains("values")) {
    pe = detail::numbers(sw, "$.sweep", "values");
  } else {
    const double lo = detail::number(sw, "$.sweep", "pe_min"), hi = detail::number(sw, "$.sweep", "pe_max");
    const std::size_t n = detail::count(sw, "$.sweep", "count");
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("$.sweep", "need 0 < pe_min < pe_max");
    if (n < 2) throw ConfigError("$.sweep.count", "need at least 2 points");
    for (std::size_t k = 0; k < n; ++k)
      pe.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1)));
  }
  if (pe.empty()) throw ConfigError("$.sweep", "empty Peclet sweep");
  for (std::size_t i = 0; i < pe.size(); ++i)
    if (!(pe[i] > 0.0)) throw ConfigError("$.sweep[" + std::to_string(i) + "]", "Pe must be > 0");

  const double amplitude = detail::number_or(j, "$", "amplitude", 1.0);
  if (!(amplitude > 0.0)) throw ConfigError("$.amplitude", "must be > 0");
  const double ref = detail::number_or(j, "$", "reference_max_pe", 0.5);
  if (!(ref > 0.0)) throw ConfigError("$.reference_max_pe", "must be > 0");
  MaterialSpec mat = j.contains("material") ? parse_material(j["material"], "$.material") : MaterialSpec{1.0, 1.0};
  return {j,
          layout,
          dz,
          amplitude,
          mat,
          pe,
          ref,
          parse_schemes(j, "$"),
          static_cast<unsigned>(detail::count_or(j, "$", "threads", 0)),
          detail::flag_or(j, "$", "svg", true)};
}

struct Run2DConfig {
  json raw;
  SheetGeometry geometry;
  MaterialSpec material;
  FieldProfile profile;
  VelocitySpec velocities;
  std::vector<Scheme> schemes;
  bool full_field;
  bool svg;
};

inline Run2DConfig parse_run_2d(const json& j) {
  expect_dimension(j, 2);
  const FieldProfile profile = parse_profile(detail::require(j, "$", "profile"), "$.profile");
  if (std::holds_alternative<RectPulse1D>(profile.variant()))
    throw ConfigError("$.profile.type", "1D profile in a 2D scenario");

  SheetGeometry g;
  const auto& geo = detail::require(j, "$", "geometry");
  const std::string p = "$.geometry";
  g.thickness = detail::number(geo, p, "thickness");
  g.conductor_rows = detail::count_or(geo, p, "conductor_rows", g.conductor_rows);
  g.air_rows = detail::count_or(geo, p, "air_rows", g.air_rows);
  g.air_growth = detail::number_or(geo, p, "air_growth", g.air_growth);
  g.air_factor = detail::number_or(geo, p, "air_factor", g.air_factor);
  g.nz = detail::count_or(geo, p, "nz", g.nz);
  const double factor = detail::number_or(geo, p, "axial_factor", 6.0);
  g.axial_length = geo.contains("axial_length") ? detail::number(geo, p, "axial_length")
                                                : factor * profile.axial_width();
  detail::at_path(p, [&] {
    g.validate();
    return 0;
  });

  return {j,
          g,
          parse_material(detail::require(j, "$", "material"), "$.material"),
          profile,
          parse_velocities(j, "$"),
          parse_schemes(j, "$"),
          detail::flag_or(j, "$", "full_field", true),
          detail::flag_or(j, "$", "svg", true)};
}

}  // namespace mcfem::app
