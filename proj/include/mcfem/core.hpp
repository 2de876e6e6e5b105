#pragma once

// Shared domain types for the moving-conductor solvers: material data,
// structured meshes, applied-field profiles and the scheme selector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "mcfem/errors.hpp"

namespace mcfem {

inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;

enum class Scheme { Galerkin, ElementAveraged };

inline std::string_view to_string(Scheme s) {
  return s == Scheme::Galerkin ? "galerkin" : "averaged";
}

inline Scheme parse_scheme(std::string_view name) {
  if (name == "galerkin") return Scheme::Galerkin;
  if (name == "averaged" || name == "element-averaged") return Scheme::ElementAveraged;
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

/// Conductivity, permeability and axial velocity of the moving conductor.
class Material {
 public:
  Material(double sigma, double mu, double u_z) : sigma_(sigma), mu_(mu), u_z_(u_z) {
    if (!(sigma > 0.0)) throw InvalidArgument("Material: sigma must be > 0");
    if (!(mu > 0.0)) throw InvalidArgument("Material: mu must be > 0");
    if (!(u_z >= 0.0) || !std::isfinite(u_z)) throw InvalidArgument("Material: u_z must be >= 0");
  }

  double sigma() const noexcept { return sigma_; }
  double mu() const noexcept { return mu_; }
  double u_z() const noexcept { return u_z_; }

  /// Velocity giving element Peclet number `pe` on spacing `dz`.
  static Material for_peclet(double sigma, double mu, double pe, double dz) {
    if (!(dz > 0.0)) throw InvalidArgument("Material::for_peclet: dz must be > 0");
    return Material(sigma, mu, 2.0 * pe / (mu * sigma * dz));
  }

 private:
  double sigma_;
  double mu_;
  double u_z_;
};

/// Element Peclet number mu*sigma*|u|*dz/2. Only obtainable through peclet_of.
class Peclet {
 public:
  double value() const noexcept { return value_; }

 private:
  explicit Peclet(double v) : value_(v) {}
  double value_;
  friend Peclet peclet_of(const Material&, double);
};

inline Peclet peclet_of(const Material& material, double dz) {
  if (!(dz > 0.0) || !std::isfinite(dz)) throw InvalidArgument("peclet_of: dz must be > 0");
  return Peclet(material.mu() * material.sigma() * std::abs(material.u_z()) * dz / 2.0);
}

class Mesh1D {
 public:
  Mesh1D(double length, double dz, std::size_t node_count)
      : length_(length), dz_(dz), node_count_(node_count) {
    if (!(dz > 0.0)) throw InvalidArgument("Mesh1D: dz must be > 0");
    if (node_count < 3) throw InvalidArgument("Mesh1D: need at least 3 nodes");
    const double expected = static_cast<double>(node_count - 1) * dz;
    if (std::abs(length - expected) > 1e-12 * std::max(std::abs(length), expected))
      throw InvalidArgument("Mesh1D: length must equal (N-1)*dz");
  }

  static Mesh1D from_spacing(double dz, std::size_t node_count) {
    return Mesh1D(static_cast<double>(node_count - 1) * dz, dz, node_count);
  }

  double length() const noexcept { return length_; }
  double dz() const noexcept { return dz_; }
  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t element_count() const noexcept { return node_count_ - 1; }
  double node(std::size_t n) const noexcept { return static_cast<double>(n) * dz_; }

 private:
  double length_;
  double dz_;
  std::size_t node_count_;
};

/// Structured grid: uniform spacing along z (flow), graded rows along y.
/// Node (i, j) sits at z = z_origin + i*dz, y = y_origin + sum(row_heights[0..j)).
class Mesh2D {
 public:
  Mesh2D(std::size_t nz, double dz, std::vector<double> row_heights, double z_origin = 0.0,
         double y_origin = 0.0)
      : nz_(nz), dz_(dz), rows_(std::move(row_heights)), z0_(z_origin) {
    if (nz < 3) throw InvalidArgument("Mesh2D: need nz >= 3");
    if (rows_.size() < 2) throw InvalidArgument("Mesh2D: need ny >= 3");
    if (!(dz > 0.0)) throw InvalidArgument("Mesh2D: dz must be > 0");
    y_.reserve(rows_.size() + 1);
    y_.push_back(y_origin);
    for (double h : rows_) {
      if (!(h > 0.0)) throw InvalidArgument("Mesh2D: row heights must be > 0");
      y_.push_back(y_.back() + h);
    }
  }

  std::size_t nz() const noexcept { return nz_; }
  std::size_t ny() const noexcept { return y_.size(); }
  double dz() const noexcept { return dz_; }
  const std::vector<double>& row_heights() const noexcept { return rows_; }
  std::size_t node_count() const noexcept { return nz_ * ny(); }
  std::size_t element_count() const noexcept { return (nz_ - 1) * rows_.size(); }

  std::size_t node(std::size_t i, std::size_t j) const noexcept { return j * nz_ + i; }
  std::size_t element(std::size_t i, std::size_t j) const noexcept { return j * (nz_ - 1) + i; }

  double z(std::size_t i) const noexcept { return z0_ + static_cast<double>(i) * dz_; }
  double y(std::size_t j) const noexcept { return y_[j]; }

  /// Index of the node row at y = 0, if there is one.
  std::optional<std::size_t> centerline_row() const {
    const double tol = 1e-9 * (y_.back() - y_.front());
    for (std::size_t j = 0; j < y_.size(); ++j)
      if (std::abs(y_[j]) <= tol) return j;
    return std::nullopt;
  }

 private:
  std::size_t nz_;
  double dz_;
  std::vector<double> rows_;
  double z0_;
  std::vector<double> y_;
};

struct Point {
  double z = 0.0;
  double y = 0.0;
};

/// B for a <= z <= b, zero elsewhere.
struct RectPulse1D {
  double a;
  double b;
  double amplitude;
};

/// B for -half_z <= z <= half_z and -half_y <= y <= half_y.
struct RectPulse2D {
  double half_z;
  double half_y;
  double amplitude;
};

/// B inside radius R, Gaussian fall-off exp(-((r-R)/(R/2))^2) outside.
struct SmoothCircle2D {
  double radius;
  double amplitude;
};

class FieldProfile {
 public:
  using Variant = std::variant<RectPulse1D, RectPulse2D, SmoothCircle2D>;

  FieldProfile(RectPulse1D p) : v_(p) {
    if (!(p.b > p.a)) throw InvalidArgument("RectPulse1D: need a < b");
    check_amplitude(p.amplitude);
  }
  FieldProfile(RectPulse2D p) : v_(p) {
    if (!(p.half_z > 0.0) || !(p.half_y > 0.0))
      throw InvalidArgument("RectPulse2D: extents must be > 0");
    check_amplitude(p.amplitude);
  }
  FieldProfile(SmoothCircle2D p) : v_(p) {
    if (!(p.radius > 0.0)) throw InvalidArgument("SmoothCircle2D: radius must be > 0");
    check_amplitude(p.amplitude);
  }

  const Variant& variant() const noexcept { return v_; }

  double amplitude() const {
    return std::visit([](const auto& p) { return p.amplitude; }, v_);
  }

  /// Axial extent over which the field is non-negligible.
  /// The smooth circle counts the Gaussian skirt out to r = 2R (value e^-4).
  double axial_width() const {
    return std::visit(
        [](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, RectPulse1D>) return p.b - p.a;
          else if constexpr (std::is_same_v<T, RectPulse2D>) return 2.0 * p.half_z;
          else return 4.0 * p.radius;
        },
        v_);
  }

  double sample(Point pt) const {
    return std::visit(
        [pt](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, RectPulse1D>) {
            return (pt.z >= p.a && pt.z <= p.b) ? p.amplitude : 0.0;
          } else if constexpr (std::is_same_v<T, RectPulse2D>) {
            return (std::abs(pt.z) <= p.half_z && std::abs(pt.y) <= p.half_y) ? p.amplitude
                                                                               : 0.0;
          } else {
            const double r = std::hypot(pt.y, pt.z);
            if (r <= p.radius) return p.amplitude;
            const double s = (r - p.radius) / (0.5 * p.radius);
            return p.amplitude * std::exp(-s * s);
          }
        },
        v_);
  }

 private:
  static void check_amplitude(double b) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidArgument("profile amplitude must be >= 0");
  }

  Variant v_;
};

inline double sample_profile(const FieldProfile& profile, Point pt) { return profile.sample(pt); }

/// Five-region layout of the 1D rectangular-pulse problem: upstream (B),
/// rising edge (F, 3 intervals), plateau (C), falling edge (G, 3 intervals),
/// downstream (D). Junction nodes are shared between neighbouring regions.
struct PulseLayout {
  std::size_t m_b;
  std::size_t m_c;
  std::size_t m_d;

  std::size_t node_count() const { return m_b + m_c + m_d + 7; }
  std::size_t f_start() const { return m_b; }
  std::size_t c_start() const { return m_b + 3; }
  std::size_t g_start() const { return m_b + 3 + m_c; }
  std::size_t d_start() const { return m_b + m_c + 6; }

  /// First and last node carrying the full amplitude.
  std::size_t first_pulse_node() const { return m_b + 2; }
  std::size_t last_pulse_node() const { return m_b + m_c + 4; }

  /// Element (n, n+1) spanning the last interval of the plateau region.
  std::size_t last_plateau_element() const { return g_start() - 1; }
  std::size_t mid_plateau_element() const { return c_start() + m_c / 2; }

  Mesh1D mesh(double dz) const { return Mesh1D::from_spacing(dz, node_count()); }

  /// Pulse whose edges fall half an element outside the first/last pulse node,
  /// so nodal sampling is insensitive to rounding.
  FieldProfile profile(double dz, double amplitude) const {
    return FieldProfile(RectPulse1D{(static_cast<double>(first_pulse_node()) - 0.5) * dz,
                                    (static_cast<double>(last_pulse_node()) + 0.5) * dz,
                                    amplitude});
  }

  void validate() const {
    if (m_b < 1 || m_c < 2 || m_d < 1) throw InvalidArgument("PulseLayout: counts too small");
  }
};

}  // namespace mcfem
