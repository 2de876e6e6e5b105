#pragma once

// Two-dimensional moving conductor on a structured grid of bilinear
// quadrilaterals. Unknowns per node: phi, A_y, A_z; the conductor moves
// along z with speed u. Weak forms, per element with conductivity flag s:
//
//   phi row:  -(grad N, grad phi) - s u (dN/dy, dA_y/dz) + s u (dN/dy, dA_z/dy) = -s u (dN/dy, B)
//   A_y row:  s mu sigma (N, dphi/dy) + (grad N, grad A_y) + s mu sigma u (N, dA_y/dz)
//             - s mu sigma u (N, dA_z/dy) = s mu sigma u (N, B)
//   A_z row:  s mu sigma (N, dphi/dz) + (grad N, grad A_z) = 0
//
// On a uniform grid (h = dz in both directions) the interior rows are the
// bivariate stencils S1, S2, S3, Q1, Q2 with loads M1/Q1 (Galerkin) or
// N1/R1 (element-averaged B).

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcfem/core.hpp"
#include "mcfem/errors.hpp"

namespace mcfem {

enum class Field : std::size_t { Phi = 0, Ay = 1, Az = 2 };

/// Per-element conductivity multiplier: 1 in the conductor, 0 in air.
class RegionMap2D {
 public:
  explicit RegionMap2D(std::vector<double> sigma_factor) : s_(std::move(sigma_factor)) {
    for (double v : s_)
      if (!(v >= 0.0)) throw InvalidArgument("RegionMap2D: multipliers must be >= 0");
  }

  static RegionMap2D all_conductor(const Mesh2D& mesh) {
    return RegionMap2D(std::vector<double>(mesh.element_count(), 1.0));
  }

  /// Conducting band |y| <= half_thickness (element rows entirely inside it).
  static RegionMap2D sheet(const Mesh2D& mesh, double half_thickness) {
    const double tol = 1e-9 * half_thickness;
    std::vector<double> s(mesh.element_count(), 0.0);
    for (std::size_t j = 0; j + 1 < mesh.ny(); ++j) {
      const bool inside = mesh.y(j) >= -half_thickness - tol && mesh.y(j + 1) <= half_thickness + tol;
      for (std::size_t i = 0; i + 1 < mesh.nz(); ++i) s[mesh.element(i, j)] = inside ? 1.0 : 0.0;
    }
    return RegionMap2D(std::move(s));
  }

  std::size_t size() const noexcept { return s_.size(); }
  double at(std::size_t e) const { return s_.at(e); }

  /// True when any element touching node (i, j) conducts.
  bool node_in_conductor(const Mesh2D& mesh, std::size_t i, std::size_t j) const {
    for (std::size_t dj = 0; dj < 2; ++dj)
      for (std::size_t di = 0; di < 2; ++di) {
        if (i < di || j < dj) continue;
        const std::size_t ei = i - di, ej = j - dj;
        if (ei + 1 >= mesh.nz() || ej + 1 >= mesh.ny()) continue;
        if (s_[mesh.element(ei, ej)] > 0.0) return true;
      }
    return false;
  }

 private:
  std::vector<double> s_;
};

/// Conducting sheet of thickness d between air layers of thickness air_factor*d.
/// Air rows grow geometrically away from the sheet.
struct SheetGeometry {
  double thickness = 1.3;
  std::size_t conductor_rows = 16;  ///< element rows across the sheet (even)
  std::size_t air_rows = 14;        ///< element rows per air layer
  double air_growth = 1.25;
  double air_factor = 5.0;
  double axial_length = 15.6;
  std::size_t nz = 313;

  void validate() const {
    if (!(thickness > 0.0)) throw InvalidArgument("SheetGeometry: thickness must be > 0");
    if (conductor_rows < 2 || conductor_rows % 2) throw InvalidArgument("SheetGeometry: conductor_rows must be even and >= 2");
    if (air_rows < 1) throw InvalidArgument("SheetGeometry: air_rows must be >= 1");
    if (!(air_growth >= 1.0)) throw InvalidArgument("SheetGeometry: air_growth must be >= 1");
    if (!(air_factor > 0.0)) throw InvalidArgument("SheetGeometry: air_factor must be > 0");
    if (!(axial_length > 0.0)) throw InvalidArgument("SheetGeometry: axial_length must be > 0");
    if (nz < 3) throw InvalidArgument("SheetGeometry: nz must be >= 3");
  }

  /// Mesh centred on the origin; node row ny/2 lies on y = 0.
  Mesh2D mesh() const {
    validate();
    const double hc = thickness / static_cast<double>(conductor_rows);
    double sum = 0.0;
    for (std::size_t k = 1; k <= air_rows; ++k) sum += std::pow(air_growth, static_cast<double>(k));
    const double h0 = air_factor * thickness / sum;
    std::vector<double> upper(conductor_rows / 2, hc);
    for (std::size_t k = 1; k <= air_rows; ++k) upper.push_back(h0 * std::pow(air_growth, static_cast<double>(k)));
    std::vector<double> rows(upper.rbegin(), upper.rend());
    rows.insert(rows.end(), upper.begin(), upper.end());
    const double half = 0.5 * thickness + air_factor * thickness;
    return Mesh2D(nz, axial_length / static_cast<double>(nz - 1), rows, -0.5 * axial_length, -half);
  }

  RegionMap2D regions(const Mesh2D& m) const { return RegionMap2D::sheet(m, 0.5 * thickness); }
};

template <typename T>
struct SparseEntry {
  std::size_t row;
  std::size_t col;
  T value;
};

/// Block system over (phi, A_y, A_z) with boundary conditions applied.
/// rhs = load * B, where B holds the nodal applied flux density.
template <typename T>
struct DiscreteSystem2D {
  Mesh2D mesh;
  std::vector<SparseEntry<T>> matrix;  ///< duplicates are summed
  std::vector<SparseEntry<T>> load;    ///< 3M x M
  std::vector<T> rhs;
  std::vector<T> b_nodal;

  std::size_t nodes() const { return mesh.node_count(); }
  std::size_t dof(Field f, std::size_t node) const {
    return static_cast<std::size_t>(f) * nodes() + node;
  }
};

namespace detail {

template <typename T>
struct Factors1D {
  std::array<std::array<T, 2>, 2> mass, stiff, c, ct;
  Factors1D(const T& h) {
    mass = {{{h * T(2) / T(6), h / T(6)}, {h / T(6), h * T(2) / T(6)}}};
    stiff = {{{T(1) / h, T(-1) / h}, {T(-1) / h, T(1) / h}}};
    // c[a][b] = int N_a N_b', ct[a][b] = int N_a' N_b
    c = {{{T(-1) / T(2), T(1) / T(2)}, {T(-1) / T(2), T(1) / T(2)}}};
    ct = {{{T(-1) / T(2), T(-1) / T(2)}, {T(1) / T(2), T(1) / T(2)}}};
  }
};

}  // namespace detail

/// Which boundary rows carry A_y = A_z = 0 and where phi is pinned.
struct BoundarySpec2D {
  bool inflow = true;       ///< z = z_min
  bool lower = true;        ///< y = y_min
  bool upper = true;        ///< y = y_max
  bool outflow = false;     ///< z = z_max; natural by default
  bool pin_phi = true;      ///< phi = 0 at the inflow node on the centreline
};

template <typename T = double>
DiscreteSystem2D<T> assemble_2d(const Mesh2D& mesh, const Material& material, const RegionMap2D& regions,
                                const FieldProfile& profile, Scheme scheme,
                                const BoundarySpec2D& bc = {}) {
  const std::size_t nz = mesh.nz(), ny = mesh.ny(), M = mesh.node_count();
  if (regions.size() != mesh.element_count())
    throw InvalidArgument("assemble_2d: region map does not match mesh");
  for (double h : mesh.row_heights())
    if (!(h * mesh.dz() > 0.0)) throw InvalidArgument("assemble_2d: degenerate element");

  const T ms = T(material.mu()) * T(material.sigma());
  const T u = T(material.u_z());
  const T dz = T(mesh.dz());
  const detail::Factors1D<T> fz(dz);

  DiscreteSystem2D<T> sys{mesh, {}, {}, std::vector<T>(3 * M, T(0)), std::vector<T>(M, T(0))};
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nz; ++i) {
      const double v = profile.sample({mesh.z(i), mesh.y(j)});
      if (!std::isfinite(v)) throw InvalidArgument("assemble_2d: profile not finite at node");
      sys.b_nodal[mesh.node(i, j)] = T(v);
    }

  std::vector<char> fixed(3 * M, 0);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nz; ++i) {
      const bool on = (bc.inflow && i == 0) || (bc.outflow && i + 1 == nz) || (bc.lower && j == 0) ||
                      (bc.upper && j + 1 == ny);
      if (!on) continue;
      fixed[sys.dof(Field::Ay, mesh.node(i, j))] = 1;
      fixed[sys.dof(Field::Az, mesh.node(i, j))] = 1;
    }
  std::optional<std::size_t> pin;
  if (bc.pin_phi) {
    const std::size_t j0 = mesh.centerline_row().value_or(ny / 2);
    pin = mesh.node(0, j0);
    fixed[*pin] = 1;
  }

  std::vector<char> phi_conducting(M, 0);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nz; ++i) phi_conducting[mesh.node(i, j)] = regions.node_in_conductor(mesh, i, j);

  auto add = [&](std::size_t r, std::size_t c, const T& v) {
    if (!fixed[r] && v != T(0)) sys.matrix.push_back({r, c, v});
  };
  auto add_load = [&](std::size_t r, std::size_t node, const T& v) {
    if (!fixed[r] && v != T(0)) sys.load.push_back({r, node, v});
  };

  // Local node a = (az, ay): 0 = (0,0), 1 = (1,0), 2 = (0,1), 3 = (1,1).
  static constexpr std::array<std::array<std::size_t, 2>, 4> loc{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    const T hy = T(mesh.row_heights()[j]);
    const detail::Factors1D<T> fy(hy);
    for (std::size_t i = 0; i + 1 < nz; ++i) {
      const bool cond = regions.at(mesh.element(i, j)) > 0.0;
      const T s = T(regions.at(mesh.element(i, j)));
      std::array<std::size_t, 4> g{mesh.node(i, j), mesh.node(i + 1, j), mesh.node(i, j + 1), mesh.node(i + 1, j + 1)};

      for (std::size_t a = 0; a < 4; ++a) {
        const auto [az, ay] = loc[a];
        const std::size_t rp = sys.dof(Field::Phi, g[a]), ry = sys.dof(Field::Ay, g[a]),
                          rz = sys.dof(Field::Az, g[a]);
        for (std::size_t b = 0; b < 4; ++b) {
          const auto [bz, by] = loc[b];
          const T k = fz.stiff[az][bz] * fy.mass[ay][by] + fz.mass[az][bz] * fy.stiff[ay][by];
          const T n_dz = fz.c[az][bz] * fy.mass[ay][by];      // int N_a dN_b/dz
          const T n_dy = fz.mass[az][bz] * fy.c[ay][by];      // int N_a dN_b/dy
          const T dy_dz = fy.ct[ay][by] * fz.c[az][bz];       // int dN_a/dy dN_b/dz
          const T dy_dy = fz.mass[az][bz] * fy.stiff[ay][by]; // int dN_a/dy dN_b/dy
          const std::size_t cp = sys.dof(Field::Phi, g[b]), cy = sys.dof(Field::Ay, g[b]),
                            cz = sys.dof(Field::Az, g[b]);
          if (cond) {
            add(rp, cp, -s * k);
            add(rp, cy, -s * u * dy_dz);
            add(rp, cz, s * u * dy_dy);
            add(ry, cp, s * ms * n_dy);
            add(ry, cz, -s * ms * u * n_dy);
            add(rz, cp, s * ms * n_dz);
          } else if (!phi_conducting[g[a]]) {
            add(rp, cp, k);
          }
          add(ry, cy, k + s * ms * u * n_dz);
          add(rz, cz, k);

          if (cond && scheme == Scheme::Galerkin) {
            add_load(ry, g[b], s * ms * u * fz.mass[az][bz] * fy.mass[ay][by]);
            add_load(rp, g[b], -s * u * fy.ct[ay][by] * fz.mass[az][bz]);
          }
        }
        if (cond && scheme == Scheme::ElementAveraged) {
          // B_e = mean of the four nodal values; int N_a = dz hy / 4, int dN_a/dy = -+dz/2.
          const T quarter = T(1) / T(4);
          const T int_n = dz * hy / T(4);
          const T int_dy = ay == 0 ? T(-dz / T(2)) : T(dz / T(2));
          for (std::size_t b = 0; b < 4; ++b) {
            add_load(ry, g[b], s * ms * u * int_n * quarter);
            add_load(rp, g[b], -s * u * int_dy * quarter);
          }
        }
      }
    }
  }

  for (std::size_t r = 0; r < 3 * M; ++r)
    if (fixed[r]) sys.matrix.push_back({r, r, T(1)});

  for (const auto& e : sys.load) sys.rhs[e.row] += e.value * sys.b_nodal[e.col];
  return sys;
}

struct Solution2D {
  std::vector<double> phi;
  std::vector<double> a_y;
  std::vector<double> a_z;
  std::vector<double> b_x;  ///< per element, indexed by Mesh2D::element(i, j)
  double residual = 0.0;
  double budget = 0.0;
};

/// Reaction flux density b_x = dA_z/dy - dA_y/dz at element centroids.
inline std::vector<double> reaction_field_2d(const Mesh2D& mesh, std::span<const double> a_y,
                                             std::span<const double> a_z) {
  std::vector<double> b(mesh.element_count());
  const double dz = mesh.dz();
  for (std::size_t j = 0; j + 1 < mesh.ny(); ++j) {
    const double hy = mesh.row_heights()[j];
    for (std::size_t i = 0; i + 1 < mesh.nz(); ++i) {
      const auto n00 = mesh.node(i, j), n10 = mesh.node(i + 1, j), n01 = mesh.node(i, j + 1),
                 n11 = mesh.node(i + 1, j + 1);
      const double daz_dy = 0.5 * ((a_z[n01] + a_z[n11]) - (a_z[n00] + a_z[n10])) / hy;
      const double day_dz = 0.5 * ((a_y[n10] + a_y[n11]) - (a_y[n00] + a_y[n01])) / dz;
      b[mesh.element(i, j)] = daz_dy - day_dz;
    }
  }
  return b;
}

inline Eigen::SparseMatrix<double> to_sparse(std::size_t n, const std::vector<SparseEntry<double>>& entries,
                                             std::size_t cols) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(entries.size());
  for (const auto& e : entries)
    t.emplace_back(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col), e.value);
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

inline Solution2D solve_2d(const DiscreteSystem2D<double>& system) {
  const std::size_t n = 3 * system.nodes();
  Eigen::SparseMatrix<double> a = to_sparse(n, system.matrix, n);
  a.makeCompressed();
  Eigen::Map<const Eigen::VectorXd> b(system.rhs.data(), static_cast<Eigen::Index>(n));

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success)
    throw NumericalFailure("solve_2d: sparse LU factorisation failed: " + lu.lastErrorMessage(), 0.0);
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw NumericalFailure("solve_2d: sparse LU solve failed", 0.0);

  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(a.rows());
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) rowsum[it.row()] += std::abs(it.value());
  const double norm_a = rowsum.size() ? rowsum.maxCoeff() : 0.0;
  const double res = (a * x - b).lpNorm<Eigen::Infinity>();
  const double budget = 1e-8 * (norm_a * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>());
  if (res > budget)
    throw NumericalFailure("solve_2d: residual " + std::to_string(res) + " exceeds budget " + std::to_string(budget),
                           budget > 0.0 ? res / budget : res);

  const std::size_t M = system.nodes();
  Solution2D sol;
  sol.phi.assign(x.data(), x.data() + M);
  sol.a_y.assign(x.data() + M, x.data() + 2 * M);
  sol.a_z.assign(x.data() + 2 * M, x.data() + 3 * M);
  sol.b_x = reaction_field_2d(system.mesh, sol.a_y, sol.a_z);
  sol.residual = res;
  sol.budget = budget;
  return sol;
}

struct TracePoint {
  double z;
  double b_x;
};

/// b_x along y = 0: the mean of the element rows directly above and below.
inline std::vector<TracePoint> axis_profile(const Solution2D& solution, const Mesh2D& mesh) {
  const auto j0 = mesh.centerline_row();
  if (!j0) throw InvalidArgument("axis_profile: mesh has no node row at y = 0");
  if (solution.b_x.size() != mesh.element_count()) throw InvalidArgument("axis_profile: solution does not match mesh");
  std::vector<TracePoint> out;
  out.reserve(mesh.nz() - 1);
  for (std::size_t i = 0; i + 1 < mesh.nz(); ++i) {
    double s = 0.0;
    int k = 0;
    if (*j0 > 0) {
      s += solution.b_x[mesh.element(i, *j0 - 1)];
      ++k;
    }
    if (*j0 + 1 < mesh.ny()) {
      s += solution.b_x[mesh.element(i, *j0)];
      ++k;
    }
    out.push_back({0.5 * (mesh.z(i) + mesh.z(i + 1)), s / k});
  }
  return out;
}

/// max over interior samples of |b[n] - (b[n-1] + b[n+1])/2| / amplitude.
inline double oscillation_metric(std::span<const TracePoint> trace, double amplitude) {
  if (!(amplitude > 0.0)) throw InvalidArgument("oscillation_metric: amplitude must be > 0");
  if (trace.size() < 3) throw InvalidArgument("oscillation_metric: need at least 3 samples");
  double m = 0.0;
  for (std::size_t n = 1; n + 1 < trace.size(); ++n)
    m = std::max(m, std::abs(trace[n].b_x - 0.5 * (trace[n - 1].b_x + trace[n + 1].b_x)));
  return m / amplitude;
}

/// Coefficients of row (row_field, node (i, j)) on column field col_field as a
/// bivariate stencil: the column at node (i + di, j + dj) maps to Zn^(di+1) Zm^(dj+1).
/// Returned as (di+1, dj+1) -> summed value.
template <typename T>
std::map<std::array<unsigned, 2>, T> row_stencil(const DiscreteSystem2D<T>& sys, Field row_field, Field col_field,
                                                 std::size_t i, std::size_t j, bool from_load = false) {
  const auto& mesh = sys.mesh;
  const std::size_t row = sys.dof(row_field, mesh.node(i, j));
  const std::size_t col0 = from_load ? 0 : static_cast<std::size_t>(col_field) * sys.nodes();
  std::map<std::array<unsigned, 2>, T> out;
  for (const auto& e : from_load ? sys.load : sys.matrix) {
    if (e.row != row || e.col < col0 || e.col >= col0 + sys.nodes()) continue;
    const std::size_t node = e.col - col0;
    const std::size_t ci = node % mesh.nz(), cj = node / mesh.nz();
    const long di = static_cast<long>(ci) - static_cast<long>(i), dj = static_cast<long>(cj) - static_cast<long>(j);
    if (di < -1 || di > 1 || dj < -1 || dj > 1) throw InvalidArgument("row_stencil: entry outside 3x3 neighbourhood");
    auto& v = out[{static_cast<unsigned>(di + 1), static_cast<unsigned>(dj + 1)}];
    v += e.value;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == T(0) ? out.erase(it) : std::next(it);
  return out;
}

}  // namespace mcfem
