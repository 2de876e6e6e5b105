#pragma once

// One-dimensional moving-conductor problem
//   -A'' + mu*sigma*u A' = mu*sigma*u B_x,   A(0) = 0,  A'(L) = 0
// on linear elements. Rows are scaled by dz so interior rows read
//   (-1-Pe) A[n-1] + 2 A[n] + (-1+Pe) A[n+1] = 2 Pe dz * (weighted B).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mcfem/core.hpp"
#include "mcfem/errors.hpp"
#include "mcfem/tridiagonal.hpp"

namespace mcfem {

struct DiscreteSystem1D {
  Mesh1D mesh;
  Tridiagonal matrix;
  std::vector<double> rhs;
};

struct Solution1D {
  std::vector<double> a_y;  ///< nodal vector potential
  std::vector<double> b_x;  ///< element-constant reaction flux density
  double dz = 0.0;
  double residual = 0.0;    ///< ||Ax - b||_inf of the solve
};

/// Element contribution to the right-hand side, already multiplied by dz.
/// Galerkin integrates the nodal interpolant of B; the averaged scheme
/// replaces it by the element mean (B0 + B1)/2.
inline std::array<double, 2> element_load_1d(Scheme scheme, double pe, double dz, double b0,
                                             double b1) {
  if (scheme == Scheme::Galerkin) {
    const double w = 2.0 * pe * dz / 6.0;
    return {w * (2.0 * b0 + b1), w * (b0 + 2.0 * b1)};
  }
  const double be = 0.5 * (b0 + b1);
  return {pe * dz * be, pe * dz * be};
}

inline DiscreteSystem1D assemble_1d(const Mesh1D& mesh, const Material& material,
                                    const FieldProfile& profile, Scheme scheme) {
  const std::size_t n = mesh.node_count();
  const double dz = mesh.dz();
  const double pe = peclet_of(material, dz).value();

  std::vector<double> nodal(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodal[i] = profile.sample({mesh.node(i), 0.0});
    if (!std::isfinite(nodal[i])) throw InvalidArgument("assemble_1d: profile not finite at node");
  }

  DiscreteSystem1D sys{mesh, Tridiagonal(n), std::vector<double>(n, 0.0)};
  auto& m = sys.matrix;
  for (std::size_t e = 0; e + 1 < n; ++e) {
    // dz * (diffusion + convection) element matrix
    m.diag[e] += 1.0 - pe;
    m.upper[e] += -1.0 + pe;
    m.lower[e + 1] += -1.0 - pe;
    m.diag[e + 1] += 1.0 + pe;
    const auto f = element_load_1d(scheme, pe, dz, nodal[e], nodal[e + 1]);
    sys.rhs[e] += f[0];
    sys.rhs[e + 1] += f[1];
  }

  // A(0) = 0 by row replacement; the outlet keeps its natural row.
  m.diag[0] = 1.0;
  m.upper[0] = 0.0;
  sys.rhs[0] = 0.0;
  return sys;
}

inline std::vector<double> reaction_field(std::span<const double> a_y, const Mesh1D& mesh) {
  if (a_y.size() != mesh.node_count())
    throw InvalidArgument("reaction_field: solution does not match mesh");
  std::vector<double> b(a_y.size() - 1);
  for (std::size_t e = 0; e < b.size(); ++e) b[e] = -(a_y[e + 1] - a_y[e]) / mesh.dz();
  return b;
}

inline Solution1D solve_1d(const DiscreteSystem1D& system) {
  auto [x, pivot_ratio] = solve_tridiagonal(system.matrix, system.rhs);

  const auto ax = system.matrix.multiply(x);
  double res = 0.0, xn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    res = std::max(res, std::abs(ax[i] - system.rhs[i]));
    xn = std::max(xn, std::abs(x[i]));
    bn = std::max(bn, std::abs(system.rhs[i]));
  }
  const double budget = 1e-10 * (system.matrix.norm_inf() * xn + bn);
  if (res > budget) {
    throw NumericalFailure("solve_1d: residual " + std::to_string(res) + " exceeds budget " +
                               std::to_string(budget) + " (pivot ratio " +
                               std::to_string(pivot_ratio) + ")",
                           pivot_ratio);
  }

  Solution1D sol;
  sol.b_x = reaction_field(x, system.mesh);
  sol.a_y = std::move(x);
  sol.dz = system.mesh.dz();
  sol.residual = res;
  return sol;
}

/// max_e |b_x - b_x,ref| / amplitude over elements in [first, last].
inline double peak_spurious_error(const Solution1D& solution, const Solution1D& reference,
                                  double amplitude, std::size_t first, std::size_t last) {
  if (!(amplitude > 0.0)) throw InvalidArgument("peak_spurious_error: amplitude must be > 0");
  if (solution.b_x.size() != reference.b_x.size())
    throw InvalidArgument("peak_spurious_error: solutions are on different node sets");
  if (first > last || last >= solution.b_x.size())
    throw InvalidArgument("peak_spurious_error: element window out of range");
  double m = 0.0;
  for (std::size_t e = first; e <= last; ++e)
    m = std::max(m, std::abs(solution.b_x[e] - reference.b_x[e]));
  return m / amplitude;
}

inline double peak_spurious_error(const Solution1D& solution, const Solution1D& reference,
                                  double amplitude) {
  if (solution.b_x.empty()) throw InvalidArgument("peak_spurious_error: empty solution");
  return peak_spurious_error(solution, reference, amplitude, 0, solution.b_x.size() - 1);
}

/// Galerkin solution on a mesh refined by an integer factor so that the
/// element Peclet number is at most `max_pe`, sampled back onto the nodes of
/// `mesh`. Reaction field values are the fine-mesh element means.
inline Solution1D fine_reference(const Mesh1D& mesh, const Material& material,
                                 const FieldProfile& profile, double max_pe = 0.5) {
  const double pe = peclet_of(material, mesh.dz()).value();
  const auto factor = static_cast<std::size_t>(std::max(1.0, std::ceil(pe / max_pe)));
  const Mesh1D fine = Mesh1D::from_spacing(mesh.dz() / static_cast<double>(factor),
                                           mesh.element_count() * factor + 1);
  const auto fine_sol = solve_1d(assemble_1d(fine, material, profile, Scheme::Galerkin));

  Solution1D out;
  out.a_y.resize(mesh.node_count());
  for (std::size_t i = 0; i < mesh.node_count(); ++i) out.a_y[i] = fine_sol.a_y[i * factor];
  out.b_x = reaction_field(out.a_y, mesh);
  out.dz = mesh.dz();
  out.residual = fine_sol.residual;
  return out;
}

/// Signed spurious flux density at the downstream end of the plateau of a
/// rectangular-pulse run: b_x on the last plateau element minus the plateau
/// level of the reference, taken mid-plateau where edge layers have decayed.
inline double plateau_end_error(const Solution1D& solution, const Solution1D& reference,
                                const PulseLayout& layout) {
  const std::size_t last = layout.last_plateau_element();
  const std::size_t mid = layout.mid_plateau_element();
  if (last >= solution.b_x.size() || reference.b_x.size() != solution.b_x.size())
    throw InvalidArgument("plateau_end_error: layout does not match solutions");
  return solution.b_x[last] - reference.b_x[mid];
}

/// True when b_x changes sign between neighbouring elements anywhere in [first, last].
inline bool alternates(std::span<const double> b, std::size_t first, std::size_t last,
                       double floor = 0.0) {
  for (std::size_t e = first; e < last && e + 1 < b.size(); ++e)
    if (b[e] * b[e + 1] < 0.0 && std::abs(b[e]) > floor && std::abs(b[e + 1]) > floor)
      return true;
  return false;
}

}  // namespace mcfem
