#pragma once

// Scenario runners behind the command-line tool. Each writes its CSV/SVG
// outputs into a directory and returns a record of what it produced.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "mcfem/app/config.hpp"
#include "mcfem/app/csv.hpp"
#include "mcfem/app/svg.hpp"
#include "mcfem/fem1d.hpp"
#include "mcfem/fem2d.hpp"
#include "mcfem/oracle.hpp"
#include "mcfem/version.hpp"
#include "mcfem/ztan/identities.hpp"
#include "mcfem/ztan/transfer.hpp"

namespace mcfem::app {

namespace fs = std::filesystem;

struct SolveStat {
  std::string label;
  std::size_t unknowns;
  double residual;
  double seconds;
};

struct RunRecord {
  std::string command;
  std::string config_hash;
  std::vector<std::string> outputs;
  std::vector<SolveStat> solves;
  json summary = json::object();

  json to_json() const {
    json j{{"command", command}, {"version", std::string(kVersion)}, {"config_hash", config_hash},
           {"outputs", outputs}, {"summary", summary}};
    json s = json::array();
    for (const auto& st : solves)
      s.push_back({{"label", st.label}, {"unknowns", st.unknowns}, {"residual", st.residual}, {"seconds", st.seconds}});
    j["solves"] = s;
    return j;
  }

  void write(const fs::path& dir) const {
    std::ofstream out(dir / ("run_record_" + command + ".json"));
    if (!out) throw std::runtime_error("cannot write run record in " + dir.string());
    out << to_json().dump(2) << '\n';
  }
};

namespace detail {

inline std::string pe_tag(double pe) { return "pe" + fmt_double(pe); }

inline void stamp(CsvWriter& w, const json& config) {
  w.comment("config " + config.dump());
}

inline void emit(CsvWriter& w, RunRecord& rec) {
  w.write();
  rec.outputs.push_back(w.path().filename().string());
}

inline void emit_svg(const fs::path& path, const std::vector<Series>& s, const ChartOptions& o, RunRecord& rec) {
  write_line_chart(path, s, o);
  rec.outputs.push_back(path.filename().string());
}

template <typename F>
auto timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto r = f();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return std::pair{std::move(r), s};
}

/// Run f(k) for k in [0, n) on up to `threads` workers; results keep index order.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, unsigned threads, F&& f) {
  std::vector<R> out(n);
  unsigned w = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  w = static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> jobs;
  for (unsigned t = 0; t < w; ++t)
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t k; (k = next.fetch_add(1)) < n;) out[k] = f(k);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace detail

inline RunRecord run_1d(const Run1DConfig& cfg, const fs::path& out, std::ostream& log) {
  fs::create_directories(out);
  RunRecord rec{"run-1d", config_hash(cfg.raw), {}, {}, json::object()};
  const Mesh1D mesh = cfg.mesh();
  json runs = json::array();

  for (std::size_t k = 0; k < cfg.velocities.size(); ++k) {
    const Material mat = cfg.velocities.material(cfg.material, mesh.dz(), k);
    const double pe = peclet_of(mat, mesh.dz()).value();
    const std::string tag = detail::pe_tag(cfg.velocities.peclet.empty() ? pe : cfg.velocities.peclet[k]);
    std::vector<Series> series;

    for (Scheme s : cfg.schemes) {
      auto [sol, secs] = detail::timed([&] { return solve_1d(assemble_1d(mesh, mat, cfg.profile, s)); });
      rec.solves.push_back({tag + "_" + std::string(to_string(s)), mesh.node_count(), sol.residual, secs});

      CsvWriter w(out / ("run1d_" + tag + "_" + std::string(to_string(s)) + ".csv"), {"z", "a_y", "b_x"});
      detail::stamp(w, cfg.raw);
      w.comment("scheme " + std::string(to_string(s)) + ", Pe " + fmt_double(pe) + ", u_z " + fmt_double(mat.u_z()) +
                " m/s; b_x on row n belongs to element [z_n, z_n+1]");
      for (std::size_t n = 0; n < mesh.node_count(); ++n)
        w.row({fmt_double(mesh.node(n)), fmt_double(sol.a_y[n]),
               n < sol.b_x.size() ? fmt_double(sol.b_x[n]) : std::string()});
      detail::emit(w, rec);

      const double amp = cfg.profile.amplitude();
      double peak = 0.0;
      for (double b : sol.b_x) peak = std::max(peak, std::abs(b));
      runs.push_back({{"peclet", pe}, {"scheme", to_string(s)}, {"max_abs_b_x", peak},
                      {"alternates", alternates(sol.b_x, 0, sol.b_x.size() - 1, 1e-9 * std::max(amp, 1e-300))}});
      log << "run-1d " << tag << ' ' << to_string(s) << ": max|b_x| = " << peak << ", residual " << sol.residual
          << '\n';

      Series sr{std::string(to_string(s)), {}, {}};
      for (std::size_t e = 0; e < sol.b_x.size(); ++e) {
        sr.x.push_back(mesh.node(e) + 0.5 * mesh.dz());
        sr.y.push_back(sol.b_x[e]);
      }
      series.push_back(std::move(sr));
    }
    if (cfg.svg)
      detail::emit_svg(out / ("run1d_" + tag + ".svg"), series,
                       {"reaction field b_x, Pe = " + fmt_double(pe), "z [m]", "b_x [T]"}, rec);
  }
  rec.summary["runs"] = runs;
  rec.write(out);
  return rec;
}

struct SweepRow {
  double pe;
  double measured[2];
  double formula[2];
  bool in_validity;
};

inline RunRecord sweep_error(const SweepConfig& cfg, const fs::path& out, std::ostream& log) {
  fs::create_directories(out);
  RunRecord rec{"sweep-error", config_hash(cfg.raw), {}, {}, json::object()};
  const Mesh1D mesh = cfg.layout.mesh(cfg.dz);
  const FieldProfile profile = cfg.layout.profile(cfg.dz, cfg.amplitude);
  const bool want[2] = {std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::Galerkin) != cfg.schemes.end(),
                        std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::ElementAveraged) !=
                            cfg.schemes.end()};
  const Scheme order[2] = {Scheme::Galerkin, Scheme::ElementAveraged};
  const double nan = std::numeric_limits<double>::quiet_NaN();

  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = detail::parallel_map<SweepRow>(cfg.peclet.size(), cfg.threads, [&](std::size_t k) {
    const double pe = cfg.peclet[k];
    const Material mat = Material::for_peclet(cfg.material.sigma, cfg.material.mu, pe, cfg.dz);
    const Solution1D ref = fine_reference(mesh, mat, profile, cfg.reference_max_pe);
    SweepRow r{pe, {nan, nan}, {nan, nan}, pe > 1.0};
    for (int s = 0; s < 2; ++s) {
      if (!want[s]) continue;
      const Solution1D sol = solve_1d(assemble_1d(mesh, mat, profile, order[s]));
      r.measured[s] = plateau_end_error(sol, ref, cfg.layout);
      if (r.in_validity) r.formula[s] = peak_error(order[s], pe, cfg.amplitude);
    }
    return r;
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.solves.push_back({"sweep (" + std::to_string(rows.size()) + " Peclet numbers)", mesh.node_count(), 0.0, secs});

  CsvWriter w(out / "sweep_error.csv", {"pe", "galerkin_measured", "galerkin_formula", "averaged_measured",
                                        "averaged_formula", "status"});
  detail::stamp(w, cfg.raw);
  w.comment("error = b_x on the last plateau element minus the mid-plateau level of a fine Galerkin reference, in T");
  w.comment("formula columns are empty (nan) where Pe <= 1, outside the validity of the closed form");
  for (const auto& r : rows)
    w.row({fmt_double(r.pe), fmt_double(r.measured[0]), fmt_double(r.formula[0]), fmt_double(r.measured[1]),
           fmt_double(r.formula[1]), r.in_validity ? "ok" : "out-of-validity"});
  detail::emit(w, rec);

  json sum;
  for (int s = 0; s < 2; ++s) {
    if (!want[s]) continue;
    double worst = 0.0, peak = 0.0, peak_pe = nan;
    for (const auto& r : rows) {
      if (r.in_validity && std::isfinite(r.formula[s]))
        worst = std::max(worst, std::abs(r.measured[s] - r.formula[s]));
      if (std::abs(r.measured[s]) > peak) peak = std::abs(r.measured[s]), peak_pe = r.pe;
    }
    sum[std::string(to_string(order[s]))] = {
        {"max_abs_measured_minus_formula", worst}, {"max_abs_error", peak}, {"at_peclet", peak_pe}};
    log << "sweep-error " << to_string(order[s]) << ": max |error| = " << peak << " T at Pe = " << peak_pe
        << ", max |measured - formula| = " << worst << '\n';
  }
  rec.summary = sum;

  if (cfg.svg) {
    std::vector<Series> series;
    const char* names[2][2] = {{"Galerkin measured", "Galerkin formula"},
                               {"averaged measured", "averaged formula"}};
    for (int s = 0; s < 2; ++s) {
      if (!want[s]) continue;
      Series m{names[s][0], {}, {}}, f{names[s][1], {}, {}};
      for (const auto& r : rows) {
        m.x.push_back(r.pe);
        m.y.push_back(r.measured[s] / cfg.amplitude);
        f.x.push_back(r.pe);
        f.y.push_back(r.formula[s] / cfg.amplitude);
      }
      series.push_back(std::move(m));
      series.push_back(std::move(f));
    }
    detail::emit_svg(out / "sweep_error.svg", series,
                     {"plateau-end error versus element Peclet number", "Pe", "error / B", true}, rec);
  }
  rec.write(out);
  return rec;
}

inline RunRecord run_2d(const Run2DConfig& cfg, const fs::path& out, std::ostream& log) {
  fs::create_directories(out);
  RunRecord rec{"run-2d", config_hash(cfg.raw), {}, {}, json::object()};
  const Mesh2D mesh = cfg.geometry.mesh();
  const RegionMap2D regions = cfg.geometry.regions(mesh);
  const double amp = cfg.profile.amplitude();
  json runs = json::array();

  for (Scheme s : cfg.schemes) {
    const std::string sname(to_string(s));
    std::vector<std::string> cols{"z"};
    std::vector<std::vector<TracePoint>> traces;
    std::vector<Series> series;

    for (std::size_t k = 0; k < cfg.velocities.size(); ++k) {
      const Material mat = cfg.velocities.material(cfg.material, mesh.dz(), k);
      const double pe = peclet_of(mat, mesh.dz()).value();
      const std::string tag = detail::pe_tag(cfg.velocities.peclet.empty() ? pe : cfg.velocities.peclet[k]);
      const auto sys = assemble_2d(mesh, mat, regions, cfg.profile, s);
      auto [sol, secs] = detail::timed([&] { return solve_2d(sys); });
      rec.solves.push_back({tag + "_" + sname, 3 * mesh.node_count(), sol.residual, secs});
      const auto trace = axis_profile(sol, mesh);

      json run{{"peclet", pe}, {"scheme", sname}};
      if (amp > 0.0) run["oscillation_metric"] = oscillation_metric(trace, amp);
      runs.push_back(run);
      log << "run-2d " << tag << ' ' << sname << ": " << 3 * mesh.node_count() << " unknowns, residual "
          << sol.residual << ", " << secs << " s";
      if (amp > 0.0) log << ", oscillation metric " << run["oscillation_metric"].get<double>();
      log << '\n';

      if (cfg.full_field) {
        CsvWriter w(out / ("field_" + tag + "_" + sname + ".csv"), {"y", "z", "b_x", "a_y", "a_z", "phi"});
        detail::stamp(w, cfg.raw);
        w.comment("scheme " + sname + ", Pe " + fmt_double(pe) + "; b_x is the mean of the elements touching the node");
        for (std::size_t j = 0; j < mesh.ny(); ++j)
          for (std::size_t i = 0; i < mesh.nz(); ++i) {
            double b = 0.0;
            int c = 0;
            for (int dj = -1; dj <= 0; ++dj)
              for (int di = -1; di <= 0; ++di) {
                const long ei = static_cast<long>(i) + di, ej = static_cast<long>(j) + dj;
                if (ei < 0 || ej < 0 || ei + 1 >= static_cast<long>(mesh.nz()) ||
                    ej + 1 >= static_cast<long>(mesh.ny()))
                  continue;
                b += sol.b_x[mesh.element(static_cast<std::size_t>(ei), static_cast<std::size_t>(ej))];
                ++c;
              }
            const auto n = mesh.node(i, j);
            w.row(std::vector<double>{mesh.y(j), mesh.z(i), b / c, sol.a_y[n], sol.a_z[n], sol.phi[n]});
          }
        detail::emit(w, rec);
      }

      cols.push_back("b_x_" + tag);
      Series sr{"Pe = " + fmt_double(pe), {}, {}};
      for (const auto& p : trace) {
        sr.x.push_back(p.z);
        sr.y.push_back(p.b_x);
      }
      series.push_back(std::move(sr));
      traces.push_back(trace);
    }

    CsvWriter w(out / ("centerline_" + sname + ".csv"), cols);
    detail::stamp(w, cfg.raw);
    w.comment("scheme " + sname + "; b_x on y = 0 at element midpoints, mean of the rows above and below");
    for (std::size_t e = 0; e + 1 < mesh.nz(); ++e) {
      std::vector<double> row{traces.front()[e].z};
      for (const auto& t : traces) row.push_back(t[e].b_x);
      w.row(row);
    }
    detail::emit(w, rec);
    if (cfg.svg)
      detail::emit_svg(out / ("centerline_" + sname + ".svg"), series,
                       {"b_x on the centreline, " + sname, "z [m]", "b_x [T]"}, rec);
  }
  rec.summary["runs"] = runs;
  rec.write(out);
  return rec;
}

struct VerifyOutcome {
  RunRecord record;
  bool passed;
};

/// Exact identity proofs and pole-zero certificates. `perturb` names a
/// polynomial that receives an extra Zn*Zm term (a negative control).
inline VerifyOutcome verify(const fs::path& out, std::ostream& log, const std::string& perturb = "") {
  fs::create_directories(out);
  ztan::Polys2D p = ztan::polys_2d();
  if (!perturb.empty()) {
    ztan::Poly2* target = p.by_name(perturb);
    if (!target) throw InvalidArgument("--perturb: unknown polynomial '" + perturb + "'");
    *target = *target + ztan::Poly2::var(0) * ztan::Poly2::var(1);
  }

  RunRecord rec{"verify", "", {}, {}, json::object()};
  const std::vector<ztan::ProofReport> reports{
      ztan::verify_identity_denominator(p), ztan::verify_identity_numerator(p), ztan::verify_identity_galerkin(p),
      ztan::verify_n1_factorization(p),     ztan::verify_factorizations(p),     ztan::certify_transfer_functions(p)};

  bool ok = true;
  std::string text = "# mcfem " + std::string(kVersion) + " exact verification" +
                     (perturb.empty() ? "" : " (perturbed " + perturb + ")") + "\n";
  json results = json::array();
  for (const auto& r : reports) {
    ok = ok && r.passed;
    text += r.to_text();
    results.push_back({{"name", r.name}, {"passed", r.passed}});
    log << (r.passed ? "PASS " : "FAIL ") << r.name << '\n';
  }
  {
    std::ofstream f(out / "verify.txt");
    if (!f) throw std::runtime_error("cannot write verify.txt");
    f << text;
  }
  rec.outputs.push_back("verify.txt");
  rec.summary = {{"passed", ok}, {"reports", results}, {"perturbed", perturb}};
  rec.write(out);
  return {rec, ok};
}

}  // namespace mcfem::app
