// mcfem: moving-conductor FEM scenarios and exact Z-domain checks.
//
// exit codes: 0 ok, 1 other error, 2 bad config, 3 numerical failure,
// 4 exact verification failed

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "mcfem/app/config.hpp"
#include "mcfem/app/runs.hpp"
#include "mcfem/errors.hpp"
#include "mcfem/version.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kNumerical = 3, kIdentity = 4 };

void print_outputs(const mcfem::app::RunRecord& rec, const std::string& dir) {
  std::cout << "wrote " << rec.outputs.size() << " file(s) and run_record_" << rec.command << ".json to " << dir
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mcfem;
  CLI::App app{"Finite-element scenarios for a conductor moving through a magnetic field"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config, out = "out", scheme, perturb;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--scheme", scheme, "override the config's scheme list")
        ->check(CLI::IsMember({"galerkin", "averaged", "both"}));
  };

  auto* r1 = app.add_subcommand("run-1d", "1D reaction field for each Peclet number and scheme");
  common(r1);
  auto* r2 = app.add_subcommand("run-2d", "2D sheet conductor: centreline and full-field output");
  common(r2);
  auto* sw = app.add_subcommand("sweep-error", "plateau-end error against the closed form over a Peclet sweep");
  common(sw);
  auto* ver = app.add_subcommand("verify", "exact polynomial identities and pole-zero certificates");
  ver->add_option("--out", out, "output directory")->capture_default_str();
  ver->add_option("--perturb", perturb, "add Zn*Zm to the named polynomial (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (r1->parsed()) {
      auto cfg = app::parse_run_1d(app::load_json(config));
      cfg.schemes = app::apply_scheme_override(cfg.schemes, scheme);
      print_outputs(app::run_1d(cfg, out, std::cout), out);
    } else if (r2->parsed()) {
      auto cfg = app::parse_run_2d(app::load_json(config));
      cfg.schemes = app::apply_scheme_override(cfg.schemes, scheme);
      print_outputs(app::run_2d(cfg, out, std::cout), out);
    } else if (sw->parsed()) {
      auto cfg = app::parse_sweep(app::load_json(config));
      cfg.schemes = app::apply_scheme_override(cfg.schemes, scheme);
      print_outputs(app::sweep_error(cfg, out, std::cout), out);
    } else if (ver->parsed()) {
      const auto res = app::verify(out, std::cout, perturb);
      print_outputs(res.record, out);
      if (!res.passed) {
        std::cerr << "error: exact verification failed";
        if (!perturb.empty()) std::cerr << " (perturbed " << perturb << ")";
        std::cerr << ":";
        for (const auto& r : res.record.summary["reports"])
          if (!r["passed"].get<bool>()) std::cerr << "\n  " << r["name"].get<std::string>();
        std::cerr << "\nsee " << out << "/verify.txt\n";
        return kIdentity;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << " (diagnostic " << e.diagnostic() << ")\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}
