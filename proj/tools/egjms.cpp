#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "egjms/cli.hpp"
#include "egjms/error.hpp"

int main(int argc, char** argv) {
  using namespace egjms;
  CLI::App app{"Extrinsic GJMS operators and Q-curvatures of submanifolds"};
  app.require_subcommand(1);
  app.fallthrough();

  RunOptions opt;
  std::string geometry, format = "json", out;
  app.add_option("--geometry", geometry, "built-in name or path to a geometry file");
  app.add_option("--tol", opt.tol, "relative tolerance for residuals")->capture_default_str();
  app.add_option("--seed", opt.seed, "seed for sample points and random inputs")->capture_default_str();
  app.add_option("--points", opt.points, "number of sample points")->capture_default_str();
  app.add_option("--order", opt.order, "jet order of the ambient metric expansion")->capture_default_str();
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--out", out, "write the report here instead of stdout");

  auto* curvature = app.add_subcommand("curvature", "ambient curvature at sample points of the submanifold");
  auto* extrinsic = app.add_subcommand("extrinsic", "second fundamental form and mean curvature");
  auto* qcurv = app.add_subcommand("qcurv", "extrinsic Q-curvature");
  auto* apply = app.add_subcommand("apply", "apply P2 or P4 to a function of x1..xk");
  auto* verify = app.add_subcommand("verify", "check an identity at sample points");
  auto* spectrum = app.add_subcommand("spectrum", "factorized eigenvalues on the unit sphere");
  auto* list = app.add_subcommand("geometries", "list built-in geometries");

  int level = 0;
  std::string f;
  for (auto* sc : {qcurv, apply, verify}) sc->add_option("--level", level, "1 for P2/Q2, 2 for P4/Q4");
  for (auto* sc : {apply, verify}) sc->add_option("--f", f, "test function in x1..xk");
  verify->add_option("target", opt.target, "identity to check")->required()->check(CLI::IsMember(verify_targets()));
  spectrum->add_option("--k", opt.spectrum_k, "sphere dimension")->capture_default_str();
  spectrum->add_option("--l", opt.spectrum_l, "order l of P_2l")->capture_default_str();
  spectrum->add_option("--mmax", opt.spectrum_mmax, "largest harmonic degree")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  if (list->parsed()) {
    for (const auto& name : builtin_names()) std::cout << name << "\n";
    return 0;
  }
  for (auto* sc : {curvature, extrinsic, qcurv, apply, verify, spectrum})
    if (sc->parsed()) opt.command = sc->get_name();
  if (level != 0) opt.level = level;
  if (!f.empty()) opt.f = f;

  try {
    std::optional<GeometrySpec> spec;
    if (!geometry.empty()) spec = resolve_geometry(geometry);
    const Report rep = run_command(opt, spec ? &*spec : nullptr);
    const std::string text = format == "csv" ? report_csv(rep) : report_json(rep).dump(2) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream o(out, std::ios::binary);
      if (!o) throw SpecError("cannot write '" + out + "'");
      o << text;
    }
    return exit_code(rep);
  } catch (const std::exception& e) {
    std::cerr << "egjms: " << e.what() << "\n";
    return exit_code(e);
  }
}
