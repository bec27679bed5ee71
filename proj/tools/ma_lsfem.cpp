// ma-lsfem: convergence tables, initializer sweeps, convexity histories and
// space comparisons for the least-squares Monge-Ampere solver.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "malsfem/experiments.hpp"
#include "malsfem/lagrange.hpp"

namespace fs = std::filesystem;
using namespace malsfem;

namespace {

struct Options {
  std::string example = "ex1";
  std::vector<int> m{1};
  std::vector<int> n{10, 20, 40};
  std::string mesh;
  double eta = 20.0;
  std::vector<double> etas{20.0, 300.0};
  double tol = 1e-10;
  int max_iter = 100;
  std::string space = "recon";
  std::string init;
  int patch_margin = 0;
  std::string out = ".";
  std::string dump_recon;
  std::string dump_solution;
  std::vector<double> alphas{0.01, 0.1, 1.0, 10.0, 100.0};
  std::vector<int> flags_at;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

ExperimentConfig make_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.example = o.example;
  cfg.m = o.m;
  cfg.n = o.n;
  if (!o.mesh.empty()) cfg.mesh_file = o.mesh;
  cfg.eta = o.eta;
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.space = o.space == "plain" ? SpaceKind::plain : SpaceKind::reconstructed;
  if (!o.init.empty()) cfg.init = InitSpec::parse(o.init);
  cfg.patch_margin = o.patch_margin;
  cfg.validate();
  return cfg;
}

std::string cell_tag(const ErrorRecord& r) {
  return "m" + std::to_string(r.m) + "_n" + std::to_string(r.n);
}

void dump_recon(const Options& o, const ExperimentConfig& cfg) {
  const Mesh mesh = cfg.mesh_file ? Mesh::read(*cfg.mesh_file) : Mesh::structured(cfg.n.back());
  const int m = cfg.m.front();
  const ReconOp op = build_recon_op(
      mesh, m, std::min(mesh.num_elements(), default_patch_size(m) + cfg.patch_margin));
  if (o.dump_recon.empty()) {
    op.dump(std::cout);
  } else {
    auto f = open_out(o.dump_recon);
    op.dump(f);
  }
}

int cmd_run(const Options& o, const ExperimentConfig& cfg) {
  const fs::path out = o.out;
  fs::create_directories(out);
  if (!o.dump_recon.empty()) dump_recon(o, cfg);
  auto on_cell = [&](const Mesh& mesh, const CellResult& r) {
    auto rep = open_out(out / ("report_" + cell_tag(r.record) + ".csv"));
    write_report_csv(rep, r.report);
    if (!r.failure.empty()) std::cerr << cell_tag(r.record) << ": " << r.failure << '\n';
    if (!o.dump_solution.empty() && r.u_nodes) {
      // later cells overwrite earlier ones, so the file holds the finest solve
      const LagrangeSpace space(mesh, r.record.m);
      auto f = open_out(o.dump_solution);
      f << "x,y,u\n";
      f.precision(17);
      for (int i = 0; i < space.num_nodes(); ++i) {
        f << space.node(i).x() << ',' << space.node(i).y() << ',' << (*r.u_nodes)(i) << '\n';
      }
    }
  };
  const auto records = run_convergence_study(cfg, on_cell);
  auto csv = open_out(out / "convergence.csv");
  write_csv(csv, records);
  auto txt = open_out(out / "convergence.txt");
  write_table(txt, records);
  write_table(std::cout, records);
  return 0;
}

int cmd_alpha(const Options& o, const ExperimentConfig& cfg) {
  const auto rows = run_alpha_sweep(cfg, o.alphas);
  auto csv = open_out(fs::path(o.out) / "alpha_sweep.csv");
  write_csv(csv, rows);
  write_csv(std::cout, rows);
  return 0;
}

int cmd_compare(const Options& o, const ExperimentConfig& cfg) {
  const auto rows = run_space_comparison(cfg, o.etas, o.alphas);
  auto csv = open_out(fs::path(o.out) / "compare_spaces.csv");
  write_csv(csv, rows);
  write_csv(std::cout, rows);
  return 0;
}

int cmd_convexity(const Options& o, const ExperimentConfig& cfg) {
  const auto h = run_convexity_history(cfg, o.flags_at);
  auto csv = open_out(fs::path(o.out) / "convexity.csv");
  write_csv(csv, h);
  if (!o.flags_at.empty()) {
    auto flags = open_out(fs::path(o.out) / "convexity_flags.csv");
    write_flags_csv(flags, h);
  }
  write_csv(std::cout, h);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares finite element solver for det(D^2 u) = f on the unit square"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Key-value file mirroring the command line flags");

  Options o;
  app.add_option("--example", o.example, "Registered example")
      ->check(CLI::IsMember(example_names()))
      ->capture_default_str();
  app.add_option("--m", o.m, "Polynomial degrees, comma separated")->delimiter(',')->capture_default_str();
  app.add_option("--n", o.n, "Structured mesh resolutions, comma separated")->delimiter(',')->capture_default_str();
  app.add_option("--mesh", o.mesh, "Triangle mesh file (overrides --n)")->check(CLI::ExistingFile);
  app.add_option("--eta", o.eta, "Penalty parameter")->capture_default_str();
  app.add_option("--etas", o.etas, "Penalty values for compare-spaces")->delimiter(',')->capture_default_str();
  app.add_option("--tol", o.tol, "Newton stop tolerance on the relative increment")->capture_default_str();
  app.add_option("--max-iter", o.max_iter, "Newton iteration limit")->capture_default_str();
  app.add_option("--space", o.space, "Trial space for the gradient")
      ->check(CLI::IsMember({"recon", "plain"}))
      ->capture_default_str();
  app.add_option("--init", o.init, "poisson | expr:<name> | scaled:<name>:<alpha>");
  app.add_option("--patch-margin", o.patch_margin, "Extra elements per reconstruction patch")
      ->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--dump-recon", o.dump_recon, "Write reconstruction diagnostics CSV");
  app.add_option("--dump-solution", o.dump_solution, "Write node coordinates and u_h as CSV");
  app.add_option("--alpha", o.alphas, "Initializer scalings, comma separated")->delimiter(',')->capture_default_str();
  app.add_option("--flags-at", o.flags_at, "Iterations at which to dump per-element convexity flags")
      ->delimiter(',');

  auto* run = app.add_subcommand("run", "Convergence study over the m and n lists");
  auto* alpha = app.add_subcommand("alpha-sweep", "Scaled-initializer robustness sweep on the finest mesh");
  auto* compare = app.add_subcommand("compare-spaces", "Reconstructed vs plain space over eta and alpha");
  auto* convexity = app.add_subcommand("convexity", "Non-convex element history of one solve");
  auto* recon = app.add_subcommand("dump-recon", "Patch sizes and local conditioning");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = make_config(o);
    if (run->parsed()) return cmd_run(o, cfg);
    if (alpha->parsed()) return cmd_alpha(o, cfg);
    if (compare->parsed()) return cmd_compare(o, cfg);
    if (convexity->parsed()) return cmd_convexity(o, cfg);
    if (recon->parsed()) {
      dump_recon(o, cfg);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "ma-lsfem: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
