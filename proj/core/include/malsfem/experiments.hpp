#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "malsfem/gradsolve.hpp"
#include "malsfem/metrics.hpp"
#include "malsfem/mesh.hpp"
#include "malsfem/problems.hpp"
#include "malsfem/recon.hpp"

namespace malsfem {

/// Initial guess selection: `poisson`, `expr:<name>` (a registered
/// initializer of the example) or `scaled:<name>:<alpha>` (alpha times it;
/// <name> may also be `poisson`).
struct InitSpec {
  enum class Kind { poisson, expr, scaled };
  Kind kind = Kind::poisson;
  std::string name = "poisson";
  double alpha = 1.0;

  static InitSpec parse(const std::string& text);
  std::string str() const;
};

struct ExperimentConfig {
  std::string example = "ex1";
  std::vector<int> m{1};
  std::vector<int> n{10, 20, 40};
  /// Replaces the structured n-list with a single mesh read from a file.
  std::optional<std::filesystem::path> mesh_file;
  double eta = 20.0;
  double tol = 1e-10;
  int max_iter = 100;
  SpaceKind space = SpaceKind::reconstructed;
  /// Empty means the example's default initializer.
  std::optional<InitSpec> init;
  /// Added to the default patch size of each m.
  int patch_margin = 0;

  /// Throws std::invalid_argument for an unknown example, an empty or
  /// non-increasing n list, or out-of-range numbers.
  void validate() const;
};

/// Outcome of one (m, mesh, eta, init) cell.
struct CellResult {
  ErrorRecord record;
  NewtonReport report;
  /// Diagnostic of an aborted solve (NewtonError or linear failure).
  std::string failure;
  /// Final gradient iterate and stage-two solution are kept only on request.
  std::optional<Eigen::VectorXd> u_nodes;
};

struct CellOptions {
  double eta = 20.0;
  double tol = 1e-10;
  int max_iter = 100;
  SpaceKind space = SpaceKind::reconstructed;
  InitSpec init;
  int patch_margin = 0;
  bool keep_solution = false;
  NewtonObserver observer;
};

/// One full two-stage solve on a given mesh. Never throws for solver
/// failures; they are reported through the result.
CellResult run_cell(const ExampleDef& def, const Mesh& mesh, int n_label, int m, const CellOptions& opt);

/// Throws std::runtime_error if the example fails the det(D^2 u) = f check.
void check_example(const ExampleDef& def);

/// Receives every cell as soon as it is finished (mesh, result).
using CellCallback = std::function<void(const Mesh&, const CellResult&)>;

/// With a callback, cells also keep their stage-two nodal values.
std::vector<ErrorRecord> run_convergence_study(const ExperimentConfig& cfg, const CellCallback& on_cell = {});

struct AlphaRow {
  int m = 0;
  int n = 0;
  double alpha = 1.0;
  int iterations = 0;
  bool converged = false;
  std::optional<double> p_energy;
};

/// Scales the configured initializer (default one when unset) by each alpha.
/// Uses cfg.m and the last entry of cfg.n.
std::vector<AlphaRow> run_alpha_sweep(const ExperimentConfig& cfg, const std::vector<double>& alphas);
void write_csv(std::ostream& out, const std::vector<AlphaRow>& rows);

struct ComparisonRow {
  SpaceKind space = SpaceKind::reconstructed;
  int m = 0;
  int n = 0;
  double eta = 0.0;
  double alpha = 1.0;
  int iterations = 0;
  bool converged = false;
  int dofs = 0;
  std::optional<double> p_energy;
  double wall_time = 0.0;
};

/// Grid over {U_h^m, S_h^m} x eta x alpha on the last mesh of cfg.n.
std::vector<ComparisonRow> run_space_comparison(const ExperimentConfig& cfg, const std::vector<double>& etas,
                                                const std::vector<double>& alphas);
void write_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

struct ConvexityRow {
  int iter = 0;
  double rel_increment = 0.0;
  int nonconvex = 0;
  double ratio = 0.0;
};

struct ConvexityHistory {
  int m = 0;
  int n = 0;
  int num_elements = 0;
  bool converged = false;
  /// Row 0 describes the initial guess (no increment).
  std::vector<ConvexityRow> rows;
  /// Per-element flags at the requested iterations.
  std::vector<std::pair<int, std::vector<char>>> flags;
};

/// Newton history for the first m of cfg.m and last n of cfg.n.
ConvexityHistory run_convexity_history(const ExperimentConfig& cfg, const std::vector<int>& flag_iterations = {});
void write_csv(std::ostream& out, const ConvexityHistory& history);
/// CSV: iter,element,nonconvex
void write_flags_csv(std::ostream& out, const ConvexityHistory& history);

/// CSV: iter,rel_increment,nonconvex_count
void write_report_csv(std::ostream& out, const NewtonReport& report);

}  // namespace malsfem
