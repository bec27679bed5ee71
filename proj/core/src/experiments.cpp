#include "malsfem/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "malsfem/lagrange.hpp"
#include "malsfem/primsolve.hpp"

namespace malsfem {

namespace {

std::string fmt(double v, const char* spec = "%.6e") {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

const char* space_name(SpaceKind s) { return s == SpaceKind::reconstructed ? "recon" : "plain"; }

Eigen::VectorXd initial_dofs(const ExampleDef& def, const TrialSpace& space, const InitSpec& init) {
  Eigen::VectorXd dofs;
  if (init.name == "poisson") {
    dofs = poisson_initializer(space, def.data);
  } else {
    auto it = def.initializers.find(init.name);
    if (it == def.initializers.end()) {
      throw std::invalid_argument("example " + def.name + " has no initializer named '" + init.name + "'");
    }
    dofs = space.interpolate(it->second.grad);
  }
  if (init.kind == InitSpec::Kind::scaled) dofs *= init.alpha;
  return dofs;
}

void check_init_name(const ExampleDef& def, const InitSpec& init) {
  if (init.name != "poisson" && def.initializers.find(init.name) == def.initializers.end()) {
    throw std::invalid_argument("example " + def.name + " has no initializer named '" + init.name + "'");
  }
}

InitSpec resolve_init(const ExampleDef& def, const std::optional<InitSpec>& init) {
  if (init) return *init;
  InitSpec s;
  s.name = def.default_init;
  s.kind = s.name == "poisson" ? InitSpec::Kind::poisson : InitSpec::Kind::expr;
  return s;
}

std::vector<std::pair<int, Mesh>> meshes_for(const ExperimentConfig& cfg, bool last_only) {
  std::vector<std::pair<int, Mesh>> out;
  if (cfg.mesh_file) {
    out.emplace_back(0, Mesh::read(*cfg.mesh_file));
    return out;
  }
  if (last_only) {
    out.emplace_back(cfg.n.back(), Mesh::structured(cfg.n.back()));
    return out;
  }
  for (int n : cfg.n) out.emplace_back(n, Mesh::structured(n));
  return out;
}

CellOptions cell_options(const ExperimentConfig& cfg, const InitSpec& init) {
  CellOptions opt;
  opt.eta = cfg.eta;
  opt.tol = cfg.tol;
  opt.max_iter = cfg.max_iter;
  opt.space = cfg.space;
  opt.init = init;
  opt.patch_margin = cfg.patch_margin;
  return opt;
}

}  // namespace

InitSpec InitSpec::parse(const std::string& text) {
  InitSpec s;
  if (text == "poisson") return s;
  if (text.rfind("expr:", 0) == 0 && text.size() > 5) {
    s.kind = Kind::expr;
    s.name = text.substr(5);
    return s;
  }
  if (text.rfind("scaled:", 0) == 0) {
    const std::string rest = text.substr(7);
    const auto colon = rest.rfind(':');
    if (colon != std::string::npos && colon > 0) {
      s.kind = Kind::scaled;
      s.name = rest.substr(0, colon);
      try {
        std::size_t used = 0;
        s.alpha = std::stod(rest.substr(colon + 1), &used);
        if (used == rest.size() - colon - 1 && std::isfinite(s.alpha)) return s;
      } catch (const std::exception&) {
      }
    }
  }
  throw std::invalid_argument("bad init spec '" + text +
                              "' (expected poisson, expr:<name> or scaled:<name>:<alpha>)");
}

std::string InitSpec::str() const {
  switch (kind) {
    case Kind::poisson: return "poisson";
    case Kind::expr: return "expr:" + name;
    case Kind::scaled: return "scaled:" + name + ":" + fmt(alpha, "%g");
  }
  return {};
}

void ExperimentConfig::validate() const {
  const ExampleDef& def = malsfem::example(example);
  if (m.empty()) throw std::invalid_argument("m list is empty");
  for (int v : m) {
    if (v < 1 || v > 3) throw std::invalid_argument("m must be in 1..3, got " + std::to_string(v));
  }
  if (!mesh_file) {
    if (n.empty()) throw std::invalid_argument("n list is empty");
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (n[i] < 1) throw std::invalid_argument("n must be positive");
      if (i > 0 && n[i] <= n[i - 1]) throw std::invalid_argument("n list must be strictly increasing");
    }
  }
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (patch_margin < 0) throw std::invalid_argument("patch margin must be nonnegative");
  check_init_name(def, resolve_init(def, init));
}

void check_example(const ExampleDef& def) {
  const double defect = example_self_check(def);
  if (!(defect <= 1e-8)) {
    throw std::runtime_error("example " + def.name + " fails det(D^2 u) = f self-check (defect " +
                             fmt(defect, "%.3e") + ")");
  }
}

CellResult run_cell(const ExampleDef& def, const Mesh& mesh, int n_label, int m, const CellOptions& opt) {
  check_init_name(def, opt.init);
  const auto t0 = std::chrono::steady_clock::now();
  CellResult res;
  res.record.m = m;
  res.record.n = n_label;
  res.record.h = n_label > 0 ? 1.0 / n_label : mesh.h();

  std::optional<ReconOp> op;
  std::optional<TrialSpace> space;
  try {
    if (opt.space == SpaceKind::reconstructed) {
      const int threshold = std::min(mesh.num_elements(), default_patch_size(m) + opt.patch_margin);
      op.emplace(build_recon_op(mesh, m, threshold));
      space.emplace(TrialSpace::reconstructed(*op));
    } else {
      space.emplace(TrialSpace::plain(mesh, m));
    }
  } catch (const std::runtime_error& e) {
    res.failure = e.what();
    return res;
  }
  res.record.dofs_p = space->num_dofs();

  NewtonConfig ncfg;
  ncfg.eta = opt.eta;
  ncfg.tol = opt.tol;
  ncfg.max_iter = opt.max_iter;
  try {
    const Eigen::VectorXd init = initial_dofs(def, *space, opt.init);
    res.report = newton_solve(*space, def.data, init, ncfg, opt.observer);
  } catch (const NewtonError& e) {
    res.failure = e.what();
  } catch (const std::runtime_error& e) {
    res.failure = e.what();
  }
  if (res.failure.empty()) res.failure = res.report.failure;
  res.record.iterations = res.report.iterations();
  res.record.converged = res.report.converged;

  const LagrangeSpace lagrange(mesh, m);
  res.record.dofs_u = lagrange.num_nodes();
  if (res.record.converged) {
    try {
      const PiecewiseField p = space->field(res.report.dofs);
      const ScalarField u = solve_primitive(lagrange, p, def.data);
      if (def.data.has_exact()) {
        const int q = error_quad_degree(m);
        res.record.p_energy = pnorm_error(mesh, p, def.data.exact_grad, def.data.exact_hessian, q);
        res.record.p_l2 = l2_error(mesh, p, def.data.exact_grad, q);
        res.record.u_energy = unorm_error(u, def.data.exact_u, def.data.exact_grad, q);
        res.record.u_l2 = l2_error(u, def.data.exact_u, q);
      }
      if (opt.keep_solution) res.u_nodes = u.values();
    } catch (const std::runtime_error& e) {
      res.failure = e.what();
      res.record.converged = false;
    }
  }
  res.record.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::vector<ErrorRecord> run_convergence_study(const ExperimentConfig& cfg, const CellCallback& on_cell) {
  cfg.validate();
  const ExampleDef& def = example(cfg.example);
  check_example(def);
  const InitSpec init = resolve_init(def, cfg.init);
  const auto meshes = meshes_for(cfg, false);
  std::vector<ErrorRecord> out;
  for (int m : cfg.m) {
    for (const auto& [n, mesh] : meshes) {
      CellOptions opt = cell_options(cfg, init);
      opt.keep_solution = static_cast<bool>(on_cell);
      const CellResult r = run_cell(def, mesh, n, m, opt);
      if (on_cell) on_cell(mesh, r);
      out.push_back(r.record);
    }
  }
  return out;
}

std::vector<AlphaRow> run_alpha_sweep(const ExperimentConfig& cfg, const std::vector<double>& alphas) {
  cfg.validate();
  const ExampleDef& def = example(cfg.example);
  check_example(def);
  const InitSpec base = resolve_init(def, cfg.init);
  const auto meshes = meshes_for(cfg, true);
  const auto& [n, mesh] = meshes.front();
  std::vector<AlphaRow> out;
  for (int m : cfg.m) {
    for (double alpha : alphas) {
      InitSpec init = base;
      init.kind = InitSpec::Kind::scaled;
      init.alpha = base.alpha * alpha;
      const CellResult r = run_cell(def, mesh, n, m, cell_options(cfg, init));
      out.push_back({m, n, alpha, r.record.iterations, r.record.converged, r.record.p_energy});
    }
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<AlphaRow>& rows) {
  out << "m,n,alpha,iterations,converged,p_energy\n";
  for (const auto& r : rows) {
    out << r.m << ',' << r.n << ',' << fmt(r.alpha, "%g") << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << ',' << fmt_opt(r.p_energy) << '\n';
  }
}

std::vector<ComparisonRow> run_space_comparison(const ExperimentConfig& cfg, const std::vector<double>& etas,
                                                const std::vector<double>& alphas) {
  cfg.validate();
  const ExampleDef& def = example(cfg.example);
  check_example(def);
  const InitSpec base = resolve_init(def, cfg.init);
  const auto meshes = meshes_for(cfg, true);
  const auto& [n, mesh] = meshes.front();
  std::vector<ComparisonRow> out;
  for (SpaceKind space : {SpaceKind::reconstructed, SpaceKind::plain}) {
    for (int m : cfg.m) {
      for (double eta : etas) {
        for (double alpha : alphas) {
          InitSpec init = base;
          init.kind = InitSpec::Kind::scaled;
          init.alpha = base.alpha * alpha;
          CellOptions opt = cell_options(cfg, init);
          opt.space = space;
          opt.eta = eta;
          const CellResult r = run_cell(def, mesh, n, m, opt);
          out.push_back({space, m, n, eta, alpha, r.record.iterations, r.record.converged,
                         r.record.dofs_p, r.record.p_energy, r.record.wall_time});
        }
      }
    }
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "space,m,n,eta,alpha,iterations,converged,dofs,p_energy,wall_time\n";
  for (const auto& r : rows) {
    out << space_name(r.space) << ',' << r.m << ',' << r.n << ',' << fmt(r.eta, "%g") << ','
        << fmt(r.alpha, "%g") << ',' << r.iterations << ',' << (r.converged ? "true" : "false") << ','
        << r.dofs << ',' << fmt_opt(r.p_energy) << ',' << fmt(r.wall_time, "%.3f") << '\n';
  }
}

ConvexityHistory run_convexity_history(const ExperimentConfig& cfg, const std::vector<int>& flag_iterations) {
  cfg.validate();
  const ExampleDef& def = example(cfg.example);
  check_example(def);
  const InitSpec init = resolve_init(def, cfg.init);
  const auto meshes = meshes_for(cfg, true);
  const auto& [n, mesh] = meshes.front();
  const int m = cfg.m.front();
  const int qdeg = volume_quad_degree(m);

  ConvexityHistory h;
  h.m = m;
  h.n = n;
  h.num_elements = mesh.num_elements();
  auto wanted = [&](int it) {
    return std::find(flag_iterations.begin(), flag_iterations.end(), it) != flag_iterations.end();
  };
  CellOptions opt = cell_options(cfg, init);
  opt.observer = [&](int it, const PiecewiseField& p) {
    if (wanted(it)) h.flags.emplace_back(it, nonconvex_flags(p, mesh, qdeg));
  };
  if (wanted(0)) {
    // iteration 0 is the initial guess, which the observer never sees
    std::optional<ReconOp> op;
    std::optional<TrialSpace> space;
    if (cfg.space == SpaceKind::reconstructed) {
      op.emplace(build_recon_op(mesh, m, std::min(mesh.num_elements(), default_patch_size(m) + cfg.patch_margin)));
      space.emplace(TrialSpace::reconstructed(*op));
    } else {
      space.emplace(TrialSpace::plain(mesh, m));
    }
    h.flags.emplace_back(0, nonconvex_flags(space->field(initial_dofs(def, *space, init)), mesh, qdeg));
  }
  const CellResult r = run_cell(def, mesh, n, m, opt);
  h.converged = r.record.converged;
  const double ne = static_cast<double>(mesh.num_elements());
  h.rows.push_back({0, 0.0, r.report.initial_nonconvex, r.report.initial_nonconvex / ne});
  for (const auto& s : r.report.steps) h.rows.push_back({s.iter, s.rel_increment, s.nonconvex, s.nonconvex / ne});
  return h;
}

void write_csv(std::ostream& out, const ConvexityHistory& history) {
  out << "iter,rel_increment,nonconvex_count,nonconvex_ratio\n";
  for (const auto& r : history.rows) {
    out << r.iter << ',' << (r.iter == 0 ? std::string() : fmt(r.rel_increment)) << ',' << r.nonconvex
        << ',' << fmt(r.ratio, "%.6f") << '\n';
  }
}

void write_flags_csv(std::ostream& out, const ConvexityHistory& history) {
  out << "iter,element,nonconvex\n";
  for (const auto& [it, flags] : history.flags) {
    for (std::size_t k = 0; k < flags.size(); ++k) out << it << ',' << k << ',' << int(flags[k]) << '\n';
  }
}

void write_report_csv(std::ostream& out, const NewtonReport& report) {
  out << "iter,rel_increment,nonconvex_count\n";
  out << 0 << ',' << ',' << report.initial_nonconvex << '\n';
  for (const auto& s : report.steps) out << s.iter << ',' << fmt(s.rel_increment) << ',' << s.nonconvex << '\n';
}

}  // namespace malsfem
