// Command-line front end: coherence suites, Green-Gauss probes, and
// convergence tables for the four discrete embeddings.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cohere/fd.hpp"
#include "cohere/fem.hpp"
#include "cohere/fv.hpp"
#include "cohere/mfd.hpp"
#include "cohere/polymesh.hpp"
#include "cohere/problem.hpp"

using namespace cohere;

namespace {

struct RunConfig {
  std::string scheme = "fd";
  std::string case_name;  // defaulted from dim when empty
  int dim = 1;
  std::vector<int> ns;
  std::string mode;  // fd: fb|bf, mfd: rt0|diagonal, fem/fv: midpoint|refined
  int probes = 10;
  std::uint64_t seed = 12345;
  double tol = 1e-12;
  std::string mesh_file;
  std::string out_dir;
  bool break_continuity = false;
};

std::string default_case(int dim) { return dim == 1 ? "sin1d" : "sinsin2d"; }

StencilPair stencil_of(const RunConfig& cfg) {
  if (cfg.mode == "bf") return StencilPair::BackwardForward;
  if (cfg.mode.empty() || cfg.mode == "fb") return StencilPair::ForwardBackward;
  throw std::invalid_argument("unknown fd mode '" + cfg.mode + "' (expected fb|bf)");
}

InnerProductMode ip_mode_of(const RunConfig& cfg) {
  if (cfg.mode == "diagonal") return InnerProductMode::DiagonalTpfa;
  if (cfg.mode.empty() || cfg.mode == "rt0") return InnerProductMode::Rt0Lifting;
  throw std::invalid_argument("unknown mfd mode '" + cfg.mode + "' (expected rt0|diagonal)");
}

MeshHandle load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file " + path);
  MeshFile mf = read_mesh_text(in);
  PolyMesh mesh = PolyMesh::build(mf.dim, mf.vertices, mf.cells);
  if (mf.centers.empty()) return make_centered(mesh);
  std::vector<Vec> cc(mf.centers.begin(), mf.centers.begin() + mesh.num_cells());
  std::vector<Vec> bc(mf.centers.begin() + mesh.num_cells(), mf.centers.end());
  auto res = check_admissibility(mesh, cc, bc);
  if (!res.ok())
    throw std::runtime_error("mesh file " + path + " is not admissible (" +
                             std::to_string(res.violations.size()) + " bad faces)");
  return std::make_shared<const CenteredMesh>(std::move(*res.mesh));
}

MeshHandle mesh_for(const RunConfig& cfg, int n, bool simplicial) {
  if (!cfg.mesh_file.empty()) return load_mesh_file(cfg.mesh_file);
  if (cfg.dim == 1) return make_centered(uniform_interval_mesh(n));
  // right triangles are not admissible with centroid centers, but rt0 does
  // not need admissibility
  if (simplicial) return make_centered_unchecked(triangle_mesh(n));
  return make_centered(cartesian_mesh(n, n));
}

void write_report(const RunConfig& cfg, const std::string& name, const std::string& body) {
  std::cout << body;
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(std::filesystem::path(cfg.out_dir) / name);
  out << body;
}

std::string mesh_label(const RunConfig& cfg, int n) {
  if (!cfg.mesh_file.empty()) return cfg.mesh_file;
  std::ostringstream os;
  os << cfg.dim << "d-n" << n;
  return os.str();
}

CoherenceReport run_coherence_one(const RunConfig& cfg, int n) {
  std::string cname = cfg.case_name.empty() ? default_case(cfg.dim) : cfg.case_name;
  ManufacturedCase mc = manufactured_case(cname);
  if (mc.dim != cfg.dim) throw std::invalid_argument("case " + cname + " is not " +
                                                     std::to_string(cfg.dim) + "-dimensional");
  LagrangianFn L = poisson_lagrangian(mc.f, mc.alpha);
  const std::string label = mesh_label(cfg, n);

  if (cfg.scheme == "fd") {
    CartesianGrid grid(cfg.dim, n);
    StencilPair pair = stencil_of(cfg);
    auto residual = [L, grid, pair](const std::vector<double>& x) {
      return fd_el_residual(L, NodalField(grid, x), pair).values;
    };
    return coherence_check(fd_lagrangian(L, grid, pair), residual, fd_coherence_mass(grid),
                           cfg.probes, cfg.seed, cfg.tol, "fd", label);
  }
  if (cfg.scheme == "fem") {
    auto space = std::make_shared<P1Space>(cfg.dim == 1 ? uniform_interval_mesh(n)
                                                        : triangle_mesh(n));
    auto residual = [L, space](const std::vector<double>& x) {
      return fem_weak_residual(L, *space, x);
    };
    DiscreteFunctional F = fem_lagrangian(L, *space);
    auto eval = F.eval;  // keep the space alive inside the wrappers
    F.eval = [space, eval](const std::vector<double>& x) { return eval(x); };
    std::vector<double> ones(space->num_nodes(), 1.0);
    return coherence_check(F, residual, ones, cfg.probes, cfg.seed, cfg.tol, "fem", label);
  }
  if (cfg.scheme == "fv") {
    MeshHandle mesh = mesh_for(cfg, n, false);
    CellField If = fv_interpolate(mc.f, mesh);
    auto residual = [If, mesh](const std::vector<double>& x) {
      return fv_el_residual(If, CellField(mesh, x)).values;
    };
    return coherence_check(fv_lagrangian(If), residual, fv_coherence_mass(mesh), cfg.probes,
                           cfg.seed, cfg.tol, "fv", label);
  }
  if (cfg.scheme == "mfd") {
    InnerProductMode mode = ip_mode_of(cfg);
    MeshHandle mesh = mesh_for(cfg, n, mode == InnerProductMode::Rt0Lifting && cfg.dim == 2);
    auto ip = std::make_shared<const CellInnerProduct>(build_inner_product(mesh, mc.alpha, mode));
    CellField If = fv_interpolate(mc.f, mesh);
    return coherence_check(mfd_hamiltonian(ip, If), mfd_block_residual(ip, If),
                           mfd_coherence_mass(mesh), cfg.probes, cfg.seed, cfg.tol, "mfd", label);
  }
  throw std::invalid_argument("unknown scheme " + cfg.scheme);
}

int cmd_coherence(const RunConfig& cfg) {
  std::vector<int> ns = cfg.ns.empty() ? std::vector<int>{4} : cfg.ns;
  std::ostringstream os;
  os << "[";
  bool all_pass = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CoherenceReport rep = run_coherence_one(cfg, ns[i]);
    all_pass = all_pass && rep.pass;
    os << (i ? ",\n " : "") << rep.to_json();
  }
  os << "]\n";
  write_report(cfg, "coherence.json", os.str());
  return all_pass ? 0 : 1;
}

struct ErrRow {
  int n;
  double h, l2, max;
};

ErrRow solve_case(const RunConfig& cfg, const ManufacturedCase& mc, int n) {
  LagrangianFn L = poisson_lagrangian(mc.f, mc.alpha);
  if (cfg.scheme == "fd") {
    CartesianGrid grid(cfg.dim, n);
    GridError e = fd_error(fd_solve(L, grid, 1e-12, stencil_of(cfg)), mc.u);
    return {n, grid.spacing(), e.l2, e.max};
  }
  if (cfg.scheme == "fem") {
    P1Space space(cfg.dim == 1 ? uniform_interval_mesh(n) : triangle_mesh(n));
    LoadQuadrature quad =
        cfg.mode == "midpoint" ? LoadQuadrature::Midpoint : LoadQuadrature::Refined;
    FemError e = fem_error(space, fem_solve(L, space, 1e-12, quad), mc.u);
    return {n, 1.0 / n, e.l2, e.max};
  }
  if (cfg.scheme == "fv") {
    MeshHandle mesh = mesh_for(cfg, n, false);
    CellQuadrature quad =
        cfg.mode == "midpoint" ? CellQuadrature::Midpoint : CellQuadrature::Refined;
    CellError e = fv_error(fv_solve(mc.f, mesh, 1e-12, quad), mc.u);
    return {n, 1.0 / n, e.l2, e.max};
  }
  if (cfg.scheme == "mfd") {
    InnerProductMode mode = ip_mode_of(cfg);
    MeshHandle mesh = mesh_for(cfg, n, mode == InnerProductMode::Rt0Lifting && cfg.dim == 2);
    MixedState s = mfd_solve(mesh, mc.alpha, mc.f, mode, 1e-12, CellQuadrature::Refined);
    CellError eu = fv_error(s.u, mc.u);
    // flux error in the face-weighted l2 norm, against the interpolated
    // exact flux alpha grad u (the dual variable of this mixed form)
    FaceFluxDOF pex = mfd_interpolate_flux(
        [&mc](const Vec& x) { return mc.alpha.at(x).apply(mc.grad_u(x)); }, mesh);
    double fe = 0.0;
    const CenteredMesh& cm = *mesh;
    for (int e = 0; e < cm.mesh.num_faces(); ++e) {
      double d = s.p.values[e] - pex.values[e];
      fe += d * d * cm.mesh.face(e).measure * cm.d_e[e];
    }
    return {n, 1.0 / n, eu.l2, std::sqrt(fe)};
  }
  throw std::invalid_argument("unknown scheme " + cfg.scheme);
}

int cmd_convergence(const RunConfig& cfg) {
  std::string cname = cfg.case_name.empty() ? default_case(cfg.dim) : cfg.case_name;
  ManufacturedCase mc = manufactured_case(cname);
  std::vector<int> ns = cfg.ns.empty() ? std::vector<int>{8, 16, 32} : cfg.ns;
  std::ostringstream os;
  os.precision(12);
  os << "n,h,err_l2,err_max,observed_order\n";
  double prev_l2 = 0.0, prev_h = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ErrRow r = solve_case(cfg, mc, ns[i]);
    os << r.n << "," << r.h << "," << r.l2 << "," << r.max << ",";
    if (i == 0)
      os << "-";
    else
      os << std::log(prev_l2 / r.l2) / std::log(prev_h / r.h);
    os << "\n";
    prev_l2 = r.l2;
    prev_h = r.h;
  }
  write_report(cfg, "convergence.csv", os.str());
  return 0;
}

int cmd_greengauss(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst = 0.0;
  if (cfg.scheme == "fd") {
    CartesianGrid grid(cfg.dim, cfg.ns.empty() ? 5 : cfg.ns.front());
    StencilPair pair = stencil_of(cfg);
    for (int t = 0; t < cfg.probes; ++t) {
      NodalField u(grid);
      NodalVectorField p(grid);
      for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
        u.values[i] = unif(rng);
        for (int c = 0; c < grid.dim(); ++c) p.values[i][c] = unif(rng);
      }
      apply_boundary_mask(u);
      worst = std::max(worst, fd_green_gauss_defect(u, p, pair));
    }
  } else if (cfg.scheme == "fv") {
    MeshHandle mesh = mesh_for(cfg, cfg.ns.empty() ? 3 : cfg.ns.front(), false);
    for (int t = 0; t < cfg.probes; ++t) {
      FluxDistribution F(mesh);
      CellField u(mesh);
      for (int e = 0; e < mesh->mesh.num_faces(); ++e) F.set(e, unif(rng));
      for (double& v : u.values) v = unif(rng);
      if (cfg.break_continuity)
        for (int e = 0; e < mesh->mesh.num_faces(); ++e)
          if (!mesh->mesh.face(e).boundary()) {
            F.debug_break_continuity(e, 0.5);
            break;
          }
      worst = std::max(worst, fv_green_gauss_defect(F, u));
    }
  } else {
    throw std::invalid_argument("greengauss supports schemes fd and fv");
  }
  bool pass = worst <= 1e-12;
  std::ostringstream os;
  os.precision(17);
  os << "{\"scheme\":\"" << cfg.scheme << "\",\"probes\":" << cfg.probes
     << ",\"max_defect\":" << worst << ",\"pass\":" << (pass ? "true" : "false") << "}\n";
  write_report(cfg, "greengauss.json", os.str());
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structure-preserving discretization toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&cfg](CLI::App* cmd) {
    cmd->add_option("--scheme", cfg.scheme)->check(CLI::IsMember({"fd", "fem", "fv", "mfd"}));
    cmd->add_option("--case", cfg.case_name);
    cmd->add_option("--dim", cfg.dim)->check(CLI::Range(1, 3));
    cmd->add_option("--n", cfg.ns)->check(CLI::PositiveNumber);
    cmd->add_option("--mode", cfg.mode);
    cmd->add_option("--probes", cfg.probes)->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.seed);
    cmd->add_option("--tol", cfg.tol)->check(CLI::PositiveNumber);
    cmd->add_option("--mesh", cfg.mesh_file);
    cmd->add_option("--out", cfg.out_dir);
  };

  CLI::App* coh = app.add_subcommand("coherence", "verify gradient = mass x residual");
  add_common(coh);
  CLI::App* conv = app.add_subcommand("convergence", "error table for a manufactured case");
  add_common(conv);
  CLI::App* gg = app.add_subcommand("greengauss", "random-probe discrete Green-Gauss check");
  add_common(gg);
  gg->add_flag("--break", cfg.break_continuity, "deliberately break flux continuity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cfg.ns.size() > 1 && !std::is_sorted(cfg.ns.begin(), cfg.ns.end()))
      throw std::invalid_argument("--n values must be increasing");
    if (coh->parsed()) return cmd_coherence(cfg);
    if (conv->parsed()) return cmd_convergence(cfg);
    return cmd_greengauss(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
