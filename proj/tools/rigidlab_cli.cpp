#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "rigidlab/io.hpp"
#include "rigidlab/parallel.hpp"
#include "rigidlab/piola.hpp"

namespace rl = rigidlab;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  long long seed_override = -1;
  int threads_override = 0;
};

rl::ExperimentConfig load(const CommonArgs& args) {
  rl::ExperimentConfig cfg = rl::load_config(args.config_path);
  if (args.seed_override >= 0) {
    cfg.seed = static_cast<unsigned>(args.seed_override);
  }
  if (args.threads_override > 0) cfg.threads = args.threads_override;
  if (cfg.threads > 0) rl::set_threads(cfg.threads);
  return cfg;
}

void export_mesh(const rl::SurfaceMesh& mesh, const std::string& out_dir) {
  rl::write_off(mesh, out_dir + "/mesh.off");
  rl::write_obj(mesh, out_dir + "/mesh.obj");
}

std::string fd(double x) { return rl::format_double(x); }

int cmd_energy(const CommonArgs& args) {
  const rl::ExperimentConfig cfg = load(args);
  const rl::Manifold& man = rl::Manifold::get(cfg.manifold);
  const rl::SurfaceMesh mesh = rl::build_mesh(man, cfg.resolution());
  std::filesystem::create_directories(args.out_dir);
  export_mesh(mesh, args.out_dir);

  const rl::TangentField xi_field =
      rl::random_smooth_field(mesh, cfg.seed + 99u);
  rl::AmbientField xi;
  xi.mesh = &mesh;
  xi.vectors = xi_field.vectors;

  std::vector<std::vector<std::string>> rows;
  for (const auto& [id, f] : rl::generate_family(mesh, cfg)) {
    const rl::EnergyResult en = rl::energy(f, cfg.p);
    rows.push_back({id, fd(en.Ep), fd(en.e), fd(rl::degree(f)),
                    fd(rl::piola_residual(f, xi))});
  }
  rl::atomic_write(args.out_dir + "/energy.csv",
                   rl::csv_table({"map", "Ep", "e", "degree",
                                  "piola_residual"},
                                 rows));
  return 0;
}

int cmd_recover(const CommonArgs& args) {
  const rl::ExperimentConfig cfg = load(args);
  const rl::Manifold& man = rl::Manifold::get(cfg.manifold);
  const rl::SurfaceMesh mesh = rl::build_mesh(man, cfg.resolution());
  std::filesystem::create_directories(args.out_dir);
  export_mesh(mesh, args.out_dir);

  bool any_failed = false;
  for (const auto& [id, f] : rl::generate_family(mesh, cfg)) {
    const rl::RigidityReport report = rl::nearest_isometry(f, cfg.pipeline);
    rl::atomic_write(args.out_dir + "/report_" + id + ".json",
                     rl::report_to_json(report, mesh, cfg.p));
    const auto diffs = rl::differentials(f);
    std::vector<double> dist(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      dist[i] = rl::dist_to_SO(diffs[i].df).dist;
    }
    rl::atomic_write(args.out_dir + "/deficit_" + id + ".svg",
                     rl::svg_face_map(mesh, dist,
                                      "per-face dist(df, SO): " + id));
    if (!report.ok) {
      std::cerr << "recover: map " << id << " failed at stage: "
                << report.failure_stage << "\n";
      any_failed = true;
    }
  }
  return any_failed ? 3 : 0;
}

int cmd_scaling(const CommonArgs& args) {
  const rl::ExperimentConfig cfg = load(args);
  const rl::Manifold& man = rl::Manifold::get(cfg.manifold);
  const rl::SurfaceMesh mesh = rl::build_mesh(man, cfg.resolution());
  std::filesystem::create_directories(args.out_dir);
  export_mesh(mesh, args.out_dir);

  const rl::TangentField x = rl::remove_killing_component(
      rl::random_smooth_field(mesh, cfg.seed));
  rl::IsometryElement phi = man.identity_isometry();
  if (cfg.random_base_isometry) {
    std::mt19937_64 rng(cfg.seed + 1000u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    rl::KillingElement k;
    k.coeffs = Eigen::VectorXd(man.killing_dim());
    for (int c = 0; c < man.killing_dim(); ++c) k.coeffs(c) = unif(rng);
    phi = man.flow(k, 1.0);
  }
  const rl::ScalingTable table = rl::scaling_study(x, phi, cfg.eps, cfg.p);

  std::vector<std::vector<std::string>> rows;
  rl::PlotSeries series;
  series.label = "slope " + fd(table.slope);
  for (const auto& r : table.rows) {
    rows.push_back({fd(r.eps), fd(r.energy_e), fd(r.dist_w1p), fd(r.ratio)});
    if (r.energy_e > 0.0 && r.dist_w1p > 0.0) {
      series.points.emplace_back(r.energy_e, r.dist_w1p);
    }
  }
  rl::atomic_write(args.out_dir + "/scaling.csv",
                   rl::csv_table({"epsilon", "energy_e", "dist_w1p", "ratio"},
                                 rows));
  rl::atomic_write(
      args.out_dir + "/scaling.svg",
      rl::svg_plot({series}, std::string("rigidity scaling: ") + man.name(),
                   "e(f)", "dist_w1p(f, Isom+)", true));
  return 0;
}

int cmd_nullspace(const CommonArgs& args) {
  const rl::ExperimentConfig cfg = load(args);
  const rl::Manifold& man = rl::Manifold::get(cfg.manifold);
  const rl::SurfaceMesh mesh = rl::build_mesh(man, cfg.resolution());
  std::filesystem::create_directories(args.out_dir);
  export_mesh(mesh, args.out_dir);

  const rl::KornResult korn = rl::korn_nullspace(mesh);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < korn.eigenvalues.size(); ++i) {
    rows.push_back({std::to_string(i), fd(korn.eigenvalues(i))});
  }
  rl::atomic_write(args.out_dir + "/eigenvalues.csv",
                   rl::csv_table({"index", "eigenvalue"}, rows));
  for (std::size_t i = 0; i < korn.basis.size(); ++i) {
    rl::atomic_write(args.out_dir + "/basis_" + std::to_string(i) + ".json",
                     rl::field_to_json(korn.basis[i]));
  }
  rl::atomic_write(args.out_dir + "/nullspace.json",
                   std::string("{\n  \"subspace_angle_deg\": ") +
                       fd(korn.subspace_angle_deg) + "\n}\n");
  return 0;
}

int cmd_heatflow(const CommonArgs& args) {
  const rl::ExperimentConfig cfg = load(args);
  const rl::Manifold& man = rl::Manifold::get(cfg.manifold);
  const rl::SurfaceMesh mesh = rl::build_mesh(man, cfg.resolution());
  std::filesystem::create_directories(args.out_dir);
  export_mesh(mesh, args.out_dir);

  const auto family = rl::generate_family(mesh, cfg);
  const rl::DiscreteMap& f = family.front().map;
  const double dt = cfg.pipeline.dt > 0.0
                        ? cfg.pipeline.dt
                        : 1e-3 * mesh.mesh_size * mesh.mesh_size;
  const rl::SmoothResult result =
      rl::smooth(f, cfg.pipeline.T1, dt, cfg.p, cfg.pipeline.lambda);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : result.report.history) {
    rows.push_back({std::to_string(r.step), fd(r.t), fd(r.dirichlet_energy),
                    fd(r.w1p_dist_to_initial), fd(r.max_face_grad),
                    fd(r.constraint_residual)});
  }
  rl::atomic_write(
      args.out_dir + "/heatflow.csv",
      rl::csv_table({"step", "t", "dirichlet_energy", "w1p_dist_to_initial",
                     "max_face_grad", "constraint_residual"},
                    rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigidlab: rigidity estimates for surface self-maps"};
  app.require_subcommand(1);

  CommonArgs args;
  const char* names[] = {"energy", "recover", "scaling", "nullspace",
                         "heatflow"};
  const char* descs[] = {
      "per-map energy, degree and Piola residual (CSV)",
      "nearest-isometry recovery reports (JSON + SVG)",
      "rigidity scaling study (CSV + log-log SVG)",
      "Korn nullspace eigenvalues and Killing basis",
      "harmonic-map heat flow monitors (CSV)"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", args.config_path, "config file (JSON)")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed_override, "seed override");
    sub->add_option("--threads", args.threads_override, "thread count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("energy")) return cmd_energy(args);
    if (app.got_subcommand("recover")) return cmd_recover(args);
    if (app.got_subcommand("scaling")) return cmd_scaling(args);
    if (app.got_subcommand("nullspace")) return cmd_nullspace(args);
    if (app.got_subcommand("heatflow")) return cmd_heatflow(args);
  } catch (const rl::InvalidArgument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const rl::Error& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
