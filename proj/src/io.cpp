#include "rigidlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rigidlab {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += csv_field(row[i]);
    }
    out += "\r\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SolverFailure("cannot open " + tmp.string());
    out << content;
    if (!out.flush()) throw SolverFailure("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double to_unit(double x) const {
    const double a = log ? std::log10(x) : x;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    return h - l > 1e-300 ? (a - l) / (h - l) : 0.5;
  }
};

void axis_span(Axis& ax, double lo, double hi) {
  if (ax.log) {
    ax.lo = lo / 1.3;
    ax.hi = hi * 1.3;
  } else {
    const double pad = 0.05 * std::max(hi - lo, 1e-12);
    ax.lo = lo - pad;
    ax.hi = hi + pad;
  }
}

std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(255 * std::min(1.0, 0.2 + 1.6 * t));
  const int g = static_cast<int>(255 * std::min(1.0, 1.4 * (1.0 - t)) * 0.85);
  const int b = static_cast<int>(255 * std::max(0.0, 0.9 - 1.3 * t));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string svg_plot(const std::vector<PlotSeries>& series,
                     const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, bool loglog) {
  const int w = 640, hgt = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  Axis xax, yax;
  xax.log = yax.log = loglog;
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (loglog && (x <= 0.0 || y <= 0.0)) {
        throw InvalidArgument("svg_plot: log-log plot needs positive data");
      }
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  if (xlo > xhi) { xlo = loglog ? 0.1 : 0.0; xhi = 1.0; ylo = xlo; yhi = 1.0; }
  axis_span(xax, xlo, xhi);
  axis_span(yax, ylo, yhi);
  auto px = [&](double x) { return ml + xax.to_unit(x) * (w - ml - mr); };
  auto py = [&](double y) { return hgt - mb - yax.to_unit(y) * (hgt - mt - mb); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << hgt << "\" viewBox=\"0 0 " << w << " " << hgt
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"16\">" << title << "</text>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"" << hgt - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << hgt / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 "
      << 18 << " " << hgt / 2 << ")\">" << ylabel << "</text>\n";
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr
      << "\" height=\"" << hgt - mt - mb
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  // Axis tick labels at the corners of the data range.
  auto tick = [&](double x, double y, const std::string& txt,
                  const std::string& anchor) {
    svg << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
        << "\" font-size=\"11\">" << txt << "</text>\n";
  };
  tick(ml, hgt - mb + 16, format_double(xax.lo), "middle");
  tick(w - mr, hgt - mb + 16, format_double(xax.hi), "middle");
  tick(ml - 6, hgt - mb, format_double(yax.lo), "end");
  tick(ml - 6, mt + 10, format_double(yax.hi), "end");

  int legend_y = mt + 16;
  for (const auto& s : series) {
    if (s.line && s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.points) {
        svg << format_double(px(x)) << "," << format_double(py(y)) << " ";
      }
      svg << "\"/>\n";
    }
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << format_double(px(x)) << "\" cy=\""
          << format_double(py(y)) << "\" r=\"3\" fill=\"" << s.color
          << "\"/>\n";
    }
    if (!s.label.empty()) {
      svg << "<text x=\"" << w - mr - 8 << "\" y=\"" << legend_y
          << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << s.color
          << "\">" << s.label << "</text>\n";
      legend_y += 16;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string svg_face_map(const SurfaceMesh& mesh,
                         const std::vector<double>& values,
                         const std::string& title) {
  if (values.size() != static_cast<std::size_t>(mesh.face_count())) {
    throw InvalidArgument("svg_face_map: one value per face required");
  }
  const int w = 640, hgt = 400, ml = 40, mr = 20, mt = 40, mb = 30;
  double vlo = 1e300, vhi = -1e300;
  for (double v : values) {
    vlo = std::min(vlo, v);
    vhi = std::max(vhi, v);
  }
  const double span = std::max(vhi - vlo, 1e-300);

  // Parameter-plane coordinates: (theta, phi) for the torus, (longitude,
  // latitude) for the sphere.
  auto param2 = [&](const SurfacePoint& q) -> std::pair<double, double> {
    if (mesh.man->kind() == ManifoldKind::FlatTorus) {
      return {q.params(0), q.params(1)};
    }
    return {std::atan2(q.ambient(1), q.ambient(0)), std::asin(std::clamp(
        q.ambient(2), -1.0, 1.0))};
  };
  const double xlo = mesh.man->kind() == ManifoldKind::FlatTorus ? 0.0 : -M_PI;
  const double xhi = mesh.man->kind() == ManifoldKind::FlatTorus
                         ? 2.0 * M_PI
                         : M_PI;
  const double ylo = mesh.man->kind() == ManifoldKind::FlatTorus
                         ? 0.0
                         : -M_PI / 2.0;
  const double yhi = mesh.man->kind() == ManifoldKind::FlatTorus
                         ? 2.0 * M_PI
                         : M_PI / 2.0;
  auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (w - ml - mr); };
  auto py = [&](double y) {
    return hgt - mb - (y - ylo) / (yhi - ylo) * (hgt - mt - mb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << hgt << "\" viewBox=\"0 0 " << w << " " << hgt
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << title << " (range " << format_double(vlo)
      << " .. " << format_double(vhi) << ")</text>\n";
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& tri = mesh.faces[f];
    auto [x0, y0] = param2(mesh.vertices[tri[0]]);
    auto [x1, y1] = param2(mesh.vertices[tri[1]]);
    auto [x2, y2] = param2(mesh.vertices[tri[2]]);
    // Skip faces wrapping around the periodic seam; they would smear
    // across the whole plot.
    const double wrapspan = std::max({std::abs(x1 - x0), std::abs(x2 - x0),
                                      std::abs(y1 - y0), std::abs(y2 - y0)});
    if (wrapspan > M_PI) continue;
    svg << "<polygon points=\"" << format_double(px(x0)) << ","
        << format_double(py(y0)) << " " << format_double(px(x1)) << ","
        << format_double(py(y1)) << " " << format_double(px(x2)) << ","
        << format_double(py(y2)) << "\" fill=\""
        << heat_color((values[f] - vlo) / span)
        << "\" stroke=\"none\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

int ExperimentConfig::resolution() const {
  if (manifold == ManifoldKind::Sphere) return level;
  return 6 * (1 << level);
}

namespace {

void reject_unknown(const nlohmann::json& obj,
                    const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw InvalidArgument("config: unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    reject_unknown(j,
                   {"manifold", "level", "p", "seed", "family", "pipeline",
                    "threads"},
                   "top level");
    if (j.contains("manifold")) {
      const std::string m = j["manifold"].get<std::string>();
      if (m == "sphere") cfg.manifold = ManifoldKind::Sphere;
      else if (m == "flat_torus") cfg.manifold = ManifoldKind::FlatTorus;
      else throw InvalidArgument("config: manifold must be sphere|flat_torus");
    }
    if (j.contains("level")) cfg.level = j["level"].get<int>();
    if (j.contains("p")) cfg.p = j["p"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("family")) {
      const auto& fam = j["family"];
      reject_unknown(fam, {"kind", "count", "eps", "base_isometry"},
                     "family");
      if (fam.contains("kind")) {
        const std::string k = fam["kind"].get<std::string>();
        if (k == "identity") cfg.family = MapFamilyKind::Identity;
        else if (k == "random") cfg.family = MapFamilyKind::Random;
        else if (k == "double_theta") cfg.family = MapFamilyKind::DoubleTheta;
        else {
          throw InvalidArgument(
              "config: family.kind must be identity|random|double_theta");
        }
      }
      if (fam.contains("count")) cfg.count = fam["count"].get<int>();
      if (fam.contains("eps")) {
        cfg.eps = fam["eps"].get<std::vector<double>>();
      }
      if (fam.contains("base_isometry")) {
        const std::string b = fam["base_isometry"].get<std::string>();
        if (b == "identity") cfg.random_base_isometry = false;
        else if (b == "random") cfg.random_base_isometry = true;
        else {
          throw InvalidArgument(
              "config: family.base_isometry must be identity|random");
        }
      }
    }
    if (j.contains("pipeline")) {
      const auto& pl = j["pipeline"];
      reject_unknown(pl, {"lambda", "T1", "dt", "delta1"}, "pipeline");
      if (pl.contains("lambda")) cfg.pipeline.lambda = pl["lambda"].get<double>();
      if (pl.contains("T1")) cfg.pipeline.T1 = pl["T1"].get<double>();
      if (pl.contains("dt")) cfg.pipeline.dt = pl["dt"].get<double>();
      if (pl.contains("delta1")) cfg.pipeline.delta1 = pl["delta1"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: bad value: ") + e.what());
  }

  if (!(cfg.p > 1.1 && cfg.p < 10.0)) {
    throw InvalidArgument("config: p must lie in (1.1, 10)");
  }
  if (cfg.level < 0 || cfg.level > 6) {
    throw InvalidArgument("config: level must lie in [0, 6]");
  }
  if (cfg.count < 1 || cfg.count > 1000) {
    throw InvalidArgument("config: family.count must lie in [1, 1000]");
  }
  if (cfg.eps.empty()) {
    throw InvalidArgument("config: family.eps must be non-empty");
  }
  for (double e : cfg.eps) {
    if (!(e > 0.0 && e < M_PI / 4.0)) {
      throw InvalidArgument("config: eps values must lie in (0, pi/4)");
    }
  }
  cfg.pipeline.p = cfg.p;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

std::vector<GeneratedMap> generate_family(const SurfaceMesh& mesh,
                                          const ExperimentConfig& cfg) {
  const Manifold& man = *mesh.man;
  std::vector<GeneratedMap> out;
  switch (cfg.family) {
    case MapFamilyKind::Identity:
      out.push_back({"identity", identity_map(mesh)});
      break;
    case MapFamilyKind::DoubleTheta: {
      if (man.kind() != ManifoldKind::FlatTorus) {
        throw InvalidArgument("config: double_theta requires the flat torus");
      }
      DiscreteMap f;
      f.mesh = &mesh;
      for (const auto& v : mesh.vertices) {
        Vec q(2);
        q << 2.0 * v.params(0), v.params(1);
        f.images.push_back(man.from_params(q));
      }
      out.push_back({"double_theta", std::move(f)});
      break;
    }
    case MapFamilyKind::Random:
      for (int i = 0; i < cfg.count; ++i) {
        const TangentField x = random_smooth_field(mesh, cfg.seed + i);
        const double eps = cfg.eps[i % cfg.eps.size()];
        IsometryElement phi = man.identity_isometry();
        if (cfg.random_base_isometry) {
          std::mt19937_64 rng(cfg.seed + 1000u + i);
          std::uniform_real_distribution<double> unif(-1.0, 1.0);
          KillingElement k;
          k.coeffs = Eigen::VectorXd(man.killing_dim());
          for (int c = 0; c < man.killing_dim(); ++c) k.coeffs(c) = unif(rng);
          phi = man.flow(k, 1.0);
        }
        DiscreteMap f;
        f.mesh = &mesh;
        f.images.resize(mesh.vertices.size());
        for (int v = 0; v < mesh.vertex_count(); ++v) {
          f.images[v] = man.apply(
              phi, man.exp(mesh.vertices[v], eps * x.vectors[v]));
        }
        out.push_back({"random_" + std::to_string(i), std::move(f)});
      }
      break;
  }
  return out;
}

namespace {

nlohmann::json isometry_json(const IsometryElement& phi) {
  nlohmann::json j;
  if (phi.kind == ManifoldKind::Sphere) {
    j["kind"] = "sphere_rotation";
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) {
      rows.push_back({phi.rotation(r, 0), phi.rotation(r, 1),
                      phi.rotation(r, 2)});
    }
    j["rotation"] = rows;
  } else {
    j["kind"] = "torus_shift";
    j["shift"] = {phi.shift(0), phi.shift(1)};
  }
  return j;
}

}  // namespace

std::string report_to_json(const RigidityReport& report,
                           const SurfaceMesh& mesh, double p) {
  nlohmann::json j;
  j["format"] = "rigidlab-report-v1";
  j["manifold"] = mesh.man->name();
  j["mesh_hash"] = mesh.hash;
  j["p"] = p;
  j["Ep"] = report.Ep;
  j["e"] = report.e;
  j["dist_w1p"] = report.dist;
  j["ratio"] = report.ratio;
  j["phi"] = isometry_json(report.phi);
  j["ok"] = report.ok;
  j["failure_stage"] = report.failure_stage;
  j["clamp_cap_hit"] = report.clamp_cap_hit;
  j["xbar_norm"] = report.xbar_norm;
  std::vector<double> kc(report.kbar.coeffs.data(),
                         report.kbar.coeffs.data() + report.kbar.coeffs.size());
  j["kbar"] = kc;
  nlohmann::json flow;
  flow["steps"] = report.flow.steps;
  flow["w1p_dist_to_initial"] = report.flow.w1p_dist_to_initial;
  flow["h_norms"] = report.flow.h_norms;
  flow["ratio_defined"] = report.flow.ratio_defined;
  flow["ratio"] = report.flow.ratio;
  flow["max_face_grad"] = report.flow.max_face_grad;
  j["heatflow"] = flow;
  return j.dump(2);
}

std::string field_to_json(const TangentField& x) {
  nlohmann::json j;
  j["format"] = "rigidlab-field-v1";
  j["manifold"] = x.mesh->man->name();
  j["mesh_hash"] = x.mesh->hash;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& v : x.vectors) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) row.push_back(v(i));
    rows.push_back(row);
  }
  j["vectors"] = rows;
  return j.dump(2);
}

}  // namespace rigidlab
