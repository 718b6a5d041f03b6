#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "maiter/affine_geom.hpp"
#include "maiter/errors.hpp"
#include "maiter/iteration.hpp"
#include "svg.hpp"

using json = nlohmann::ordered_json;
using namespace maiter;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUncentered = 1;
constexpr int kExitMaxIters = 2;
constexpr int kExitError = 3;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ConvexBody body_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<Vec> verts;
  for (const auto& row : j.at("vertices")) {
    if (static_cast<int>(row.size()) != dim)
      throw DomainError("vertex arity does not match dim");
    Vec v = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) v[i] = row[i].get<double>();
    verts.push_back(v);
  }
  return build_body(verts);
}

json body_to_json(const ConvexBody& b) {
  json j;
  j["dim"] = b.dim;
  json verts = json::array();
  for (const Vec& v : b.vertices) {
    json row = json::array();
    for (int i = 0; i < b.dim; ++i) row.push_back(v[i]);
    verts.push_back(row);
  }
  j["vertices"] = verts;
  return j;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

struct RunSpec {
  IterationConfig config;
  double p = 1.0;
  std::string out_dir = "out";
  bool plot = true;
};

RunSpec parse_run_spec(const json& j) {
  static const std::vector<std::string> known = {
      "body",    "body_file",      "profile",  "p",        "tau",     "n_sites",
      "grid_l",  "grid_m",         "mass_tol", "stop_tol", "max_iterations",
      "tail_tol", "num_tol",       "seed",     "w1_diag",  "out_dir", "plot"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw DomainError("unknown spec key: " + key);
  }
  RunSpec spec;
  IterationConfig& c = spec.config;
  if (j.contains("body_file"))
    c.body = body_from_json(load_json(j.at("body_file").get<std::string>()));
  else
    c.body = body_from_json(j.at("body"));
  const std::string prof = j.at("profile").get<std::string>();
  if (prof == "exp") {
    c.profile = Profile::exponential(c.body.dim);
  } else if (prof == "power") {
    spec.p = j.value("p", 1.0);
    c.profile = Profile::power(c.body.dim, spec.p);
  } else {
    throw DomainError("profile must be 'exp' or 'power'");
  }
  c.coupling = coupling_for(c.profile);
  c.tau = j.at("tau").get<double>();
  c.n_sites = j.value("n_sites", 129);
  c.grid_l = j.value("grid_l", 0.0);
  c.grid_m = j.value("grid_m", 257);
  c.mass_tol = j.value("mass_tol", 1e-7);
  c.stop_tol = j.value("stop_tol", 1e-5);
  c.max_iterations = j.value("max_iterations", 60);
  c.tail_tol = j.value("tail_tol", 1e-8);
  c.num_tol = j.value("num_tol", 1e-6);
  c.seed = j.value("seed", 1ull);
  c.w1_diag = j.value("w1_diag", true);
  spec.out_dir = j.value("out_dir", std::string("out"));
  spec.plot = j.value("plot", true);
  return spec;
}

json spec_to_json(const RunSpec& spec) {
  const IterationConfig& c = spec.config;
  json j;
  j["body"] = body_to_json(c.body);
  j["profile"] = c.profile.kind == ProfileKind::Exponential ? "exp" : "power";
  if (c.profile.kind == ProfileKind::Power) j["p"] = spec.p;
  j["tau"] = c.tau;
  j["n_sites"] = c.n_sites;
  j["grid_l"] = c.grid_l;
  j["grid_m"] = c.grid_m;
  j["mass_tol"] = c.mass_tol;
  j["stop_tol"] = c.stop_tol;
  j["max_iterations"] = c.max_iterations;
  j["tail_tol"] = c.tail_tol;
  j["num_tol"] = c.num_tol;
  j["seed"] = c.seed;
  j["w1_diag"] = c.w1_diag;
  j["out_dir"] = spec.out_dir;
  j["plot"] = spec.plot;
  return j;
}

void write_trace_csv(const IterationTrace& t, const std::string& path) {
  std::ofstream out(path);
  out << "# normalized Monge-Ampere iteration trace: profile=" << t.profile_name
      << " tau=" << fmt(t.tau) << " grid_l=" << fmt(t.grid_l) << " grid_m=" << t.grid_m
      << " sites=" << t.n_sites << "\n";
  out << "# columns: iter,F,pairing,G,g_value,ding,mabuchi,aubin_mabuchi,gap1,gap2,"
         "a_norm,drift,sup_change,tail_mass,w1_lower,w1_upper,growth_lower_margin,"
         "growth_upper_margin,min_value,normalization_residual,max_rel_imbalance\n";
  for (const TraceRow& r : t.rows) {
    out << r.iter << ',' << fmt(r.rec.F) << ',' << fmt(r.rec.pairing) << ','
        << fmt(r.rec.G) << ',' << fmt(r.rec.g_value) << ',' << fmt(r.rec.ding) << ','
        << fmt(r.rec.mabuchi) << ',' << fmt(r.rec.aubin_mabuchi) << ','
        << fmt(r.rec.gap1) << ',' << fmt(r.rec.gap2) << ',' << fmt(r.a_norm) << ','
        << fmt(r.drift) << ',' << fmt(r.sup_change) << ',' << fmt(r.tail_mass) << ','
        << fmt(r.w1_lower) << ',' << fmt(r.w1_upper) << ','
        << fmt(r.growth_lower_margin) << ',' << fmt(r.growth_upper_margin) << ','
        << fmt(r.min_value) << ',' << fmt(r.normalization_residual) << ','
        << fmt(r.max_rel_imbalance) << "\n";
  }
}

void write_potential(const RunResult& res, const RunSpec& spec, const std::string& path) {
  const MaxAffinePotential& phi = res.potential;
  json j;
  j["body"] = body_to_json(spec.config.body);
  j["profile"] = spec.config.profile.kind == ProfileKind::Exponential ? "exp" : "power";
  j["p"] = spec.p;
  j["tau"] = spec.config.tau;
  j["grid_l"] = res.trace.grid_l;
  j["grid_m"] = res.trace.grid_m;
  j["dim"] = phi.dim;
  json sites = json::array(), weights = json::array(), masses = json::array(),
       prev = json::array();
  for (size_t k = 0; k < phi.sites.size(); ++k) {
    json row = json::array();
    for (int i = 0; i < phi.dim; ++i) row.push_back(phi.sites[k][i]);
    sites.push_back(row);
    weights.push_back(phi.weights[k]);
    masses.push_back(phi.site_masses[k]);
    prev.push_back(res.prev_weights[k]);
  }
  j["sites"] = sites;
  j["weights"] = weights;
  j["site_masses"] = masses;
  j["prev_weights"] = prev;
  std::ofstream out(path);
  out << j.dump(1) << "\n";
}

void write_convergence_svg(const IterationTrace& t, const std::string& path) {
  maiter_cli::SvgPlot plot("convergence", "iteration", "log10 value");
  std::vector<std::pair<double, double>> fser, sser;
  const double fmin = [&] {
    double m = 1e300;
    for (const TraceRow& r : t.rows)
      if (std::isfinite(r.rec.F)) m = std::min(m, r.rec.F);
    return m;
  }();
  for (const TraceRow& r : t.rows) {
    if (r.iter >= 1 && std::isfinite(r.rec.F))
      fser.push_back({double(r.iter), std::log10(std::max(r.rec.F - fmin, 1e-16))});
    if (r.iter >= 1 && r.sup_change > 0)
      sser.push_back({double(r.iter), std::log10(r.sup_change)});
  }
  plot.add_series("F - F_min", "#d62728", fser);
  plot.add_series("sup_change", "#1f77b4", sser);
  plot.write(path);
}

struct IterateOverrides {
  std::optional<std::string> out_dir, profile;
  std::optional<double> p, tau, grid_l, mass_tol, stop_tol, tail_tol, damping;
  std::optional<int> sites, grid_m, max_iters, ot_max_iters;
  std::optional<uint64_t> seed;
  bool no_plot = false;
};

int cmd_iterate(const std::string& spec_path, const IterateOverrides& ov) {
  RunSpec spec = parse_run_spec(load_json(spec_path));
  if (ov.out_dir) spec.out_dir = *ov.out_dir;
  if (ov.no_plot) spec.plot = false;
  IterationConfig& c = spec.config;
  if (ov.profile || ov.p) {
    const std::string prof = ov.profile.value_or(
        c.profile.kind == ProfileKind::Exponential ? "exp" : "power");
    if (prof == "exp") {
      c.profile = Profile::exponential(c.body.dim);
    } else if (prof == "power") {
      spec.p = ov.p.value_or(spec.p);
      c.profile = Profile::power(c.body.dim, spec.p);
    } else {
      throw DomainError("profile must be 'exp' or 'power'");
    }
    c.coupling = coupling_for(c.profile);
  }
  if (ov.tau) c.tau = *ov.tau;
  if (ov.sites) c.n_sites = *ov.sites;
  if (ov.grid_l) c.grid_l = *ov.grid_l;
  if (ov.grid_m) c.grid_m = *ov.grid_m;
  if (ov.mass_tol) c.mass_tol = *ov.mass_tol;
  if (ov.stop_tol) c.stop_tol = *ov.stop_tol;
  if (ov.tail_tol) c.tail_tol = *ov.tail_tol;
  if (ov.max_iters) c.max_iterations = *ov.max_iters;
  if (ov.ot_max_iters) c.ot_max_iters = *ov.ot_max_iters;
  if (ov.damping) c.ot_damping = *ov.damping;
  if (ov.seed) c.seed = *ov.seed;

  const RunResult res = run(spec.config);

  fs::create_directories(spec.out_dir);
  {
    std::ofstream out(fs::path(spec.out_dir) / "run_spec.json");
    out << spec_to_json(spec).dump(1) << "\n";
  }
  write_trace_csv(res.trace, (fs::path(spec.out_dir) / "trace.csv").string());
  write_potential(res, spec, (fs::path(spec.out_dir) / "final_potential.txt").string());
  if (spec.plot)
    write_convergence_svg(res.trace,
                          (fs::path(spec.out_dir) / "convergence.svg").string());

  const TraceRow& last = res.trace.rows.back();
  std::cout << "profile=" << res.trace.profile_name << " iterations=" << last.iter
            << " F=" << fmt(last.rec.F) << " sup_change=" << fmt(last.sup_change)
            << " status=";
  switch (res.status) {
    case RunStatus::Converged:
      std::cout << "converged\n";
      return kExitOk;
    case RunStatus::MaxIterations:
      std::cout << "max-iterations\n";
      return kExitMaxIters;
    case RunStatus::MonotonicityViolated:
      std::cout << "monotonicity-violated\n";
      return kExitError;
  }
  return kExitError;
}

int cmd_validate_body(const std::string& path) {
  const ConvexBody b = body_from_json(load_json(path));
  std::cout << "dim " << b.dim << "\nvolume " << fmt(b.volume) << "\nbarycenter";
  for (int i = 0; i < b.dim; ++i) std::cout << ' ' << fmt(b.barycenter[i]);
  std::cout << "\ninradius " << fmt(b.inradius) << "\n";
  if (b.dim <= 2) {
    try {
      std::cout << "delzant " << (delzant_check(b) ? "true" : "false") << "\n";
    } catch (const NonIntegralVertex&) {
      std::cout << "delzant n/a (vertices not integral)\n";
    }
  }
  return norm(b.barycenter) <= 1e-9 ? kExitOk : kExitUncentered;
}

int cmd_oracle_check() {
  struct Entry {
    std::string name;
    OracleSolution o;
    double lo, hi;
  };
  std::vector<Entry> oracles;
  oracles.push_back({"exp1d", exp_oracle_1d(), -20, 20});
  oracles.push_back({"power1d", power_oracle_1d(), -20, 20});
  oracles.push_back({"exp2d-square", separable_oracle_2d(Profile::exponential(2)), -6, 6});
  oracles.push_back(
      {"exp2d-disc", radial_shooting(Profile::exponential(2), 1.0, 2.0), 0.01, 10});
  oracles.push_back({"power2d-disc",
                     radial_shooting(Profile::power(2, 1.0), 1.0, 2 * M_PI / 3), 0.01, 10});
  int fail = 0;
  for (const Entry& e : oracles) {
    std::vector<Vec> pts;
    for (int i = 0; i <= 1000; ++i) {
      const double t = e.lo + (e.hi - e.lo) * i / 1000.0;
      pts.push_back(e.o.body.dim == 1 ? Vec(t) : Vec(t, 0.35 * t));
    }
    const double res = oracle_max_residual(e.o, pts);
    const double tol = e.name.find("disc") != std::string::npos ? 1e-8 : 1e-10;
    const bool ok = res <= tol;
    if (!ok) ++fail;
    std::cout << e.name << ": max residual " << fmt(res) << " (tau " << fmt(e.o.tau)
              << ") " << (ok ? "ok" : "FAIL") << "\n";
  }
  return fail == 0 ? kExitOk : kExitError;
}

int cmd_affine_report(const std::optional<std::string>& potential_path,
                      const std::optional<std::string>& oracle_name, double threshold,
                      const std::string& out_dir) {
  AffineReport rep;
  std::vector<std::pair<double, double>> curve;

  if (oracle_name) {
    OracleSolution o;
    if (*oracle_name == "power1d")
      o = power_oracle_1d();
    else if (*oracle_name == "exp1d")
      o = exp_oracle_1d();
    else if (*oracle_name == "power2d-disc")
      o = radial_shooting(Profile::power(2, 1.0), 1.0, 2 * M_PI / 3);
    else
      throw DomainError("unknown oracle: " + *oracle_name);
    if (o.profile.kind != ProfileKind::Power)
      throw WrongProfile("affine reports need the power profile");
    const EvaluationGrid grid = o.body.dim == 1 ? EvaluationGrid(1, 400.0, 16001)
                                                : EvaluationGrid(2, 12.0, 241);
    const SmoothSampler s = sampler_from_oracle(o);
    rep = affine_report_smooth(s, o.body, grid, 2.0);
    for (double x = -3; x <= 3; x += 0.02) {
      const ImmersionSample im = immerse(s, o.body.dim == 1 ? Vec(x) : Vec(x, 0.0));
      curve.push_back({im.f_point[0], im.f_point[o.body.dim]});
    }
  } else {
    const json j = load_json(*potential_path);
    if (j.at("profile").get<std::string>() != "power")
      throw WrongProfile("affine reports need the power profile");
    const ConvexBody body = body_from_json(j.at("body"));
    const Profile profile = Profile::power(body.dim, j.value("p", 1.0));
    MaxAffinePotential fin;
    fin.dim = body.dim;
    for (const auto& row : j.at("sites")) {
      Vec v = Vec::zero(body.dim);
      for (int i = 0; i < body.dim; ++i) v[i] = row[i].get<double>();
      fin.sites.push_back(v);
    }
    for (const auto& w : j.at("weights")) fin.weights.push_back(w.get<double>());
    for (const auto& m : j.at("site_masses")) fin.site_masses.push_back(m.get<double>());
    MaxAffinePotential prev = fin;
    prev.weights.clear();
    for (const auto& w : j.at("prev_weights")) prev.weights.push_back(w.get<double>());
    const EvaluationGrid grid(body.dim, j.at("grid_l").get<double>(),
                              j.at("grid_m").get<int>());
    rep = affine_report_iterate(prev, fin, profile, body, grid, grid.halfwidth / 4);
    for (double x = -3; x <= 3; x += 0.02) {
      const Vec p = body.dim == 1 ? Vec(x) : Vec(x, 0.0);
      const Vec g = fin.sites[fin.argmax_index(p)];
      curve.push_back({g[0], dot(p, g) - fin.eval(p)});
    }
  }

  fs::create_directories(out_dir);
  json j;
  j["gamma_est"] = rep.gamma_est;
  j["sphere_residual"] = rep.sphere_residual;
  j["asa_def1"] = rep.asa_def1;
  j["asa_def2"] = rep.asa_def2;
  j["asa_def3"] = rep.asa_def3;
  j["cone_measure_f"] = rep.cone_measure_f;
  j["cone_measure_nu"] = rep.cone_measure_nu;
  j["anchor_error"] = rep.anchor_error;
  {
    std::ofstream out(fs::path(out_dir) / "affine_report.json");
    out << j.dump(1) << "\n";
  }
  maiter_cli::SvgPlot plot("Legendre graph immersion", "y", "phi*(y)");
  plot.add_series("immersed curve", "#2ca02c", curve);
  plot.write((fs::path(out_dir) / "immersion.svg").string());

  std::cout << "gamma=" << fmt(rep.gamma_est)
            << " sphere_residual=" << fmt(rep.sphere_residual) << " asa=("
            << fmt(rep.asa_def1) << ", " << fmt(rep.asa_def2) << ", "
            << fmt(rep.asa_def3) << ") anchor=" << fmt(rep.anchor_error) << "\n";
  return rep.sphere_residual <= threshold ? kExitOk : kExitUncentered;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normalized Monge-Ampere iteration toolkit"};
  app.require_subcommand(1);

  std::string spec_path;
  IterateOverrides ov;
  CLI::App* iterate = app.add_subcommand("iterate", "run the iteration from a spec file");
  iterate->add_option("spec", spec_path, "run spec (json)")->required();
  iterate->add_option("--out", ov.out_dir, "output directory override");
  iterate->add_flag("--no-plot", ov.no_plot, "skip the convergence svg");
  iterate->add_option("--profile", ov.profile, "exp or power");
  iterate->add_option("--p", ov.p, "power-profile tail exponent");
  iterate->add_option("--tau", ov.tau, "conjugate normalization");
  iterate->add_option("--sites", ov.sites, "target quadrature sites");
  iterate->add_option("--grid-l", ov.grid_l, "truncation half-width");
  iterate->add_option("--grid-m", ov.grid_m, "grid points per axis");
  iterate->add_option("--mass-tol", ov.mass_tol, "relative transport mass tolerance");
  iterate->add_option("--stop-tol", ov.stop_tol, "sup-change stopping tolerance");
  iterate->add_option("--tail-tol", ov.tail_tol, "admissible truncated mass share");
  iterate->add_option("--max-iters", ov.max_iters, "iteration cap");
  iterate->add_option("--ot-max-iters", ov.ot_max_iters, "dual ascent cap per step");
  iterate->add_option("--damping", ov.damping, "dual ascent step-halving factor");
  iterate->add_option("--seed", ov.seed, "site generation seed");

  std::string body_path;
  CLI::App* validate = app.add_subcommand("validate-body", "check a body file");
  validate->add_option("body", body_path, "body spec (json)")->required();

  CLI::App* oracle = app.add_subcommand("oracle-check", "residuals of the bundled oracles");

  std::optional<std::string> potential_path, oracle_name;
  double threshold = 5e-2;
  std::string report_out = "out";
  CLI::App* report = app.add_subcommand("affine-report", "affine-sphere diagnostics");
  report->add_option("--potential", potential_path, "final_potential.txt from a run");
  report->add_option("--oracle", oracle_name, "oracle name (power1d, power2d-disc)");
  report->add_option("--threshold", threshold, "sphere residual gate");
  report->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (iterate->parsed()) return cmd_iterate(spec_path, ov);
    if (validate->parsed()) return cmd_validate_body(body_path);
    if (oracle->parsed()) return cmd_oracle_check();
    if (report->parsed()) {
      if (!potential_path && !oracle_name)
        throw DomainError("affine-report needs --potential or --oracle");
      return cmd_affine_report(potential_path, oracle_name, threshold, report_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
