#include "maiter/affine_geom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "maiter/errors.hpp"

namespace maiter {
namespace {

double psi_value(const SmoothSampler& s, const Vec& x) {
  if (s.psi_is_phi) return s.phi(x);
  const double det = s.det_hess(x);
  if (det <= 0) throw NonconvexSample("nonpositive Hessian determinant");
  return std::pow(det, -1.0 / (s.dim + 2));
}

Vec fd_grad(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g = Vec::zero(x.n);
  for (int i = 0; i < x.n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

std::array<double, 3> fd_hess(const std::function<double(const Vec&)>& f, const Vec& x,
                              double h) {
  std::array<double, 3> H{0, 0, 0};
  const double f0 = f(x);
  for (int i = 0; i < x.n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    H[i] = (f(xp) - 2 * f0 + f(xm)) / (h * h);
  }
  if (x.n == 2) {
    Vec a = x, b = x, c = x, d = x;
    a[0] += h; a[1] += h;
    b[0] += h; b[1] -= h;
    c[0] -= h; c[1] += h;
    d[0] -= h; d[1] -= h;
    H[2] = (f(a) - f(b) - f(c) + f(d)) / (4 * h * h);
  }
  return H;
}

Vec grad_of(const SmoothSampler& s, const Vec& x) {
  if (s.grad) return s.grad(x);
  return fd_grad(s.phi, x, s.fd_step * std::max(1.0, norm(x)));
}

Vec psi_grad_of(const SmoothSampler& s, const Vec& x) {
  if (s.psi_is_phi) return grad_of(s, x);
  return fd_grad([&s](const Vec& y) { return psi_value(s, y); }, x,
                 s.fd_step * std::max(1.0, norm(x)));
}

std::array<double, 3> hess_of(const SmoothSampler& s, const Vec& x) {
  if (s.hess) return s.hess(x);
  return fd_hess(s.phi, x, s.fd_step * std::max(1.0, norm(x)));
}

std::array<double, 3> psi_hess_of(const SmoothSampler& s, const Vec& x) {
  if (s.psi_is_phi) return hess_of(s, x);
  return fd_hess([&s](const Vec& y) { return psi_value(s, y); }, x,
                 s.fd_step * std::max(1.0, norm(x)));
}

}  // namespace

SmoothSampler sampler_from_oracle(const OracleSolution& o) {
  SmoothSampler s;
  s.dim = o.body.dim;
  s.lambda_A = o.lambda_A;
  s.phi = o.phi;
  s.grad = o.grad;
  s.det_hess = o.det_hess;
  s.hess = o.hess;
  s.psi_is_phi = o.psi_is_phi;
  return s;
}

SmoothSampler sampler_from_iterate(const MaxAffinePotential& phi,
                                   const MaxAffinePotential& prescribed,
                                   const Profile& profile, const EvaluationGrid& grid) {
  SmoothSampler s;
  s.dim = phi.dim;
  double lambda = phi.total_site_mass();
  s.lambda_A = lambda;
  double Z = 0;
  for (int64_t k = 0; k < grid.num_nodes(); ++k)
    Z += grid.quad_weight(k) * profile.h(prescribed.eval(grid.node(k)));
  s.phi = [phi](const Vec& x) { return phi.eval(x); };
  s.grad = [phi](const Vec& x) { return phi.sites[phi.argmax_index(x)]; };
  s.det_hess = [prescribed, profile, lambda, Z](const Vec& x) {
    return lambda * profile.h(prescribed.eval(x)) / Z;
  };
  return s;
}

ImmersionSample immerse(const SmoothSampler& s, const Vec& x) {
  const int n = s.dim;
  ImmersionSample out;
  out.x = x;
  const double ph = s.phi(x);
  const Vec g = grad_of(s, x);
  for (int i = 0; i < n; ++i) out.f_point[i] = g[i];
  out.f_point[n] = dot(x, g) - ph;

  const double psi = psi_value(s, x);
  const Vec pg = psi_grad_of(s, x);
  for (int i = 0; i < n; ++i) out.xi[i] = -pg[i];
  out.xi[n] = psi - dot(x, pg);

  const double w = std::sqrt(1 + norm_sq(x));
  for (int i = 0; i < n; ++i) out.gauss_normal[i] = x[i] / w;
  out.gauss_normal[n] = -1.0 / w;
  out.support_rho = ph / w;

  const double det = s.det_hess(x);
  if (det <= 0) throw NonconvexSample("nonpositive Hessian determinant");
  out.kappa = std::pow(w, -(n + 2)) / det;

  if (ph <= 0) throw NonPositivePotential("dual immersion needs phi > 0");
  for (int i = 0; i < n; ++i) out.nu_point[i] = x[i] / ph;
  out.nu_point[n] = -1.0 / ph;
  return out;
}

ShapeResult shape_operator(const SmoothSampler& s, const Vec& x) {
  const std::array<double, 3> H = hess_of(s, x);
  const std::array<double, 3> P = psi_hess_of(s, x);
  ShapeResult r;
  if (s.dim == 1) {
    if (H[0] <= 0) throw NonconvexSample("Hessian not positive definite");
    r.S[0] = P[0] / H[0];
    r.gamma_est = r.S[0];
    return r;
  }
  const double det = H[0] * H[1] - H[2] * H[2];
  if (H[0] <= 0 || det <= 0) throw NonconvexSample("Hessian not positive definite");
  // S = Hess(psi) Hess(phi)^-1
  const double i00 = H[1] / det, i11 = H[0] / det, i01 = -H[2] / det;
  r.S[0] = P[0] * i00 + P[2] * i01;
  r.S[1] = P[0] * i01 + P[2] * i11;
  r.S[2] = P[2] * i00 + P[1] * i01;
  r.S[3] = P[2] * i01 + P[1] * i11;
  r.gamma_est = 0.5 * (r.S[0] + r.S[3]);
  return r;
}

double affine_surface_area(const SmoothSampler& s, const EvaluationGrid& grid,
                           int method) {
  const int n = s.dim;
  const double expo = double(n + 1) / (n + 2);
  if (method == 1) {
    double sum = 0;
    for (int64_t k = 0; k < grid.num_nodes(); ++k)
      sum += grid.quad_weight(k) * std::pow(s.det_hess(grid.node(k)), expo);
    return sum;
  }
  if (method == 2) {
    double sum = 0;
    for (int64_t k = 0; k < grid.num_nodes(); ++k) {
      const Vec x = grid.node(k);
      const double det = s.det_hess(x);
      const double w2 = 1 + norm_sq(x);
      const double kappa = std::pow(w2, -0.5 * (n + 2)) / det;
      const double dV = std::sqrt(w2) * det;
      sum += grid.quad_weight(k) * std::pow(kappa, 1.0 / (n + 2)) * dV;
    }
    return sum;
  }
  if (method != 3) throw DomainError("affine_surface_area method must be 1, 2 or 3");
  // dual route: Omega^{(n+2)/(n+1)} = lambda(A) G_{n+1}(MA density)
  SourceDensity rho;
  rho.grid = grid;
  rho.masses.resize(grid.num_nodes());
  double total = 0;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    rho.masses[k] = grid.quad_weight(k) * s.det_hess(grid.node(k)) / s.lambda_A;
    total += rho.masses[k];
  }
  for (double& m : rho.masses) m /= total;
  const Profile dual_profile = Profile::power(n, 1.0);  // s = n + 1
  const double G = G_of(rho, dual_profile) * total;
  return std::pow(s.lambda_A * G, expo);
}

ConeMeasures cone_measures(const SmoothSampler& s, const EvaluationGrid& grid) {
  ConeMeasures cm;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    const Vec x = grid.node(k);
    const double ph = s.phi(x);
    if (ph <= 0) throw NonPositivePotential("cone measures need phi > 0");
    const double q = grid.quad_weight(k);
    cm.mu_f += q * ph * s.det_hess(x);
    cm.mu_nu += q * std::pow(ph, -(s.dim + 1));
  }
  return cm;
}

double anchor_check(const SmoothSampler& s, const ConvexBody& body, double R_far,
                    int n_dirs) {
  const ConvexBody pol = polar(body);
  double worst = 0;
  const int count = body.dim == 1 ? 2 : n_dirs;
  for (int d = 0; d < count; ++d) {
    Vec u = Vec::zero(body.dim);
    if (body.dim == 1)
      u[0] = d == 0 ? 1.0 : -1.0;
    else {
      const double t = 2 * M_PI * d / count;
      u[0] = std::cos(t);
      u[1] = std::sin(t);
    }
    const Vec x = R_far * u;
    if (!body.contains(grad_of(s, x), 1e-6))
      throw PreconditionViolated("gradient image leaves the body");
    const double ph = s.phi(x);
    if (ph <= 0) throw NonPositivePotential("dual immersion needs phi > 0");
    double err;
    if (body.dim == 1) {
      err = std::numeric_limits<double>::infinity();
      for (const Vec& v : pol.vertices)
        err = std::min(err, std::hypot(x[0] / ph - v[0], -1.0 / ph));
    } else {
      std::vector<std::array<double, 2>> poly;
      for (const Vec& v : pol.vertices) poly.push_back({v[0], v[1]});
      const double d2 =
          dist_to_polygon_boundary(poly, {x[0] / ph, x[1] / ph});
      err = std::hypot(d2, 1.0 / ph);
    }
    worst = std::max(worst, err);
  }
  return worst;
}

PrescribedStep prescribed_normal_step(const SmoothSampler& psi, const ConvexBody& body,
                                      const EvaluationGrid& grid,
                                      const TargetSites& sites,
                                      const SolverOptions& opts) {
  const int n = body.dim;
  SourceDensity rho;
  rho.grid = grid;
  rho.masses.resize(grid.num_nodes());
  double Z = 0;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    const double v = psi.phi(grid.node(k));
    if (v <= 0) throw NonPositivePotential("prescribed normal needs psi > 0");
    const double hv = std::pow(v, -(n + 2));
    rho.masses[k] = grid.quad_weight(k) * hv;
    Z += rho.masses[k];
  }
  for (double& m : rho.masses) m /= Z;
  rho.normalization = Z;

  PrescribedStep out;
  out.solve = solve_step(rho, sites, opts);
  out.c = std::pow(Z / body.volume, 1.0 / (n + 2));
  return out;
}

namespace {

std::vector<Vec> window_nodes(const EvaluationGrid& grid, double window) {
  std::vector<Vec> pts;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    const Vec x = grid.node(k);
    if (norm(x) <= window) pts.push_back(x);
  }
  return pts;
}

}  // namespace

AffineReport affine_report_smooth(const SmoothSampler& s, const ConvexBody& body,
                                  const EvaluationGrid& grid, double window) {
  AffineReport rep;
  const std::vector<Vec> pts = window_nodes(grid, window);
  double gsum = 0;
  std::vector<ShapeResult> shapes;
  shapes.reserve(pts.size());
  for (const Vec& x : pts) {
    shapes.push_back(shape_operator(s, x));
    gsum += shapes.back().gamma_est;
  }
  rep.gamma_est = gsum / pts.size();
  const int n = s.dim;
  for (const ShapeResult& sh : shapes) {
    double dev = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dev = std::max(dev, std::abs(sh.S[i * n + j] - (i == j ? rep.gamma_est : 0.0)));
    rep.sphere_residual = std::max(rep.sphere_residual, dev);
  }
  rep.asa_def1 = affine_surface_area(s, grid, 1);
  rep.asa_def2 = affine_surface_area(s, grid, 2);
  rep.asa_def3 = affine_surface_area(s, grid, 3);
  const ConeMeasures cm = cone_measures(s, grid);
  rep.cone_measure_f = cm.mu_f;
  rep.cone_measure_nu = cm.mu_nu;
  rep.anchor_error = anchor_check(s, body, 100.0);
  return rep;
}

AffineReport affine_report_iterate(const MaxAffinePotential& prescribed,
                                   const MaxAffinePotential& final_phi,
                                   const Profile& profile, const ConvexBody& body,
                                   const EvaluationGrid& grid, double window) {
  AffineReport rep;
  const int n = body.dim;
  const SmoothSampler s = sampler_from_iterate(final_phi, prescribed, profile, grid);

  // gamma = lambda^{-1/(n+2)} ||phi||_{-(n+2)}^{-1}
  double pint = 0, zpre = 0;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    const Vec x = grid.node(k);
    const double q = grid.quad_weight(k);
    pint += q * std::pow(final_phi.eval(x), -(n + 2));
    zpre += q * std::pow(prescribed.eval(x), -(n + 2));
  }
  rep.gamma_est = std::pow(pint / body.volume, 1.0 / (n + 2));
  const double c = std::pow(zpre / body.volume, 1.0 / (n + 2));

  // prescribed-normal defect: the affine normal of the solved step is
  // -c f_prescribed, a sphere would have it equal to -gamma f_final
  for (const Vec& x : window_nodes(grid, window)) {
    const Vec gf = final_phi.sites[final_phi.argmax_index(x)];
    const Vec gp = prescribed.sites[prescribed.argmax_index(x)];
    const double hf = dot(x, gf) - final_phi.eval(x);
    const double hp = dot(x, gp) - prescribed.eval(x);
    double dev = 0, scale = 1;
    for (int i = 0; i < n; ++i) {
      dev = std::max(dev, std::abs(rep.gamma_est * gf[i] - c * gp[i]));
      scale = std::max(scale, std::abs(gf[i]));
    }
    dev = std::max(dev, std::abs(rep.gamma_est * hf - c * hp));
    scale = std::max(scale, std::abs(hf));
    rep.sphere_residual = std::max(rep.sphere_residual, dev / scale);
  }

  rep.asa_def1 = affine_surface_area(s, grid, 1);
  rep.asa_def2 = affine_surface_area(s, grid, 2);
  rep.asa_def3 = affine_surface_area(s, grid, 3);
  const ConeMeasures cm = cone_measures(s, grid);
  rep.cone_measure_f = cm.mu_f;
  rep.cone_measure_nu = cm.mu_nu;
  rep.anchor_error = anchor_check(s, body, 100.0);
  return rep;
}

}  // namespace maiter
