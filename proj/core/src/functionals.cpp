#include "maiter/functionals.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "maiter/errors.hpp"
#include "maiter/parallel.hpp"

namespace maiter {

namespace {

std::vector<double> field_values(const ScalarField& f, const EvaluationGrid& grid) {
  const int64_t nn = grid.num_nodes();
  std::vector<double> v(nn);
  parallel_for(nn, [&](int64_t k) { v[k] = f(grid.node(k)); });
  return v;
}

}  // namespace

double F_of(const ScalarField& f, const Profile& profile, const EvaluationGrid& grid) {
  const std::vector<double> v = field_values(f, grid);
  double s = 0;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    if (profile.positive_domain() && v[k] <= 0)
      throw NonPositivePotential("power-profile functional needs phi > 0 on the grid");
    s += grid.quad_weight(k) * profile.H(v[k]);
  }
  return profile.H_inv(s);
}

double F_of(const MaxAffinePotential& phi, const Profile& profile,
            const EvaluationGrid& grid) {
  return F_of([&phi](const Vec& x) { return phi.eval(x); }, profile, grid);
}

namespace {

/// Value and outward slope of a max-affine potential at a ray foot; the
/// slope is the active plane's, exact beyond the box.
std::pair<double, double> ray_trace(const MaxAffinePotential& phi,
                                    const EvaluationGrid& grid, const RayGeom& g) {
  const Vec edge = g.edge(grid);
  const double v = phi.eval(edge);
  const double s =
      std::max(dot(phi.sites[phi.argmax_index(edge)], g.outward(grid.dim)), 1e-12);
  return {v, s};
}

}  // namespace

double F_of_extended(const MaxAffinePotential& phi, const Profile& profile,
                     const EvaluationGrid& grid) {
  const int64_t nn = grid.num_nodes();
  std::vector<double> v(nn);
  parallel_for(nn, [&](int64_t k) { v[k] = phi.eval(grid.node(k)); });
  double s = 0;
  for (int64_t k = 0; k < nn; ++k) {
    if (profile.positive_domain() && v[k] <= 0)
      throw NonPositivePotential("power-profile functional needs phi > 0 on the grid");
    s += grid.quad_weight(k) * profile.H(v[k]);
  }
  for (const RayGeom& g : boundary_rays(grid)) {
    const auto [val, slope] = ray_trace(phi, grid, g);
    s += g.tweight * profile.H2(val) / slope;
  }
  return profile.H_inv(s);
}

double pairing(const MaxAffinePotential& phi, const SourceDensity& rho) {
  const int64_t nn = rho.grid.num_nodes();
  std::vector<double> v(nn);
  parallel_for(nn, [&](int64_t k) { v[k] = phi.eval(rho.grid.node(k)); });
  double s = 0;
  for (int64_t k = 0; k < nn; ++k) s += rho.masses[k] * v[k];
  // tail rays: the integrand is linear along the ray, so its mean under the
  // ray's h-weight is a + b E[t]
  for (const BoundaryRay& r : rho.rays) {
    const auto [a, b] = ray_trace(phi, rho.grid, r.geom);
    s += r.mass * (a + b * r.mean_t);
  }
  return s;
}

double G_of(const SourceDensity& rho, const Profile& profile) {
  const int64_t nn = rho.grid.num_nodes();
  if (profile.kind == ProfileKind::Exponential) {
    double s = 0;
    for (int64_t k = 0; k < nn; ++k) {
      const double m = rho.masses[k];
      if (m <= 0) continue;  // 0 log 0 = 0
      s -= m * std::log(m / rho.grid.quad_weight(k));
    }
    for (const BoundaryRay& r : rho.rays)
      s += r.mass * (std::log(rho.normalization) +
                     profile.J(r.gen_value) / profile.H(r.gen_value));
    return s;
  }
  const double p = profile.s / (profile.s + 1);
  double s = 0;
  for (int64_t k = 0; k < nn; ++k) {
    const double q = rho.grid.quad_weight(k);
    const double d = rho.masses[k] / q;
    if (d > 0) s += q * std::pow(d, p);
  }
  const double ss = profile.s;
  for (const BoundaryRay& r : rho.rays)
    s += std::pow(rho.normalization, -p) * r.geom.tweight / r.gen_slope *
         std::pow(r.gen_value, 1 - ss) / (ss - 1);
  return std::pow(s, 1.0 / p);
}

GapReport duality_gap_check(const MaxAffinePotential& phi, double F_prev,
                            const SourceDensity& rho, const Profile& profile,
                            const Coupling& coupling, double num_tol) {
  GapReport r;
  r.pairing = pairing(phi, rho);
  r.G = G_of(rho, profile);
  r.g_value = couple(coupling, r.pairing, r.G);
  r.F_next = rho.rays.empty() ? F_of(phi, profile, rho.grid)
                              : F_of_extended(phi, profile, rho.grid);
  r.gap1 = F_prev - r.g_value;
  r.gap2 = r.g_value - r.F_next;
  if (r.gap1 < -num_tol || r.gap2 < -num_tol) {
    std::ostringstream os;
    os << "chain gaps (" << r.gap1 << ", " << r.gap2 << ") below -" << num_tol;
    throw MonotonicityViolated(os.str());
  }
  return r;
}

DingMabuchi ding_mabuchi(const MaxAffinePotential& phi, const SourceDensity& rho,
                         const ConvexBody& body, const EvaluationGrid& grid,
                         const Profile& profile) {
  if (profile.kind != ProfileKind::Exponential)
    throw WrongProfile("Ding/Mabuchi energies are defined on the exponential profile");
  double conj_int = 0;
  for (size_t j = 0; j < phi.weights.size(); ++j)
    conj_int += phi.site_masses[j] * phi.weights[j];
  const double vol = body.volume;
  const double mean_conj = conj_int / vol;
  const double logv = std::log(vol);

  DingMabuchi out;
  out.aubin_mabuchi = -mean_conj;
  const double F = rho.rays.empty() ? F_of(phi, profile, grid)
                                    : F_of_extended(phi, profile, grid);
  out.ding = F + mean_conj + logv;
  out.mabuchi = pairing(phi, rho) - G_of(rho, profile) + mean_conj + logv;
  return out;
}

HolderReport reverse_holder_check(const ScalarField& f, const ScalarField& h, double s,
                                  const EvaluationGrid& grid, double tol) {
  const std::vector<double> fv = field_values(f, grid);
  const std::vector<double> hv = field_values(h, grid);
  const double p = s / (s + 1);
  double hp = 0, fq = 0, fh = 0;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    const double q = grid.quad_weight(k);
    if (fv[k] <= 0) throw DomainError("reverse Hoelder needs f > 0");
    if (hv[k] < 0) throw DomainError("reverse Hoelder needs h >= 0");
    hp += q * std::pow(hv[k], p);
    fq += q * std::pow(fv[k], -s);
    fh += q * fv[k] * hv[k];
  }
  HolderReport rep;
  rep.lhs = std::pow(hp, 1.0 / p) * std::pow(fq, -1.0 / s);
  rep.rhs = fh;
  if (rep.lhs > rep.rhs + tol * (1 + std::abs(rep.rhs))) {
    std::ostringstream os;
    os << "||h||_p ||f||_q = " << rep.lhs << " exceeds int f h = " << rep.rhs;
    throw InequalityViolated(os.str());
  }
  return rep;
}

}  // namespace maiter
