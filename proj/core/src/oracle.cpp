#include "maiter/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "maiter/errors.hpp"

namespace maiter {
namespace {

double xlogx(double t) { return t > 0 ? t * std::log(t) : 0.0; }

ConvexBody unit_interval_body() { return build_body({Vec(-1.0), Vec(1.0)}); }

// stable pieces of 2 log(2 cosh(x/2))
double exp_phi_1d(double x) {
  const double a = std::abs(x);
  return a + 2 * std::log1p(std::exp(-a));
}
double exp_dphi_1d(double x) { return std::tanh(0.5 * x); }
double exp_ddphi_1d(double x) {
  const double e = std::exp(-std::abs(x));
  const double sech_half = 2 * std::sqrt(e) / (1 + e);  // sech(x/2)
  return 0.5 * sech_half * sech_half;
}
double exp_conj_1d(double y) { return xlogx(1 + y) + xlogx(1 - y) - 2 * std::log(2.0); }

}  // namespace

OracleSolution exp_oracle_1d() {
  OracleSolution o;
  o.profile = Profile::exponential(1);
  o.body = unit_interval_body();
  o.lambda_A = 2;
  o.tau = 2;  // -int_{-1}^{1} [(1+y)log(1+y) + (1-y)log(1-y) - 2log2] dy
  o.h_norm = 1;
  o.phi = [](const Vec& x) { return exp_phi_1d(x[0]); };
  o.grad = [](const Vec& x) { return Vec(exp_dphi_1d(x[0])); };
  o.det_hess = [](const Vec& x) { return exp_ddphi_1d(x[0]); };
  o.conj = [](const Vec& y) { return exp_conj_1d(y[0]); };
  o.hess = [](const Vec& x) {
    return std::array<double, 3>{exp_ddphi_1d(x[0]), 0, 0};
  };
  o.note = "2 log(2 cosh(x/2)) on (-1,1)";
  return o;
}

OracleSolution power_oracle_1d() {
  OracleSolution o;
  o.profile = Profile::power(1, 1.0);  // s = 2, h(t) = t^-3
  o.body = unit_interval_body();
  o.lambda_A = 2;
  o.tau = M_PI / 2;  // semicircle area: int_{-1}^1 sqrt(1-y^2) dy
  o.h_norm = 2;
  o.phi = [](const Vec& x) { return std::hypot(1.0, x[0]); };
  o.grad = [](const Vec& x) { return Vec(x[0] / std::hypot(1.0, x[0])); };
  o.det_hess = [](const Vec& x) {
    const double w = std::hypot(1.0, x[0]);
    return 1.0 / (w * w * w);
  };
  o.conj = [](const Vec& y) { return -std::sqrt(std::max(0.0, 1 - y[0] * y[0])); };
  o.hess = [o_det = o.det_hess](const Vec& x) {
    return std::array<double, 3>{o_det(x), 0, 0};
  };
  o.psi_is_phi = true;  // det^{-1/3} = phi: the unit-gamma affine sphere
  o.note = "sqrt(1+x^2) on (-1,1)";
  return o;
}

OracleSolution separable_oracle_2d(const Profile& profile) {
  if (profile.kind != ProfileKind::Exponential)
    throw WrongProfile("the separable construction needs a multiplicative h");
  OracleSolution o;
  o.profile = Profile::exponential(2);
  o.body = build_body({Vec(-1.0, -1.0), Vec(1.0, -1.0), Vec(1.0, 1.0), Vec(-1.0, 1.0)});
  o.lambda_A = 4;
  o.tau = 8;  // 2 * lambda_1d * tau_1d
  o.h_norm = 1;
  o.phi = [](const Vec& x) { return exp_phi_1d(x[0]) + exp_phi_1d(x[1]); };
  o.grad = [](const Vec& x) { return Vec(exp_dphi_1d(x[0]), exp_dphi_1d(x[1])); };
  o.det_hess = [](const Vec& x) { return exp_ddphi_1d(x[0]) * exp_ddphi_1d(x[1]); };
  o.conj = [](const Vec& y) { return exp_conj_1d(y[0]) + exp_conj_1d(y[1]); };
  o.hess = [](const Vec& x) {
    return std::array<double, 3>{exp_ddphi_1d(x[0]), exp_ddphi_1d(x[1]), 0};
  };
  o.note = "separable exponential solution on the square";
  return o;
}

// ------------------------------------------------------------------ radial

namespace {

/// Dense table of the radial profile: u = phi(r), v = phi'(r) on a uniform
/// r grid, integrated with fixed-step RK4 from a series start at r0.
struct RadialTable {
  double dr = 1e-3;
  double r0 = 1e-3;
  std::vector<double> r, u, v;
  std::vector<double> vd;  // five-point node derivatives of v

  double a = 0;  // phi(0)

  void integrate(const Profile& prof, double a0, double rmax) {
    a = a0;
    const double b = std::sqrt(prof.h(a0));
    const double hp = prof.kind == ProfileKind::Exponential
                          ? -prof.h(a0)
                          : -(prof.s + 1) * std::pow(a0, -(prof.s + 2));
    auto series_u = [&](double rr) {
      return a0 + 0.5 * b * rr * rr + hp / 32.0 * rr * rr * rr * rr;
    };
    auto series_v = [&](double rr) { return b * rr + hp / 8.0 * rr * rr * rr; };

    const int steps = static_cast<int>(std::ceil((rmax - r0) / dr));
    r.resize(steps + 1);
    u.resize(steps + 1);
    v.resize(steps + 1);
    r[0] = r0;
    u[0] = series_u(r0);
    v[0] = series_v(r0);
    auto f = [&](double rr, double uu, double vv, double& du, double& dv) {
      du = vv;
      dv = rr * prof.h(uu) / vv;
    };
    for (int i = 0; i < steps; ++i) {
      const double rr = r[i], uu = u[i], vv = v[i];
      double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
      f(rr, uu, vv, k1u, k1v);
      f(rr + 0.5 * dr, uu + 0.5 * dr * k1u, vv + 0.5 * dr * k1v, k2u, k2v);
      f(rr + 0.5 * dr, uu + 0.5 * dr * k2u, vv + 0.5 * dr * k2v, k3u, k3v);
      f(rr + dr, uu + dr * k3u, vv + dr * k3v, k4u, k4v);
      r[i + 1] = rr + dr;
      u[i + 1] = uu + dr / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
      v[i + 1] = vv + dr / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }

    // node slopes of v by five-point differencing of the integrated values,
    // kept independent of the equation for the residual diagnostics
    const size_t n = v.size();
    vd.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const size_t c = std::clamp<size_t>(i, 2, n - 3);
      vd[i] = (v[c - 2] - 8 * v[c - 1] + 8 * v[c + 1] - v[c + 2]) / (12 * dr);
    }
  }

  double u_at(double rr) const {
    if (rr <= r0) {
      const double t = rr / r0;
      // series region: quadratic through (0,a) matching u(r0), v(r0)
      return a + (u[0] - a) * t * t;
    }
    const double t = (rr - r0) / dr;
    size_t i = std::min(static_cast<size_t>(t), r.size() - 2);
    const double s = t - i;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * u[i] + h10 * dr * v[i] + h01 * u[i + 1] + h11 * dr * v[i + 1];
  }

  double v_at(double rr) const {
    if (rr <= r0) return v[0] * rr / r0;
    const double t = (rr - r0) / dr;
    size_t i = std::min(static_cast<size_t>(t), r.size() - 2);
    const double s = t - i;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * v[i] + h10 * dr * vd[i] + h01 * v[i + 1] + h11 * dr * vd[i + 1];
  }

  /// phi'' as the derivative of the Hermite interpolant whose slopes come
  /// from differencing the integrated table (independent of the equation).
  double vp_at(double rr) const {
    const size_t n = r.size();
    double t = (rr - r0) / dr;
    if (rr <= r0) return vd[0];
    size_t i = std::min(static_cast<size_t>(t), n - 2);
    const double s = t - i;
    const double d00 = 6 * s * (s - 1) / dr, d01 = -d00;
    const double d10 = (3 * s - 1) * (s - 1), d11 = s * (3 * s - 2);
    return d00 * v[i] + d10 * vd[i] + d01 * v[i + 1] + d11 * vd[i + 1];
  }
};

ConvexBody regular_ngon(double radius, int ngon) {
  std::vector<Vec> verts;
  for (int k = 0; k < ngon; ++k) {
    const double t = 2 * M_PI * k / ngon;
    verts.push_back(Vec(radius * std::cos(t), radius * std::sin(t)));
  }
  return build_body(verts);
}

}  // namespace

OracleSolution radial_shooting(const Profile& profile, double disc_radius, double tau,
                               int ngon) {
  if (profile.dim != 2) throw UnsupportedDimension("radial shooting is for n = 2");
  const double R = disc_radius;
  const double rmax = profile.kind == ProfileKind::Exponential ? 60.0 : 200.0;

  // remaining gradient growth past the table, along the linear asymptote
  auto slope_tail = [&](const RadialTable& t) {
    const double re = t.r.back(), ue = t.u.back(), ve = t.v.back();
    double s = 0, rr = re, hstep = re * 0.01;
    while (rr < 1e6) {
      const double rm = rr + 0.5 * hstep;
      s += rm * profile.h(ue + ve * (rm - re)) / ve * hstep;
      rr += hstep;
      hstep *= 1.01;
    }
    return s;
  };
  auto terminal_slope = [&](double a) {
    RadialTable t;
    t.integrate(profile, a, rmax);
    return t.v.back() + slope_tail(t);
  };

  // bracket phi(0); the terminal slope decreases in a
  double alo, ahi;
  if (profile.kind == ProfileKind::Exponential) {
    alo = 0;
    ahi = 0;
    double step = 1;
    int guard = 0;
    while (terminal_slope(alo) <= R) {
      alo -= step;
      step *= 2;
      if (++guard > 40) throw ShootingFailed("no lower bracket for phi(0)");
    }
    step = 1;
    guard = 0;
    while (terminal_slope(ahi) >= R) {
      ahi += step;
      step *= 2;
      if (++guard > 40) throw ShootingFailed("no upper bracket for phi(0)");
    }
  } else {
    if (tau <= 0) throw TauNotPositive("power profile needs tau > 0");
    alo = 1;
    ahi = 1;
    int guard = 0;
    while (terminal_slope(alo) <= R) {
      alo *= 0.5;
      if (++guard > 60) throw ShootingFailed("no lower bracket for phi(0)");
    }
    guard = 0;
    while (terminal_slope(ahi) >= R) {
      ahi *= 2;
      if (++guard > 60) throw ShootingFailed("no upper bracket for phi(0)");
    }
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (alo + ahi);
    (terminal_slope(mid) > R ? alo : ahi) = mid;
    if (std::abs(ahi - alo) <= 1e-10 * std::max(1.0, std::abs(mid))) break;
  }

  auto table = std::make_shared<RadialTable>();
  table->integrate(profile, 0.5 * (alo + ahi), rmax);

  // int_A phi* in the r coordinate: phi*(v(r)) = r v - u, image element
  // 2 pi r h(u) dr, plus the asymptotic tail beyond the table
  double I0 = 0;
  {
    const auto& T = *table;
    const size_t n = T.r.size();
    auto integrand = [&](size_t i) {
      return (T.r[i] * T.v[i] - T.u[i]) * 2 * M_PI * T.r[i] * profile.h(T.u[i]);
    };
    for (size_t i = 0; i + 1 < n; ++i)
      I0 += 0.5 * T.dr * (integrand(i) + integrand(i + 1));
    // tail beyond the table along the linear asymptote u ~ ue + ve (r - re)
    const double re = T.r.back(), ue = T.u.back(), ve = T.v.back();
    double rr = re;
    double hstep = re * 0.01;
    while (rr < 1e6) {
      const double rm = rr + 0.5 * hstep;
      const double um = ue + ve * (rm - re);
      I0 += (rm * ve - um) * 2 * M_PI * rm * profile.h(um) * hstep;
      rr += hstep;
      hstep *= 1.01;
    }
  }

  OracleSolution o;
  o.profile = profile;
  o.body = regular_ngon(R, ngon);
  o.lambda_A = M_PI * R * R;

  // the tail-corrected shooting drives v(inf) to R, so the total mass of
  // the Monge-Ampere density is exactly lambda_A and the closed-form
  // normalization applies
  double shift = 0, dil = 1;
  if (profile.kind == ProfileKind::Exponential) {
    shift = (I0 + tau) / o.lambda_A;  // phi += shift
    o.h_norm = std::exp(-shift) * o.lambda_A;
  } else {
    if (I0 >= 0) throw ShootingFailed("conjugate integral not negative");
    dil = tau / (-I0);
    o.h_norm = std::pow(dil, 1 - profile.s) * o.lambda_A;
  }
  o.tau = tau;

  const double t_dil = dil, c_shift = shift;
  auto tab = table;
  const Profile prof = profile;
  o.phi = [tab, t_dil, c_shift](const Vec& x) {
    return t_dil * tab->u_at(norm(x) / t_dil) + c_shift;
  };
  o.grad = [tab, t_dil](const Vec& x) {
    const double r = norm(x);
    if (r == 0) return Vec(0.0, 0.0);
    const double s = tab->v_at(r / t_dil) / r;
    return Vec(s * x[0], s * x[1]);
  };
  o.det_hess = [tab, t_dil](const Vec& x) {
    const double r = norm(x);
    const double rho = std::max(r / t_dil, 1e-12);
    return tab->v_at(rho) * tab->vp_at(rho) / (rho * t_dil * t_dil);
  };
  o.hess = [tab, t_dil](const Vec& x) {
    const double r = norm(x);
    const double rho = std::max(r / t_dil, 1e-9);
    const double fpp = tab->vp_at(rho) / t_dil;          // radial eigenvalue
    const double fT = tab->v_at(rho) / (rho * t_dil);    // tangential eigenvalue
    if (r < 1e-12) return std::array<double, 3>{fpp, fpp, 0};
    const double c = x[0] / r, s = x[1] / r;
    return std::array<double, 3>{fpp * c * c + fT * s * s, fpp * s * s + fT * c * c,
                                 (fpp - fT) * c * s};
  };
  o.conj = [tab, t_dil, c_shift, R](const Vec& y) {
    const double s = std::min(norm(y), R * (1 - 1e-12));
    // invert v(r) = s
    const auto& T = *tab;
    size_t lo = 0, hi = T.v.size() - 1;
    if (s <= T.v.front()) {
      const double r = T.r.front() * s / std::max(T.v.front(), 1e-300);
      return t_dil * (r * s - T.u_at(r)) - c_shift;
    }
    if (s >= T.v.back()) return t_dil * (T.r.back() * s - T.u.back()) - c_shift;
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      (T.v[mid] <= s ? lo : hi) = mid;
    }
    const double f = (s - T.v[lo]) / (T.v[hi] - T.v[lo]);
    const double r = T.r[lo] + f * T.dr;
    return t_dil * (r * s - T.u_at(r)) - c_shift;
  };
  std::ostringstream os;
  os << "radial " << prof.name() << " profile on the disc R = " << R
     << " (phi(0) raw = " << tab->a << ")";
  o.note = os.str();
  return o;
}

double oracle_max_residual(const OracleSolution& o, const std::vector<Vec>& samples) {
  double worst = 0;
  for (const Vec& x : samples) {
    const double lhs = o.det_hess(x) / o.lambda_A;
    const double rhs = o.profile.h(o.phi(x)) / o.h_norm;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

MaxAffinePotential sample_potential(const OracleSolution& o, const TargetSites& sites) {
  MaxAffinePotential phi;
  phi.dim = o.body.dim;
  phi.sites = sites.sites;
  phi.site_masses = sites.masses;
  phi.weights.reserve(sites.sites.size());
  for (const Vec& y : sites.sites) phi.weights.push_back(o.conj(y));
  return phi;
}

}  // namespace maiter
