#include "maiter/profile.hpp"

#include <cmath>
#include <sstream>

#include "maiter/errors.hpp"

namespace maiter {

Profile Profile::exponential(int n) {
  Profile p;
  p.kind = ProfileKind::Exponential;
  p.dim = n;
  p.tail_exponent = 1;  // e^-t <= C t^-(n+2) for t >= 10
  return p;
}

Profile Profile::power(int n, double pexp) {
  Profile p;
  p.kind = ProfileKind::Power;
  p.dim = n;
  p.s = n + pexp;
  p.tail_exponent = pexp;
  return p;
}

double Profile::h(double t) const {
  if (kind == ProfileKind::Exponential) return std::exp(-t);
  if (t <= 0) throw DomainError("power profile needs t > 0");
  return std::pow(t, -(s + 1));
}

double Profile::H(double t) const {
  if (kind == ProfileKind::Exponential) return std::exp(-t);
  if (t <= 0) throw DomainError("power profile needs t > 0");
  return std::pow(t, -s) / s;
}

double Profile::H_inv(double u) const {
  if (u <= 0) throw DomainError("H_inv needs u > 0");
  if (kind == ProfileKind::Exponential) return -std::log(u);
  return std::pow(s * u, -1.0 / s);
}

double Profile::H2(double t) const {
  if (kind == ProfileKind::Exponential) return std::exp(-t);
  if (t <= 0) throw DomainError("power profile needs t > 0");
  return std::pow(t, 1 - s) / (s * (s - 1));
}

double Profile::J(double t) const {
  if (kind == ProfileKind::Exponential) return (t + 1) * std::exp(-t);
  if (t <= 0) throw DomainError("power profile needs t > 0");
  return std::pow(t, 1 - s) / (s - 1);
}

std::string Profile::name() const {
  if (kind == ProfileKind::Exponential) return "exp";
  std::ostringstream os;
  os << "power(p=" << tail_exponent << ")";
  return os.str();
}

Coupling coupling_for(const Profile& profile) {
  return {profile.kind == ProfileKind::Exponential ? CouplingKind::Difference
                                                   : CouplingKind::Ratio};
}

double couple(const Coupling& g, double s, double t) {
  if (g.kind == CouplingKind::Difference) return s - t;
  if (t == 0) throw DivisionByZero("ratio coupling with t = 0");
  return s / t;
}

HypothesisReport check_hypothesis_b1(const Profile& profile) {
  HypothesisReport rep;
  rep.p = profile.tail_exponent;
  if (rep.p <= 0) {
    std::ostringstream os;
    os << "tail exponent p = " << rep.p << " must be positive";
    throw HypothesisViolated(os.str());
  }
  const double expo = profile.dim + rep.p + 1;
  if (profile.kind == ProfileKind::Power) {
    rep.C = 1.0;  // h is exactly the bound
  } else {
    // sup_{t>=10} t^(n+2) e^-t, attained at t = 10 past the maximizer n+2
    rep.C = std::pow(10.0, expo) * std::exp(-10.0);
  }
  for (double t : {10.0, 1e2, 1e3, 1e4}) {
    const double bound = rep.C * std::pow(t, -expo);
    if (profile.h(t) > bound * (1 + 1e-12)) {
      std::ostringstream os;
      os << "h(" << t << ") = " << profile.h(t) << " exceeds C t^-(n+p+1) = " << bound;
      throw HypothesisViolated(os.str());
    }
  }
  rep.pass = true;
  return rep;
}

}  // namespace maiter
