#pragma once

#include <string>

namespace maiter {

enum class ProfileKind { Exponential, Power };
enum class CouplingKind { Difference, Ratio };

/// The nonlinearity h of the right-hand side together with its tail
/// primitive H(t) = int_t^inf h and the inverse of H.  Only the two closed
/// profiles are provided; the type is deliberately not user-extensible.
///
///   Exponential: h(t) = e^-t          H(t) = e^-t        H^-1(u) = -log u
///   Power:       h(t) = t^-(s+1)      H(t) = t^-s / s    H^-1(u) = (s u)^-1/s
///
/// Power is parameterized by s = n + p with tail exponent p.
struct Profile {
  ProfileKind kind = ProfileKind::Exponential;
  int dim = 1;
  double s = 0;              // Power only
  double tail_exponent = 1;  // the p of the decay hypothesis

  static Profile exponential(int n);
  static Profile power(int n, double p);

  double h(double t) const;
  double H(double t) const;
  double H_inv(double u) const;
  double H2(double t) const;  // int_t^inf H, for linear-tail closed forms
  double J(double t) const;   // int_t^inf u h(u) du

  bool positive_domain() const { return kind == ProfileKind::Power; }
  std::string name() const;
};

struct Coupling {
  CouplingKind kind = CouplingKind::Difference;
};

/// The coupling paired with each profile: difference for the exponential
/// right-hand side, ratio for the power one.
Coupling coupling_for(const Profile& profile);

double couple(const Coupling& g, double s, double t);

struct HypothesisReport {
  double p = 0;
  double C = 0;
  bool pass = false;
};

/// Decay check h(t) <= C t^-(n+p+1) at t in {10, 1e2, 1e3, 1e4} with the
/// profile's stated constant; throws HypothesisViolated when p <= 0 or a
/// sample fails.
HypothesisReport check_hypothesis_b1(const Profile& profile);

}  // namespace maiter
