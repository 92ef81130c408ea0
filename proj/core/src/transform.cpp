#include "arnold/transform.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "arnold/error.hpp"

namespace arnold {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// exp(-i k pi/2) without trigonometric round-off.
cplx quarter_turns(int k) {
  switch (((-k % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

void require_quantum(const CanonicalBasis& basis, const char* what) {
  if (!basis.system().lambda.is_zero()) {
    throw InvalidArgument(std::string(what) + ": the quantum map is only defined for Lambda = 0");
  }
}

void require_picture(const WaveFrame& frame, Picture p, const char* what) {
  frame.validate();
  if (frame.picture != p) {
    throw InvalidArgument(std::string(what) + ": expected a frame in the " + std::string(to_string(p)) + " picture");
  }
  check_boundary_decay(frame);
}

// Scale, quadratic phase and relabelling shared by every forward map:
//   out(kappa) = s * exp(-(i/2)(m/hbar) rate x^2) * in(x),   x = u2 kappa.
WaveFrame forward_core(const WaveFrame& frame, const Grid& target, double u2, cplx s, double rate, double tau,
                       double m, double hbar) {
  const ComplexSpline in(frame);
  WaveFrame out{target, std::vector<cplx>(target.size()), tau, Picture::kappa};
  const double c = -0.5 * (m / hbar) * rate;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double x = u2 * target.x(i);
    out.values[i] = s * std::exp(cplx(0.0, c * x * x)) * in(x);
  }
  return out;
}

// Inverse of forward_core: out(x) = exp(+(i/2)(m/hbar) rate x^2) in(x/u2) / s.
WaveFrame inverse_core(const WaveFrame& frame, const Grid& target, double u2, cplx s, double rate, double t, double m,
                       double hbar) {
  const ComplexSpline in(frame);
  WaveFrame out{target, std::vector<cplx>(target.size()), t, Picture::position};
  const double c = 0.5 * (m / hbar) * rate;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double x = target.x(i);
    out.values[i] = std::exp(cplx(0.0, c * x * x)) * in(x / u2) / s;
  }
  return out;
}

Grid scaled_grid(const Grid& g, double scale, double shift) {
  double a = g.x_min() * scale + shift;
  double b = g.x_max() * scale + shift;
  if (a > b) std::swap(a, b);
  return Grid(a, b, g.size());
}

}  // namespace

CatPoint cat_forward(const CanonicalBasis& basis, double x, double t) {
  if (!basis.in_validity(t)) {
    throw RangeError("cat_forward: t=" + num(t) + " outside the validity interval (" + num(basis.validity().lo) + ", " +
                     num(basis.validity().hi) + ")");
  }
  const auto s = basis.at(t);
  return {(x - s.up) / s.u2, s.u1 / s.u2};
}

SpaceTimePoint cat_inverse(const CanonicalBasis& basis, CatPoint p) {
  const double t = t_of_tau(basis, p.tau);
  const auto s = basis.at(t);
  return {s.u2 * p.kappa + s.up, t};
}

Grid suggest_kappa_grid(const CanonicalBasis& basis, const Grid& x_grid, double t) {
  const auto s = basis.at(t);
  return scaled_grid(x_grid, 1.0 / s.u2, -s.up / s.u2);
}

Grid suggest_x_grid(const CanonicalBasis& basis, const Grid& kappa_grid, double tau) {
  const auto s = basis.at(t_of_tau(basis, tau));
  return scaled_grid(kappa_grid, s.u2, s.up);
}

WaveFrame qat_apply(const CanonicalBasis& basis, const WaveFrame& frame, const Grid& target) {
  require_quantum(basis, "qat_apply");
  require_picture(frame, Picture::position, "qat_apply");
  const double t = frame.time;
  if (!basis.in_validity(t)) throw RangeError("qat_apply: t=" + num(t) + " outside the validity interval");
  const auto s = basis.at(t);
  const double w = basis.wronskian_exact(t);
  const double rate = (s.du2 / s.u2 - 0.0) / w;
  const auto& sys = basis.system();
  return forward_core(frame, target, s.u2, std::sqrt(s.u2), rate, s.u1 / s.u2, sys.m, sys.hbar);
}

WaveFrame qat_inverse(const CanonicalBasis& basis, const WaveFrame& frame, const Grid& target) {
  require_quantum(basis, "qat_inverse");
  require_picture(frame, Picture::kappa, "qat_inverse");
  const double t = t_of_tau(basis, frame.time);
  const auto s = basis.at(t);
  const double w = basis.wronskian_exact(t);
  const double rate = (s.du2 / s.u2 - 0.0) / w;
  const auto& sys = basis.system();
  return inverse_core(frame, target, s.u2, std::sqrt(s.u2), rate, t, sys.m, sys.hbar);
}

WaveFrame qat_apply_continued(const CanonicalBasis& basis, const WaveFrame& frame, const Grid& target) {
  require_quantum(basis, "qat_apply_continued");
  require_picture(frame, Picture::position, "qat_apply_continued");
  const double t = frame.time;
  const int k = basis.branch_index(t);
  const auto s = basis.at(t);
  if (s.u2 == 0.0) throw RangeError("qat_apply_continued: t=" + num(t) + " is a zero of u2");
  const double w = basis.wronskian_exact(t);
  const double rate = (s.du2 / s.u2 - 0.0) / w;
  const auto& sys = basis.system();
  return forward_core(frame, target, s.u2, quarter_turns(k) * std::sqrt(std::abs(s.u2)), rate, s.u1 / s.u2, sys.m,
                      sys.hbar);
}

WaveFrame unfolded_qat(const CanonicalBasis& basis, int k, const WaveFrame& frame, const Grid& target) {
  const CanonicalBasis bk = branch_basis(basis, k);
  if (!bk.in_validity(frame.time)) {
    throw RangeError("unfolded_qat: t=" + num(frame.time) + " is not inside branch " + std::to_string(k));
  }
  return qat_apply(bk, frame, target);
}

void TdqhSystem::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("TdqhSystem: mass must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("TdqhSystem: hbar must be positive");
}

void TdqhSystem::require_positive_mu(Interval span) const {
  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = span.lo + (span.hi - span.lo) * i / kSamples;
    if (!(mu(t) > 0.0)) throw DomainError("TdqhSystem: mu(t) <= 0 at t=" + num(t));
  }
}

LsodeSystem tdqh_to_lsode(const TdqhSystem& sys) {
  sys.validate();
  const std::string mu = "(" + sys.mu.to_string() + ")";
  const std::string mu_dot = "(" + sys.mu.derivative().to_string() + ")";
  const std::string g = "(" + sys.gamma.to_string() + ")";
  const std::string g_dot = "(" + sys.gamma.derivative().to_string() + ")";
  const std::string nu = "(" + sys.nu.to_string() + ")";
  LsodeSystem out;
  out.f_dot = parse_expr("-" + mu_dot + "/" + mu);
  out.omega2 = parse_expr(mu + "*" + nu + "+" + g + "*(" + mu_dot + "/" + mu + "-" + g + ")-" + g_dot);
  out.lambda = TimeFn::constant(0);
  out.m = sys.m;
  out.hbar = sys.hbar;
  return out;
}

namespace {

CanonicalBasis gauged_basis(const TdqhSystem& sys, double t0, Interval span, const ode::Tolerances& tol) {
  sys.validate();
  sys.require_positive_mu(span);
  return canonical_basis(tdqh_to_lsode(sys), t0, span, tol);
}

}  // namespace

GaugedQat::GaugedQat(const TdqhSystem& sys, double t0, Interval span, const ode::Tolerances& tol)
    : sys_(sys), basis_(gauged_basis(sys, t0, span, tol)), scale_(sys.mu(t0)) {}

double GaugedQat::tau_of_t(double t) const { return scale_ * arnold::tau_of_t(basis_, t); }

double GaugedQat::t_of_tau(double tau) const { return arnold::t_of_tau(basis_, tau / scale_); }

WaveFrame GaugedQat::apply(const WaveFrame& frame, const Grid& target) const {
  require_picture(frame, Picture::position, "gqat_apply");
  const double t = frame.time;
  if (!basis_.in_validity(t)) throw RangeError("gqat_apply: t=" + num(t) + " outside the validity interval");
  const auto s = basis_.at(t);
  const double w = wronskian(t);
  const double rate = (s.du2 / s.u2 - sys_.gamma(t)) / w;
  return forward_core(frame, target, s.u2, std::sqrt(s.u2), rate, scale_ * s.u1 / s.u2, sys_.m, sys_.hbar);
}

WaveFrame GaugedQat::inverse(const WaveFrame& frame, const Grid& target) const {
  require_picture(frame, Picture::kappa, "gqat_inverse");
  const double t = t_of_tau(frame.time);
  const auto s = basis_.at(t);
  const double w = wronskian(t);
  const double rate = (s.du2 / s.u2 - sys_.gamma(t)) / w;
  return inverse_core(frame, target, s.u2, std::sqrt(s.u2), rate, t, sys_.m, sys_.hbar);
}

WaveFrame gqat_apply(const GaugedQat& g, const WaveFrame& frame, const Grid& target) { return g.apply(frame, target); }

WaveFrame gqat_inverse(const GaugedQat& g, const WaveFrame& frame, const Grid& target) {
  return g.inverse(frame, target);
}

}  // namespace arnold
