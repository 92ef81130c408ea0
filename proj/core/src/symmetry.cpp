#include "arnold/symmetry.hpp"

#include <cmath>

#include "arnold/error.hpp"

namespace arnold {

namespace {

using Values = std::vector<cplx>;

void require_quantum(const CanonicalBasis& basis, const char* what) {
  if (!basis.system().lambda.is_zero()) {
    throw InvalidArgument(std::string(what) + ": symmetry generators need Lambda = 0");
  }
}

// X = a x + b d and P = c x + d d at time t.
struct Linear {
  cplx a, b;
};

Linear x_coeffs(const CanonicalBasis& basis, double t) {
  const auto s = basis.at(t);
  const auto& sys = basis.system();
  return {s.du1 / basis.wronskian_exact(t), cplx(0.0, sys.hbar / sys.m * s.u1)};
}

Linear p_coeffs(const CanonicalBasis& basis, double t) {
  const auto s = basis.at(t);
  const auto& sys = basis.system();
  return {-sys.m * s.du2 / basis.wronskian_exact(t), cplx(0.0, -sys.hbar * s.u2)};
}

Values linear(const WaveFrame& f, Linear l) {
  const auto d = first_derivative(f.values, f.grid.spacing());
  Values out(f.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = l.a * f.grid.x(i) * f.values[i] + l.b * d[i];
  return out;
}

// A x^2 + B (x d + d x) + C d^2 with d x = x d + 1; d^2 uses the direct
// second-derivative stencil.
struct Quadratic {
  cplx A, B, C;
};

Quadratic product_sym(Linear u, Linear v) {
  // (uv + vu)/2
  return {u.a * v.a, 0.5 * (u.a * v.b + u.b * v.a), u.b * v.b};
}

Values quadratic(const WaveFrame& f, Quadratic q) {
  const double h = f.grid.spacing();
  const auto d1 = first_derivative(f.values, h);
  const auto d2 = second_derivative(f.values, h);
  Values out(f.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = f.grid.x(i);
    out[i] = q.A * x * x * f.values[i] + q.B * (2.0 * x * d1[i] + f.values[i]) + q.C * d2[i];
  }
  return out;
}

WaveFrame with_values(const WaveFrame& f, Values v) { return WaveFrame{f.grid, std::move(v), f.time, f.picture}; }

using Fn = GridOperator::ApplyFn;

template <class Coeffs>
Fn linear_op(std::shared_ptr<const CanonicalBasis> b, Coeffs coeffs) {
  return [b = std::move(b), coeffs](double t, const WaveFrame& f) { return linear(f, coeffs(*b, t)); };
}

template <class Coeffs>
Fn quadratic_op(std::shared_ptr<const CanonicalBasis> b, Coeffs coeffs) {
  return [b = std::move(b), coeffs](double t, const WaveFrame& f) { return quadratic(f, coeffs(*b, t)); };
}

std::pair<std::size_t, std::size_t> inner_range(std::size_t n) {
  const std::size_t skip = n / 20;
  return {skip, n - skip};
}

}  // namespace

WaveFrame apply_X(const CanonicalBasis& basis, double t, const WaveFrame& frame) {
  require_quantum(basis, "apply_X");
  frame.validate();
  return with_values(frame, linear(frame, x_coeffs(basis, t)));
}

WaveFrame apply_P(const CanonicalBasis& basis, double t, const WaveFrame& frame) {
  require_quantum(basis, "apply_P");
  frame.validate();
  return with_values(frame, linear(frame, p_coeffs(basis, t)));
}

HamiltonianCoeffs hamiltonian_coeffs(const CanonicalBasis& basis, double t) {
  const auto s = basis.at(t);
  const double w2 = basis.system().omega2(t);
  const double W = basis.wronskian_exact(t);
  return {(s.u1 * s.u1 * w2 + s.du1 * s.du1) / W, (s.u2 * s.u2 * w2 + s.du2 * s.du2) / W,
          (s.u1 * s.u2 * w2 + s.du1 * s.du2) / W};
}

GridOperator::GridOperator(Kind kind, std::string description, std::shared_ptr<const CanonicalBasis> basis, ApplyFn fn)
    : kind_(kind), description_(std::move(description)), basis_(std::move(basis)), fn_(std::move(fn)) {}

GridOperator GridOperator::X(const CanonicalBasis& basis) {
  require_quantum(basis, "GridOperator::X");
  auto b = std::make_shared<const CanonicalBasis>(basis);
  return {Kind::X, "X", b, linear_op(b, x_coeffs)};
}

GridOperator GridOperator::P(const CanonicalBasis& basis) {
  require_quantum(basis, "GridOperator::P");
  auto b = std::make_shared<const CanonicalBasis>(basis);
  return {Kind::P, "P", b, linear_op(b, p_coeffs)};
}

GridOperator GridOperator::X2(const CanonicalBasis& basis) {
  require_quantum(basis, "GridOperator::X2");
  auto b = std::make_shared<const CanonicalBasis>(basis);
  return {Kind::X2, "X^2", b, quadratic_op(b, [](const CanonicalBasis& c, double t) {
            const auto x = x_coeffs(c, t);
            return product_sym(x, x);
          })};
}

GridOperator GridOperator::P2(const CanonicalBasis& basis) {
  require_quantum(basis, "GridOperator::P2");
  auto b = std::make_shared<const CanonicalBasis>(basis);
  return {Kind::P2, "P^2", b, quadratic_op(b, [](const CanonicalBasis& c, double t) {
            const auto p = p_coeffs(c, t);
            return product_sym(p, p);
          })};
}

GridOperator GridOperator::XP_PX(const CanonicalBasis& basis) {
  require_quantum(basis, "GridOperator::XP_PX");
  auto b = std::make_shared<const CanonicalBasis>(basis);
  return {Kind::XP_PX, "XP+PX", b, quadratic_op(b, [](const CanonicalBasis& c, double t) {
            const auto q = product_sym(x_coeffs(c, t), p_coeffs(c, t));
            return Quadratic{2.0 * q.A, 2.0 * q.B, 2.0 * q.C};
          })};
}

GridOperator GridOperator::free_kappa(const CanonicalBasis& basis) {
  const double r = basis.system().hbar / basis.system().m;
  return {Kind::free_kappa, "kappa", std::make_shared<const CanonicalBasis>(basis),
          [r](double tau, const WaveFrame& f) { return linear(f, {1.0, cplx(0.0, r * tau)}); }};
}

GridOperator GridOperator::free_pi(const CanonicalBasis& basis) {
  const double hbar = basis.system().hbar;
  return {Kind::free_pi, "pi", std::make_shared<const CanonicalBasis>(basis),
          [hbar](double, const WaveFrame& f) { return linear(f, {0.0, cplx(0.0, -hbar)}); }};
}

GridOperator GridOperator::hamiltonian(const CanonicalBasis& basis) {
  auto b = std::make_shared<const CanonicalBasis>(basis);
  const CoeffFn coeffs = gck_coeffs(basis.system(), basis.t0());
  const double hbar = basis.system().hbar;
  return {Kind::hamiltonian, "H", b,
          [coeffs, hbar](double t, const WaveFrame& f) { return apply_quadratic(coeffs(t), f, hbar); }};
}

GridOperator GridOperator::decomposed_hamiltonian(const CanonicalBasis& basis) {
  require_quantum(basis, "GridOperator::decomposed_hamiltonian");
  auto b = std::make_shared<const CanonicalBasis>(basis);
  return {Kind::combination, "alpha P^2/2m + (m/2) beta X^2 + (delta/2)(XP+PX)", b,
          quadratic_op(b, [](const CanonicalBasis& c, double t) {
            const double m = c.system().m;
            const auto h = hamiltonian_coeffs(c, t);
            const auto x = x_coeffs(c, t), p = p_coeffs(c, t);
            const auto xx = product_sym(x, x), pp = product_sym(p, p), xp = product_sym(x, p);
            const double ka = h.alpha / (2.0 * m), kb = 0.5 * m * h.beta;
            return Quadratic{ka * pp.A + kb * xx.A + h.delta * xp.A, ka * pp.B + kb * xx.B + h.delta * xp.B,
                             ka * pp.C + kb * xx.C + h.delta * xp.C};
          })};
}

GridOperator GridOperator::custom(const CanonicalBasis& basis, std::string description, ApplyFn fn) {
  return {Kind::combination, std::move(description), std::make_shared<const CanonicalBasis>(basis), std::move(fn)};
}

WaveFrame GridOperator::apply(double t, const WaveFrame& frame) const {
  frame.validate();
  return with_values(frame, fn_(t, frame));
}

std::vector<cplx> GridOperator::apply_values(double t, const WaveFrame& frame) const {
  frame.validate();
  return fn_(t, frame);
}

GridOperator operator+(const GridOperator& a, const GridOperator& b) {
  return {GridOperator::Kind::combination, "(" + a.description_ + ")+(" + b.description_ + ")", a.basis_,
          [fa = a.fn_, fb = b.fn_](double t, const WaveFrame& f) {
            auto u = fa(t, f);
            const auto v = fb(t, f);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] += v[i];
            return u;
          }};
}

GridOperator operator-(const GridOperator& a, const GridOperator& b) { return a + cplx(-1.0, 0.0) * b; }

GridOperator operator*(cplx c, const GridOperator& a) {
  return {GridOperator::Kind::combination, "c*(" + a.description_ + ")", a.basis_,
          [c, fa = a.fn_](double t, const WaveFrame& f) {
            auto u = fa(t, f);
            for (auto& v : u) v *= c;
            return u;
          }};
}

GridOperator commutator(const GridOperator& a, const GridOperator& b) {
  return GridOperator::custom(a.basis(), "[" + a.description() + "," + b.description() + "]",
                              [a, b](double t, const WaveFrame& f) {
                                auto ab = a.apply_values(t, b.apply(t, f));
                                const auto ba = b.apply_values(t, a.apply(t, f));
                                for (std::size_t i = 0; i < ab.size(); ++i) ab[i] -= ba[i];
                                return ab;
                              });
}

cplx expectation(const GridOperator& op, const WaveFrame& frame) {
  const auto v = op.apply_values(frame.time, frame);
  return inner_product(frame.grid, frame.values, v);
}

double decomposition_check(const CanonicalBasis& basis, double t, const WaveFrame& frame) {
  const auto h = GridOperator::hamiltonian(basis).apply_values(t, frame);
  const auto d = GridOperator::decomposed_hamiltonian(basis).apply_values(t, frame);
  const auto [lo, hi] = inner_range(h.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    num += std::norm(h[i] - d[i]);
    den += std::norm(h[i]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

double conserved_drift(const GridOperator& op, const Propagation& run) {
  const auto* sys = std::get_if<LsodeSystem>(&run.system);
  const auto& own = op.basis().system();
  if (sys == nullptr || !(sys->f_dot == own.f_dot) || !(sys->omega2 == own.omega2) || !(sys->lambda == own.lambda) ||
      sys->m != own.m || sys->hbar != own.hbar) {
    throw InvalidArgument("conserved_drift: the propagated system does not match the operator's basis");
  }
  if (run.t_anchor != op.basis().t0()) {
    throw InvalidArgument("conserved_drift: propagation anchor differs from the basis anchor");
  }
  if (run.frames.empty()) throw InvalidArgument("conserved_drift: no frames");
  const cplx e0 = expectation(op, run.frames.front());
  double drift = 0.0;
  for (const auto& f : run.frames) drift = std::max(drift, std::abs(expectation(op, f) - e0));
  return drift;
}

}  // namespace arnold
