// Copyright 2026 The dynfab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DYNFAB_ENERGY_HPP_
#define DYNFAB_ENERGY_HPP_

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "dynfab/core.hpp"
#include "dynfab/spec.hpp"

namespace dynfab {

// Quantities induced by a Lagrangian through the Euler-Lagrange equation:
// M = d2L/dxdot2, f = d2L/dxdot dx * xdot - dL/dx, H = dL/dxdot . xdot - L.
struct LagrangianTerms {
  double L = 0.0;
  Matrix M;
  Vector f;
  double H = 0.0;
};

// A closed-form energy. Each shipped family supplies its own hand-derived
// metric, force and Hamiltonian.
class Lagrangian {
 public:
  using EvalFn = std::function<LagrangianTerms(const Vector&, const Vector&)>;

  Lagrangian(int dim, bool finsler, EvalFn fn, std::string name)
      : dim_(dim),
        finsler_(finsler),
        fn_(std::make_shared<const EvalFn>(std::move(fn))),
        name_(std::move(name)) {}

  int dim() const { return dim_; }
  bool finsler() const { return finsler_; }
  const std::string& name() const { return name_; }

  LagrangianTerms eval(const Vector& x, const Vector& xdot) const {
    detail::RequireDim(x.size(), dim_, name_.c_str());
    detail::RequireDim(xdot.size(), dim_, name_.c_str());
    detail::RequireFinite(x, name_.c_str());
    detail::RequireFinite(xdot, name_.c_str());
    return (*fn_)(x, xdot);
  }

 private:
  int dim_;
  bool finsler_;
  std::shared_ptr<const EvalFn> fn_;
  std::string name_;
};

// A geometry xddot + h(x, xdot) = 0. Shipped geometries are homogeneous of
// degree two in xdot.
class Geometry {
 public:
  using EvalFn = std::function<Vector(const Vector&, const Vector&)>;

  Geometry(int dim, EvalFn fn, std::string name)
      : dim_(dim),
        fn_(std::make_shared<const EvalFn>(std::move(fn))),
        name_(std::move(name)) {}

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }

  Vector operator()(const Vector& x, const Vector& xdot) const {
    detail::RequireDim(x.size(), dim_, name_.c_str());
    detail::RequireDim(xdot.size(), dim_, name_.c_str());
    return (*fn_)(x, xdot);
  }

 private:
  int dim_;
  std::shared_ptr<const EvalFn> fn_;
  std::string name_;
};

inline LagrangianTerms euler_lagrange(const Lagrangian& lag, const Vector& x,
                                      const Vector& xdot) {
  return lag.eval(x, xdot);
}

// ---------------------------------------------------------------------------
// Shipped energies.

// L = 1/2 m |xdot|^2.
inline Lagrangian EuclideanEnergy(int dim, double mass = 1.0) {
  if (!(mass > 0.0)) throw ContractError("euclidean energy: mass must be > 0");
  return Lagrangian(
      dim, true,
      [dim, mass](const Vector&, const Vector& xdot) {
        const double L = 0.5 * mass * xdot.squaredNorm();
        return LagrangianTerms{L, mass * Matrix::Identity(dim, dim),
                               Vector::Zero(dim), L};
      },
      "euclidean");
}

// One-dimensional barrier L = lambda s(xdot) xdot^2 / x^p on x > 0. The
// metric 2 lambda s / x^p grows without bound at contact. With `directional`
// set, s(xdot) = 1 while approaching (xdot < 0) and 0 otherwise, so the
// barrier never holds back a receding motion; otherwise s = 1.
inline Lagrangian BarrierEnergy(double lambda, double exponent,
                                bool directional = false) {
  if (!(lambda > 0.0)) throw ContractError("barrier energy: lambda must be > 0");
  if (!(exponent > 0.0)) {
    throw ContractError("barrier energy: exponent must be > 0");
  }
  return Lagrangian(
      1, !directional,
      [lambda, exponent, directional](const Vector& x, const Vector& xdot) {
        const double s = x[0];
        if (!(s > 0.0)) {
          throw NumericDomainError("barrier energy: x must be > 0");
        }
        const double gain = (directional && xdot[0] >= 0.0) ? 0.0 : lambda;
        const double v2 = xdot[0] * xdot[0];
        const double inv_sp = std::pow(s, -exponent);
        LagrangianTerms t;
        t.L = gain * v2 * inv_sp;
        t.M = Matrix::Constant(1, 1, 2.0 * gain * inv_sp);
        t.f = Vector::Constant(1, -exponent * gain * v2 * inv_sp / s);
        t.H = t.L;
        return t;
      },
      directional ? "directional-barrier" : "barrier");
}

// L = 1/2 g(|x|) |xdot|^2 with g(r) = (m_u - m_l) exp(-(alpha r)^2) + m_l:
// heavy near the origin, light far away.
inline Lagrangian AttractorMetricEnergy(int dim, double m_upper,
                                        double m_lower, double alpha) {
  if (!(m_lower > 0.0) || !(m_upper > 0.0)) {
    throw ContractError("attractor metric: masses must be > 0");
  }
  return Lagrangian(
      dim, true,
      [=](const Vector& x, const Vector& xdot) {
        const double bump = std::exp(-alpha * alpha * x.squaredNorm());
        const double g = (m_upper - m_lower) * bump + m_lower;
        const Vector grad_g = -2.0 * alpha * alpha * (m_upper - m_lower) *
                              bump * x;
        const double v2 = xdot.squaredNorm();
        LagrangianTerms t;
        t.L = 0.5 * g * v2;
        t.M = g * Matrix::Identity(dim, dim);
        t.f = grad_g.dot(xdot) * xdot - 0.5 * v2 * grad_g;
        t.H = t.L;
        return t;
      },
      "attractor-metric");
}

// L = 1/2 thetadot^2 + (g/l)(cos theta - 1); its motion is
// thetaddot + (g/l) sin theta = 0 and H = 1/2 thetadot^2 + (g/l)(1 - cos).
inline Lagrangian PendulumLagrangian(double gravity, double length) {
  const double w2 = gravity / length;
  return Lagrangian(
      1, false,
      [w2](const Vector& x, const Vector& xdot) {
        const double kinetic = 0.5 * xdot[0] * xdot[0];
        const double potential = w2 * (1.0 - std::cos(x[0]));
        return LagrangianTerms{kinetic - potential, Matrix::Identity(1, 1),
                               Vector::Constant(1, w2 * std::sin(x[0])),
                               kinetic + potential};
      },
      "pendulum");
}

// ---------------------------------------------------------------------------
// Shipped geometries.

inline Geometry ZeroGeometry(int dim) {
  return Geometry(
      dim, [dim](const Vector&, const Vector&) { return Vector::Zero(dim); },
      "zero");
}

// h = |xdot|^2 grad psi(x): follows the negative gradient of psi at a rate
// proportional to the squared speed.
inline Geometry GradientGeometry(int dim,
                                 std::function<Vector(const Vector&)> grad_psi,
                                 std::string name) {
  return Geometry(
      dim,
      [grad_psi = std::move(grad_psi)](const Vector& x, const Vector& xdot) {
        return Vector(xdot.squaredNorm() * grad_psi(x));
      },
      std::move(name));
}

// One-dimensional barrier geometry with psi(x) = k / x, i.e.
// h = -k xdot^2 / x^2; the resulting acceleration -h pushes away from x = 0.
inline Geometry BarrierGeometry(double k) {
  return GradientGeometry(
      1,
      [k](const Vector& x) {
        if (!(x[0] > 0.0)) {
          throw NumericDomainError("barrier geometry: x must be > 0");
        }
        return Vector::Constant(1, -k / (x[0] * x[0]));
      },
      "barrier");
}

// ---------------------------------------------------------------------------
// Energization.

inline constexpr double kDegenerateEnergy = 1e-12;

struct EnergizedSpec {
  Spec spec;
  double alpha = 0.0;
  // Set when xdot^T M xdot is too small for the projection; the spec is then
  // the metric-weighted geometry (M, M h).
  bool degenerate = false;
};

// Energized spec (M, f + P[M h - f]) written as (M, M (h + alpha xdot)) with
// alpha = -(xdot^T M xdot)^{-1} xdot^T (M h - f).
inline EnergizedSpec energize(const Lagrangian& lag, const Geometry& geom,
                              const Vector& x, const Vector& xdot) {
  detail::RequireDim(geom.dim(), lag.dim(), "energize");
  const LagrangianTerms terms = lag.eval(x, xdot);
  const Vector h = geom(x, xdot);
  const Vector Mh = terms.M * h;
  const double denom = xdot.dot(terms.M * xdot);
  if (!(denom > kDegenerateEnergy)) {
    return {Spec(terms.M, Mh), 0.0, true};
  }
  const double alpha = -xdot.dot(Mh - terms.f) / denom;
  return {Spec(terms.M, Mh + alpha * (terms.M * xdot)), alpha, false};
}

}  // namespace dynfab

#endif  // DYNFAB_ENERGY_HPP_
