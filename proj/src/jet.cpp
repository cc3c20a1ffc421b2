#include "roughflow/jet.hpp"

#include <cmath>

#include "roughflow/errors.hpp"

namespace roughflow {

Jet::Jet(int d, int ord) : value(Vec::Zero(d)), order(ord) {
  if (ord >= 1) jac = Mat::Zero(d, d);
  if (ord >= 2) hess.assign(d, Mat::Zero(d, d));
  if (ord >= 3) third.assign(d, std::vector<Mat>(d, Mat::Zero(d, d)));
}

bool Jet::finite() const {
  if (!value.allFinite()) return false;
  if (order >= 1 && !jac.allFinite()) return false;
  for (const auto& h : hess)
    if (!h.allFinite()) return false;
  for (const auto& row : third)
    for (const auto& m : row)
      if (!m.allFinite()) return false;
  return true;
}

void Jet::axpy(double a, const Jet& o) {
  value += a * o.value;
  if (order >= 1) jac += a * o.jac;
  if (order >= 2)
    for (size_t k = 0; k < hess.size(); ++k) hess[k] += a * o.hess[k];
  if (order >= 3)
    for (size_t k = 0; k < third.size(); ++k)
      for (size_t l = 0; l < third[k].size(); ++l) third[k][l] += a * o.third[k][l];
}

Jet Jet::truncated(int ord) const {
  if (ord > order) throw CapabilityError("jet truncation above available order");
  Jet r;
  r.order = ord;
  r.value = value;
  if (ord >= 1) r.jac = jac;
  if (ord >= 2) r.hess = hess;
  if (ord >= 3) r.third = third;
  return r;
}

Jet Jet::scaled(double a) const {
  Jet r(dim(), order);
  r.axpy(a, *this);
  return r;
}

Jet operator+(const Jet& a, const Jet& b) {
  Jet r = a.truncated(std::min(a.order, b.order));
  r.axpy(1.0, b);
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet r = a.truncated(std::min(a.order, b.order));
  r.axpy(-1.0, b);
  return r;
}

Jet directional(const Jet& a, const Jet& b, int order) {
  if (a.order < order + 1 || b.order < order)
    throw CapabilityError("directional derivative needs one more derivative of the first field");
  const int d = a.dim();
  Jet r(d, order);
  r.value = a.jac * b.value;
  if (order >= 1) {
    r.jac = a.jac * b.jac;
    for (int k = 0; k < d; ++k) r.jac += a.hess[k] * b.value(k);
  }
  return r;
}

Jet lie_bracket(const Jet& a, const Jet& b, int order) {
  if (order > 1) throw CapabilityError("lie bracket jets are provided up to order 1");
  Jet r = directional(b, a, order);
  r.axpy(-1.0, directional(a, b, order));
  return r;
}

double derivative_norm(const Jet& j, int k) {
  if (k > j.order) throw CapabilityError("derivative order not available");
  double s = 0.0;
  switch (k) {
    case 0: return j.value.norm();
    case 1: return j.jac.norm();
    case 2:
      for (const auto& h : j.hess) s += h.squaredNorm();
      return std::sqrt(s);
    default:
      for (const auto& row : j.third)
        for (const auto& m : row) s += m.squaredNorm();
      return std::sqrt(s);
  }
}

}  // namespace roughflow
