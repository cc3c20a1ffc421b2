#pragma once

#include <Eigen/Dense>
#include <vector>

namespace roughflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Value and spatial derivatives of a vector field at one point.
//   jac(i,j)        = d_j v_i
//   hess[k](i,j)    = d_j d_k v_i
//   third[k][l](i,j)= d_j d_k d_l v_i
struct Jet {
  Vec value;
  Mat jac;
  std::vector<Mat> hess;
  std::vector<std::vector<Mat>> third;
  int order = 0;

  Jet() = default;
  Jet(int dim, int order);

  int dim() const { return static_cast<int>(value.size()); }
  bool finite() const;

  // this += a * other, over orders both carry (up to this->order)
  void axpy(double a, const Jet& other);
  Jet truncated(int ord) const;
  Jet scaled(double a) const;
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);

// Lie bracket [A,B] = (DB)A - (DA)B, with jacobian when both carry order >= 2
Jet lie_bracket(const Jet& a, const Jet& b, int order);

// (DA) B as a field, jacobian included when order >= 1
Jet directional(const Jet& a, const Jet& b, int order);

// Frobenius norm of the order-k derivative tensor
double derivative_norm(const Jet& j, int k);

}  // namespace roughflow
