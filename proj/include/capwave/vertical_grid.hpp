#pragma once

#include <vector>

namespace capwave {

// Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Chebyshev-Lobatto collocation in y on [0, 1], increasing.
class VerticalGrid {
 public:
  explicit VerticalGrid(int n);

  int size() const { return int(y_.size()); }
  const std::vector<double>& nodes() const { return y_; }
  // Clenshaw-Curtis weights: sum w_l f(y_l) = int_0^1 f.
  const std::vector<double>& weights() const { return w_; }
  // Row-major n*n: (Q f)_i = int_0^{y_i} p(f), p the interpolant.
  const std::vector<double>& cumulative() const { return q_; }

  // Values of all Lagrange cardinal functions at y (out has size()).
  void cardinal(double y, double* out) const;

 private:
  std::vector<double> y_, bary_, w_, q_;
};

}  // namespace capwave
