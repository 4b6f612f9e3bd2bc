#pragma once

#include <vector>

#include "fairx/errors.hpp"

namespace fairx {

// The n x n matrix of sharing fractions: entry (i,j) is the fraction of
// agent i's dataset given to agent j. The diagonal is fixed at zero; agents
// already own their data and no algorithm ever moves self-flow.
class ExchangeMatrix {
 public:
  ExchangeMatrix() = default;
  explicit ExchangeMatrix(int n) : n_(n), x_(static_cast<size_t>(n) * n, 0.0) {
    if (n < 1) throw InputError("exchange: n must be positive");
  }

  static ExchangeMatrix zeros(int n) { return ExchangeMatrix(n); }

  static ExchangeMatrix ones_off_diagonal(int n) {
    ExchangeMatrix m(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) m.x_[static_cast<size_t>(i) * n + j] = 1.0;
    return m;
  }

  int n() const { return n_; }

  double operator()(int i, int j) const { return x_[static_cast<size_t>(i) * n_ + j]; }

  void set(int i, int j, double v) {
    if (i == j) {
      if (v != 0.0) throw InputError("exchange: diagonal entries are fixed at 0");
      return;
    }
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("exchange: entry outside [0,1]");
    x_[static_cast<size_t>(i) * n_ + j] = v;
  }

  // Column j: the data bundle agent j receives. Entry j is 0.
  std::vector<double> bundle(int j) const {
    if (j < 0 || j >= n_) throw InputError("exchange: bundle index out of range");
    std::vector<double> b(n_);
    for (int i = 0; i < n_; ++i) b[i] = x_[static_cast<size_t>(i) * n_ + j];
    return b;
  }

  bool operator==(const ExchangeMatrix& o) const { return n_ == o.n_ && x_ == o.x_; }

  const std::vector<double>& raw() const { return x_; }

 private:
  int n_ = 0;
  std::vector<double> x_;
};

}  // namespace fairx
