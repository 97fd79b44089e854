#include "monodtn/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace monodtn {

CsrMatrix::CsrMatrix(int n, std::vector<std::pair<int, int>> entries) : n_(n) {
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  row_ptr_.assign(n + 1, 0);
  col_.reserve(entries.size());
  for (const auto& [i, j] : entries) {
    if (i < 0 || i >= n || j < 0 || j >= n) throw std::out_of_range("csr entry out of range");
    ++row_ptr_[i + 1];
    col_.push_back(j);
  }
  for (int i = 0; i < n; ++i) row_ptr_[i + 1] += row_ptr_[i];
  val_.assign(col_.size(), 0.0);
}

int CsrMatrix::slot(int i, int j) const {
  const auto first = col_.begin() + row_ptr_[i];
  const auto last = col_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<int>(it - col_.begin());
}

void CsrMatrix::zero() { std::fill(val_.begin(), val_.end(), 0.0); }

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const int s = slot(i, i);
    if (s >= 0) d[i] = val_[s];
  }
  return d;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CgResult pcg(const CsrMatrix& a, std::span<const double> b, std::span<double> x, double rel_tol,
             int max_iter) {
  const int n = a.size();
  CgResult res;
  std::vector<double> inv = a.diagonal();
  for (double& d : inv) d = d > 0.0 ? 1.0 / d : 1.0;
  // Residuals are measured in the D^-1 norm so rows of very different
  // stiffness weigh alike.
  double bnorm = 0.0;
  for (int i = 0; i < n; ++i) bnorm += b[i] * b[i] * inv[i];
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  for (int i = 0; i < n; ++i) z[i] = inv[i] * r[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = std::sqrt(std::max(rz, 0.0));
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    if (rnorm <= rel_tol * bnorm) break;
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;  // loss of positive definiteness or breakdown
    const double step = rz / pq;
    for (int i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * q[i];
    }
    for (int i = 0; i < n; ++i) z[i] = inv[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(std::max(rz, 0.0));
  }
  res.residual = rnorm / bnorm;
  res.converged = rnorm <= rel_tol * bnorm;
  return res;
}

}  // namespace monodtn
