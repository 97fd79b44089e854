#pragma once

#include <span>
#include <utility>
#include <vector>

namespace monodtn {

/// Compressed sparse row matrix with a fixed pattern. Values are filled by
/// position (slot) so repeated assemblies reuse the pattern.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Pattern from (row, col) pairs; duplicates are merged, columns sorted.
  CsrMatrix(int n, std::vector<std::pair<int, int>> entries);

  int size() const { return n_; }
  std::size_t nonzeros() const { return col_.size(); }
  /// Slot of (i, j) in values(), or -1 when outside the pattern.
  int slot(int i, int j) const;

  std::span<double> values() { return val_; }
  std::span<const double> values() const { return val_; }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return col_; }
  void zero();

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;

 private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> val_;
};

struct CgResult {
  int iterations = 0;
  double residual = 0.0;  // final ||r|| / ||b||, both in the D^-1 norm
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite A.
/// x holds the initial guess on entry.
CgResult pcg(const CsrMatrix& a, std::span<const double> b, std::span<double> x, double rel_tol,
             int max_iter);

}  // namespace monodtn
