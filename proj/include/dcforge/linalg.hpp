#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace dcforge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Tolerance used for rank and activity decisions throughout the polyhedral code.
inline constexpr double kRankTol = 1e-9;

/// Binomial coefficient saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

/// Calls `visit` with every size-`r` subset of {0..n-1} in lexicographic order.
/// Stops early when `visit` returns false.
void for_each_combination(int n, int r, const std::function<bool(const std::vector<int>&)>& visit);

/// Smallest eigenvalue of a symmetric matrix via power iteration on the shifted matrix
/// (sI - A), where s is a Gershgorin upper bound on the spectrum.
double smallest_eigenvalue(const Matrix& a, double tol = 1e-13, int max_iter = 50000);

/// Largest singular value by power iteration on M^T M.
double spectral_norm(const Matrix& m, double tol = 1e-10, int max_iter = 50000);

/// Orthonormal basis (as columns) of the null space of `a`.
Matrix null_space(const Matrix& a, double tol = kRankTol);

/// Numerical rank with the toolkit's pivot tolerance.
int numerical_rank(const Matrix& a, double tol = kRankTol);

/// Rows of `a` selected by `idx`.
Matrix select_rows(const Matrix& a, const std::vector<int>& idx);
Vector select_rows(const Vector& v, const std::vector<int>& idx);

/// Splits a symmetric matrix into PSD parts with A = plus - minus.
void psd_split(const Matrix& a, Matrix& plus, Matrix& minus);

} // namespace dcforge
