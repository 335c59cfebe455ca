#include "dcforge/linalg.hpp"

#include <cmath>
#include <limits>

namespace dcforge {

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t num = n - k + i;
        if (r > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
        r = r * num / i;
    }
    return r;
}

void for_each_combination(int n, int r, const std::function<bool(const std::vector<int>&)>& visit) {
    if (r < 0 || r > n) return;
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) idx[i] = i;
    while (true) {
        if (!visit(idx)) return;
        int i = r - 1;
        while (i >= 0 && idx[i] == n - r + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
}

namespace {

// Dominant eigenvalue of a symmetric PSD matrix by power iteration with Rayleigh quotients.
double dominant_psd_eigenvalue(const Matrix& b, double tol, int max_iter) {
    const auto n = b.rows();
    if (n == 0) return 0.0;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i % 7) - 0.013 * static_cast<double>(i);
    v.normalize();
    double rho = v.dot(b * v);
    for (int it = 0; it < max_iter; ++it) {
        Vector w = b * v;
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        v = w / nw;
        const double next = v.dot(b * v);
        if (std::abs(next - rho) <= tol * std::max(1.0, std::abs(next))) {
            rho = next;
            break;
        }
        rho = next;
    }
    return rho;
}

} // namespace

double smallest_eigenvalue(const Matrix& a, double tol, int max_iter) {
    const auto n = a.rows();
    if (n == 0) return 0.0;
    double shift = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) shift = std::max(shift, a(i, i) + (a.row(i).cwiseAbs().sum() - std::abs(a(i, i))));
    shift = std::abs(shift) + 1.0;
    const Matrix b = shift * Matrix::Identity(n, n) - a;
    return shift - dominant_psd_eigenvalue(b, tol, max_iter);
}

double spectral_norm(const Matrix& m, double tol, int max_iter) {
    if (m.size() == 0) return 0.0;
    if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const Matrix mtm = m.transpose() * m;
    return std::sqrt(std::max(0.0, dominant_psd_eigenvalue(mtm, tol * tol, max_iter)));
}

Matrix null_space(const Matrix& a, double tol) {
    const auto n = a.cols();
    if (a.rows() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    const double scale = std::max(1.0, s.size() ? s[0] : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > tol * scale) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

int numerical_rank(const Matrix& a, double tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    const double scale = std::max(1.0, s.size() ? s[0] : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > tol * scale) ++rank;
    return rank;
}

Matrix select_rows(const Matrix& a, const std::vector<int>& idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = a.row(idx[i]);
    return out;
}

Vector select_rows(const Vector& v, const std::vector<int>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[idx[i]];
    return out;
}

void psd_split(const Matrix& a, Matrix& plus, Matrix& minus) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
    const Vector ev = es.eigenvalues();
    const Matrix& u = es.eigenvectors();
    plus = u * ev.cwiseMax(0.0).asDiagonal() * u.transpose();
    minus = u * (-ev).cwiseMax(0.0).asDiagonal() * u.transpose();
}

} // namespace dcforge
