#pragma once

#include <Eigen/Dense>

namespace admmpep {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

/// Symmetric 5x5 matrix. Symmetry is enforced on construction, so every
/// instance satisfies m(i,j) == m(j,i) exactly.
class SymMat5 {
  public:
    SymMat5() : m_(Mat5::Zero()) {}

    /// Symmetrizes the argument: stores (m + m^T)/2.
    explicit SymMat5(const Mat5& m) : m_(0.5 * (m + m.transpose())) {}

    double operator()(int i, int j) const { return m_(i, j); }
    const Mat5& mat() const { return m_; }

    SymMat5 operator+(const SymMat5& o) const { return SymMat5(m_ + o.m_); }
    SymMat5 operator-(const SymMat5& o) const { return SymMat5(m_ - o.m_); }
    SymMat5 operator-() const { return SymMat5(-m_); }
    SymMat5& operator+=(const SymMat5& o) {
        m_ += o.m_;
        return *this;
    }

    friend SymMat5 operator*(double c, const SymMat5& m) { return SymMat5(c * m.m_); }

    static SymMat5 identity() { return SymMat5(Mat5::Identity()); }

  private:
    Mat5 m_;
};

/// Symmetrized outer product (u v^T + v u^T)/2.
inline SymMat5 sym_outer(const Vec5& u, const Vec5& v) {
    return SymMat5(0.5 * (u * v.transpose() + v * u.transpose()));
}

/// Trace inner product <a, b> = sum_ij a_ij b_ij = trace(a b).
inline double inner(const SymMat5& a, const SymMat5& b) {
    return a.mat().cwiseProduct(b.mat()).sum();
}

}  // namespace admmpep
