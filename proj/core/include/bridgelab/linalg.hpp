#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace bridgelab::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric positive definite controllability Gramian at time t, held with
/// its Cholesky factor (the factorization doubles as the definiteness test).
class Gramian {
 public:
  Gramian(double t, Matrix m);

  double time() const noexcept { return t_; }
  const Matrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  double log_det() const noexcept { return log_det_; }
  // v^T G^{-1} v
  double quadratic_form(const Vector& v) const;
  Matrix inverse() const;
  const Eigen::LLT<Matrix>& cholesky() const noexcept { return llt_; }

 private:
  double t_;
  Matrix m_;
  Eigen::LLT<Matrix> llt_;
  double log_det_ = 0.0;
};

/// e^{tA} by scaling and squaring with a degree-13 Pade approximant (the
/// lower degrees 3..9 are used when ||tA||_1 is small).
Matrix matrix_exp(const Matrix& a, double t = 1.0);

/// Sigma Sigma^T, checked for finiteness and matching dimensions.
Matrix diffusion_covariance(const Matrix& a, const Matrix& sigma);

/// V_t = int_0^t e^{(t-v)A} Q e^{(t-v)A^T} dv with Q = Sigma Sigma^T,
/// computed with Van Loan's block exponential and cross-checked against a
/// composite Simpson rule; ComputationError when the two disagree by more
/// than 1e-8 (relative to ||V_t||).
Gramian gramian_vt(const Matrix& a, const Matrix& sigma, double t);

/// V~_t = int_0^t e^{-vA} Q e^{-vA^T} dv, i.e. V_t for the drift -A.
Gramian gramian_vt_tilde(const Matrix& a, const Matrix& sigma, double t);

/// Composite Simpson approximation of V_t with `panels` (even) panels.
Matrix gramian_simpson(const Matrix& a, const Matrix& q, double t, int panels);

/// True when every eigenvalue of A has real part < -1e-10.
bool is_stable(const Matrix& a);

/// Solution V of A V + V A^T = -Sigma Sigma^T for stable A, via the
/// Kronecker-sum linear system. PreconditionError for unstable A.
Gramian lyapunov_solve(const Matrix& a, const Matrix& sigma);

}  // namespace bridgelab::linalg
