#include "bridgelab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "bridgelab/errors.hpp"

namespace bridgelab::linalg {

namespace {

constexpr double kGramianTolerance = 1e-8;
constexpr double kSymmetryTolerance = 1e-12;

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw DomainError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!a.allFinite()) {
    throw DomainError(std::string(what) + ": matrix has non-finite entries");
  }
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Pade numerator/denominator pieces for degree 3, 5, 7, 9.
template <std::size_t N>
Matrix pade_low(const Matrix& a, const std::array<double, N>& b) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = id;
  Matrix u_inner = Matrix::Zero(n, n);
  Matrix v = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < N; k += 2) {
    v += b[k] * power;
    u_inner += b[k + 1] * power;
    power = power * a2;
  }
  const Matrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                        b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix block_gramian(const Matrix& a, const Matrix& q, double t) {
  const Eigen::Index n = a.rows();
  // The block exponential carries e^{-tA}, so it is only taken over a short
  // step tau = t / 2^k; V_{2 tau} = V_tau + e^{tau A} V_tau e^{tau A^T} then
  // doubles back up to t with sums of positive semidefinite terms.
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int doublings = 0;
  double tau = t;
  while (tau * norm > 0.5 && doublings < 60) {
    tau *= 0.5;
    ++doublings;
  }
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -a;
  block.topRightCorner(n, n) = q;
  block.bottomRightCorner(n, n) = a.transpose();
  const Matrix e = matrix_exp(block, tau);
  // F22 = e^{tau A^T}, F12 = int_0^tau e^{-(tau-v)A} Q e^{vA^T} dv.
  Matrix v = e.bottomRightCorner(n, n).transpose() * e.topRightCorner(n, n);
  v = 0.5 * (v + v.transpose());
  Matrix flow = e.bottomRightCorner(n, n).transpose();
  for (int i = 0; i < doublings; ++i) {
    v += flow * v * flow.transpose();
    v = 0.5 * (v + v.transpose());
    flow = flow * flow;
  }
  return v;
}

Gramian validated_gramian(const Matrix& a, const Matrix& sigma, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("Gramian: time must be positive and finite");
  }
  const Matrix q = diffusion_covariance(a, sigma);
  Matrix v = block_gramian(a, q, t);
  const double norm_ta = t * a.cwiseAbs().colwise().sum().maxCoeff();
  int panels = std::max(4096, static_cast<int>(std::ceil(256.0 * norm_ta)));
  panels += panels % 2;
  const Matrix check = gramian_simpson(a, q, t, panels);
  const double scale = std::max(max_abs(v), std::numeric_limits<double>::min());
  const double disagreement = max_abs(v - check) / scale;
  if (!(disagreement <= kGramianTolerance)) {
    std::ostringstream msg;
    msg << "Gramian: block exponential and Simpson quadrature disagree by "
        << disagreement << " (relative)\nblock:\n"
        << v << "\nquadrature:\n"
        << check;
    throw ComputationError(msg.str());
  }
  return Gramian(t, std::move(v));
}

}  // namespace

Gramian::Gramian(double t, Matrix m) : t_(t), m_(std::move(m)) {
  require_square_finite(m_, "Gramian");
  const double scale = std::max(max_abs(m_), std::numeric_limits<double>::min());
  if (max_abs(m_ - m_.transpose()) / scale > kSymmetryTolerance) {
    throw ComputationError("Gramian: matrix is not symmetric");
  }
  llt_.compute(m_);
  if (llt_.info() != Eigen::Success) {
    throw ComputationError("Gramian: matrix is not positive definite");
  }
  log_det_ = 0.0;
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    const double diag = llt_.matrixLLT()(i, i);
    if (!(diag > 0.0)) throw ComputationError("Gramian: singular Cholesky factor");
    log_det_ += 2.0 * std::log(diag);
  }
}

double Gramian::quadratic_form(const Vector& v) const {
  const Vector w = llt_.matrixL().solve(v);
  return w.squaredNorm();
}

Matrix Gramian::inverse() const {
  return llt_.solve(Matrix::Identity(m_.rows(), m_.cols()));
}

Matrix matrix_exp(const Matrix& a, double t) {
  require_square_finite(a, "matrix_exp");
  if (!std::isfinite(t)) throw DomainError("matrix_exp: time must be finite");
  const Matrix ta = t * a;
  const double norm = ta.cwiseAbs().colwise().sum().maxCoeff();

  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0,
                                               420.0,   30.0,    1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0,
                                               277200.0,   25200.0,   1512.0,
                                               56.0,       1.0};
  static constexpr std::array<double, 10> b9 = {
      17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
      2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  if (norm <= 1.495585217958292e-2) return pade_low(ta, b3);
  if (norm <= 2.539398330063230e-1) return pade_low(ta, b5);
  if (norm <= 9.504178996162932e-1) return pade_low(ta, b7);
  if (norm <= 2.097847961257068e0) return pade_low(ta, b9);

  constexpr double theta13 = 5.371920351148152e0;
  int squarings = 0;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  }
  Matrix r = pade13(ta / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Matrix diffusion_covariance(const Matrix& a, const Matrix& sigma) {
  require_square_finite(a, "drift");
  if (sigma.rows() != a.rows() || sigma.cols() == 0) {
    throw DomainError("diffusion matrix must have as many rows as the drift");
  }
  if (!sigma.allFinite()) {
    throw DomainError("diffusion matrix has non-finite entries");
  }
  Matrix q = sigma * sigma.transpose();
  return 0.5 * (q + q.transpose());
}

Matrix gramian_simpson(const Matrix& a, const Matrix& q, double t, int panels) {
  if (panels < 2 || panels % 2 != 0) {
    throw DomainError("gramian_simpson: panel count must be even and >= 2");
  }
  const double h = t / panels;
  const Matrix step = matrix_exp(a, h);
  Matrix e = Matrix::Identity(a.rows(), a.cols());
  Matrix acc = Matrix::Zero(a.rows(), a.cols());
  for (int j = 0; j <= panels; ++j) {
    const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * (e * q * e.transpose());
    e = e * step;
  }
  return (h / 3.0) * acc;
}

Gramian gramian_vt(const Matrix& a, const Matrix& sigma, double t) {
  return validated_gramian(a, sigma, t);
}

Gramian gramian_vt_tilde(const Matrix& a, const Matrix& sigma, double t) {
  return validated_gramian(-a, sigma, t);
}

bool is_stable(const Matrix& a) {
  require_square_finite(a, "is_stable");
  Eigen::EigenSolver<Matrix> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw ComputationError("is_stable: eigenvalue iteration did not converge");
  }
  return (solver.eigenvalues().real().array() < -1e-10).all();
}

Gramian lyapunov_solve(const Matrix& a, const Matrix& sigma) {
  const Matrix q = diffusion_covariance(a, sigma);
  if (!is_stable(a)) {
    throw PreconditionError(
        "lyapunov_solve: drift has an eigenvalue with nonnegative real part");
  }
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  // Column-major vec: vec(AV) = (I (x) A) vec V, vec(V A^T) = (A (x) I) vec V.
  Matrix k = Matrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k.block(i * n, j * n, n, n) += id(i, j) * a + a(i, j) * id;
    }
  }
  const Vector rhs = -Eigen::Map<const Vector>(q.data(), n * n);
  const Vector sol = k.partialPivLu().solve(rhs);
  Matrix v = Eigen::Map<const Matrix>(sol.data(), n, n);
  v = 0.5 * (v + v.transpose());
  const double residual =
      (a * v + v * a.transpose() + q).norm() / std::max(q.norm(), 1e-300);
  if (!(residual < 1e-10)) {
    std::ostringstream msg;
    msg << "lyapunov_solve: residual " << residual << " exceeds 1e-10";
    throw ComputationError(msg.str());
  }
  return Gramian(std::numeric_limits<double>::infinity(), std::move(v));
}

}  // namespace bridgelab::linalg
