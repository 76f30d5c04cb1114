#ifndef MDIEW_GAUSSIAN_HPP
#define MDIEW_GAUSSIAN_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace mdiew {

/// Quadrature convention: a = x + i*p, [x,p] = i/2, so the vacuum has
/// Var(x) = Var(p) = 1/4.  Phase-space vectors are ordered
/// (x_1, p_1, x_2, p_2, ...), covariances are 1/2 <{dr_i, dr_j}>.
constexpr double kVacuumVariance = 0.25;

/// Standard symplectic form for the (x1,p1,x2,p2,...) ordering:
/// block-diagonal copies of [[0,1],[-1,0]].
Eigen::MatrixXd symplectic_form(int n_modes);

/// Symplectic spectrum of a covariance matrix: the n positive numbers
/// nu_j such that Omega*cov has eigenvalues +-i*nu_j.  A physical state
/// has every nu_j >= 1/4; a pure state has all nu_j == 1/4.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& cov);

/// Gaussian state of n bosonic modes: mean vector (length 2n) and
/// symmetric covariance matrix (2n x 2n).  Construction symmetrizes the
/// covariance and verifies the uncertainty relation; instances are
/// immutable afterwards, all operations return new states.
class GaussianState {
 public:
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  static GaussianState vacuum(int n_modes);
  static GaussianState coherent(double alpha_x, double alpha_p);
  /// Two-mode squeezed vacuum with squeezing parameter r:
  /// Var(x_A)=Var(p_A)=Var(x_B)=Var(p_B)=cosh(2r)/4,
  /// Cov(x_A,x_B)=+sinh(2r)/4, Cov(p_A,p_B)=-sinh(2r)/4.
  static GaussianState tmsv(double r);

  int n_modes() const { return n_modes_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

  Eigen::VectorXd symplectic_spectrum() const { return symplectic_eigenvalues(cov_); }
  bool is_pure(double tol = 1e-9) const;

  GaussianState tensor(const GaussianState& other) const;
  /// Keep only the listed modes (partial trace over the rest); the
  /// subset must be non-empty and free of duplicates.
  GaussianState restrict_modes(const std::vector<int>& modes) const;

 private:
  int n_modes_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// Affine symplectic map r -> S r + d.  S must satisfy S Omega S^T = Omega
/// to within 1e-10 (Frobenius).
class SymplecticMap {
 public:
  SymplecticMap(Eigen::MatrixXd matrix, Eigen::VectorXd displacement);
  explicit SymplecticMap(Eigen::MatrixXd matrix);

  static SymplecticMap identity(int n_modes);
  /// Balanced beam splitter on modes (i, j).  With the `sum_diff`
  /// convention the quadratures map as
  ///   q_i -> (q_i + q_j)/sqrt2, q_j -> (q_i - q_j)/sqrt2,
  /// which is an involution; `diff_sum` is the variant
  ///   q_i -> (q_i - q_j)/sqrt2, q_j -> (q_i + q_j)/sqrt2.
  enum class BsConvention { sum_diff, diff_sum };
  static SymplecticMap beam_splitter_50_50(int n_modes, int mode_i, int mode_j,
                                           BsConvention conv = BsConvention::sum_diff);
  /// Single-mode squeezer: x -> e^{r} x, p -> e^{-r} p on the target mode.
  static SymplecticMap squeeze(int n_modes, int mode, double r);
  /// Phase-space rotation by theta on one mode.
  static SymplecticMap rotation(int n_modes, int mode, double theta);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& displacement() const { return displacement_; }
  int n_modes() const { return static_cast<int>(displacement_.size()) / 2; }

  GaussianState apply(const GaussianState& state) const;
  /// Composition: (*this) after `first`.
  SymplecticMap compose(const SymplecticMap& first) const;

 private:
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd displacement_;
};

/// Pure loss on one mode: a -> sqrt(1-eta) a + sqrt(eta) a_vac.
/// eta is the *lost* fraction: eta = 0 is the identity, eta = 1 replaces the
/// mode by vacuum.
struct LossChannel {
  int mode = 0;
  double eta = 0.0;
};

GaussianState vacuum(int n_modes);
GaussianState coherent(double alpha_x, double alpha_p);
GaussianState tmsv(double r);

GaussianState beam_splitter_50_50(const GaussianState& state, int mode_i, int mode_j,
                                  SymplecticMap::BsConvention conv = SymplecticMap::BsConvention::sum_diff);
GaussianState squeeze_single_mode(const GaussianState& state, int mode, double r);
GaussianState apply_loss(const GaussianState& state, const LossChannel& channel);
GaussianState tensor(const GaussianState& a, const GaussianState& b);
GaussianState restrict_modes(const GaussianState& state, const std::vector<int>& modes);

}  // namespace mdiew

#endif  // MDIEW_GAUSSIAN_HPP
