#include "mdiew/gaussian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace mdiew {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;

void check_mode_index(int n_modes, int mode, const char* what) {
  if (mode < 0 || mode >= n_modes) {
    throw std::invalid_argument(std::string(what) + ": mode index " + std::to_string(mode) +
                                " out of range for " + std::to_string(n_modes) + " modes");
  }
}

}  // namespace

Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& cov) {
  const int n = static_cast<int>(cov.rows()) / 2;
  Eigen::MatrixXd prod = symplectic_form(n) * cov;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(prod, /*computeEigenvectors=*/false);
  std::vector<double> imags;
  imags.reserve(2 * n);
  for (int i = 0; i < 2 * n; ++i) imags.push_back(std::abs(solver.eigenvalues()(i).imag()));
  std::sort(imags.begin(), imags.end());
  Eigen::VectorXd nus(n);
  // eigenvalues come in +-i nu pairs, so the sorted magnitudes hold each
  // nu twice; keep one representative per pair
  for (int i = 0; i < n; ++i) nus(i) = imags[2 * i];
  return nus;
}

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() < 2 || mean_.size() % 2 != 0) {
    throw std::invalid_argument("GaussianState: mean length must be even and positive");
  }
  n_modes_ = static_cast<int>(mean_.size()) / 2;
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw std::invalid_argument("GaussianState: covariance shape does not match mean length");
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw std::invalid_argument("GaussianState: non-finite entries");
  }
  const double asym = (cov_ - cov_.transpose()).norm();
  if (asym > kSymmetryTol * std::max(1.0, cov_.norm())) {
    throw std::invalid_argument("GaussianState: covariance is not symmetric (|C-C^T| = " +
                                std::to_string(asym) + ")");
  }
  cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();
  const Eigen::VectorXd nus = symplectic_eigenvalues(cov_);
  if (nus.minCoeff() < kVacuumVariance - kPsdTol) {
    throw std::invalid_argument("GaussianState: uncertainty relation violated (min symplectic "
                                "eigenvalue " + std::to_string(nus.minCoeff()) + " < 1/4)");
  }
}

GaussianState GaussianState::vacuum(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("vacuum: mode count must be >= 1");
  return GaussianState(Eigen::VectorXd::Zero(2 * n_modes),
                       kVacuumVariance * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

GaussianState GaussianState::coherent(double alpha_x, double alpha_p) {
  if (!std::isfinite(alpha_x) || !std::isfinite(alpha_p)) {
    throw std::invalid_argument("coherent: amplitude must be finite");
  }
  Eigen::VectorXd mean(2);
  mean << alpha_x, alpha_p;
  return GaussianState(mean, kVacuumVariance * Eigen::MatrixXd::Identity(2, 2));
}

GaussianState GaussianState::tmsv(double r) {
  if (!std::isfinite(r)) throw std::invalid_argument("tmsv: squeezing must be finite");
  const double c = std::cosh(2.0 * r) / 4.0;
  const double s = std::sinh(2.0 * r) / 4.0;
  Eigen::MatrixXd cov(4, 4);
  cov << c, 0, s, 0,
         0, c, 0, -s,
         s, 0, c, 0,
         0, -s, 0, c;
  return GaussianState(Eigen::VectorXd::Zero(4), cov);
}

bool GaussianState::is_pure(double tol) const {
  const Eigen::VectorXd nus = symplectic_spectrum();
  return (nus.array() - kVacuumVariance).abs().maxCoeff() <= tol;
}

GaussianState GaussianState::tensor(const GaussianState& other) const {
  const int na = 2 * n_modes_, nb = 2 * other.n_modes_;
  Eigen::VectorXd mean(na + nb);
  mean << mean_, other.mean_;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(na + nb, na + nb);
  cov.topLeftCorner(na, na) = cov_;
  cov.bottomRightCorner(nb, nb) = other.cov_;
  return GaussianState(std::move(mean), std::move(cov));
}

GaussianState GaussianState::restrict_modes(const std::vector<int>& modes) const {
  if (modes.empty()) throw std::invalid_argument("restrict_modes: empty mode subset");
  std::vector<bool> seen(static_cast<size_t>(n_modes_), false);
  for (int m : modes) {
    check_mode_index(n_modes_, m, "restrict_modes");
    if (seen[static_cast<size_t>(m)]) {
      throw std::invalid_argument("restrict_modes: duplicate mode index");
    }
    seen[static_cast<size_t>(m)] = true;
  }
  const int k = static_cast<int>(modes.size());
  Eigen::VectorXd mean(2 * k);
  Eigen::MatrixXd cov(2 * k, 2 * k);
  for (int a = 0; a < k; ++a) {
    for (int q = 0; q < 2; ++q) mean(2 * a + q) = mean_(2 * modes[static_cast<size_t>(a)] + q);
    for (int b = 0; b < k; ++b) {
      for (int qa = 0; qa < 2; ++qa) {
        for (int qb = 0; qb < 2; ++qb) {
          cov(2 * a + qa, 2 * b + qb) =
              cov_(2 * modes[static_cast<size_t>(a)] + qa, 2 * modes[static_cast<size_t>(b)] + qb);
        }
      }
    }
  }
  return GaussianState(std::move(mean), std::move(cov));
}

SymplecticMap::SymplecticMap(Eigen::MatrixXd matrix, Eigen::VectorXd displacement)
    : matrix_(std::move(matrix)), displacement_(std::move(displacement)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != displacement_.size() ||
      matrix_.rows() % 2 != 0 || matrix_.rows() == 0) {
    throw std::invalid_argument("SymplecticMap: inconsistent dimensions");
  }
  const int n = static_cast<int>(matrix_.rows()) / 2;
  const Eigen::MatrixXd omega = symplectic_form(n);
  const double defect = (matrix_.transpose() * omega * matrix_ - omega).norm();
  if (defect > 1e-10) {
    throw std::invalid_argument("SymplecticMap: S^T Omega S != Omega (defect " +
                                std::to_string(defect) + ")");
  }
}

SymplecticMap::SymplecticMap(Eigen::MatrixXd matrix)
    : SymplecticMap(std::move(matrix), Eigen::VectorXd::Zero(matrix.rows())) {}

SymplecticMap SymplecticMap::identity(int n_modes) {
  return SymplecticMap(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

SymplecticMap SymplecticMap::beam_splitter_50_50(int n_modes, int mode_i, int mode_j,
                                                 BsConvention conv) {
  check_mode_index(n_modes, mode_i, "beam_splitter_50_50");
  check_mode_index(n_modes, mode_j, "beam_splitter_50_50");
  if (mode_i == mode_j) throw std::invalid_argument("beam_splitter_50_50: modes must differ");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  for (int q = 0; q < 2; ++q) {
    const int i = 2 * mode_i + q, j = 2 * mode_j + q;
    if (conv == BsConvention::sum_diff) {
      s(i, i) = inv_sqrt2;  s(i, j) = inv_sqrt2;
      s(j, i) = inv_sqrt2;  s(j, j) = -inv_sqrt2;
    } else {
      s(i, i) = inv_sqrt2;  s(i, j) = -inv_sqrt2;
      s(j, i) = inv_sqrt2;  s(j, j) = inv_sqrt2;
    }
  }
  return SymplecticMap(std::move(s));
}

SymplecticMap SymplecticMap::squeeze(int n_modes, int mode, double r) {
  check_mode_index(n_modes, mode, "squeeze");
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  s(2 * mode, 2 * mode) = std::exp(r);
  s(2 * mode + 1, 2 * mode + 1) = std::exp(-r);
  return SymplecticMap(std::move(s));
}

SymplecticMap SymplecticMap::rotation(int n_modes, int mode, double theta) {
  check_mode_index(n_modes, mode, "rotation");
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  s(2 * mode, 2 * mode) = std::cos(theta);
  s(2 * mode, 2 * mode + 1) = std::sin(theta);
  s(2 * mode + 1, 2 * mode) = -std::sin(theta);
  s(2 * mode + 1, 2 * mode + 1) = std::cos(theta);
  return SymplecticMap(std::move(s));
}

GaussianState SymplecticMap::apply(const GaussianState& state) const {
  if (state.n_modes() != n_modes()) {
    throw std::invalid_argument("SymplecticMap::apply: mode count mismatch");
  }
  return GaussianState(matrix_ * state.mean() + displacement_,
                       matrix_ * state.cov() * matrix_.transpose());
}

SymplecticMap SymplecticMap::compose(const SymplecticMap& first) const {
  return SymplecticMap(matrix_ * first.matrix_, matrix_ * first.displacement_ + displacement_);
}

GaussianState vacuum(int n_modes) { return GaussianState::vacuum(n_modes); }
GaussianState coherent(double alpha_x, double alpha_p) {
  return GaussianState::coherent(alpha_x, alpha_p);
}
GaussianState tmsv(double r) { return GaussianState::tmsv(r); }

GaussianState beam_splitter_50_50(const GaussianState& state, int mode_i, int mode_j,
                                  SymplecticMap::BsConvention conv) {
  return SymplecticMap::beam_splitter_50_50(state.n_modes(), mode_i, mode_j, conv).apply(state);
}

GaussianState squeeze_single_mode(const GaussianState& state, int mode, double r) {
  return SymplecticMap::squeeze(state.n_modes(), mode, r).apply(state);
}

GaussianState apply_loss(const GaussianState& state, const LossChannel& channel) {
  check_mode_index(state.n_modes(), channel.mode, "apply_loss");
  if (!(channel.eta >= 0.0 && channel.eta <= 1.0)) {
    throw std::invalid_argument("apply_loss: eta must lie in [0,1]");
  }
  const double keep = std::sqrt(1.0 - channel.eta);
  const int m = 2 * channel.mode;
  Eigen::VectorXd mean = state.mean();
  Eigen::MatrixXd cov = state.cov();
  mean.segment<2>(m) *= keep;
  // scale the mode's row/column band, then restore the diagonal block with
  // the vacuum admixture
  cov.middleRows<2>(m) *= keep;
  cov.middleCols<2>(m) *= keep;
  cov.block<2, 2>(m, m) +=
      channel.eta * kVacuumVariance * Eigen::Matrix2d::Identity();
  return GaussianState(std::move(mean), std::move(cov));
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) { return a.tensor(b); }

GaussianState restrict_modes(const GaussianState& state, const std::vector<int>& modes) {
  return state.restrict_modes(modes);
}

}  // namespace mdiew
