#ifndef MDIEW_FOCK_HPP
#define MDIEW_FOCK_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "mdiew/rng.hpp"

namespace mdiew::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense operator on a truncated multi-mode Fock space.  Cutoff d for a mode
/// means levels 0..d-1; basis indices enumerate mode occupations row-major
/// (the first mode is the most significant digit).
class FockOperator {
 public:
  FockOperator(std::vector<int> cutoffs, Matrix matrix);

  static FockOperator identity(std::vector<int> cutoffs);
  static FockOperator from_vector(std::vector<int> cutoffs, const Vector& psi);

  const std::vector<int>& cutoffs() const { return cutoffs_; }
  int n_modes() const { return static_cast<int>(cutoffs_.size()); }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }

  bool is_hermitian(double tol = 1e-12) const;
  /// Total photon number of a basis index (sum of the mode digits).
  int total_quanta(int index) const;

  FockOperator tensor(const FockOperator& other) const;
  FockOperator transpose() const;
  /// Partial transpose over the trailing `modes_b` modes.
  FockOperator partial_transpose_b(int modes_b = 1) const;

 private:
  std::vector<int> cutoffs_;
  std::vector<int> strides_;
  Matrix matrix_;
};

/// Checks Hermiticity / unit trace / positivity within the stated
/// tolerances and throws std::invalid_argument otherwise.
void require_density_matrix(const FockOperator& rho, const char* what);

double min_eigenvalue_hermitian(const FockOperator& op);

/// Truncation of the two-mode squeezed vacuum series
/// sqrt(1-lambda^2) sum_i lambda^i |ii>, renormalized; `deficit` records the
/// probability mass lost to the cutoff.
struct TruncatedTmsv {
  Vector vec;
  double deficit = 0.0;
};
TruncatedTmsv tmsv_vector(double r, int cutoff);

/// Coherent-state coefficients e^{-|a|^2/2} a^n/sqrt(n!) truncated at
/// `cutoff` (not renormalized).
Vector coherent_vector(Complex alpha, int cutoff);
double coherent_deficit(Complex alpha, int cutoff);

/// Single-mode annihilation operator at the cutoff.
Matrix annihilation(int cutoff);

/// POVM element induced by projecting every (mode, probe) pair of an n-mode
/// state onto the two-mode squeezed vacuum:
///   M = (1-lambda^2)^n  lambda^{N}  rho^T  lambda^{N},   N = sum_X n_X,
/// with the transpose taken in the Fock number basis.  Requires
/// 0 < lambda < 1 and a density matrix input.
FockOperator povm_element(const FockOperator& rho, double lambda);

/// Same object computed the slow way: explicit truncated TMSV projectors
/// (from tmsv_vector, renormalized) contracted against rho mode by mode.
/// Two-mode states only; this is the cross-check route.
FockOperator povm_element_projector_route(const FockOperator& rho, double lambda);

/// Multi-mode variant with an (modes_a + modes_b) partition annotation;
/// the conjugation itself is partition-independent, the partition sizes are
/// validated against the state.
FockOperator multimode_povm_element(const FockOperator& rho, double lambda, int modes_a,
                                    int modes_b);

/// Witness transform W~ = lambda^{-N} W^T lambda^{-N}.  Rejects inputs whose
/// conjugation would overflow (lambda^{-n_max} beyond 1e12) with guidance on
/// the admissible lambda window.
FockOperator witness_tilde(const FockOperator& witness, double lambda);

/// Window-checked variant for witnesses with a known energy scale N
/// (|W_mn| decaying like e^{-(total quanta)/N}): requires
/// e^{-1/N} < lambda < 1 and throws std::domain_error otherwise.
FockOperator witness_tilde_checked(const FockOperator& witness, double lambda,
                                   double energy_scale);

/// D_N W D_N with D_N = diag(e^{-n_tot/N}): imprints the energy scale N onto
/// a witness so that the lambda window above applies.
FockOperator energy_damped(const FockOperator& witness, double energy_scale);

/// Admissible lambda window (e^{-1/N}, 1) for an energy-scale-N witness and
/// the attainable prefactor bound 1 - e^{-2/N} (about 2/N for large N).
struct DampingWindow {
  double lambda_min = 0.0;
  double lambda_max = 1.0;
  double factor = 0.0;
};
DampingWindow damping_factor(double energy_scale);

/// One term of an explicit separable decomposition sum_mu p_mu rho_A ⊗ sigma_B.
struct ProductTerm {
  double weight = 1.0;
  FockOperator rho_a;
  FockOperator sigma_b;
};

struct SeparableTransformReport {
  double decomposition_error = 0.0;   // |sum_mu p M^mu ⊗ N^mu - M(rho)|_F
  double min_factor_eigenvalue = 0.0; // over all M^mu, N^mu
  double min_reverse_eigenvalue = 0.0;// over the back-transformed factors
  bool passed = false;
};

/// Builds the per-side POVM factors of a product decomposition, checks they
/// are PSD, that their convex combination reproduces povm_element of the
/// mixture, and that the reverse map lambda^{n} (.)^T lambda^{n} is PSD.
SeparableTransformReport separable_transform_check(std::span<const ProductTerm> terms,
                                                   double lambda, double tol = 1e-10);

/// P(1,1 | alpha, beta) for a two-mode state, evaluated independently via
/// the POVM conjugation and via explicit projector contraction; the routes
/// must agree to `consistency_tol`.
struct P11Result {
  double value = 0.0;
  double via_conjugation = 0.0;
  double via_projectors = 0.0;
};
P11Result p11_statistic(const FockOperator& rho, double r, Complex alpha, Complex beta,
                        double consistency_tol = 1e-8);

/// Probe-grid data for POVM reconstruction.
struct TomographyGrid {
  std::vector<Complex> alphas;
  std::vector<Complex> betas;
  Eigen::MatrixXd p11;  // alphas.size() x betas.size()
  double ridge_weight = 1e-10;
};

/// Ideal (noiseless) grid generated from a known POVM element.
TomographyGrid make_tomography_grid(const FockOperator& m, int points_per_side, double extent);

struct Reconstruction {
  FockOperator m_hat;
  double residual = 0.0;
  double condition = 0.0;
};

/// Ridge-regularized linear inversion of P(1,1|alpha,beta) over Hermitian
/// operators at the cutoff.  Throws if the grid is underdetermined or the
/// design is numerically singular (condition above 1e12).
Reconstruction reconstruct_povm(const TomographyGrid& grid, std::vector<int> cutoffs);

struct HeterodyneEstimate {
  double estimate = 0.0;    // estimate of <0|rho|0>
  double std_error = 0.0;
  double bias_bound = 0.0;  // O(radius^2) disc-averaging bias scale
  std::uint64_t proposals = 0;
};

/// Estimates <0|rho|0> by sampling heterodyne outcomes (Husimi distribution)
/// and counting results within `radius` of the origin.
HeterodyneEstimate heterodyne_vacuum_projection(const FockOperator& rho_single_mode,
                                                double radius, std::uint64_t samples,
                                                RngStream& rng);

/// Fock-space realization of the kappa-weighted variance witness
/// u^2 + v^2 - (kappa^2+kappa^-2)/2 at the cutoff (negative expectation
/// certifies entanglement; used to exercise the transformed-witness path).
FockOperator duan_fock_witness(double kappa, int cutoff);

/// Random Ginibre-style density matrix (rank = dim when rank <= 0).
FockOperator random_density(std::vector<int> cutoffs, RngStream& rng, int rank = 0);
FockOperator random_hermitian(std::vector<int> cutoffs, RngStream& rng);
/// Random explicit product mixture with `terms` components.
std::vector<ProductTerm> random_separable_terms(int cutoff_a, int cutoff_b, int terms,
                                                RngStream& rng);

}  // namespace mdiew::fock

#endif  // MDIEW_FOCK_HPP
