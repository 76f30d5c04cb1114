#include "mdiew/fock.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mdiew::fock {

namespace {

std::vector<int> make_strides(const std::vector<int>& cutoffs) {
  std::vector<int> strides(cutoffs.size());
  int acc = 1;
  for (int k = static_cast<int>(cutoffs.size()) - 1; k >= 0; --k) {
    strides[static_cast<size_t>(k)] = acc;
    acc *= cutoffs[static_cast<size_t>(k)];
  }
  return strides;
}

int total_dim(const std::vector<int>& cutoffs) {
  int acc = 1;
  for (int d : cutoffs) {
    if (d < 1) throw std::invalid_argument("FockOperator: cutoffs must be >= 1");
    acc *= d;
  }
  return acc;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie strictly inside (0, 1)");
  }
}

// diag(lambda^{total quanta}) over the truncated basis
Eigen::VectorXd quanta_weights(const FockOperator& op, double lambda) {
  Eigen::VectorXd w(op.dim());
  for (int i = 0; i < op.dim(); ++i) w(i) = std::pow(lambda, op.total_quanta(i));
  return w;
}

}  // namespace

FockOperator::FockOperator(std::vector<int> cutoffs, Matrix matrix)
    : cutoffs_(std::move(cutoffs)), strides_(make_strides(cutoffs_)), matrix_(std::move(matrix)) {
  const int d = total_dim(cutoffs_);
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw std::invalid_argument("FockOperator: matrix size " + std::to_string(matrix_.rows()) +
                                " does not match cutoffs (dim " + std::to_string(d) + ")");
  }
}

FockOperator FockOperator::identity(std::vector<int> cutoffs) {
  const int d = total_dim(cutoffs);
  return FockOperator(std::move(cutoffs), Matrix::Identity(d, d));
}

FockOperator FockOperator::from_vector(std::vector<int> cutoffs, const Vector& psi) {
  const int d = total_dim(cutoffs);
  if (psi.size() != d) throw std::invalid_argument("FockOperator::from_vector: size mismatch");
  return FockOperator(std::move(cutoffs), psi * psi.adjoint());
}

bool FockOperator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).norm() <= tol * std::max(1.0, matrix_.norm());
}

int FockOperator::total_quanta(int index) const {
  int total = 0;
  for (size_t k = 0; k < cutoffs_.size(); ++k) {
    total += (index / strides_[k]) % cutoffs_[k];
  }
  return total;
}

FockOperator FockOperator::tensor(const FockOperator& other) const {
  std::vector<int> cutoffs = cutoffs_;
  cutoffs.insert(cutoffs.end(), other.cutoffs_.begin(), other.cutoffs_.end());
  Matrix m(dim() * other.dim(), dim() * other.dim());
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j < dim(); ++j) {
      m.block(i * other.dim(), j * other.dim(), other.dim(), other.dim()) =
          matrix_(i, j) * other.matrix_;
    }
  }
  return FockOperator(std::move(cutoffs), std::move(m));
}

FockOperator FockOperator::transpose() const {
  return FockOperator(cutoffs_, matrix_.transpose());
}

FockOperator FockOperator::partial_transpose_b(int modes_b) const {
  if (modes_b < 1 || modes_b >= n_modes()) {
    throw std::invalid_argument("partial_transpose_b: invalid trailing mode count");
  }
  int db = 1;
  for (int k = n_modes() - modes_b; k < n_modes(); ++k) db *= cutoffs_[static_cast<size_t>(k)];
  const int da = dim() / db;
  Matrix m(dim(), dim());
  for (int ia = 0; ia < da; ++ia) {
    for (int ja = 0; ja < da; ++ja) {
      for (int ib = 0; ib < db; ++ib) {
        for (int jb = 0; jb < db; ++jb) {
          m(ia * db + ib, ja * db + jb) = matrix_(ia * db + jb, ja * db + ib);
        }
      }
    }
  }
  return FockOperator(cutoffs_, std::move(m));
}

void require_density_matrix(const FockOperator& rho, const char* what) {
  const std::string who(what);
  if (!rho.is_hermitian(1e-12)) throw std::invalid_argument(who + ": state is not Hermitian");
  if (std::abs(rho.matrix().trace().real() - 1.0) > 1e-12 ||
      std::abs(rho.matrix().trace().imag()) > 1e-12) {
    throw std::invalid_argument(who + ": state trace differs from 1");
  }
  if (min_eigenvalue_hermitian(rho) < -1e-10) {
    throw std::invalid_argument(who + ": state has a negative eigenvalue");
  }
}

double min_eigenvalue_hermitian(const FockOperator& op) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

TruncatedTmsv tmsv_vector(double r, int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("tmsv_vector: cutoff must be >= 1");
  if (!std::isfinite(r)) throw std::invalid_argument("tmsv_vector: r must be finite");
  const double lambda = std::tanh(r);
  Vector v = Vector::Zero(cutoff * cutoff);
  double norm2 = 0.0;
  for (int i = 0; i < cutoff; ++i) {
    const double c = std::pow(lambda, i);
    v(i * cutoff + i) = c;
    norm2 += c * c;
  }
  const double full_norm2 = lambda == 0.0 ? 1.0 : 1.0 / (1.0 - lambda * lambda);
  TruncatedTmsv out;
  out.deficit = 1.0 - norm2 / full_norm2;
  out.vec = v / std::sqrt(norm2);
  return out;
}

Vector coherent_vector(Complex alpha, int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("coherent_vector: cutoff must be >= 1");
  Vector v(cutoff);
  Complex term = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < cutoff; ++n) {
    v(n) = term;
    term *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v;
}

double coherent_deficit(Complex alpha, int cutoff) {
  double kept = 0.0, term = std::exp(-std::norm(alpha));
  for (int n = 0; n < cutoff; ++n) {
    kept += term;
    term *= std::norm(alpha) / (n + 1);
  }
  return 1.0 - kept;
}

Matrix annihilation(int cutoff) {
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

FockOperator povm_element(const FockOperator& rho, double lambda) {
  check_lambda(lambda);
  require_density_matrix(rho, "povm_element");
  const Eigen::VectorXd w = quanta_weights(rho, lambda);
  const double pref = std::pow(1.0 - lambda * lambda, rho.n_modes());
  Matrix m = pref * (w.asDiagonal() * rho.matrix().transpose() * w.asDiagonal());
  return FockOperator(rho.cutoffs(), std::move(m));
}

FockOperator povm_element_projector_route(const FockOperator& rho, double lambda) {
  check_lambda(lambda);
  if (rho.n_modes() != 2) {
    throw std::invalid_argument("povm_element_projector_route: two-mode states only");
  }
  const int da = rho.cutoffs()[0], db = rho.cutoffs()[1];
  const double r = std::atanh(lambda);
  const Vector phi_a = tmsv_vector(r, da).vec;  // on (A, A'), index a*da + a'
  const Vector phi_b = tmsv_vector(r, db).vec;
  const Matrix proj_a = phi_a * phi_a.adjoint();
  const Matrix proj_b = phi_b * phi_b.adjoint();

  // stage 1: contract mode B,  T[(vb? ...)]:
  //   T[va, ua, pb, qb] = sum_{ub, vb} ProjB[(ub, pb), (vb, qb)] rho[(va, vb), (ua, ub)]
  std::vector<Complex> t(static_cast<size_t>(da) * da * db * db, Complex(0, 0));
  auto tix = [&](int va, int ua, int pb, int qb) {
    return ((static_cast<size_t>(va) * da + ua) * db + pb) * db + qb;
  };
  for (int va = 0; va < da; ++va) {
    for (int ua = 0; ua < da; ++ua) {
      for (int pb = 0; pb < db; ++pb) {
        for (int qb = 0; qb < db; ++qb) {
          Complex acc(0, 0);
          for (int ub = 0; ub < db; ++ub) {
            for (int vb = 0; vb < db; ++vb) {
              acc += proj_b(ub * db + pb, vb * db + qb) * rho.matrix()(va * db + vb, ua * db + ub);
            }
          }
          t[tix(va, ua, pb, qb)] = acc;
        }
      }
    }
  }
  // stage 2: contract mode A,
  //   M[(pa, pb), (qa, qb)] = sum_{ua, va} ProjA[(ua, pa), (va, qa)] T[va, ua, pb, qb]
  Matrix m = Matrix::Zero(da * db, da * db);
  for (int pa = 0; pa < da; ++pa) {
    for (int qa = 0; qa < da; ++qa) {
      for (int pb = 0; pb < db; ++pb) {
        for (int qb = 0; qb < db; ++qb) {
          Complex acc(0, 0);
          for (int ua = 0; ua < da; ++ua) {
            for (int va = 0; va < da; ++va) {
              acc += proj_a(ua * da + pa, va * da + qa) * t[tix(va, ua, pb, qb)];
            }
          }
          m(pa * db + pb, qa * db + qb) = acc;
        }
      }
    }
  }
  return FockOperator(rho.cutoffs(), std::move(m));
}

FockOperator multimode_povm_element(const FockOperator& rho, double lambda, int modes_a,
                                    int modes_b) {
  check_lambda(lambda);
  if (modes_a < 1 || modes_b < 1 || modes_a + modes_b != rho.n_modes()) {
    throw std::invalid_argument("multimode_povm_element: partition does not match the state's " +
                                std::to_string(rho.n_modes()) + " modes");
  }
  return povm_element(rho, lambda);
}

namespace {

FockOperator witness_tilde_impl(const FockOperator& witness, double lambda) {
  check_lambda(lambda);
  if (!witness.is_hermitian(1e-12)) {
    throw std::invalid_argument("witness_tilde: witness must be Hermitian");
  }
  int n_max = 0;
  for (int d : witness.cutoffs()) n_max += d - 1;
  if (std::pow(lambda, -n_max) > 1e12) {
    throw std::domain_error(
        "witness_tilde: lambda^{-n_max} exceeds 1e12 at this cutoff; raise lambda toward 1 "
        "(admissible window (e^{-1/N}, 1) for an energy-scale-N witness) or lower the cutoff");
  }
  const Eigen::VectorXd w = quanta_weights(witness, 1.0 / lambda);
  Matrix m = w.asDiagonal() * witness.matrix().transpose() * w.asDiagonal();
  return FockOperator(witness.cutoffs(), std::move(m));
}

}  // namespace

FockOperator witness_tilde(const FockOperator& witness, double lambda) {
  return witness_tilde_impl(witness, lambda);
}

FockOperator witness_tilde_checked(const FockOperator& witness, double lambda,
                                   double energy_scale) {
  if (!(energy_scale > 0.0)) {
    throw std::invalid_argument("witness_tilde_checked: energy scale must be positive");
  }
  const DampingWindow window = damping_factor(energy_scale);
  if (lambda <= window.lambda_min || lambda >= 1.0) {
    throw std::domain_error("witness_tilde_checked: lambda " + std::to_string(lambda) +
                            " outside the admissible window (" +
                            std::to_string(window.lambda_min) + ", 1) for energy scale N = " +
                            std::to_string(energy_scale));
  }
  return witness_tilde_impl(witness, lambda);
}

FockOperator energy_damped(const FockOperator& witness, double energy_scale) {
  if (!(energy_scale > 0.0)) {
    throw std::invalid_argument("energy_damped: energy scale must be positive");
  }
  const Eigen::VectorXd w = quanta_weights(witness, std::exp(-1.0 / energy_scale));
  Matrix m = w.asDiagonal() * witness.matrix() * w.asDiagonal();
  return FockOperator(witness.cutoffs(), std::move(m));
}

DampingWindow damping_factor(double energy_scale) {
  if (!(energy_scale > 0.0)) {
    throw std::invalid_argument("damping_factor: energy scale must be positive");
  }
  DampingWindow w;
  w.lambda_min = std::exp(-1.0 / energy_scale);
  w.lambda_max = 1.0;
  w.factor = 1.0 - std::exp(-2.0 / energy_scale);
  return w;
}

SeparableTransformReport separable_transform_check(std::span<const ProductTerm> terms,
                                                   double lambda, double tol) {
  check_lambda(lambda);
  if (terms.empty()) throw std::invalid_argument("separable_transform_check: no terms");
  double weight_sum = 0.0;
  for (const auto& t : terms) {
    if (t.weight < 0.0) {
      throw std::invalid_argument("separable_transform_check: weights must be non-negative");
    }
    weight_sum += t.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    throw std::invalid_argument("separable_transform_check: weights must sum to 1");
  }

  const auto& first = terms[0];
  FockOperator mixture(
      [&] {
        std::vector<int> cutoffs = first.rho_a.cutoffs();
        cutoffs.insert(cutoffs.end(), first.sigma_b.cutoffs().begin(),
                       first.sigma_b.cutoffs().end());
        return cutoffs;
      }(),
      Matrix::Zero(first.rho_a.dim() * first.sigma_b.dim(),
                   first.rho_a.dim() * first.sigma_b.dim()));
  Matrix mix = mixture.matrix();
  for (const auto& t : terms) mix += t.weight * t.rho_a.tensor(t.sigma_b).matrix();
  const FockOperator rho(mixture.cutoffs(), std::move(mix));
  const FockOperator m_direct = povm_element(rho, lambda);

  SeparableTransformReport report;
  report.min_factor_eigenvalue = 1e300;
  report.min_reverse_eigenvalue = 1e300;
  Matrix combo = Matrix::Zero(m_direct.dim(), m_direct.dim());
  for (const auto& t : terms) {
    // per-side conjugation, prefactor (1-lambda^2) per projected mode
    auto side = [&](const FockOperator& s) {
      const Eigen::VectorXd w = quanta_weights(s, lambda);
      const double pref = std::pow(1.0 - lambda * lambda, s.n_modes());
      return FockOperator(s.cutoffs(),
                          pref * (w.asDiagonal() * s.matrix().transpose() * w.asDiagonal()));
    };
    const FockOperator ma = side(t.rho_a);
    const FockOperator nb = side(t.sigma_b);
    report.min_factor_eigenvalue = std::min({report.min_factor_eigenvalue,
                                             min_eigenvalue_hermitian(ma),
                                             min_eigenvalue_hermitian(nb)});
    // reverse map lambda^{n} (.)^T lambda^{n} must be PSD ("can be seen as states")
    auto reverse = [&](const FockOperator& m) {
      const Eigen::VectorXd w = quanta_weights(m, lambda);
      return FockOperator(m.cutoffs(),
                          Matrix(w.asDiagonal() * m.matrix().transpose() * w.asDiagonal()));
    };
    report.min_reverse_eigenvalue = std::min({report.min_reverse_eigenvalue,
                                              min_eigenvalue_hermitian(reverse(ma)),
                                              min_eigenvalue_hermitian(reverse(nb))});
    combo += t.weight * ma.tensor(nb).matrix();
  }
  report.decomposition_error = (combo - m_direct.matrix()).norm();
  report.passed = report.decomposition_error <= tol &&
                  report.min_factor_eigenvalue >= -1e-10 &&
                  report.min_reverse_eigenvalue >= -1e-10;
  return report;
}

P11Result p11_statistic(const FockOperator& rho, double r, Complex alpha, Complex beta,
                        double consistency_tol) {
  if (rho.n_modes() != 2) throw std::invalid_argument("p11_statistic: two-mode states only");
  const double lambda = std::tanh(r);
  check_lambda(lambda);
  const int da = rho.cutoffs()[0], db = rho.cutoffs()[1];
  if (std::pow(lambda, 2 * std::min(da, db)) >= 1e-12) {
    throw std::invalid_argument(
        "p11_statistic: cutoff too small for this squeezing (need lambda^{2 cutoff} < 1e-12)");
  }
  if (coherent_deficit(alpha, da) > 1e-10 || coherent_deficit(beta, db) > 1e-10) {
    throw std::invalid_argument(
        "p11_statistic: coherent probe truncation deficit exceeds 1e-10 at this cutoff");
  }
  const Vector va = coherent_vector(alpha, da);
  const Vector vb = coherent_vector(beta, db);

  // route 1: conjugated-state POVM element
  const FockOperator m = povm_element(rho, lambda);
  Vector probe(da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < db; ++j) probe(i * db + j) = va(i) * vb(j);
  }
  const double p_conj = (probe.adjoint() * m.matrix() * probe)(0, 0).real();

  // route 2: explicit projectors, tracing the probe side of each pair
  auto probe_factor = [&](int d, const Vector& probe_vec) {
    const Vector phi = tmsv_vector(r, d).vec;
    const Matrix proj = phi * phi.adjoint();  // on (mode, probe), index m*d + p
    Matrix f = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        Complex acc(0, 0);
        for (int p = 0; p < d; ++p) {
          for (int q = 0; q < d; ++q) {
            acc += proj(i * d + p, j * d + q) * probe_vec(q) * std::conj(probe_vec(p));
          }
        }
        f(i, j) = acc;
      }
    }
    return f;
  };
  const Matrix fa = probe_factor(da, va);
  const Matrix fb = probe_factor(db, vb);
  Matrix fab(da * db, da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) fab.block(i * db, j * db, db, db) = fa(i, j) * fb;
  }
  const double p_proj = (rho.matrix() * fab).trace().real();

  if (std::abs(p_conj - p_proj) > consistency_tol) {
    throw std::runtime_error("p11_statistic: computation routes disagree by " +
                             std::to_string(std::abs(p_conj - p_proj)));
  }
  P11Result out;
  out.via_conjugation = p_conj;
  out.via_projectors = p_proj;
  out.value = p_conj;
  return out;
}

namespace {

// orthonormal Hermitian basis index helpers: d diagonal units, then
// (real, imag) pairs for i < j
int hermitian_basis_size(int d) { return d * d; }

void apply_basis_coeffs(const Eigen::VectorXd& coeffs, Matrix& out) {
  const int d = static_cast<int>(out.rows());
  out.setZero();
  int k = 0;
  for (int i = 0; i < d; ++i) out(i, i) = coeffs(k++);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      out(i, j) += coeffs(k) * inv_sqrt2;
      out(j, i) += coeffs(k) * inv_sqrt2;
      ++k;
      out(i, j) += Complex(0, 1) * coeffs(k) * inv_sqrt2;
      out(j, i) += Complex(0, -1) * coeffs(k) * inv_sqrt2;
      ++k;
    }
  }
}

// row of <v| B_k |v> over the Hermitian basis
Eigen::VectorXd design_row(const Vector& v) {
  const int d = static_cast<int>(v.size());
  Eigen::VectorXd row(hermitian_basis_size(d));
  int k = 0;
  for (int i = 0; i < d; ++i) row(k++) = std::norm(v(i));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Complex cross = std::conj(v(i)) * v(j);
      row(k++) = 2.0 * inv_sqrt2 * cross.real();
      row(k++) = -2.0 * inv_sqrt2 * cross.imag();
    }
  }
  return row;
}

}  // namespace

TomographyGrid make_tomography_grid(const FockOperator& m, int points_per_side, double extent) {
  if (m.n_modes() != 2) throw std::invalid_argument("make_tomography_grid: two-mode POVM only");
  if (points_per_side < 2) throw std::invalid_argument("make_tomography_grid: need >= 2 points");
  TomographyGrid grid;
  for (int i = 0; i < points_per_side; ++i) {
    for (int j = 0; j < points_per_side; ++j) {
      const double re = -extent + 2.0 * extent * i / (points_per_side - 1);
      const double im = -extent + 2.0 * extent * j / (points_per_side - 1);
      grid.alphas.emplace_back(re, im);
    }
  }
  grid.betas = grid.alphas;
  const int da = m.cutoffs()[0], db = m.cutoffs()[1];
  grid.p11.resize(static_cast<Eigen::Index>(grid.alphas.size()),
                  static_cast<Eigen::Index>(grid.betas.size()));
  std::vector<Vector> va, vb;
  for (const Complex& a : grid.alphas) va.push_back(coherent_vector(a, da));
  for (const Complex& b : grid.betas) vb.push_back(coherent_vector(b, db));
  for (size_t i = 0; i < grid.alphas.size(); ++i) {
    for (size_t j = 0; j < grid.betas.size(); ++j) {
      Vector probe(da * db);
      for (int x = 0; x < da; ++x) {
        for (int y = 0; y < db; ++y) probe(x * db + y) = va[i](x) * vb[j](y);
      }
      grid.p11(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (probe.adjoint() * m.matrix() * probe)(0, 0).real();
    }
  }
  return grid;
}

Reconstruction reconstruct_povm(const TomographyGrid& grid, std::vector<int> cutoffs) {
  if (cutoffs.size() != 2) throw std::invalid_argument("reconstruct_povm: two-mode POVM only");
  const int da = cutoffs[0], db = cutoffs[1];
  const int dim = da * db;
  const int unknowns = hermitian_basis_size(dim);
  const Eigen::Index rows =
      static_cast<Eigen::Index>(grid.alphas.size()) * static_cast<Eigen::Index>(grid.betas.size());
  if (rows < unknowns) {
    throw std::invalid_argument("reconstruct_povm: underdetermined grid (" + std::to_string(rows) +
                                " probes for " + std::to_string(unknowns) + " unknowns)");
  }
  for (Eigen::Index i = 0; i < grid.p11.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.p11.cols(); ++j) {
      const double p = grid.p11(i, j);
      if (!(p >= -1e-9 && p <= 1.0 + 1e-9)) {
        throw std::invalid_argument("reconstruct_povm: probability entry outside [0, 1]");
      }
    }
  }

  Eigen::MatrixXd design(rows, unknowns);
  Eigen::VectorXd target(rows);
  Eigen::Index row = 0;
  for (size_t i = 0; i < grid.alphas.size(); ++i) {
    const Vector va = coherent_vector(grid.alphas[i], da);
    for (size_t j = 0; j < grid.betas.size(); ++j) {
      const Vector vb = coherent_vector(grid.betas[j], db);
      Vector probe(dim);
      for (int x = 0; x < da; ++x) {
        for (int y = 0; y < db; ++y) probe(x * db + y) = va(x) * vb(y);
      }
      design.row(row) = design_row(probe);
      target(row) = grid.p11(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      ++row;
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double condition = sv(0) / sv(sv.size() - 1);
  if (!(condition < 1e12)) {
    throw std::runtime_error("reconstruct_povm: design condition number " +
                             std::to_string(condition) + " exceeds 1e12");
  }
  const double ridge = grid.ridge_weight * sv(0);
  Eigen::VectorXd uy = svd.matrixU().transpose() * target;
  Eigen::VectorXd shrunk(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    shrunk(k) = sv(k) / (sv(k) * sv(k) + ridge * ridge) * uy(k);
  }
  const Eigen::VectorXd coeffs = svd.matrixV() * shrunk;

  Matrix m(dim, dim);
  apply_basis_coeffs(coeffs, m);
  Reconstruction out{FockOperator(std::move(cutoffs), std::move(m)), 0.0, condition};
  out.residual = (design * coeffs - target).norm();
  return out;
}

HeterodyneEstimate heterodyne_vacuum_projection(const FockOperator& rho_single_mode,
                                                double radius, std::uint64_t samples,
                                                RngStream& rng) {
  if (rho_single_mode.n_modes() != 1) {
    throw std::invalid_argument("heterodyne_vacuum_projection: single-mode states only");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("heterodyne_vacuum_projection: radius must be positive");
  }
  if (samples == 0) {
    throw std::invalid_argument("heterodyne_vacuum_projection: need at least one sample");
  }
  require_density_matrix(rho_single_mode, "heterodyne_vacuum_projection");
  const int d = rho_single_mode.dim();
  const Matrix& rho = rho_single_mode.matrix();
  // rejection sampling of the Husimi distribution: uniform proposals on a
  // disc that contains essentially all of the truncated state's Q mass,
  // acceptance probability pi * Q(beta) <= 1
  const double big_r = std::sqrt(static_cast<double>(d)) + 5.0;
  auto husimi_pi = [&](Complex beta) {
    const Vector v = coherent_vector(beta, d);
    return std::max(0.0, (v.adjoint() * rho * v)(0, 0).real());  // = pi * Q(beta)
  };
  std::uint64_t hits = 0, proposals = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Complex beta;
    for (;;) {
      ++proposals;
      const double x = big_r * (2.0 * rng.uniform01() - 1.0);
      const double y = big_r * (2.0 * rng.uniform01() - 1.0);
      if (x * x + y * y > big_r * big_r) continue;
      beta = Complex(x, y);
      if (rng.uniform01() < husimi_pi(beta)) break;
    }
    if (std::norm(beta) < radius * radius) ++hits;
  }
  HeterodyneEstimate est;
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  est.estimate = frac / (radius * radius);
  est.std_error = std::sqrt(std::max(frac * (1.0 - frac), 1e-300) /
                            static_cast<double>(samples)) / (radius * radius);
  est.bias_bound = radius * radius * static_cast<double>(d);
  est.proposals = proposals;
  return est;
}

FockOperator duan_fock_witness(double kappa, int cutoff) {
  if (!(kappa > 0.0)) throw std::invalid_argument("duan_fock_witness: kappa must be positive");
  if (cutoff < 2) throw std::invalid_argument("duan_fock_witness: cutoff must be >= 2");
  const Matrix a = annihilation(cutoff);
  const Matrix x = (a + a.adjoint()) / 2.0;
  const Matrix p = (a - a.adjoint()) / Complex(0, 2);
  const Matrix id = Matrix::Identity(cutoff, cutoff);
  auto kron = [&](const Matrix& l, const Matrix& r) {
    Matrix m(l.rows() * r.rows(), l.cols() * r.cols());
    for (int i = 0; i < l.rows(); ++i) {
      for (int j = 0; j < l.cols(); ++j) {
        m.block(i * r.rows(), j * r.cols(), r.rows(), r.cols()) = l(i, j) * r;
      }
    }
    return m;
  };
  const Matrix u = kappa * kron(x, id) - kron(id, x) / kappa;
  const Matrix v = kappa * kron(p, id) + kron(id, p) / kappa;
  const double bound = (kappa * kappa + 1.0 / (kappa * kappa)) / 2.0;
  Matrix w = u * u + v * v - bound * Matrix::Identity(cutoff * cutoff, cutoff * cutoff);
  return FockOperator({cutoff, cutoff}, std::move(w));
}

FockOperator random_density(std::vector<int> cutoffs, RngStream& rng, int rank) {
  const int d = total_dim(cutoffs);
  const int k = rank > 0 ? rank : d;
  Matrix g(d, k);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < k; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  return FockOperator(std::move(cutoffs), std::move(rho));
}

FockOperator random_hermitian(std::vector<int> cutoffs, RngStream& rng) {
  const int d = total_dim(cutoffs);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  Matrix h = (g + g.adjoint()) / 2.0;
  h /= std::max(1.0, h.norm() / static_cast<double>(d));
  return FockOperator(std::move(cutoffs), std::move(h));
}

std::vector<ProductTerm> random_separable_terms(int cutoff_a, int cutoff_b, int terms,
                                                RngStream& rng) {
  if (terms < 1) throw std::invalid_argument("random_separable_terms: need at least one term");
  std::vector<double> w(static_cast<size_t>(terms));
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.uniform01());
    total += x;
  }
  std::vector<ProductTerm> out;
  out.reserve(static_cast<size_t>(terms));
  for (int t = 0; t < terms; ++t) {
    out.push_back({w[static_cast<size_t>(t)] / total,
                   random_density({cutoff_a}, rng),
                   random_density({cutoff_b}, rng)});
  }
  return out;
}

}  // namespace mdiew::fock
