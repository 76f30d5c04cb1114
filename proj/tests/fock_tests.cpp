#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "mdiew/fock.hpp"
#include "mdiew/fock_verify.hpp"

using namespace mdiew;
using namespace mdiew::fock;

namespace {

Matrix kron(const Matrix& l, const Matrix& r) {
  Matrix m(l.rows() * r.rows(), l.cols() * r.cols());
  for (int i = 0; i < l.rows(); ++i) {
    for (int j = 0; j < l.cols(); ++j) {
      m.block(i * r.rows(), j * r.cols(), r.rows(), r.cols()) = l(i, j) * r;
    }
  }
  return m;
}

FockOperator basis_state(const std::vector<int>& cutoffs, int index) {
  int dim = 1;
  for (int d : cutoffs) dim *= d;
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return FockOperator::from_vector(cutoffs, v);
}

}  // namespace

TEST_CASE("tmsv vector") {
  const TruncatedTmsv zero = tmsv_vector(0.0, 6);
  CHECK(std::abs(zero.vec(0) - Complex(1, 0)) < 1e-15);
  CHECK(zero.vec.tail(35).norm() < 1e-15);
  CHECK(zero.deficit == doctest::Approx(0.0));

  const double r = 0.5;
  const TruncatedTmsv t = tmsv_vector(r, 12);
  // coefficient ratio |11> / |00> equals tanh r
  CHECK(std::abs(t.vec(13) / t.vec(0)) == doctest::Approx(std::tanh(r)).epsilon(1e-12));
  CHECK(t.vec.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t.deficit > 0.0);
  CHECK(t.deficit < 1e-6);

  CHECK_THROWS_AS(tmsv_vector(0.5, 0), std::invalid_argument);
}

TEST_CASE("tmsv vector matches the squeezer + beam-splitter construction") {
  // oracle: matrix exponentials of the truncated generators; the balanced
  // mixing that sends x1 -> (x1+x2)/sqrt2, x2 -> (x1-x2)/sqrt2 is a rotation
  // followed by a parity flip of the second mode
  const int d = 18;
  const double r = 0.5;
  const Matrix a = annihilation(d);
  const Matrix id = Matrix::Identity(d, d);
  const Matrix squeeze_gen = 0.5 * (a.adjoint() * a.adjoint() - a * a);
  const Matrix s_plus = (r * squeeze_gen).exp();
  const Matrix s_minus = (-r * squeeze_gen).exp();
  const Matrix a1 = kron(a, id), a2 = kron(id, a);
  const Matrix bs = ((std::numbers::pi / 4.0) *
                     (a1.adjoint() * a2 - a1 * a2.adjoint())).exp();
  Eigen::VectorXd parity(d);
  for (int n = 0; n < d; ++n) parity(n) = (n % 2 == 0) ? 1.0 : -1.0;
  const Matrix p2 = kron(id, Matrix(parity.cast<Complex>().asDiagonal()));

  Vector psi0 = Vector::Zero(d * d);
  psi0(0) = 1.0;
  const Vector built = p2 * bs * kron(s_plus, s_minus) * psi0;
  const Vector series = tmsv_vector(r, d).vec;
  CHECK(std::abs((series.adjoint() * built)(0, 0)) > 1.0 - 1e-6);
}

TEST_CASE("povm element closed form") {
  const double lambda = 0.5;
  // vacuum is invariant under the photon-number conjugation
  const FockOperator vac = basis_state({4, 4}, 0);
  const FockOperator mv = povm_element(vac, lambda);
  const double pref = std::pow(1 - lambda * lambda, 2);
  CHECK(std::abs(mv.matrix()(0, 0) - pref) < 1e-14);
  CHECK(mv.matrix().norm() == doctest::Approx(pref).epsilon(1e-12));

  // |11><11| picks up lambda^4
  const FockOperator one_one = basis_state({4, 4}, 1 * 4 + 1);
  const FockOperator m11 = povm_element(one_one, lambda);
  const int idx = 1 * 4 + 1;
  CHECK(std::abs(m11.matrix()(idx, idx) - pref * std::pow(lambda, 4)) < 1e-14);

  // PSD with eigenvalues below 1
  RngStream rng(1, 0);
  const FockOperator rho = random_density({5, 5}, rng);
  const FockOperator m = povm_element(rho, 0.6);
  CHECK(min_eigenvalue_hermitian(m) > -1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().maxCoeff() <= 1.0);

  CHECK_THROWS_AS(povm_element(rho, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(povm_element(rho, 1.0), std::invalid_argument);
}

TEST_CASE("projector route agrees with the conjugation closed form") {
  const double lambda = std::tanh(0.4);
  RngStream rng(2, 0);
  for (int inst = 0; inst < 5; ++inst) {
    const FockOperator rho = random_density({10, 10}, rng);
    const FockOperator closed = povm_element(rho, lambda);
    const FockOperator brute = povm_element_projector_route(rho, lambda);
    CHECK((closed.matrix() - brute.matrix()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("witness transform and trace identity") {
  const double lambda = 0.5;
  // identity maps to the diagonal lambda^{-2(nA+nB)}
  const FockOperator id = FockOperator::identity({3, 3});
  const FockOperator idt = witness_tilde(id, lambda);
  for (int i = 0; i < 9; ++i) {
    const int quanta = id.total_quanta(i);
    CHECK(std::abs(idt.matrix()(i, i) - std::pow(lambda, -2 * quanta)) < 1e-10);
  }

  RngStream rng(3, 0);
  for (double lam : {0.3, 0.5, 0.7}) {
    for (int cutoff : {6, 8, 10}) {
      for (int inst = 0; inst < 6; ++inst) {
        const FockOperator rho = random_density({cutoff, cutoff}, rng);
        const FockOperator w = random_hermitian({cutoff, cutoff}, rng);
        const FockOperator m = povm_element(rho, lam);
        const FockOperator wt = witness_tilde(w, lam);
        const double lhs = (m.matrix() * wt.matrix()).trace().real();
        const double rhs =
            std::pow(1 - lam * lam, 2) * (rho.matrix() * w.matrix()).trace().real();
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
      }
    }
  }

  // congruences preserve positivity
  const FockOperator psd = random_density({5, 5}, rng);
  CHECK(min_eigenvalue_hermitian(povm_element(psd, 0.4)) >= -1e-12);
  const FockOperator psd_scaled = FockOperator({5, 5}, psd.matrix());
  CHECK(min_eigenvalue_hermitian(witness_tilde(psd_scaled, 0.7)) >= -1e-10);

  // overflow guard: tiny lambda at a sizable cutoff is rejected
  const FockOperator w_big = random_hermitian({10, 10}, rng);
  CHECK_THROWS_AS(witness_tilde(w_big, 0.2), std::domain_error);
}

TEST_CASE("energy window for the transformed witness") {
  RngStream rng(4, 0);
  const FockOperator base = random_hermitian({5, 5}, rng);
  for (double n_scale : {1.0, 3.0, 10.0}) {
    const FockOperator w = energy_damped(base, n_scale);
    const DampingWindow window = damping_factor(n_scale);
    const double inside = std::min(0.5 * (window.lambda_min + 1.0), 0.999);
    CHECK_NOTHROW(witness_tilde_checked(w, inside, n_scale));
    CHECK_THROWS_AS(witness_tilde_checked(w, window.lambda_min * 0.9, n_scale),
                    std::domain_error);
    CHECK_THROWS_AS(witness_tilde_checked(w, window.lambda_min, n_scale), std::domain_error);
  }

  const DampingWindow w1 = damping_factor(1.0);
  CHECK(w1.lambda_min == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(w1.factor == doctest::Approx(0.864664716763387).epsilon(1e-12));
  const DampingWindow w100 = damping_factor(100.0);
  CHECK(w100.factor == doctest::Approx(0.0198013266932447).epsilon(1e-10));
  CHECK(std::abs(w100.factor - 0.02) / 0.02 < 0.01);
  CHECK_THROWS_AS(damping_factor(0.0), std::invalid_argument);
}

TEST_CASE("separable transform check") {
  RngStream rng(5, 0);
  // single pure product term factorizes exactly
  {
    std::vector<ProductTerm> terms;
    terms.push_back({1.0, random_density({4}, rng, 1), random_density({4}, rng, 1)});
    const SeparableTransformReport rep = separable_transform_check(terms, 0.6);
    CHECK(rep.passed);
    CHECK(rep.decomposition_error < 1e-12);
  }
  // random mixtures
  for (int inst = 0; inst < 10; ++inst) {
    const auto terms = random_separable_terms(6, 6, 3, rng);
    const SeparableTransformReport rep = separable_transform_check(terms, 0.6);
    CHECK(rep.passed);
    CHECK(rep.decomposition_error <= 1e-10);
    CHECK(rep.min_factor_eigenvalue >= -1e-10);
    CHECK(rep.min_reverse_eigenvalue >= -1e-10);
  }
  // invalid weights
  std::vector<ProductTerm> bad;
  bad.push_back({0.7, random_density({3}, rng), random_density({3}, rng)});
  CHECK_THROWS_AS(separable_transform_check(bad, 0.5), std::invalid_argument);
}

TEST_CASE("partial transpose sign is preserved") {
  RngStream rng(6, 0);
  int npt = 0, ppt = 0;
  for (int inst = 0; inst < 100; ++inst) {
    FockOperator rho = random_density({3, 3}, rng, 1 + static_cast<int>(rng.next_u64() % 9));
    if (inst % 2 == 1) {
      Matrix m = 0.35 * rho.matrix() + 0.65 * Matrix::Identity(9, 9) / 9.0;
      rho = FockOperator({3, 3}, std::move(m));
    }
    const double before = min_eigenvalue_hermitian(rho.partial_transpose_b());
    const double after = min_eigenvalue_hermitian(povm_element(rho, 0.55).partial_transpose_b());
    if (before < -1e-12) {
      ++npt;
      CHECK(after < 0.0);
    } else {
      ++ppt;
      CHECK(after >= -1e-12);
    }
  }
  CHECK(npt > 10);
  CHECK(ppt > 10);
}

TEST_CASE("p11 statistic") {
  const double r = 0.4;
  const double lambda = std::tanh(r);
  // vacuum state probed at the origin
  const FockOperator vac = basis_state({15, 15}, 0);
  const P11Result p0 = p11_statistic(vac, r, {0, 0}, {0, 0});
  CHECK(p0.value == doctest::Approx(std::pow(1 - lambda * lambda, 2)).epsilon(1e-9));

  // the origin probe reads off the vacuum element of rho^T
  RngStream rng(7, 0);
  const FockOperator rho = random_density({15, 15}, rng);
  const P11Result pr = p11_statistic(rho, r, {0, 0}, {0, 0});
  CHECK(pr.value == doctest::Approx(std::pow(1 - lambda * lambda, 2) *
                                    rho.matrix()(0, 0).real()).epsilon(1e-9));

  // the two routes agree on random inputs and displaced probes
  for (int inst = 0; inst < 5; ++inst) {
    const FockOperator s = random_density({12, 12}, rng);
    const P11Result p = p11_statistic(s, 0.3, {0.4, -0.2}, {-0.3, 0.1});
    CHECK(p.via_conjugation == doctest::Approx(p.via_projectors).epsilon(1e-8));
    CHECK(p.value >= 0.0);
    CHECK(p.value <= 1.0);
  }

  // inadequate cutoffs are rejected: squeezing too deep for the basis, and
  // probe amplitude too large for the basis
  CHECK_THROWS_AS(p11_statistic(basis_state({4, 4}, 0), 0.4, {0, 0}, {0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(p11_statistic(basis_state({12, 12}, 0), 0.3, {3.0, 0.0}, {0, 0}),
                  std::invalid_argument);
}

TEST_CASE("three-mode povm element and trace identity") {
  const double lambda = 0.45;
  RngStream rng(8, 0);

  // 3-mode vacuum picks up the cubed prefactor
  const FockOperator vac3 = basis_state({3, 3, 3}, 0);
  const FockOperator m3 = multimode_povm_element(vac3, lambda, 2, 1);
  CHECK(std::abs(m3.matrix()(0, 0) - std::pow(1 - lambda * lambda, 3)) < 1e-14);

  // trace identity with the cubed prefactor
  for (int inst = 0; inst < 10; ++inst) {
    const FockOperator rho = random_density({3, 3, 3}, rng);
    const FockOperator w = random_hermitian({3, 3, 3}, rng);
    const FockOperator m = multimode_povm_element(rho, lambda, 2, 1);
    const FockOperator wt = witness_tilde(w, lambda);
    const double lhs = (m.matrix() * wt.matrix()).trace().real();
    const double rhs = std::pow(1 - lambda * lambda, 3) *
                       (rho.matrix() * w.matrix()).trace().real();
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
  }

  // brute-force oracle at small cutoff: contract three explicit projectors
  // (raw series coefficients; renormalizing would shift the comparison by
  // the truncation deficit at this small cutoff)
  {
    const int d = 3;
    const FockOperator rho = random_density({d, d, d}, rng);
    Vector phi = Vector::Zero(d * d);
    for (int i = 0; i < d; ++i) phi(i * d + i) = std::sqrt(1 - lambda * lambda) * std::pow(lambda, i);
    const Matrix proj = phi * phi.adjoint();
    Matrix brute = Matrix::Zero(d * d * d, d * d * d);
    for (int p1 = 0; p1 < d; ++p1)
    for (int p2 = 0; p2 < d; ++p2)
    for (int p3 = 0; p3 < d; ++p3)
    for (int q1 = 0; q1 < d; ++q1)
    for (int q2 = 0; q2 < d; ++q2)
    for (int q3 = 0; q3 < d; ++q3) {
      Complex acc(0, 0);
      for (int u1 = 0; u1 < d; ++u1)
      for (int u2 = 0; u2 < d; ++u2)
      for (int u3 = 0; u3 < d; ++u3)
      for (int v1 = 0; v1 < d; ++v1)
      for (int v2 = 0; v2 < d; ++v2)
      for (int v3 = 0; v3 < d; ++v3) {
        acc += proj(u1 * d + p1, v1 * d + q1) * proj(u2 * d + p2, v2 * d + q2) *
               proj(u3 * d + p3, v3 * d + q3) *
               rho.matrix()((v1 * d + v2) * d + v3, (u1 * d + u2) * d + u3);
      }
      brute((p1 * d + p2) * d + p3, (q1 * d + q2) * d + q3) = acc;
    }
    const FockOperator closed = multimode_povm_element(rho, lambda, 2, 1);
    CHECK((closed.matrix() - brute).cwiseAbs().maxCoeff() < 1e-8);
  }

  // separable-across-partition states give factorized PSD terms
  {
    const FockOperator rho_a = random_density({3, 3}, rng);
    const FockOperator sigma_b = random_density({3}, rng);
    const FockOperator prod = rho_a.tensor(sigma_b);
    const FockOperator m = multimode_povm_element(prod, lambda, 2, 1);
    const FockOperator ma = multimode_povm_element(rho_a, lambda, 1, 1);
    const FockOperator mb = povm_element(sigma_b, lambda);
    CHECK((m.matrix() - ma.tensor(mb).matrix()).norm() < 1e-12);
    CHECK(min_eigenvalue_hermitian(ma) >= -1e-12);
    CHECK(min_eigenvalue_hermitian(mb) >= -1e-12);
  }

  CHECK_THROWS_AS(multimode_povm_element(vac3, lambda, 1, 1), std::invalid_argument);
}

TEST_CASE("truncation convergence of the trace identity against exact values") {
  // rho: ideal TMSV; W: diagonal e^{-n_tot}; both have closed-form traces,
  // and the residual of the truncated identity shrinks with the cutoff
  const double r_rho = 0.8;
  const double lr = std::tanh(r_rho);
  const double lambda = 0.5;
  const double alpha = 1.0;
  const double exact = (1.0 - lr * lr) / (1.0 - lr * lr * std::exp(-2.0 * alpha));
  double prev = 1e300;
  for (int cutoff : {6, 8, 10}) {
    Vector phi = Vector::Zero(cutoff * cutoff);
    for (int i = 0; i < cutoff; ++i) phi(i * cutoff + i) = std::pow(lr, i);
    phi /= phi.norm();
    const FockOperator rho = FockOperator::from_vector({cutoff, cutoff}, phi);
    Matrix wdiag = Matrix::Zero(cutoff * cutoff, cutoff * cutoff);
    for (int i = 0; i < cutoff * cutoff; ++i) {
      wdiag(i, i) = std::exp(-alpha * rho.total_quanta(i));
    }
    const FockOperator w = FockOperator({cutoff, cutoff}, std::move(wdiag));
    const FockOperator m = povm_element(rho, lambda);
    const FockOperator wt = witness_tilde(w, lambda);
    const double lhs = (m.matrix() * wt.matrix()).trace().real();
    const double residual =
        std::abs(lhs - std::pow(1 - lambda * lambda, 2) * exact);
    CHECK(residual <= prev * 1.1);
    prev = residual;
  }
}

TEST_CASE("heterodyne vacuum projection") {
  RngStream rng(9, 0);
  // vacuum: estimate -> 1 with a -radius^2/2 bias
  {
    const FockOperator vac = basis_state({6}, 0);
    const HeterodyneEstimate est = heterodyne_vacuum_projection(vac, 0.05, 400000, rng);
    CHECK(std::abs(est.estimate - 1.0) < 0.02 + 3.0 * est.std_error);
  }
  // one photon: the Husimi density vanishes at the origin
  {
    const FockOperator one = basis_state({6}, 1);
    const HeterodyneEstimate est = heterodyne_vacuum_projection(one, 0.1, 100000, rng);
    CHECK(est.estimate < 0.02);
  }
  // random states against the exact matrix element
  for (int inst = 0; inst < 3; ++inst) {
    const FockOperator rho = random_density({5}, rng);
    const HeterodyneEstimate est = heterodyne_vacuum_projection(rho, 0.08, 200000, rng);
    const double truth = rho.matrix()(0, 0).real();
    CHECK(std::abs(est.estimate - truth) <= est.bias_bound + 3.0 * est.std_error);
  }
  CHECK_THROWS_AS(heterodyne_vacuum_projection(basis_state({4}, 0), -0.1, 10, rng),
                  std::invalid_argument);
}

TEST_CASE("tomographic reconstruction") {
  RngStream rng(10, 0);
  const FockOperator rho = random_density({3, 3}, rng);
  const double lambda = std::tanh(0.4);
  const FockOperator m = povm_element(rho, lambda);
  const TomographyGrid grid = make_tomography_grid(m, 8, std::sqrt(2.0));
  const Reconstruction rec = reconstruct_povm(grid, {3, 3});
  CHECK((rec.m_hat.matrix() - m.matrix()).norm() <= 1e-6);
  CHECK(rec.condition < 1e4);

  // the reconstructed element still detects the source state through the
  // transformed witness
  {
    const int d = 3;
    Vector phi = Vector::Zero(d * d);
    for (int i = 0; i < d; ++i) phi(i * d + i) = std::pow(lambda, i);
    phi /= phi.norm();
    const FockOperator tmsv_rho = FockOperator::from_vector({d, d}, phi);
    const FockOperator m_tmsv = povm_element(tmsv_rho, lambda);
    const Reconstruction rec2 =
        reconstruct_povm(make_tomography_grid(m_tmsv, 8, std::sqrt(2.0)), {d, d});
    const FockOperator w = duan_fock_witness(1.0, d);
    const FockOperator wt = witness_tilde(w, lambda);
    CHECK((rec2.m_hat.matrix() * wt.matrix()).trace().real() < 0.0);
  }

  // one probe pair is underdetermined
  TomographyGrid tiny;
  tiny.alphas = {{0.3, 0.0}};
  tiny.betas = {{0.0, 0.2}};
  tiny.p11 = Eigen::MatrixXd::Constant(1, 1, 0.5);
  CHECK_THROWS_AS(reconstruct_povm(tiny, {3, 3}), std::invalid_argument);
}

TEST_CASE("verification suite") {
  VerifyConfig cfg;
  cfg.cutoff = 6;
  cfg.instances = 5;
  cfg.lambda = 0.5;
  cfg.energy_scale = 1.0;
  cfg.seed = 12;
  cfg.with_tomography = true;
  const VerifyReport report = run_fock_verification(cfg);
  CHECK(report.all_passed);
  CHECK(report.checks.size() == 7);
  for (const auto& c : report.checks) CHECK(c.passed);

  // inadmissible window: lambda below e^{-1/N}
  VerifyConfig bad = cfg;
  bad.energy_scale = 10.0;
  bad.lambda = 0.3;
  CHECK_THROWS_AS(run_fock_verification(bad), std::invalid_argument);

  const std::string json = verify_report_to_json(report);
  CHECK(json.find("\"all_passed\": true") != std::string::npos);
}
