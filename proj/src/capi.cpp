#include "mdiew.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <functional>
#include <new>
#include <string>
#include <vector>

#include "mdiew/fock_verify.hpp"
#include "mdiew/gaussian.hpp"
#include "mdiew/io.hpp"
#include "mdiew/prior.hpp"
#include "mdiew/sampler.hpp"
#include "mdiew/witness.hpp"

struct mdiew_state {
  mdiew::GaussianState value;
};

struct mdiew_batch {
  mdiew::BatchResult result;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg; }

mdiew_status run(mdiew_status failure_code, const std::function<void()>& body) {
  try {
    body();
    return MDIEW_OK;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return MDIEW_ERR_INVALID_ARGUMENT;
  } catch (const std::domain_error& e) {
    set_error(e.what());
    return MDIEW_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return failure_code;
  } catch (const std::exception& e) {
    set_error(e.what());
    return failure_code;
  } catch (...) {
    set_error("unknown error");
    return failure_code;
  }
}

mdiew_status run(const std::function<void()>& body) { return run(MDIEW_ERR_COMPUTE, body); }

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mdiew::PriorSpec prior_from_config(const mdiew_sim_config& cfg) {
  switch (cfg.prior_kind) {
    case MDIEW_PRIOR_GAUSSIAN:
      return mdiew::PriorSpec::gaussian(cfg.sigma);
    case MDIEW_PRIOR_SMOOTH_BOX:
      return mdiew::PriorSpec::smooth_box(cfg.box_l, cfg.box_delta);
  }
  throw std::invalid_argument("unknown prior kind");
}

void fill_score(const mdiew::ScoreReport& r, mdiew_score* out) {
  out->score = r.score;
  out->std_error = r.std_error;
  out->bound = r.bound;
  out->kappa = r.kappa;
  out->sigma = r.sigma;
  out->entangled_certified = r.entangled_certified ? 1 : 0;
}

mdiew::ScoreReport to_report(const mdiew_score& s) {
  mdiew::ScoreReport r;
  r.score = s.score;
  r.std_error = s.std_error;
  r.bound = s.bound;
  r.kappa = s.kappa;
  r.sigma = s.sigma;
  r.entangled_certified = s.entangled_certified != 0;
  return r;
}

std::vector<mdiew::MdiSample> samples_from_rows(const double* rows, uint64_t trials) {
  std::vector<mdiew::MdiSample> samples(trials);
  for (uint64_t i = 0; i < trials; ++i) {
    const double* p = rows + 8 * i;
    samples[i] = {p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7]};
  }
  return samples;
}

}  // namespace

extern "C" {

const char* mdiew_status_name(mdiew_status status) {
  switch (status) {
    case MDIEW_OK: return "ok";
    case MDIEW_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case MDIEW_ERR_COMPUTE: return "compute-error";
    case MDIEW_ERR_IO: return "io-error";
    case MDIEW_ERR_VERIFICATION: return "verification-failed";
  }
  return "unknown";
}

const char* mdiew_last_error(void) { return g_last_error.c_str(); }

const char* mdiew_version(void) { return "0.1.0"; }

void mdiew_string_free(char* text) { delete[] text; }

mdiew_status mdiew_state_vacuum(int n_modes, mdiew_state** out) {
  return run([&] { *out = new mdiew_state{mdiew::vacuum(n_modes)}; });
}

mdiew_status mdiew_state_coherent(double alpha_x, double alpha_p, mdiew_state** out) {
  return run([&] { *out = new mdiew_state{mdiew::coherent(alpha_x, alpha_p)}; });
}

mdiew_status mdiew_state_tmsv(double r, mdiew_state** out) {
  return run([&] { *out = new mdiew_state{mdiew::tmsv(r)}; });
}

mdiew_status mdiew_state_tensor(const mdiew_state* a, const mdiew_state* b, mdiew_state** out) {
  return run([&] { *out = new mdiew_state{a->value.tensor(b->value)}; });
}

mdiew_status mdiew_state_restrict(const mdiew_state* state, const int* modes, int n_modes,
                                  mdiew_state** out) {
  return run([&] {
    std::vector<int> subset(modes, modes + n_modes);
    *out = new mdiew_state{state->value.restrict_modes(subset)};
  });
}

mdiew_status mdiew_state_beam_splitter(mdiew_state* state, int mode_i, int mode_j,
                                       int sign_convention) {
  return run([&] {
    const auto conv = sign_convention == 0 ? mdiew::SymplecticMap::BsConvention::sum_diff
                                           : mdiew::SymplecticMap::BsConvention::diff_sum;
    state->value = mdiew::beam_splitter_50_50(state->value, mode_i, mode_j, conv);
  });
}

mdiew_status mdiew_state_squeeze(mdiew_state* state, int mode, double r) {
  return run([&] { state->value = mdiew::squeeze_single_mode(state->value, mode, r); });
}

mdiew_status mdiew_state_apply_loss(mdiew_state* state, int mode, double eta) {
  return run([&] { state->value = mdiew::apply_loss(state->value, {mode, eta}); });
}

int mdiew_state_n_modes(const mdiew_state* state) { return state->value.n_modes(); }

mdiew_status mdiew_state_get_mean(const mdiew_state* state, double* mean) {
  return run([&] {
    const auto& m = state->value.mean();
    for (int i = 0; i < m.size(); ++i) mean[i] = m(i);
  });
}

mdiew_status mdiew_state_get_cov(const mdiew_state* state, double* cov) {
  return run([&] {
    const auto& c = state->value.cov();
    for (int i = 0; i < c.rows(); ++i) {
      for (int j = 0; j < c.cols(); ++j) cov[i * c.cols() + j] = c(i, j);
    }
  });
}

mdiew_status mdiew_state_to_json(const mdiew_state* state, char** json_out) {
  return run(MDIEW_ERR_IO,
             [&] { *json_out = dup_string(mdiew::io::gaussian_state_to_json(state->value)); });
}

mdiew_status mdiew_state_from_json(const char* json_text, mdiew_state** out) {
  return run(MDIEW_ERR_IO,
             [&] { *out = new mdiew_state{mdiew::io::gaussian_state_from_json(json_text)}; });
}

void mdiew_state_free(mdiew_state* state) { delete state; }

mdiew_status mdiew_duan_ew(const mdiew_state* state, double kappa, double* out) {
  return run([&] { *out = mdiew::duan_ew(state->value, {kappa, std::nullopt}); });
}

mdiew_status mdiew_separable_bound(double kappa, double* out) {
  return run([&] { *out = mdiew::separable_bound_ew(kappa); });
}

mdiew_status mdiew_mdi_bound(double kappa, double sigma, double* out) {
  return run([&] { *out = mdiew::mdi_bound(kappa, sigma); });
}

mdiew_status mdiew_mdi_score_analytic(const mdiew_state* state, double kappa, double* out) {
  return run([&] { *out = mdiew::mdi_score_analytic(state->value, {kappa, std::nullopt}); });
}

mdiew_status mdiew_noisy_tmsv_ew(double r, double eta_a, double eta_b, double kappa,
                                 double* out) {
  return run([&] { *out = mdiew::noisy_tmsv_ew({eta_a, eta_b, r}, kappa); });
}

mdiew_status mdiew_optimal_kappa(double eta_a, double eta_b, double* out) {
  return run([&] { *out = mdiew::optimal_kappa(eta_a, eta_b); });
}

mdiew_status mdiew_state_is_entangled_ppt(const mdiew_state* state, int* out) {
  return run([&] { *out = mdiew::is_entangled_ppt(state->value) ? 1 : 0; });
}

mdiew_status mdiew_optimize_witness(const mdiew_state* state, mdiew_witness_optimum* out) {
  return run([&] {
    const mdiew::WitnessOptimum opt = mdiew::optimize_witness(state->value);
    out->kappa = opt.kappa;
    out->score = opt.score;
    out->bound = opt.bound;
    out->violation = opt.violation ? 1 : 0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        out->orientation_a[2 * i + j] = opt.orientation.block_a(i, j);
        out->orientation_b[2 * i + j] = opt.orientation.block_b(i, j);
      }
    }
  });
}

mdiew_status mdiew_run_batch(const mdiew_state* rho_ab, const mdiew_sim_config* config,
                             mdiew_batch** out) {
  return run([&] {
    mdiew::BatchConfig bc;
    bc.trials = config->trials;
    bc.seed = config->seed;
    bc.threads = config->threads;
    mdiew::MeasurementScheme scheme;
    scheme.variant = config->scheme == MDIEW_SCHEME_SEPARABLE_HETERODYNE
                         ? mdiew::MeasurementScheme::Variant::separable_heterodyne
                         : mdiew::MeasurementScheme::Variant::paper_optimal;
    for (int i = 0; i < 4; ++i) scheme.offsets[static_cast<size_t>(i)] = config->offsets[i];
    *out = new mdiew_batch{
        mdiew::run_batch(bc, rho_ab->value, prior_from_config(*config), scheme)};
  });
}

uint64_t mdiew_batch_trials(const mdiew_batch* batch) { return batch->result.summary.trials; }

mdiew_status mdiew_batch_copy_samples(const mdiew_batch* batch, double* out) {
  return run([&] {
    const auto& samples = batch->result.samples;
    for (size_t i = 0; i < samples.size(); ++i) {
      const mdiew::MdiSample& s = samples[i];
      double* p = out + 8 * i;
      p[0] = s.alpha_x; p[1] = s.alpha_p; p[2] = s.beta_x; p[3] = s.beta_p;
      p[4] = s.a1; p[5] = s.a2; p[6] = s.b1; p[7] = s.b2;
    }
  });
}

mdiew_status mdiew_batch_samples_csv(const mdiew_batch* batch, char** csv_out) {
  return run(MDIEW_ERR_IO,
             [&] { *csv_out = dup_string(mdiew::io::samples_to_csv(batch->result.samples)); });
}

void mdiew_batch_free(mdiew_batch* batch) { delete batch; }

mdiew_status mdiew_batch_score(const mdiew_batch* batch, double kappa, double sigma,
                               mdiew_score* out) {
  return run([&] {
    fill_score(mdiew::mdi_score_from_samples(batch->result.samples, {kappa, std::nullopt}, sigma),
               out);
  });
}

mdiew_status mdiew_score_samples(const double* samples, uint64_t trials, double kappa,
                                 double sigma, mdiew_score* out) {
  return run([&] {
    const auto rows = samples_from_rows(samples, trials);
    fill_score(mdiew::mdi_score_from_samples(rows, {kappa, std::nullopt}, sigma), out);
  });
}

mdiew_status mdiew_score_to_json(const mdiew_score* score, char** json_out) {
  return run(MDIEW_ERR_IO,
             [&] { *json_out = dup_string(mdiew::io::score_report_to_json(to_report(*score))); });
}

mdiew_status mdiew_contour_value(double r, double eta, double* out) {
  return run([&] { *out = 0.5 * (1.0 + mdiew::noisy_tmsv_ew({eta, eta, r}, 1.0)); });
}

mdiew_status mdiew_contour_scan_csv(const double* r_grid, int n_r, const double* eta_grid,
                                    int n_eta, const double* sigma_list, int n_sigma,
                                    char** values_csv_out, char** boundary_csv_out) {
  return run(MDIEW_ERR_IO, [&] {
    const mdiew::ContourTable table = mdiew::contour_scan(
        {r_grid, static_cast<size_t>(n_r)}, {eta_grid, static_cast<size_t>(n_eta)},
        {sigma_list, static_cast<size_t>(n_sigma)});
    *values_csv_out = dup_string(mdiew::io::contour_values_to_csv(table.values));
    if (boundary_csv_out != nullptr) {
      *boundary_csv_out = dup_string(mdiew::io::contour_boundary_to_csv(table.boundaries));
    }
  });
}

mdiew_status mdiew_fim_gaussian(double sigma, double out[4]) {
  return run([&] {
    const mdiew::FisherMatrix f = mdiew::fim_gaussian(sigma);
    out[0] = f(0, 0); out[1] = f(0, 1); out[2] = f(1, 0); out[3] = f(1, 1);
  });
}

mdiew_status mdiew_fim_smooth_box(double l, double delta, double out[4]) {
  return run([&] {
    const mdiew::FisherMatrix f = mdiew::fim_smooth_box(l, delta);
    out[0] = f(0, 0); out[1] = f(0, 1); out[2] = f(1, 0); out[3] = f(1, 1);
  });
}

mdiew_status mdiew_bayesian_crb_sum(double sigma, double* out) {
  return run([&] { *out = mdiew::bayesian_crb_sum(sigma); });
}

mdiew_status mdiew_separable_mdi_bound_gaussian(double kappa, double sigma, double* out) {
  return run([&] {
    *out = mdiew::separable_mdi_bound(kappa, mdiew::PriorSpec::gaussian(sigma)).value;
  });
}

mdiew_status mdiew_separable_mdi_bound_smooth_box(double kappa, double l, double delta,
                                                  double* out, int* possibly_loose) {
  return run([&] {
    const mdiew::SeparableBound b =
        mdiew::separable_mdi_bound(kappa, mdiew::PriorSpec::smooth_box(l, delta));
    *out = b.value;
    if (possibly_loose != nullptr) *possibly_loose = b.possibly_loose ? 1 : 0;
  });
}

mdiew_status mdiew_fock_verify(const mdiew_fock_verify_config* config, char** json_report,
                               int* all_passed) {
  return run([&] {
    mdiew::fock::VerifyConfig vc;
    vc.cutoff = config->cutoff;
    vc.instances = config->instances;
    vc.lambda = config->lambda;
    vc.energy_scale = config->energy_scale;
    vc.seed = config->seed;
    vc.with_tomography = config->with_tomography != 0;
    const mdiew::fock::VerifyReport report = mdiew::fock::run_fock_verification(vc);
    *json_report = dup_string(mdiew::fock::verify_report_to_json(report));
    *all_passed = report.all_passed ? 1 : 0;
  });
}

mdiew_status mdiew_damping_factor(double energy_scale, double* lambda_min, double* factor) {
  return run([&] {
    const mdiew::fock::DampingWindow w = mdiew::fock::damping_factor(energy_scale);
    *lambda_min = w.lambda_min;
    *factor = w.factor;
  });
}

mdiew_status mdiew_tomography_grid_csv(const mdiew_fock_verify_config* config, char** csv_out) {
  return run(MDIEW_ERR_IO, [&] {
    mdiew::RngStream rng(config->seed, 7000);
    const auto rho = mdiew::fock::random_density({3, 3}, rng);
    const auto m = mdiew::fock::povm_element(rho, config->lambda);
    const auto grid = mdiew::fock::make_tomography_grid(m, 8, std::sqrt(2.0));
    *csv_out = dup_string(mdiew::io::tomography_grid_to_csv(grid));
  });
}

}  // extern "C"
