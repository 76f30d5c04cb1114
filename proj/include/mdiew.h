/* mdiew — measurement-device-independent entanglement witness toolkit.
 *
 * C API of the shared library: opaque handles plus integer status codes.
 * Every function returns MDIEW_OK on success; on failure a thread-local
 * message is available via mdiew_last_error().  Strings returned through
 * `char**` out-parameters are heap-allocated and must be released with
 * mdiew_string_free().
 *
 * Conventions: quadratures satisfy [x, p] = i/2 (vacuum variance 1/4),
 * phase-space vectors are ordered (x1, p1, x2, p2, ...), and loss channels
 * are parameterized by the lost fraction eta (eta = 0 is lossless).
 */
#ifndef MDIEW_H
#define MDIEW_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdiew_status {
  MDIEW_OK = 0,
  MDIEW_ERR_INVALID_ARGUMENT = 1,
  MDIEW_ERR_COMPUTE = 2,
  MDIEW_ERR_IO = 3,
  MDIEW_ERR_VERIFICATION = 4
} mdiew_status;

const char* mdiew_status_name(mdiew_status status);

/* Message describing the most recent failure on the calling thread. */
const char* mdiew_last_error(void);

const char* mdiew_version(void);

void mdiew_string_free(char* text);

/* ---------- Gaussian states ---------- */

typedef struct mdiew_state mdiew_state;

mdiew_status mdiew_state_vacuum(int n_modes, mdiew_state** out);
mdiew_status mdiew_state_coherent(double alpha_x, double alpha_p, mdiew_state** out);
mdiew_status mdiew_state_tmsv(double r, mdiew_state** out);
mdiew_status mdiew_state_tensor(const mdiew_state* a, const mdiew_state* b, mdiew_state** out);
mdiew_status mdiew_state_restrict(const mdiew_state* state, const int* modes, int n_modes,
                                  mdiew_state** out);

/* In-place channels / symplectic operations. `sign_convention` 0 selects the
 * sum/difference beam-splitter ports, 1 the difference/sum variant. */
mdiew_status mdiew_state_beam_splitter(mdiew_state* state, int mode_i, int mode_j,
                                       int sign_convention);
mdiew_status mdiew_state_squeeze(mdiew_state* state, int mode, double r);
mdiew_status mdiew_state_apply_loss(mdiew_state* state, int mode, double eta);

int mdiew_state_n_modes(const mdiew_state* state);
/* `mean` must hold 2n doubles, `cov` 4n^2 doubles (row-major). */
mdiew_status mdiew_state_get_mean(const mdiew_state* state, double* mean);
mdiew_status mdiew_state_get_cov(const mdiew_state* state, double* cov);

mdiew_status mdiew_state_to_json(const mdiew_state* state, char** json_out);
mdiew_status mdiew_state_from_json(const char* json_text, mdiew_state** out);

void mdiew_state_free(mdiew_state* state);

/* ---------- witness evaluation ---------- */

mdiew_status mdiew_duan_ew(const mdiew_state* state, double kappa, double* out);
mdiew_status mdiew_separable_bound(double kappa, double* out);
/* sigma may be INFINITY, giving the kappa-only separable floor. */
mdiew_status mdiew_mdi_bound(double kappa, double sigma, double* out);
mdiew_status mdiew_mdi_score_analytic(const mdiew_state* state, double kappa, double* out);
mdiew_status mdiew_noisy_tmsv_ew(double r, double eta_a, double eta_b, double kappa, double* out);
mdiew_status mdiew_optimal_kappa(double eta_a, double eta_b, double* out);
mdiew_status mdiew_state_is_entangled_ppt(const mdiew_state* state, int* out);

typedef struct mdiew_witness_optimum {
  double kappa;
  double score;
  double bound;
  /* row-major 2x2 orientation blocks for modes A and B */
  double orientation_a[4];
  double orientation_b[4];
  int violation;
} mdiew_witness_optimum;

mdiew_status mdiew_optimize_witness(const mdiew_state* state, mdiew_witness_optimum* out);

/* ---------- Monte Carlo simulation ---------- */

typedef enum mdiew_prior_kind {
  MDIEW_PRIOR_GAUSSIAN = 0,
  MDIEW_PRIOR_SMOOTH_BOX = 1
} mdiew_prior_kind;

typedef enum mdiew_scheme {
  MDIEW_SCHEME_PAPER_OPTIMAL = 0,
  MDIEW_SCHEME_SEPARABLE_HETERODYNE = 1
} mdiew_scheme;

typedef struct mdiew_sim_config {
  mdiew_prior_kind prior_kind;
  double sigma;               /* Gaussian prior width */
  double box_l, box_delta;    /* smooth-box parameters */
  mdiew_scheme scheme;
  double offsets[4];          /* known <x_A>, <p_A>, <x_B>, <p_B> */
  uint64_t trials;
  uint64_t seed;
  int threads;                /* 0 = hardware concurrency */
} mdiew_sim_config;

typedef struct mdiew_batch mdiew_batch;

mdiew_status mdiew_run_batch(const mdiew_state* rho_ab, const mdiew_sim_config* config,
                             mdiew_batch** out);
uint64_t mdiew_batch_trials(const mdiew_batch* batch);
/* `out` must hold trials*8 doubles; row layout
 * alpha_x, alpha_p, beta_x, beta_p, a1, a2, b1, b2. */
mdiew_status mdiew_batch_copy_samples(const mdiew_batch* batch, double* out);
mdiew_status mdiew_batch_samples_csv(const mdiew_batch* batch, char** csv_out);
void mdiew_batch_free(mdiew_batch* batch);

typedef struct mdiew_score {
  double score;
  double std_error;
  double bound;
  double kappa;
  double sigma;
  int entangled_certified;
} mdiew_score;

mdiew_status mdiew_batch_score(const mdiew_batch* batch, double kappa, double sigma,
                               mdiew_score* out);
/* `samples` holds trials*8 doubles in the batch row layout. */
mdiew_status mdiew_score_samples(const double* samples, uint64_t trials, double kappa,
                                 double sigma, mdiew_score* out);
mdiew_status mdiew_score_to_json(const mdiew_score* score, char** json_out);

/* ---------- noise contour scan (kappa = 1, symmetric losses) ---------- */

mdiew_status mdiew_contour_value(double r, double eta, double* out);
/* Emits the value grid CSV (r,eta,mdiew_value) and, when sigma_list is
 * non-empty, the boundary CSV (sigma,eta,r_star). */
mdiew_status mdiew_contour_scan_csv(const double* r_grid, int n_r, const double* eta_grid,
                                    int n_eta, const double* sigma_list, int n_sigma,
                                    char** values_csv_out, char** boundary_csv_out);

/* ---------- prior information ---------- */

/* `out` receives the 2x2 Fisher matrix row-major. */
mdiew_status mdiew_fim_gaussian(double sigma, double out[4]);
mdiew_status mdiew_fim_smooth_box(double l, double delta, double out[4]);
mdiew_status mdiew_bayesian_crb_sum(double sigma, double* out);
mdiew_status mdiew_separable_mdi_bound_gaussian(double kappa, double sigma, double* out);
mdiew_status mdiew_separable_mdi_bound_smooth_box(double kappa, double l, double delta,
                                                  double* out, int* possibly_loose);

/* ---------- Fock-space verification ---------- */

typedef struct mdiew_fock_verify_config {
  int cutoff;
  int instances;
  double lambda;
  double energy_scale;
  uint64_t seed;
  int with_tomography;
} mdiew_fock_verify_config;

/* Runs the verification suite; *all_passed reports the outcome and the JSON
 * report is returned regardless.  A failing suite still returns MDIEW_OK;
 * inadmissible configurations return MDIEW_ERR_INVALID_ARGUMENT. */
mdiew_status mdiew_fock_verify(const mdiew_fock_verify_config* config, char** json_report,
                               int* all_passed);

mdiew_status mdiew_damping_factor(double energy_scale, double* lambda_min, double* factor);

/* Tomography grid CSV (alpha_re,alpha_im,beta_re,beta_im,p11) for the default
 * reconstruction demonstration instance. */
mdiew_status mdiew_tomography_grid_csv(const mdiew_fock_verify_config* config, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* MDIEW_H */
