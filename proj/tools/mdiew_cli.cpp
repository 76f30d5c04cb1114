// Command-line front end for the mdiew shared library.  Subcommands:
//   witness-eval   analytic witness scores and bounds
//   mdi-simulate   Monte Carlo protocol rounds -> samples CSV + report JSON
//   contour        noise-tolerance scan -> value grid and boundary CSVs
//   fock-verify    truncated Fock-space verification suite -> report JSON
//   prior-fim      prior Fisher information and separable bounds
//
// Exit codes: 0 success, 1 computational failure, 2 invalid configuration,
// 3 verification-suite failure.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdiew.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerification = 3;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

void check(mdiew_status status) {
  if (status == MDIEW_OK) return;
  const int code = status == MDIEW_ERR_INVALID_ARGUMENT ? kExitConfig : kExitCompute;
  throw CliError(code, std::string(mdiew_status_name(status)) + ": " + mdiew_last_error());
}

std::string take_string(char* owned) {
  std::string out(owned);
  mdiew_string_free(owned);
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// temp-file plus rename so partially written outputs are never observed
void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError(kExitCompute, "cannot open " + tmp.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw CliError(kExitCompute, "write failed for " + tmp.string());
  fs::rename(tmp, path, ec);
  if (ec) throw CliError(kExitCompute, "rename failed for " + path.string());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(kExitConfig, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Options shared by the subcommands; a JSON --config document provides
// defaults that explicit flags override.
struct Options {
  double r = 0.5;
  double eta_a = 0.0;
  double eta_b = 0.0;
  std::string kappa = "1";
  double sigma = std::numeric_limits<double>::infinity();
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  int cutoff = 8;
  int instances = 20;
  double lambda = 0.5;
  double energy_scale = 1.0;
  double box_l = 0.0;
  double box_delta = 0.0;
  std::string scheme = "paper-optimal";
  std::string state_file;
  std::string out;
  std::string format = "json";
  std::string config_file;
  int threads = 0;
  bool tomography = false;
  std::vector<double> sigma_list;
};

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--seed", opt.seed, "random seed (single source of all randomness)");
  cmd->add_option("--trials", opt.trials, "Monte Carlo rounds");
  cmd->add_option("--sigma", opt.sigma, "Gaussian prior width");
  cmd->add_option("--kappa", opt.kappa, "witness kappa, or 'auto'");
  cmd->add_option("--r", opt.r, "source squeezing parameter");
  cmd->add_option("--eta-a", opt.eta_a, "loss fraction on mode A");
  cmd->add_option("--eta-b", opt.eta_b, "loss fraction on mode B");
  cmd->add_option("--cutoff", opt.cutoff, "Fock cutoff per mode");
  cmd->add_option("--out", opt.out, "output path (or prefix for multi-file commands)");
  cmd->add_option("--format", opt.format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--config", opt.config_file, "JSON config file (flags take precedence)");
  cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)");
}

// flags > config file > defaults
void merge_config(const CLI::App* cmd, Options& opt) {
  if (opt.config_file.empty()) return;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(opt.config_file));
  } catch (const nlohmann::json::parse_error& e) {
    throw CliError(kExitConfig, std::string("config parse error: ") + e.what());
  }
  auto assign = [&](const char* flag, const char* key, auto& target) {
    if (!j.contains(key)) return;
    const CLI::Option* o = cmd->get_option_no_throw(flag);
    if (o != nullptr && o->count() > 0) return;  // explicit flag wins
    try {
      target = j.at(key).get<std::decay_t<decltype(target)>>();
    } catch (const nlohmann::json::exception& e) {
      throw CliError(kExitConfig, std::string("config key '") + key + "': " + e.what());
    }
  };
  assign("--seed", "seed", opt.seed);
  assign("--trials", "trials", opt.trials);
  assign("--sigma", "sigma", opt.sigma);
  assign("--kappa", "kappa", opt.kappa);
  assign("--r", "r", opt.r);
  assign("--eta-a", "eta_a", opt.eta_a);
  assign("--eta-b", "eta_b", opt.eta_b);
  assign("--cutoff", "cutoff", opt.cutoff);
  assign("--out", "out", opt.out);
  assign("--format", "format", opt.format);
  assign("--threads", "threads", opt.threads);
  assign("--instances", "instances", opt.instances);
  assign("--lambda", "lambda", opt.lambda);
  assign("--energy-scale", "energy_scale", opt.energy_scale);
  assign("--box-l", "box_l", opt.box_l);
  assign("--box-delta", "box_delta", opt.box_delta);
  assign("--scheme", "scheme", opt.scheme);
  assign("--state", "state", opt.state_file);
  assign("--sigma-list", "sigma_list", opt.sigma_list);
}

struct StateHandle {
  mdiew_state* ptr = nullptr;
  ~StateHandle() { mdiew_state_free(ptr); }
};

// tmsv + losses, or a state file when given
void build_state(const Options& opt, StateHandle& state) {
  if (!opt.state_file.empty()) {
    check(mdiew_state_from_json(read_file(opt.state_file).c_str(), &state.ptr));
    return;
  }
  check(mdiew_state_tmsv(opt.r, &state.ptr));
  if (opt.eta_a > 0.0) check(mdiew_state_apply_loss(state.ptr, 0, opt.eta_a));
  if (opt.eta_b > 0.0) check(mdiew_state_apply_loss(state.ptr, 1, opt.eta_b));
}

double resolve_kappa(const Options& opt) {
  if (opt.kappa == "auto") {
    double k = 0.0;
    check(mdiew_optimal_kappa(opt.eta_a, opt.eta_b, &k));
    return k;
  }
  try {
    size_t pos = 0;
    const double k = std::stod(opt.kappa, &pos);
    if (pos != opt.kappa.size()) throw std::invalid_argument(opt.kappa);
    return k;
  } catch (const std::exception&) {
    throw CliError(kExitConfig, "--kappa must be a positive number or 'auto'");
  }
}

void emit(const Options& opt, const std::string& content) {
  if (opt.out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
  } else {
    write_atomic(opt.out, content);
  }
}

int cmd_witness_eval(const Options& opt) {
  StateHandle state;
  build_state(opt, state);
  const double kappa = resolve_kappa(opt);

  double ew = 0.0, mdiew_value = 0.0, bound = 0.0, sep = 0.0;
  check(mdiew_duan_ew(state.ptr, kappa, &ew));
  check(mdiew_mdi_score_analytic(state.ptr, kappa, &mdiew_value));
  check(mdiew_mdi_bound(kappa, opt.sigma, &bound));
  check(mdiew_separable_bound(kappa, &sep));
  int entangled_ppt = 0;
  check(mdiew_state_is_entangled_ppt(state.ptr, &entangled_ppt));
  const bool certified = mdiew_value < bound;

  // smallest prior width that still certifies this score, when one exists
  std::optional<double> sigma_star;
  if (mdiew_value < sep) {
    const double x = mdiew_value / sep;
    sigma_star = std::sqrt(x / (1.0 - x));
  }

  if (opt.format == "csv") {
    std::string csv = "kappa,sigma,ew,mdiew,bound,verdict\n";
    csv += fmt(kappa) + "," + (std::isinf(opt.sigma) ? "inf" : fmt(opt.sigma)) + "," + fmt(ew) +
           "," + fmt(mdiew_value) + "," + fmt(bound) + "," +
           (certified ? "entangled-certified" : "inconclusive") + "\n";
    emit(opt, csv);
  } else {
    nlohmann::json j;
    j["kappa"] = kappa;
    j["sigma"] = std::isinf(opt.sigma) ? nlohmann::json("inf") : nlohmann::json(opt.sigma);
    j["ew"] = ew;
    j["mdiew"] = mdiew_value;
    j["bound"] = bound;
    j["separable_bound_ew"] = sep;
    j["state_entangled_ppt"] = entangled_ppt != 0;
    j["verdict"] = certified ? "entangled-certified" : "inconclusive";
    if (sigma_star) j["sigma_star"] = *sigma_star;
    emit(opt, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_mdi_simulate(const Options& opt) {
  if (opt.trials < 1) throw CliError(kExitConfig, "--trials must be >= 1");
  StateHandle state;
  build_state(opt, state);
  const double kappa = resolve_kappa(opt);

  mdiew_sim_config cfg{};
  if (opt.box_l > 0.0) {
    cfg.prior_kind = MDIEW_PRIOR_SMOOTH_BOX;
    cfg.box_l = opt.box_l;
    cfg.box_delta = opt.box_delta > 0.0 ? opt.box_delta : opt.box_l;
  } else {
    if (std::isinf(opt.sigma)) {
      throw CliError(kExitConfig, "mdi-simulate requires --sigma (or --box-l/--box-delta)");
    }
    cfg.prior_kind = MDIEW_PRIOR_GAUSSIAN;
    cfg.sigma = opt.sigma;
  }
  if (opt.scheme == "paper-optimal") {
    cfg.scheme = MDIEW_SCHEME_PAPER_OPTIMAL;
  } else if (opt.scheme == "separable-heterodyne") {
    cfg.scheme = MDIEW_SCHEME_SEPARABLE_HETERODYNE;
  } else {
    throw CliError(kExitConfig, "--scheme must be paper-optimal or separable-heterodyne");
  }
  cfg.trials = opt.trials;
  cfg.seed = opt.seed;
  cfg.threads = opt.threads;

  mdiew_batch* batch = nullptr;
  check(mdiew_run_batch(state.ptr, &cfg, &batch));
  struct BatchGuard {
    mdiew_batch* b;
    ~BatchGuard() { mdiew_batch_free(b); }
  } guard{batch};

  mdiew_score score{};
  const double sigma_for_bound =
      cfg.prior_kind == MDIEW_PRIOR_GAUSSIAN
          ? opt.sigma
          : std::sqrt(2.0) * cfg.box_l / 3.14159265358979323846;
  check(mdiew_batch_score(batch, kappa, sigma_for_bound, &score));

  char* report_json = nullptr;
  check(mdiew_score_to_json(&score, &report_json));
  const std::string report = take_string(report_json) + "\n";

  char* samples_csv = nullptr;
  check(mdiew_batch_samples_csv(batch, &samples_csv));
  const std::string samples = take_string(samples_csv);

  if (opt.out.empty()) {
    std::cout << report;
  } else {
    write_atomic(opt.out + ".samples.csv", samples);
    write_atomic(opt.out + ".report.json", report);
  }
  return kExitOk;
}

int cmd_contour(const Options& opt) {
  std::vector<double> r_grid, eta_grid;
  for (int i = 0; i <= 100; ++i) r_grid.push_back(2.5 * i / 100.0);
  for (int i = 0; i <= 100; ++i) eta_grid.push_back(i / 100.0);
  const std::vector<double> sigmas =
      opt.sigma_list.empty() ? std::vector<double>{1, 2, 3, 5, 10} : opt.sigma_list;

  char* values_csv = nullptr;
  char* boundary_csv = nullptr;
  check(mdiew_contour_scan_csv(r_grid.data(), static_cast<int>(r_grid.size()), eta_grid.data(),
                               static_cast<int>(eta_grid.size()), sigmas.data(),
                               static_cast<int>(sigmas.size()), &values_csv, &boundary_csv));
  const std::string values = take_string(values_csv);
  const std::string boundary = take_string(boundary_csv);
  if (opt.out.empty()) {
    std::cout << values;
  } else {
    write_atomic(opt.out + ".values.csv", values);
    if (!sigmas.empty()) write_atomic(opt.out + ".boundary.csv", boundary);
  }
  return kExitOk;
}

int cmd_fock_verify(const Options& opt) {
  mdiew_fock_verify_config cfg{};
  cfg.cutoff = opt.cutoff;
  cfg.instances = opt.instances;
  cfg.lambda = opt.lambda;
  cfg.energy_scale = opt.energy_scale;
  cfg.seed = opt.seed;
  cfg.with_tomography = opt.tomography ? 1 : 0;

  char* report = nullptr;
  int all_passed = 0;
  check(mdiew_fock_verify(&cfg, &report, &all_passed));
  const std::string json = take_string(report) + "\n";
  if (opt.out.empty()) {
    std::cout << json;
  } else {
    write_atomic(opt.out, json);
    if (opt.tomography) {
      char* grid_csv = nullptr;
      check(mdiew_tomography_grid_csv(&cfg, &grid_csv));
      write_atomic(opt.out + ".grid.csv", take_string(grid_csv));
    }
  }
  if (all_passed == 0) {
    std::cerr << "fock-verify: verification suite failed\n";
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_prior_fim(const Options& opt) {
  const double kappa = resolve_kappa(opt);
  nlohmann::json j;
  j["kappa"] = kappa;
  double fim[4] = {0, 0, 0, 0};
  if (opt.box_l > 0.0) {
    const double delta = opt.box_delta > 0.0 ? opt.box_delta : opt.box_l;
    check(mdiew_fim_smooth_box(opt.box_l, delta, fim));
    double bound = 0.0;
    int loose = 0;
    check(mdiew_separable_mdi_bound_smooth_box(kappa, opt.box_l, delta, &bound, &loose));
    j["prior"] = {{"kind", "smooth-box"}, {"l", opt.box_l}, {"delta", delta}};
    j["separable_bound"] = bound;
    j["possibly_loose"] = loose != 0;
  } else {
    if (std::isinf(opt.sigma)) {
      throw CliError(kExitConfig, "prior-fim requires --sigma or --box-l");
    }
    check(mdiew_fim_gaussian(opt.sigma, fim));
    double crb = 0.0, bound = 0.0;
    check(mdiew_bayesian_crb_sum(opt.sigma, &crb));
    check(mdiew_separable_mdi_bound_gaussian(kappa, opt.sigma, &bound));
    j["prior"] = {{"kind", "gaussian"}, {"sigma", opt.sigma}};
    j["crb_sum"] = crb;
    j["separable_bound"] = bound;
    j["possibly_loose"] = false;
  }
  j["fim"] = {{fim[0], fim[1]}, {fim[2], fim[3]}};

  if (opt.format == "csv") {
    std::string csv = "fim_xx,fim_xp,fim_px,fim_pp,separable_bound\n";
    csv += fmt(fim[0]) + "," + fmt(fim[1]) + "," + fmt(fim[2]) + "," + fmt(fim[3]) + "," +
           fmt(j["separable_bound"].get<double>()) + "\n";
    emit(opt, csv);
  } else {
    emit(opt, j.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MDI entanglement witness toolkit"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* eval = app.add_subcommand("witness-eval", "analytic witness scores and bounds");
  add_common_flags(eval, opt);
  eval->add_option("--state", opt.state_file, "GaussianState JSON file instead of tmsv+losses");

  CLI::App* simulate = app.add_subcommand("mdi-simulate", "Monte Carlo protocol rounds");
  add_common_flags(simulate, opt);
  simulate->add_option("--scheme", opt.scheme,
                       "measurement scheme: paper-optimal | separable-heterodyne");
  simulate->add_option("--state", opt.state_file, "GaussianState JSON file");
  simulate->add_option("--box-l", opt.box_l, "smooth-box prior: interval length");
  simulate->add_option("--box-delta", opt.box_delta, "smooth-box prior: ramp width");

  CLI::App* contour = app.add_subcommand("contour", "noise-tolerance scan (kappa = 1)");
  add_common_flags(contour, opt);
  contour->add_option("--sigma-list", opt.sigma_list, "prior widths for the boundary curves");

  CLI::App* fock = app.add_subcommand("fock-verify", "Fock-space verification suite");
  add_common_flags(fock, opt);
  fock->add_option("--instances", opt.instances, "random instances per check");
  fock->add_option("--lambda", opt.lambda, "conjugation parameter in (0,1)");
  fock->add_option("--energy-scale", opt.energy_scale, "witness energy scale N");
  fock->add_flag("--tomography", opt.tomography, "include the reconstruction round trip");

  CLI::App* fim = app.add_subcommand("prior-fim", "prior Fisher information and bounds");
  add_common_flags(fim, opt);
  fim->add_option("--box-l", opt.box_l, "smooth-box prior: interval length");
  fim->add_option("--box-delta", opt.box_delta, "smooth-box prior: ramp width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (eval->parsed()) {
      merge_config(eval, opt);
      return cmd_witness_eval(opt);
    }
    if (simulate->parsed()) {
      merge_config(simulate, opt);
      return cmd_mdi_simulate(opt);
    }
    if (contour->parsed()) {
      merge_config(contour, opt);
      return cmd_contour(opt);
    }
    if (fock->parsed()) {
      merge_config(fock, opt);
      return cmd_fock_verify(opt);
    }
    if (fim->parsed()) {
      merge_config(fim, opt);
      return cmd_prior_fim(opt);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitConfig;
}
