#include "mdiew/io.hpp"

#include <unistd.h>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mdiew::io {

using nlohmann::json;

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

json double_to_json(double v) {
  // keep full precision by emitting through the same 17-digit channel
  return json::parse(format_double(v));
}

double json_to_double(const json& j, const char* what) {
  if (!j.is_number()) throw std::invalid_argument(std::string(what) + ": expected a number");
  return j.get<double>();
}

}  // namespace

std::string gaussian_state_to_json(const GaussianState& state) {
  json j;
  j["n_modes"] = state.n_modes();
  json mean = json::array();
  for (int i = 0; i < state.mean().size(); ++i) mean.push_back(double_to_json(state.mean()(i)));
  j["mean"] = std::move(mean);
  json cov = json::array();
  for (int i = 0; i < state.cov().rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < state.cov().cols(); ++k) row.push_back(double_to_json(state.cov()(i, k)));
    cov.push_back(std::move(row));
  }
  j["cov"] = std::move(cov);
  return j.dump();
}

GaussianState gaussian_state_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  const int n = j.at("n_modes").get<int>();
  if (n < 1) throw std::invalid_argument("gaussian_state_from_json: n_modes must be >= 1");
  const auto& jm = j.at("mean");
  const auto& jc = j.at("cov");
  if (static_cast<int>(jm.size()) != 2 * n || static_cast<int>(jc.size()) != 2 * n) {
    throw std::invalid_argument("gaussian_state_from_json: dimensions do not match n_modes");
  }
  Eigen::VectorXd mean(2 * n);
  for (int i = 0; i < 2 * n; ++i) mean(i) = json_to_double(jm.at(static_cast<size_t>(i)), "mean");
  Eigen::MatrixXd cov(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    const auto& row = jc.at(static_cast<size_t>(i));
    if (static_cast<int>(row.size()) != 2 * n) {
      throw std::invalid_argument("gaussian_state_from_json: ragged covariance");
    }
    for (int k = 0; k < 2 * n; ++k) cov(i, k) = json_to_double(row.at(static_cast<size_t>(k)), "cov");
  }
  return GaussianState(std::move(mean), std::move(cov));
}

std::string fock_operator_to_json(const fock::FockOperator& op) {
  json j;
  j["cutoffs"] = op.cutoffs();
  json re = json::array(), im = json::array();
  for (int i = 0; i < op.dim(); ++i) {
    json rr = json::array(), ri = json::array();
    for (int k = 0; k < op.dim(); ++k) {
      rr.push_back(double_to_json(op.matrix()(i, k).real()));
      ri.push_back(double_to_json(op.matrix()(i, k).imag()));
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  j["real"] = std::move(re);
  j["imag"] = std::move(im);
  return j.dump();
}

fock::FockOperator fock_operator_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  std::vector<int> cutoffs = j.at("cutoffs").get<std::vector<int>>();
  int dim = 1;
  for (int d : cutoffs) dim *= d;
  const auto& re = j.at("real");
  const auto& im = j.at("imag");
  if (static_cast<int>(re.size()) != dim || static_cast<int>(im.size()) != dim) {
    throw std::invalid_argument("fock_operator_from_json: matrix size mismatch");
  }
  fock::Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const auto& rr = re.at(static_cast<size_t>(i));
    const auto& ri = im.at(static_cast<size_t>(i));
    for (int k = 0; k < dim; ++k) {
      m(i, k) = fock::Complex(json_to_double(rr.at(static_cast<size_t>(k)), "real"),
                              json_to_double(ri.at(static_cast<size_t>(k)), "imag"));
    }
  }
  return fock::FockOperator(std::move(cutoffs), std::move(m));
}

std::string score_report_to_json(const ScoreReport& report) {
  json j;
  j["score"] = double_to_json(report.score);
  j["std_error"] = double_to_json(report.std_error);
  j["bound"] = double_to_json(report.bound);
  j["kappa"] = double_to_json(report.kappa);
  if (std::isinf(report.sigma)) {
    j["sigma"] = "inf";
  } else {
    j["sigma"] = double_to_json(report.sigma);
  }
  j["verdict"] = report.entangled_certified ? "entangled-certified" : "inconclusive";
  return j.dump();
}

std::string samples_to_csv(std::span<const MdiSample> samples) {
  std::string out = "trial,alpha_x,alpha_p,beta_x,beta_p,a1,a2,b1,b2\n";
  char buf[64];
  for (size_t i = 0; i < samples.size(); ++i) {
    const MdiSample& s = samples[i];
    std::snprintf(buf, sizeof(buf), "%" PRIu64 ",", static_cast<std::uint64_t>(i));
    out += buf;
    const double vals[8] = {s.alpha_x, s.alpha_p, s.beta_x, s.beta_p, s.a1, s.a2, s.b1, s.b2};
    for (int k = 0; k < 8; ++k) {
      out += format_double(vals[k]);
      out += (k == 7) ? '\n' : ',';
    }
  }
  return out;
}

std::string contour_values_to_csv(std::span<const ContourPoint> values) {
  std::string out = "r,eta,mdiew_value\n";
  for (const auto& p : values) {
    out += format_double(p.r);
    out += ',';
    out += format_double(p.eta);
    out += ',';
    out += format_double(p.mdiew_value);
    out += '\n';
  }
  return out;
}

std::string contour_boundary_to_csv(std::span<const BoundaryPoint> boundary) {
  std::string out = "sigma,eta,r_star\n";
  for (const auto& p : boundary) {
    out += format_double(p.sigma);
    out += ',';
    out += format_double(p.eta);
    out += ',';
    out += format_double(p.r_star);
    out += '\n';
  }
  return out;
}

std::string tomography_grid_to_csv(const fock::TomographyGrid& grid) {
  std::string out = "alpha_re,alpha_im,beta_re,beta_im,p11\n";
  for (size_t i = 0; i < grid.alphas.size(); ++i) {
    for (size_t j = 0; j < grid.betas.size(); ++j) {
      out += format_double(grid.alphas[i].real());
      out += ',';
      out += format_double(grid.alphas[i].imag());
      out += ',';
      out += format_double(grid.betas[j].real());
      out += ',';
      out += format_double(grid.betas[j].imag());
      out += ',';
      out += format_double(grid.p11(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out += '\n';
    }
  }
  return out;
}

fock::TomographyGrid tomography_grid_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line) || line != "alpha_re,alpha_im,beta_re,beta_im,p11") {
    throw std::invalid_argument("tomography_grid_from_csv: bad header");
  }
  std::vector<fock::Complex> alphas, betas;
  std::vector<double> probs;
  auto index_of = [](std::vector<fock::Complex>& list, fock::Complex v) {
    for (size_t k = 0; k < list.size(); ++k) {
      if (list[k] == v) return k;
    }
    list.push_back(v);
    return list.size() - 1;
  };
  struct Entry {
    size_t i, j;
    double p;
  };
  std::vector<Entry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double f[5];
    std::istringstream ls(line);
    std::string tok;
    for (int k = 0; k < 5; ++k) {
      if (!std::getline(ls, tok, ',')) {
        throw std::invalid_argument("tomography_grid_from_csv: short row");
      }
      f[k] = std::stod(tok);
    }
    entries.push_back({index_of(alphas, {f[0], f[1]}), index_of(betas, {f[2], f[3]}), f[4]});
  }
  fock::TomographyGrid grid;
  grid.alphas = std::move(alphas);
  grid.betas = std::move(betas);
  grid.p11 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.alphas.size()),
                                   static_cast<Eigen::Index>(grid.betas.size()));
  for (const auto& e : entries) {
    grid.p11(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = e.p;
  }
  return grid;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  fs::create_directories(dir);
  const fs::path tmp = dir / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_file: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mdiew::io
