#ifndef MDIEW_IO_HPP
#define MDIEW_IO_HPP

#include <filesystem>
#include <span>
#include <string>

#include "mdiew/fock.hpp"
#include "mdiew/gaussian.hpp"
#include "mdiew/sampler.hpp"
#include "mdiew/witness.hpp"

namespace mdiew::io {

/// Shortest-round-trip formatting with 17 significant digits; all emitted
/// files use this so repeated runs are byte-identical.
std::string format_double(double value);

std::string gaussian_state_to_json(const GaussianState& state);
GaussianState gaussian_state_from_json(const std::string& json_text);

std::string fock_operator_to_json(const fock::FockOperator& op);
fock::FockOperator fock_operator_from_json(const std::string& json_text);

/// `sigma` may be +infinity; it is encoded as the string "inf".
std::string score_report_to_json(const ScoreReport& report);

/// Header: trial,alpha_x,alpha_p,beta_x,beta_p,a1,a2,b1,b2
std::string samples_to_csv(std::span<const MdiSample> samples);

/// Header: r,eta,mdiew_value
std::string contour_values_to_csv(std::span<const ContourPoint> values);
/// Header: sigma,eta,r_star
std::string contour_boundary_to_csv(std::span<const BoundaryPoint> boundary);

/// Header: alpha_re,alpha_im,beta_re,beta_im,p11
std::string tomography_grid_to_csv(const fock::TomographyGrid& grid);
fock::TomographyGrid tomography_grid_from_csv(const std::string& csv_text);

/// Writes via a temp file in the target directory plus an atomic rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace mdiew::io

#endif  // MDIEW_IO_HPP
