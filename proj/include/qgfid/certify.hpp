#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgfid/transforms.hpp"

namespace qgfid {

/// Rectangular node grid in C⁺. Real parts are equispaced; imaginary parts
/// are equispaced or geometric between im_min and im_max.
struct GridSpec {
  enum class ImSpacing { Linear, Logarithmic };

  double re_min = -10.0;
  double re_max = 10.0;
  double im_min = 1e-3;
  double im_max = 10.0;
  int nx = 200;
  int ny = 100;
  ImSpacing im_spacing = ImSpacing::Logarithmic;

  /// Throws DomainError unless im_min ≥ 1e-6, ranges are ordered and nx, ny ≥ 1.
  void validate() const;
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  /// Node (i, j) with i along the real direction; index = j * nx + i.
  cplx node(std::size_t index) const;
};

struct PhiViolation {
  cplx z;
  cplx phi;
};

struct FidCertificate {
  double q = 0.0;
  GridSpec grid;
  double max_im_phi = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<PhiViolation> violations;   // nodes with Im φ > tolerance
  std::vector<cplx> inversion_failures;
  int series_terms_max = 0;
  std::int64_t runtime_ms = 0;
};

inline constexpr double kDefaultCertifyTolerance = 1e-9;

/// Evaluates φ at every node of `grid`. Inversion errors are recorded in the
/// certificate, never thrown. Nodes are split across `threads` workers
/// (0 = hardware concurrency); the result does not depend on the split.
FidCertificate certify_fid(QParam q, const GridSpec& grid,
                           double tolerance = kDefaultCertifyTolerance,
                           const InversionPolicy& policy = {}, unsigned threads = 0);

std::vector<FidCertificate> sweep(const std::vector<QParam>& q_values, const GridSpec& grid,
                                  double tolerance = kDefaultCertifyTolerance,
                                  const InversionPolicy& policy = {}, unsigned threads = 0);

const char* to_string(GridSpec::ImSpacing spacing);

nlohmann::json to_json(const GridSpec& grid);
nlohmann::json to_json(const FidCertificate& certificate);

}  // namespace qgfid
