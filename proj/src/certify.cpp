#include "qgfid/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

namespace qgfid {

namespace {

struct NodeOutcome {
  std::optional<cplx> phi;  // empty on inversion failure
  int terms = 0;
};

}  // namespace

void GridSpec::validate() const {
  if (!(im_min >= 1e-6)) throw DomainError("GridSpec: im_min must be at least 1e-6");
  if (!(im_max >= im_min)) throw DomainError("GridSpec: im_max must not be below im_min");
  if (!(re_max >= re_min)) throw DomainError("GridSpec: re_max must not be below re_min");
  if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_max)) {
    throw DomainError("GridSpec: ranges must be finite");
  }
  if (nx < 1 || ny < 1) throw DomainError("GridSpec: nx and ny must be positive");
}

cplx GridSpec::node(std::size_t index) const {
  const int i = static_cast<int>(index % static_cast<std::size_t>(nx));
  const int j = static_cast<int>(index / static_cast<std::size_t>(nx));
  const double sx = nx == 1 ? 0.0 : static_cast<double>(i) / (nx - 1);
  const double sy = ny == 1 ? 0.0 : static_cast<double>(j) / (ny - 1);
  const double re = re_min + (re_max - re_min) * sx;
  const double im = im_spacing == ImSpacing::Linear
                        ? im_min + (im_max - im_min) * sy
                        : im_min * std::pow(im_max / im_min, sy);
  return {re, im};
}

FidCertificate certify_fid(QParam q, const GridSpec& grid, double tolerance,
                           const InversionPolicy& policy, unsigned threads) {
  grid.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::size_t total = grid.size();
  std::vector<NodeOutcome> outcomes(total);

  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      try {
        const PhiResult r = voiculescu_phi_detailed(grid.node(k), q, policy);
        outcomes[k] = {r.phi, r.inversion.series_terms_max};
      } catch (const Error&) {
        outcomes[k] = {std::nullopt, 0};
      }
    }
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(total, w * chunk);
      const std::size_t end = std::min(total, begin + chunk);
      pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  // Aggregate in node order so the result never depends on the thread split.
  FidCertificate cert;
  cert.q = q.value();
  cert.grid = grid;
  cert.tolerance = tolerance;
  cert.max_im_phi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < total; ++k) {
    const NodeOutcome& o = outcomes[k];
    if (!o.phi) {
      cert.inversion_failures.push_back(grid.node(k));
      continue;
    }
    cert.series_terms_max = std::max(cert.series_terms_max, o.terms);
    cert.max_im_phi = std::max(cert.max_im_phi, o.phi->imag());
    if (o.phi->imag() > tolerance) cert.violations.push_back({grid.node(k), *o.phi});
  }
  cert.pass = cert.max_im_phi <= tolerance && cert.inversion_failures.empty();
  cert.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - started)
                        .count();
  return cert;
}

std::vector<FidCertificate> sweep(const std::vector<QParam>& q_values, const GridSpec& grid,
                                  double tolerance, const InversionPolicy& policy,
                                  unsigned threads) {
  std::vector<FidCertificate> out;
  out.reserve(q_values.size());
  for (const QParam& q : q_values) out.push_back(certify_fid(q, grid, tolerance, policy, threads));
  return out;
}

const char* to_string(GridSpec::ImSpacing spacing) {
  return spacing == GridSpec::ImSpacing::Linear ? "linear" : "logarithmic";
}

nlohmann::json to_json(const GridSpec& grid) {
  return {{"re_range", {grid.re_min, grid.re_max}},
          {"im_range", {grid.im_min, grid.im_max}},
          {"nx", grid.nx},
          {"ny", grid.ny},
          {"im_spacing", to_string(grid.im_spacing)}};
}

nlohmann::json to_json(const FidCertificate& c) {
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : c.violations) {
    violations.push_back(
        {{"z_re", v.z.real()}, {"z_im", v.z.imag()}, {"phi_re", v.phi.real()}, {"phi_im", v.phi.imag()}});
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& z : c.inversion_failures) failures.push_back({{"z_re", z.real()}, {"z_im", z.imag()}});
  // With every node failing there is no maximum; JSON has no -inf.
  nlohmann::json max_im = std::isfinite(c.max_im_phi) ? nlohmann::json(c.max_im_phi) : nlohmann::json();
  return {{"q", c.q},
          {"grid", to_json(c.grid)},
          {"max_im_phi", max_im},
          {"tolerance", c.tolerance},
          {"pass", c.pass},
          {"violations", violations},
          {"inversion_failures", failures},
          {"series_terms_max", c.series_terms_max},
          {"runtime_ms", c.runtime_ms}};
}

}  // namespace qgfid
