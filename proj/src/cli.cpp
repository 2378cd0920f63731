#include "qgfid/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgfid/certify.hpp"
#include "qgfid/density.hpp"
#include "qgfid/geometry.hpp"
#include "qgfid/qseries.hpp"
#include "qgfid/transforms.hpp"

namespace qgfid {

namespace {

using nlohmann::json;

// Raised for malformed flag values that CLI11 cannot check by itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> split_numbers(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": cannot parse '" + item + "' as a number");
    }
  }
  if (values.size() != expected) {
    throw UsageError(std::string(flag) + ": expected " + std::to_string(expected) +
                     " colon-separated values");
  }
  return values;
}

cplx parse_complex(const std::string& text) {
  const auto v = split_numbers(text, 2, "--z");
  return {v[0], v[1]};
}

std::vector<double> parse_sweep(const std::string& text) {
  const auto v = split_numbers(text, 3, "--sweep");
  if (!(v[2] > 0.0) || v[1] < v[0]) throw UsageError("--sweep: need a ≤ b and step > 0");
  const long count = std::lround(std::floor((v[1] - v[0]) / v[2] + 1e-9)) + 1;
  if (count > 10000) throw UsageError("--sweep: too many values");
  std::vector<double> qs;
  for (long k = 0; k < count; ++k) {
    // Snap to 12 decimals so 0.1 + 2*0.1 prints as 0.3.
    qs.push_back(std::round((v[0] + k * v[2]) * 1e12) / 1e12);
  }
  return qs;
}

GridSpec parse_grid(const std::string& text) {
  const auto v = split_numbers(text, 6, "--grid");
  GridSpec g;
  g.re_min = v[0];
  g.re_max = v[1];
  g.im_min = v[2];
  g.im_max = v[3];
  if (v[4] != std::floor(v[4]) || v[5] != std::floor(v[5])) {
    throw UsageError("--grid: nx and ny must be integers");
  }
  g.nx = static_cast<int>(v[4]);
  g.ny = static_cast<int>(v[5]);
  return g;
}

json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json control_json(const SeriesControl& c) { return {{"abs_tol", c.abs_tol}, {"max_terms", c.max_terms}}; }

json policy_json(const InversionPolicy& p) {
  return {{"newton_tol", p.newton_tol},
          {"newton_max_iter", p.newton_max_iter},
          {"continuation_steps", p.continuation_steps}};
}

// Options shared by the subcommands; each subcommand binds the ones it uses.
struct Options {
  double q = std::numeric_limits<double>::quiet_NaN();
  std::string out_path;
  std::string format;
  SeriesControl ctrl;
  InversionPolicy policy;

  int n_points = 201;
  std::string form = "chebyshev";

  std::string z = "0:1";
  std::string branch = "upper";

  std::string sweep;
  std::string grid = "-10:10:0.001:10:200:100";
  std::string spacing = "log";
  double tol = kDefaultCertifyTolerance;
  unsigned threads = 0;

  double t_max = 100.0;
  double trace_tol = 1e-9;

  int n_zeros = 5;

  int k_max = 10;
  int truncation = 64;
  double quad_tol = 1e-12;
};

void add_output_flags(CLI::App* cmd, Options& o, const std::string& default_format) {
  cmd->add_option("--out", o.out_path, "Output file (default: standard output)");
  cmd->add_option("--format", o.format, "Output format (default: " + default_format + ")")
      ->check(CLI::IsMember({"csv", "json"}));
}

void add_series_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--abs-tol", o.ctrl.abs_tol, "Series truncation tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-terms", o.ctrl.max_terms, "Series term budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_policy_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--newton-tol", o.policy.newton_tol, "Inversion residual tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--newton-max-iter", o.policy.newton_max_iter, "Newton polish iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--steps", o.policy.continuation_steps, "Initial homotopy step count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

int cmd_density(const Options& o, std::ostream& out) {
  if (o.n_points < 2) throw UsageError("--n-points must be at least 2");
  const QParam q(o.q);
  const bool theta = o.form == "theta";
  std::optional<ThetaDensityCalibration> cal;
  if (theta) cal = calibrate_theta_density(q, o.ctrl);
  std::vector<double> xs, fs;
  for (int j = 0; j < o.n_points; ++j) {
    const double x = j + 1 == o.n_points ? 2.0 : -2.0 + 4.0 * j / (o.n_points - 1);
    xs.push_back(x);
    fs.push_back(theta ? std::max(0.0, q_gaussian_density_theta(x, q, *cal, o.ctrl))
                       : q_gaussian_density(x, q, o.ctrl));
  }
  if (o.format == "csv") {
    out << "x,density\n";
    for (std::size_t j = 0; j < xs.size(); ++j) out << format_double(xs[j]) << ',' << format_double(fs[j]) << '\n';
    return kExitOk;
  }
  json doc = {{"q", o.q}, {"form", o.form}, {"n_points", o.n_points}, {"series", control_json(o.ctrl)},
              {"x", xs}, {"density", fs}};
  if (cal) {
    doc["theta_reading"] = to_string(cal->reading);
    doc["theta_normalization"] = cal->normalization;
  }
  out << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_transform(const Options& o, std::ostream& out) {
  const QParam q(o.q);
  const cplx z = parse_complex(o.z);
  const Branch branch = o.branch == "continued" ? Branch::ContinuedThroughCut : Branch::UpperPrincipal;
  json doc = {{"q", o.q}, {"z", complex_json(z)}, {"branch", o.branch},
              {"series", control_json(o.ctrl)}, {"policy", policy_json(o.policy)}};
  const cplx gs = semicircle_cauchy(z, branch);
  doc["semicircle_cauchy"] = complex_json(gs);
  doc["cauchy"] = complex_json(g_q(gs, q, o.ctrl));
  if (z.imag() > 0.0) {
    doc["f_transform"] = complex_json(f_transform(z, q, o.ctrl));
    const PhiResult r = voiculescu_phi_detailed(z, q, o.policy, o.ctrl);
    doc["f_inverse"] = complex_json(r.phi + z);
    doc["phi"] = complex_json(r.phi);
    doc["inversion_residual"] = r.inversion.residual;
  }
  if (o.format == "json") {
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  std::vector<std::string> header{"q", "z_re", "z_im"};
  std::vector<std::string> row{format_double(o.q), format_double(z.real()), format_double(z.imag())};
  for (const char* key : {"semicircle_cauchy", "cauchy", "f_transform", "f_inverse", "phi"}) {
    if (!doc.contains(key)) continue;
    header.push_back(std::string(key) + "_re");
    header.push_back(std::string(key) + "_im");
    row.push_back(format_double(doc[key]["re"].get<double>()));
    row.push_back(format_double(doc[key]["im"].get<double>()));
  }
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
  out << '\n';
  return kExitOk;
}

int cmd_certify(const Options& o, std::ostream& out) {
  GridSpec grid = parse_grid(o.grid);
  grid.im_spacing = o.spacing == "linear" ? GridSpec::ImSpacing::Linear : GridSpec::ImSpacing::Logarithmic;
  grid.validate();
  const bool sweeping = !o.sweep.empty();
  std::vector<QParam> qs;
  if (!sweeping && std::isnan(o.q)) throw UsageError("certify needs --q or --sweep");
  if (sweeping) {
    for (double v : parse_sweep(o.sweep)) qs.emplace_back(v);
  } else {
    qs.emplace_back(o.q);
  }
  const auto certs = sweep(qs, grid, o.tol, o.policy, o.threads);
  const bool all_pass = std::all_of(certs.begin(), certs.end(), [](const auto& c) { return c.pass; });

  if (o.format == "csv") {
    out << "q,max_im_phi,tolerance,pass,violations,inversion_failures,series_terms_max,runtime_ms\n";
    for (const auto& c : certs) {
      out << format_double(c.q) << ',' << format_double(c.max_im_phi) << ',' << format_double(c.tolerance)
          << ',' << (c.pass ? "true" : "false") << ',' << c.violations.size() << ','
          << c.inversion_failures.size() << ',' << c.series_terms_max << ',' << c.runtime_ms << '\n';
    }
  } else if (sweeping) {
    json doc = json::array();
    for (const auto& c : certs) doc.push_back(to_json(c));
    out << doc.dump(2) << '\n';
  } else {
    out << to_json(certs.front()).dump(2) << '\n';
  }
  return all_pass ? kExitOk : kExitFailure;
}

int cmd_trace(const Options& o, std::ostream& out) {
  const QParam q(o.q);
  const PathTrace trace = trace_gamma(q, o.t_max, o.trace_tol, {}, o.ctrl);
  if (o.format == "csv") {
    // Each row carries the sample and its reflection -conj(γ), which traces
    // the other half of the boundary of X_q.
    out << "t,re,im,residual,mirror_re,mirror_im\n";
    for (std::size_t j = 0; j < trace.size(); ++j) {
      const cplx w = trace.points[j];
      const cplx m = -std::conj(w);
      out << format_double(trace.parameters[j]) << ',' << format_double(w.real()) << ','
          << format_double(w.imag()) << ',' << format_double(trace.residuals[j]) << ','
          << format_double(m.real()) << ',' << format_double(m.imag()) << '\n';
    }
    return kExitOk;
  }
  json critical = json::array();
  for (const cplx& c : trace.critical_points) critical.push_back(complex_json(c));
  std::vector<double> re, im, mre, mim;
  for (const cplx& w : trace.points) {
    re.push_back(w.real());
    im.push_back(w.imag());
    mre.push_back(-w.real());
    mim.push_back(w.imag());
  }
  const json doc = {{"q", o.q},
                    {"t_max", o.t_max},
                    {"trace_tol", o.trace_tol},
                    {"stop", trace.stop == PathTrace::Stop::Escaped ? "escaped" : "reached_t_max"},
                    {"max_residual", trace.max_residual()},
                    {"critical_points", critical},
                    {"t", trace.parameters},
                    {"re", re},
                    {"im", im},
                    {"residual", trace.residuals},
                    {"mirror_re", mre},
                    {"mirror_im", mim}};
  out << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_theta(const Options& o, std::ostream& out) {
  if (o.n_zeros < 1) throw UsageError("--n-zeros must be at least 1");
  const QParam q(o.q);
  if (q.value() == 0.0) throw DomainError("theta: q = 0 is degenerate, need q in (0, 0.999]");
  const ThetaCalibration cal = calibrate_theta(q, o.ctrl);

  constexpr double kLimit = 1e-8;
  double worst = 0.0;
  json rows = json::array();
  for (int n = 1; n <= o.n_zeros; ++n) {
    for (int exponent : {n - 1, -n}) {
      for (int sign : {1, -1}) {
        const double r = theta_lattice_residual(q, exponent, sign, o.ctrl);
        worst = std::max(worst, r);
        rows.push_back({{"n", n}, {"exponent", exponent}, {"sign", sign}, {"abs_theta", r}});
      }
    }
  }
  // Ring |w| = 1.3, 64 points.
  double ring_gap = 0.0;
  for (int j = 0; j < 64; ++j) {
    const cplx w = std::polar(1.3, 2.0 * std::numbers::pi * (j + 0.5) / 64.0);
    ring_gap = std::max(ring_gap, std::abs(theta_big(w, q, ThetaForm::Series, o.ctrl) -
                                           theta_big_product(w, q, cal, o.ctrl)));
  }
  const bool ok = worst <= kLimit && ring_gap <= kLimit;

  if (o.format == "csv") {
    out << "n,exponent,sign,abs_theta\n";
    for (const auto& r : rows) {
      out << r["n"].get<int>() << ',' << r["exponent"].get<int>() << ',' << r["sign"].get<int>() << ','
          << format_double(r["abs_theta"].get<double>()) << '\n';
    }
  } else {
    const json doc = {{"q", o.q},
                      {"n_zeros", o.n_zeros},
                      {"constant_G", complex_json(cal.constant_G)},
                      {"calibration_max_discrepancy", cal.max_discrepancy},
                      {"zeros", rows},
                      {"max_abs_theta", worst},
                      {"ring_radius", 1.3},
                      {"ring_points", 64},
                      {"ring_max_discrepancy", ring_gap},
                      {"limit", kLimit},
                      {"pass", ok},
                      {"series", control_json(o.ctrl)}};
    out << doc.dump(2) << '\n';
  }
  return ok ? kExitOk : kExitFailure;
}

int cmd_moments(const Options& o, std::ostream& out) {
  const QParam q(o.q);
  const auto jacobi = jacobi_moments(o.k_max, q, o.truncation);
  std::vector<double> quad;
  for (int k = 0; k <= o.k_max; ++k) {
    quad.push_back(integrate_density(q, MonomialWeight{k}, o.quad_tol, o.ctrl).value.real());
  }
  if (o.format == "csv") {
    out << "k,jacobi,quadrature,difference\n";
    for (int k = 0; k <= o.k_max; ++k) {
      out << k << ',' << format_double(jacobi[k]) << ',' << format_double(quad[k]) << ','
          << format_double(quad[k] - jacobi[k]) << '\n';
    }
    return kExitOk;
  }
  const json doc = {{"q", o.q},         {"k_max", o.k_max},       {"truncation", o.truncation},
                    {"quad_tol", o.quad_tol}, {"series", control_json(o.ctrl)},
                    {"jacobi", jacobi}, {"quadrature", quad}};
  out << doc.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for the q-Gaussian law and its free cumulant transform", "qgfid"};
  app.require_subcommand(1);
  Options o;

  const auto q_flag = [&o](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--q", o.q, "Deformation parameter in [0, 0.999]");
    if (required) opt->required();
    return opt;
  };

  auto* density = app.add_subcommand("density", "Tabulate f_q on an equispaced grid of [-2, 2]");
  q_flag(density, true);
  density->add_option("--n-points", o.n_points, "Number of abscissae")->capture_default_str();
  density->add_option("--form", o.form, "Density formula")
      ->check(CLI::IsMember({"chebyshev", "theta"}))
      ->capture_default_str();
  add_output_flags(density, o, "csv");
  add_series_flags(density, o);

  auto* transform = app.add_subcommand("transform-eval", "Evaluate G_s, G, F, F^-1 and phi at one point");
  q_flag(transform, true);
  transform->add_option("--z", o.z, "Point as re:im")->capture_default_str();
  transform->add_option("--branch", o.branch, "Semicircle Cauchy branch")
      ->check(CLI::IsMember({"upper", "continued"}))
      ->capture_default_str();
  add_output_flags(transform, o, "json");
  add_series_flags(transform, o);
  add_policy_flags(transform, o);

  auto* certify = app.add_subcommand("certify", "Check Im phi <= tol on a grid in C+");
  auto* certify_q = q_flag(certify, false);
  auto* sweep_opt = certify->add_option("--sweep", o.sweep, "q range as a:b:step");
  certify_q->excludes(sweep_opt);
  certify->add_option("--grid", o.grid, "re_min:re_max:im_min:im_max:nx:ny")->capture_default_str();
  certify->add_option("--spacing", o.spacing, "Spacing of imaginary parts")
      ->check(CLI::IsMember({"linear", "log"}))
      ->capture_default_str();
  certify->add_option("--tol", o.tol, "Largest admissible Im phi")->capture_default_str();
  certify->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  add_output_flags(certify, o, "json");
  add_policy_flags(certify, o);

  auto* trace = app.add_subcommand("trace-curve", "Trace the preimage curve of [0, inf) under g_q");
  q_flag(trace, true);
  trace->add_option("--t-max", o.t_max, "Largest curve parameter")->check(CLI::PositiveNumber)->capture_default_str();
  trace->add_option("--trace-tol", o.trace_tol, "Residual bound |g_q(w) - t|")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_output_flags(trace, o, "csv");
  add_series_flags(trace, o);

  auto* theta = app.add_subcommand("theta", "Check the zeros and product form of the theta function");
  q_flag(theta, true);
  theta->add_option("--n-zeros", o.n_zeros, "Zeros checked per family")->capture_default_str();
  add_output_flags(theta, o, "json");
  add_series_flags(theta, o);

  auto* moments = app.add_subcommand("moments", "Compare Jacobi-matrix and quadrature moments");
  q_flag(moments, true);
  moments->add_option("--k-max", o.k_max, "Highest (even) moment")->capture_default_str();
  moments->add_option("--truncation", o.truncation, "Jacobi matrix size")->capture_default_str();
  moments->add_option("--quad-tol", o.quad_tol, "Quadrature tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_output_flags(moments, o, "csv");
  add_series_flags(moments, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  struct Handler {
    CLI::App* cmd;
    const char* default_format;
    std::function<int(const Options&, std::ostream&)> run;
  };
  const std::vector<Handler> handlers = {
      {density, "csv", cmd_density}, {transform, "json", cmd_transform}, {certify, "json", cmd_certify},
      {trace, "csv", cmd_trace},     {theta, "json", cmd_theta},         {moments, "csv", cmd_moments}};

  std::ofstream file;
  std::ostream* target = &out;
  // Produce the whole document before touching the output target.
  std::ostringstream buffer;
  int code = kExitOk;
  try {
    for (const Handler& h : handlers) {
      if (!h.cmd->parsed()) continue;
      if (o.format.empty()) o.format = h.default_format;
      code = h.run(o, buffer);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitFailure;
  }
  if (!o.out_path.empty()) {
    file.open(o.out_path);
    if (!file) {
      err << "error: cannot open " << o.out_path << " for writing\n";
      return kExitUsage;
    }
    target = &file;
  }
  *target << buffer.str();
  return code;
}

}  // namespace qgfid
