// fraclen: command-line driver for the fractional-length toolkit.
//
// Every command writes a CSV document. Lines starting with '#' carry the tool
// version, the echoed configuration, the seed and the curve digest before the
// data, and a summary after it. Wall-clock timing goes to stderr only, so
// reruns with the same configuration produce identical files.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "fraclen/curvature.hpp"
#include "fraclen/curve.hpp"
#include "fraclen/disc.hpp"
#include "fraclen/errors.hpp"
#include "fraclen/fraclen.hpp"
#include "fraclen/spec_io.hpp"
#include "fraclen/verify.hpp"

namespace {

using namespace fraclen;

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 20240611;

enum Exit : int { kOk = 0, kConfigError = 1, kNumericalError = 2 };

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num_list(const std::vector<double>& xs, char sep = ' ') {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += num(xs[i]);
  }
  return out;
}

std::vector<double> to_std(const VecN& v) { return {v.data(), v.data() + v.size()}; }

struct Common {
  std::string curve_path;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  std::string output = "-";
  double window_radius = 0.0;
  std::vector<double> window_center;
  Tolerances tol;
};

/// Collects the output document. Config entries keep insertion order.
class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void config(const std::string& key, const std::string& value) { config_.emplace_back(key, value); }
  void config(const std::string& key, double value) { config(key, num(value)); }
  void digest(std::uint64_t d) { digest_ = hex64(d); }
  void seed(std::uint64_t s) { seed_ = std::to_string(s); }
  void header(std::vector<std::string> cols) { columns_ = std::move(cols); }
  void row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    rows_.push_back(std::move(line));
  }
  void summary(const std::string& key, const std::string& value) { summary_.emplace_back(key, value); }
  void summary(const std::string& key, double value) { summary(key, num(value)); }

  std::string render() const {
    std::ostringstream out;
    out << "# fraclen " << kVersion << '\n';
    out << "# command: " << command_ << '\n';
    for (const auto& [k, v] : config_) out << "# config: " << k << " = " << v << '\n';
    out << "# seed: " << seed_ << '\n';
    out << "# curve_digest: " << digest_ << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& r : rows_) out << r << '\n';
    for (const auto& [k, v] : summary_) out << "# summary: " << k << " = " << v << '\n';
    return out.str();
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> config_;
  std::string digest_ = "none";
  std::string seed_ = "none";
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
  std::vector<std::pair<std::string, std::string>> summary_;
};

void emit(const Common& c, const Report& report) {
  const std::string text = report.render();
  if (c.output == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + c.output + "'");
  out << text;
  if (!out) throw ConfigError("failed writing output file '" + c.output + "'");
}

void echo_common(Report& r, const Common& c, bool with_window) {
  r.config("curve", c.curve_path.empty() ? "none" : c.curve_path);
  if (with_window) {
    r.config("window_radius", c.window_radius > 0.0 ? num(c.window_radius) : "from-curve-file");
    r.config("window_center", c.window_center.empty() ? "from-curve-file" : num_list(c.window_center));
  }
  r.config("tol_plane", c.tol.tol_plane);
  r.config("tol_radius", c.tol.tol_radius);
  r.config("tol_tangent", c.tol.tol_tangent);
  r.config("grid", std::to_string(c.tol.grid));
  r.seed(c.seed);
}

struct LoadedCurve {
  CurveFile file;
  Curve curve;
};

LoadedCurve load(const Common& c) {
  if (c.curve_path.empty()) throw ConfigError("--curve is required for this command");
  CurveFile f = load_curve_spec(c.curve_path);
  Curve curve = make_curve(f.spec);
  return {std::move(f), std::move(curve)};
}

/// Window from flags, falling back to the curve file, then to a ball of twice
/// the bounding radius about the origin.
Window resolve_window(const Common& c, const LoadedCurve& lc) {
  const int n = lc.curve.dim();
  VecN center = VecN::Zero(n);
  double radius = 0.0;
  if (lc.file.window) {
    for (int i = 0; i < n; ++i) center[i] = lc.file.window->center[static_cast<std::size_t>(i)];
    radius = lc.file.window->radius;
  }
  if (!c.window_center.empty()) {
    if (static_cast<int>(c.window_center.size()) != n) throw ConfigError("--window-center has the wrong dimension");
    for (int i = 0; i < n; ++i) center[i] = c.window_center[static_cast<std::size_t>(i)];
  }
  if (c.window_radius > 0.0) radius = c.window_radius;
  if (!(radius > 0.0)) radius = 2.0 * bounding_radius(lc.curve, center);
  return Window(center, radius);
}

void add_common(CLI::App* sub, Common& c, bool needs_curve) {
  auto* opt = sub->add_option("--curve", c.curve_path, "curve file (JSON)");
  if (needs_curve) opt->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--workers", c.workers, "worker threads (0 = all cores); never changes results")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("-o,--output", c.output, "output CSV path, '-' for stdout")->capture_default_str();
  sub->add_option("--tol-plane", c.tol.tol_plane, "hyperplane tolerance (relative to curve scale)")
      ->capture_default_str();
  sub->add_option("--tol-radius", c.tol.tol_radius, "disc-boundary tolerance")->capture_default_str();
  sub->add_option("--tol-tangent", c.tol.tol_tangent, "tangency threshold on |t.u|")->capture_default_str();
  sub->add_option("--grid", c.tol.grid, "root-isolation grid intervals")->capture_default_str();
}

void add_window(CLI::App* sub, Common& c) {
  sub->add_option("--window-radius", c.window_radius, "window ball radius (default: from the curve file)");
  sub->add_option("--window-center", c.window_center, "window ball center (default: from the curve file)")->delimiter(',');
}

double timed(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report_warnings(Report& r, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) r.summary("warning", w);
}

// ---------------------------------------------------------------------------

struct LengthArgs {
  double sigma = 0.5;
  std::uint64_t samples = 200000;
  std::string mode = "canonical";
};

UnbiasMode parse_mode(const std::string& m) {
  if (m == "canonical") return UnbiasMode::canonical;
  if (m == "multiplicity") return UnbiasMode::multiplicity;
  throw ConfigError("unknown --mode '" + m + "'");
}

void run_length(const Common& c, const LengthArgs& a) {
  const LoadedCurve lc = load(c);
  const Window w = resolve_window(c, lc);
  LenOptions opt;
  opt.tol = c.tol;
  opt.workers = c.workers;
  opt.mode = parse_mode(a.mode);
  Report r("length");
  echo_common(r, c, true);
  r.config("sigma", a.sigma);
  r.config("samples", std::to_string(a.samples));
  r.config("mode", a.mode);
  r.digest(lc.file.digest);
  EstimatorResult res;
  const double secs = timed([&] { res = len_sigma(lc.curve, w, SigmaParam(a.sigma), a.samples, c.seed, opt); });
  r.header({"sigma", "estimate", "std_error", "scaled_estimate", "n_samples", "n_rejected_degenerate"});
  r.row({num(a.sigma), num(res.estimate), num(res.std_error), num((1.0 - a.sigma) * res.estimate),
         std::to_string(res.n_samples), std::to_string(res.n_rejected_degenerate)});
  r.summary("window", "center " + num_list(to_std(w.center)) + " radius " + num(w.R));
  r.summary("proposal", res.proposal.name);
  r.summary("estimate", res.estimate);
  r.summary("std_error", res.std_error);
  report_warnings(r, res.warnings);
  emit(c, r);
  std::cerr << "length: " << secs << " s\n";
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::vector<double> sigmas = {0.5, 0.7, 0.9, 0.95, 0.99};
  std::uint64_t samples = 1000000;
};

void run_limit_sweep(const Common& c, const SweepArgs& a) {
  const LoadedCurve lc = load(c);
  const Window w = resolve_window(c, lc);
  LenOptions opt;
  opt.tol = c.tol;
  opt.workers = c.workers;
  std::vector<SigmaParam> sig;
  for (double s : a.sigmas) sig.emplace_back(s);
  Report r("limit-sweep");
  echo_common(r, c, true);
  r.config("sigmas", num_list(a.sigmas));
  r.config("samples", std::to_string(a.samples));
  r.digest(lc.file.digest);
  LimitSweepResult res;
  const double secs = timed([&] { res = limit_sweep(lc.curve, w, sig, a.samples, c.seed, opt); });
  r.header({"row", "sigma", "scaled_estimate", "std_error", "estimate", "n_rejected_degenerate"});
  for (const auto& row : res.rows) {
    r.row({"sigma", num(row.sigma), num(row.scaled_estimate), num(row.std_error), num(row.raw.estimate),
           std::to_string(row.raw.n_rejected_degenerate)});
  }
  r.row({"extrapolation", "1", num(res.extrapolation.value), num(res.extrapolation.std_error), "", ""});
  if (res.cubic) r.row({"extrapolation_cubic", "1", num(res.cubic->value), num(res.cubic->std_error), "", ""});
  const int n = lc.curve.dim();
  r.summary("length", res.length);
  r.summary("target_formula", "4*alpha_{n-1}*alpha_{n-2}/(n-1) * length");
  r.summary("target", res.target);
  r.summary("target_deviation_sigma", (res.extrapolation.value - res.target) / res.extrapolation.std_error);
  r.summary("target_relative_deviation", (res.extrapolation.value - res.target) / res.target);
  r.summary("corrected_target_formula", "2*alpha_{n-1}^2 * length");
  r.summary("corrected_target", res.exact_target);
  r.summary("corrected_target_deviation_sigma",
            (res.extrapolation.value - res.exact_target) / res.extrapolation.std_error);
  r.summary("extrapolation_slope", res.extrapolation.slope);
  r.summary("extrapolation_residual_rms", res.extrapolation.residual_rms);
  if (res.cubic) {
    r.summary("cubic_extrapolation", res.cubic->value);
    r.summary("cubic_extrapolation_std_error", res.cubic->std_error);
    r.summary("cubic_corrected_target_deviation_sigma", (res.cubic->value - res.exact_target) / res.cubic->std_error);
  }
  r.summary("dimension", std::to_string(n));
  for (const auto& row : res.rows) report_warnings(r, row.raw.warnings);
  emit(c, r);
  std::cerr << "limit-sweep: " << secs << " s\n";
}

// ---------------------------------------------------------------------------

struct CurvArgs {
  double s = 0.0;
  double sigma = 0.5;
  double r_min = 0.0;
  double r_max = 0.0;
  std::uint64_t samples = 200000;
  bool antithetic = false;
  std::vector<double> sweep = {1.0, 2.0, 4.0, 8.0};
};

void run_curvature(const Common& c, const CurvArgs& a, bool el) {
  const LoadedCurve lc = load(c);
  const CurvatureDefaults d = default_radii(lc.curve, a.s, c.tol.grid);
  const double r_min = a.r_min > 0.0 ? a.r_min : d.r_min;
  const double r_max = a.r_max > 0.0 ? a.r_max : d.r_max;
  CurvatureOptions opt;
  opt.tol = c.tol;
  opt.workers = c.workers;
  opt.antithetic = a.antithetic;
  opt.sweep_factors = a.sweep;
  const char* name = el ? "el-residual" : "curvature";
  Report r(name);
  echo_common(r, c, false);
  r.config("s", a.s);
  r.config("sigma", a.sigma);
  r.config("r_min", r_min);
  r.config("r_max", r_max);
  r.config("samples", std::to_string(a.samples));
  r.config("antithetic", a.antithetic ? "true" : "false");
  r.config("sweep_factors", num_list(a.sweep));
  r.digest(lc.file.digest);
  CurvatureResult res;
  const double secs = timed([&] {
    res = el ? el_residual(lc.curve, a.s, SigmaParam(a.sigma), r_min, r_max, a.samples, c.seed, opt)
             : kappa_sigma(lc.curve, a.s, SigmaParam(a.sigma), r_min, r_max, a.samples, c.seed, opt);
  });
  const int n = lc.curve.dim();
  std::vector<std::string> cols = {"s", "sigma", "r_min"};
  for (int i = 0; i < n; ++i) cols.push_back("k" + std::to_string(i));
  cols.push_back("kappa_scalar");
  for (int i = 0; i < n; ++i) cols.push_back("se" + std::to_string(i));
  r.header(cols);
  for (const auto& row : res.sweep) {
    std::vector<std::string> cells = {num(res.s), num(res.sigma), num(row.r_min)};
    for (int i = 0; i < n; ++i) cells.push_back(num(row.kappa_vector[i]));
    cells.push_back(num(row.kappa_vector.norm()));
    for (int i = 0; i < n; ++i) cells.push_back(num(row.std_error_vector[i]));
    r.row(cells);
  }
  r.summary("z", num_list(to_std(res.z)));
  r.summary("tangent", num_list(to_std(res.tangent)));
  r.summary("normalization", el ? "(2r)^(1+sigma)" : "r^(1+sigma)");
  r.summary("kappa_scalar", res.kappa_scalar);
  r.summary("tangential_component", res.kappa_vector.dot(res.tangent));
  r.summary("n_rejected_degenerate", std::to_string(res.n_rejected_degenerate));
  report_warnings(r, res.warnings);
  emit(c, r);
  std::cerr << name << ": " << secs << " s\n";
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  std::vector<double> p;
  std::vector<double> u;
  double r = 0.0;
};

void run_classify(const Common& c, const ClassifyArgs& a) {
  const LoadedCurve lc = load(c);
  const int n = lc.curve.dim();
  if (static_cast<int>(a.p.size()) != n || static_cast<int>(a.u.size()) != n) {
    throw ConfigError("--p and --u must have " + std::to_string(n) + " components");
  }
  VecN p(n);
  VecN u(n);
  for (int i = 0; i < n; ++i) {
    p[i] = a.p[static_cast<std::size_t>(i)];
    u[i] = a.u[static_cast<std::size_t>(i)];
  }
  const Disc disc(p, u, a.r);
  const DiscClass cls = classify_disc(lc.curve, disc, c.tol);
  Report r("classify");
  echo_common(r, c, false);
  r.config("p", num_list(a.p));
  r.config("u", num_list(a.u));
  r.config("r", a.r);
  r.digest(lc.file.digest);
  std::vector<std::string> cols = {"hit", "s", "xi"};
  for (int i = 0; i < n; ++i) cols.push_back("z" + std::to_string(i));
  r.header(cols);
  for (std::size_t k = 0; k < cls.interior_hits.size(); ++k) {
    const Hit& h = cls.interior_hits[k];
    std::vector<std::string> cells = {std::to_string(k), num(h.s), num(h.xi)};
    for (int i = 0; i < n; ++i) cells.push_back(num(h.z[i]));
    r.row(cells);
  }
  r.summary("label", std::string(to_string(cls.label)));
  r.summary("count", std::to_string(cls.count));
  if (const auto best = canonical_hit(cls)) r.summary("canonical_s", best->s);
  emit(c, r);
}

// ---------------------------------------------------------------------------

struct JacArgs {
  std::string map = "all";
  int n = 3;
  int points = 100;
  double h = 1e-5;
  std::string convention = "product";
};

void run_verify_jacobians(const Common& c, const JacArgs& a) {
  std::vector<MapId> maps;
  if (a.map == "all") {
    maps = {MapId::Phi, MapId::Xi, MapId::Psi};
  } else {
    maps = {map_id_from_string(a.map)};
  }
  MeasureConvention conv = MeasureConvention::product;
  if (a.convention == "hausdorff") {
    conv = MeasureConvention::hausdorff;
  } else if (a.convention != "product") {
    throw ConfigError("unknown --convention '" + a.convention + "'");
  }
  if (a.points < 1) throw ConfigError("--points must be positive");
  std::optional<LoadedCurve> lc;
  std::optional<Curve> builtin;
  if (!c.curve_path.empty()) {
    lc = load(c);
    if (lc->curve.dim() != a.n) throw ConfigError("--n does not match the curve dimension");
  } else {
    CurveSpec spec{CurveKind::helix, a.n, {{"radius", {1.0}}, {"pitch", {0.25}}}, false};
    builtin = make_curve(spec);
  }
  const Curve& curve = lc ? lc->curve : *builtin;
  Report r("verify-jacobians");
  echo_common(r, c, false);
  r.config("map", a.map);
  r.config("n", std::to_string(a.n));
  r.config("points", std::to_string(a.points));
  r.config("h", a.h);
  r.config("convention", a.convention);
  r.digest(lc ? lc->file.digest : fnv1a("builtin-helix-" + std::to_string(a.n)));
  r.header({"map", "point_digest", "fd_gram_sqrt", "closed_form", "rel_error", "derived", "rel_error_derived"});
  for (MapId m : maps) {
    SampleStream rng(derive_seed(c.seed, static_cast<std::uint64_t>(m)));
    double worst = 0.0;
    double worst_derived = 0.0;
    for (int i = 0; i < a.points; ++i) {
      const ManifoldPoint q = random_manifold_point(m, curve, rng);
      const JacobianReport rep = jacobian_report(m, curve, q, a.h, conv);
      const double der = derived_jacobian(m, curve, q, conv);
      const double rel_der = std::abs(rep.fd_gram_sqrt - der) / std::max(der, kJacobianFloor);
      worst = std::max(worst, rep.rel_error);
      worst_derived = std::max(worst_derived, rel_der);
      r.row({std::string(to_string(m)), hex64(point_digest(q)), num(rep.fd_gram_sqrt), num(rep.closed_form),
             num(rep.rel_error), num(der), num(rel_der)});
    }
    r.summary(std::string(to_string(m)) + "_max_rel_error", worst);
    r.summary(std::string(to_string(m)) + "_max_rel_error_derived", worst_derived);
  }
  emit(c, r);
}

// ---------------------------------------------------------------------------

struct LemmaArgs {
  int n = 3;
  std::vector<double> c;
  std::uint64_t samples = 1000000;
};

void run_verify_lemma(const Common& c, const LemmaArgs& a) {
  require_dimension(a.n, 3, "verify-lemma-int");
  VecN dir = VecN::Zero(a.n);
  if (a.c.empty()) {
    dir[0] = 1.0;
  } else {
    if (static_cast<int>(a.c.size()) != a.n) throw ConfigError("--c must have n components");
    for (int i = 0; i < a.n; ++i) dir[i] = a.c[static_cast<std::size_t>(i)];
  }
  Report r("verify-lemma-int");
  echo_common(r, c, false);
  r.config("n", std::to_string(a.n));
  r.config("c", num_list(to_std(dir)));
  r.config("samples", std::to_string(a.samples));
  LemmaIntResult res;
  const double secs = timed([&] { res = verify_lemma_int(a.n, dir, a.samples, c.seed, c.workers); });
  r.header({"n", "estimate", "std_error", "target", "z_score", "corrected_target", "corrected_z_score"});
  r.row({std::to_string(a.n), num(res.estimate.estimate), num(res.estimate.std_error), num(res.target),
         num(res.z_score), num(res.exact_target), num(res.exact_z_score)});
  r.summary("target_formula", "4*alpha_{n-1}*alpha_{n-2}");
  r.summary("target", res.target);
  r.summary("z_score", res.z_score);
  r.summary("corrected_target_formula", "2*(n-1)*alpha_{n-1}^2");
  r.summary("corrected_target", res.exact_target);
  r.summary("corrected_z_score", res.exact_z_score);
  r.summary("relative_std_error", res.estimate.std_error / res.target);
  emit(c, r);
  std::cerr << "verify-lemma-int: " << secs << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional sigma-length of curves: estimators and verification"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  LengthArgs length_args;
  SweepArgs sweep_args;
  CurvArgs curv_args;
  ClassifyArgs classify_args;
  JacArgs jac_args;
  LemmaArgs lemma_args;

  auto* length = app.add_subcommand("length", "Monte-Carlo estimate of Len_sigma(C, window)");
  add_common(length, common, true);
  add_window(length, common);
  length->add_option("--sigma", length_args.sigma, "sigma in (0,1)")->capture_default_str();
  length->add_option("--samples", length_args.samples, "number of samples")->capture_default_str();
  length->add_option("--mode", length_args.mode, "canonical | multiplicity")->capture_default_str();

  auto* sweep = app.add_subcommand("limit-sweep", "(1-sigma)Len_sigma over a sigma grid, extrapolated to sigma=1");
  add_common(sweep, common, true);
  add_window(sweep, common);
  sweep->add_option("--sigmas", sweep_args.sigmas, "comma-separated sigma grid")->delimiter(',')->capture_default_str();
  sweep->add_option("--samples", sweep_args.samples, "samples per sigma")->capture_default_str();

  auto add_curv = [&](CLI::App* sub) {
    add_common(sub, common, true);
    sub->add_option("--s", curv_args.s, "curve parameter of the point")->capture_default_str();
    sub->add_option("--sigma", curv_args.sigma, "sigma in (0,1)")->capture_default_str();
    sub->add_option("--r-min", curv_args.r_min, "lower radius cutoff (default 1e-3 * curve scale)");
    sub->add_option("--r-max", curv_args.r_max, "upper radius cutoff (default 2 * bounding radius + scale)");
    sub->add_option("--samples", curv_args.samples, "number of samples")->capture_default_str();
    sub->add_flag("--antithetic", curv_args.antithetic, "pair each (a,b) with (-a,-b)");
    sub->add_option("--sweep", curv_args.sweep, "r_min multipliers for the truncation sweep")
        ->delimiter(',')
        ->capture_default_str();
  };
  auto* curvature = app.add_subcommand("curvature", "nonlocal curvature vector at a curve point");
  add_curv(curvature);
  auto* el = app.add_subcommand("el-residual", "Euler-Lagrange residual at a curve point");
  add_curv(el);

  auto* classify = app.add_subcommand("classify", "classify one disc against the curve");
  add_common(classify, common, true);
  classify->add_option("--p", classify_args.p, "disc center")->delimiter(',')->required();
  classify->add_option("--u", classify_args.u, "disc normal")->delimiter(',')->required();
  classify->add_option("--r", classify_args.r, "disc radius")->required();

  auto* jac = app.add_subcommand("verify-jacobians", "finite-difference check of the change-of-variables factors");
  add_common(jac, common, false);
  jac->add_option("--map", jac_args.map, "Phi | Xi | Psi | all")->capture_default_str();
  jac->add_option("--n", jac_args.n, "ambient dimension (built-in helix when --curve is absent)")
      ->capture_default_str();
  jac->add_option("--points", jac_args.points, "random points per map")->capture_default_str();
  jac->add_option("--step", jac_args.h, "finite-difference step h")->capture_default_str();
  jac->add_option("--convention", jac_args.convention, "product | hausdorff")->capture_default_str();

  auto* lemma = app.add_subcommand("verify-lemma-int", "Monte-Carlo integral of |b.c| over orthonormal pairs");
  add_common(lemma, common, false);
  lemma->add_option("--n", lemma_args.n, "ambient dimension")->capture_default_str();
  lemma->add_option("--c", lemma_args.c, "unit direction c (default e1)")->delimiter(',');
  lemma->add_option("--samples", lemma_args.samples, "number of samples")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*length) run_length(common, length_args);
    if (*sweep) run_limit_sweep(common, sweep_args);
    if (*curvature) run_curvature(common, curv_args, false);
    if (*el) run_curvature(common, curv_args, true);
    if (*classify) run_classify(common, classify_args);
    if (*jac) run_verify_jacobians(common, jac_args);
    if (*lemma) run_verify_lemma(common, lemma_args);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const CurveSpecError& e) {
    std::cerr << "curve spec error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
