// tomokit command-line front end: tomographic transforms, admissibility
// classification and scaling scans over phase-space states.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tomokit/tomokit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tomokit;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_parse = 2;
constexpr int exit_numeric = 3;

std::string fmt(double v) { return detail::format_double(v); }

std::vector<double> split_csv(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw parse_error("bad number '" + tok + "' in list", 0);
    out.push_back(v);
  }
  return out;
}

struct GlobalConfig {
  double hbar = 1.0;
  int dim = 64;
  double window = 8.0;
  int grid_n = 257;
  double tol = 0.0;  // 0 = per-command default
  unsigned seed = 12345;
};

struct StateSpec {
  std::string kind;  // gaussian | grid | fock
  std::string sigma_csv = "0.5,0,0.5";
  std::string mean_csv = "0,0";
  std::string grid_path;
  int fock_level = 1;
};

struct ResolvedState {
  PhaseGrid grid;
  std::optional<GaussianState> gaussian;
  std::string digest;
};

void add_state_options(CLI::App* cmd, StateSpec& spec) {
  cmd->add_option("--state", spec.kind, "state kind: gaussian | grid | fock")
      ->required()
      ->check(CLI::IsMember({"gaussian", "grid", "fock"}));
  cmd->add_option("--sigma", spec.sigma_csv, "dispersions qq,qp,pp (gaussian)");
  cmd->add_option("--mean", spec.mean_csv, "means q,p (gaussian)");
  cmd->add_option("--input", spec.grid_path, "phasegrid v1 file (grid)");
  cmd->add_option("--level", spec.fock_level, "oscillator level (fock)");
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

ResolvedState resolve_state(const StateSpec& spec, const GlobalConfig& cfg) {
  if (spec.kind == "gaussian") {
    auto s = split_csv(spec.sigma_csv);
    auto m = split_csv(spec.mean_csv);
    if (s.size() != 3) throw parse_error("--sigma needs qq,qp,pp", 0);
    if (m.size() != 2) throw parse_error("--mean needs q,p", 0);
    GaussianState state = GaussianState::single_mode(s[0], s[2], s[1], m[0], m[1]);
    GridSpec gs = GridSpec::symmetric(cfg.window, cfg.window, cfg.grid_n, cfg.grid_n);
    return {make_gaussian_grid(state, gs), state,
            fnv1a_hex("gaussian:" + spec.sigma_csv + ";" + spec.mean_csv)};
  }
  if (spec.kind == "fock") {
    if (spec.fock_level < 0) throw parse_error("--level must be nonnegative", 0);
    double half = cfg.window * std::sqrt(cfg.hbar);
    GridSpec gs = GridSpec::symmetric(half, half, cfg.grid_n, cfg.grid_n);
    return {fock_wigner_grid(spec.fock_level, gs, cfg.hbar), std::nullopt,
            fnv1a_hex("fock:" + std::to_string(spec.fock_level))};
  }
  if (spec.grid_path.empty()) throw parse_error("--input required for --state grid", 0);
  PhaseGrid g = read_phasegrid(spec.grid_path);
  double mass = g.mass();
  if (std::abs(mass - 1.0) > 1e-3)
    throw normalization_error("input grid not normalized", mass);
  return {std::move(g), std::nullopt, file_digest(spec.grid_path)};
}

int clamp_dim(int dim, std::vector<std::string>& warnings) {
  const char* cap_env = std::getenv("TOMOKIT_MAX_DIM");
  if (!cap_env) return dim;
  int cap = std::atoi(cap_env);
  if (cap > 0 && dim > cap) {
    warnings.push_back("dim clamped to TOMOKIT_MAX_DIM=" + std::to_string(cap));
    return cap;
  }
  return dim;
}

void print_header(const std::string& command, const std::string& digest) {
  std::cout << "command:              " << command << "\n";
  std::cout << "input-digest:         " << digest << "\n";
}

// ---------------------------------------------------------------------------

int run_tomogram(const StateSpec& spec, const GlobalConfig& cfg,
                 const std::string& frames_path, int theta_count, double theta_min,
                 double theta_max, double lambda, int n_x, const std::string& out_path) {
  ResolvedState state = resolve_state(spec, cfg);

  std::vector<Frame> frames;
  if (!frames_path.empty()) {
    frames = read_frames(frames_path);
  } else {
    if (theta_count < 1) throw parse_error("--theta-count must be positive", 0);
    for (int k = 0; k < theta_count; ++k) {
      double th = theta_min + (theta_max - theta_min) *
                                  (theta_count == 1 ? 0.0 : double(k) / (theta_count - 1));
      frames.push_back(frame_from_polar(lambda, th));
    }
  }

  SampledTomogram result{{}, 0, 0, 0, {}};
  if (state.gaussian) {
    // analytic Gaussian slices sampled exactly
    GaussianTomogram gt{state.gaussian->mean.head<2>(),
                        state.gaussian->sigma.topLeftCorner<2, 2>()};
    double r_max = 0.0;
    for (const auto& f : frames) r_max = std::max(r_max, f.norm());
    double x_half = cfg.window * r_max;
    Eigen::MatrixXd values(frames.size(), n_x);
    SampledTomogram st{frames, -x_half, x_half, n_x, std::move(values)};
    for (size_t m = 0; m < frames.size(); ++m)
      for (int k = 0; k < n_x; ++k)
        st.values(static_cast<int>(m), k) = gt.value(frames[m], st.x_at(k));
    result = std::move(st);
  } else {
    result = tomogram_of_grid(state.grid, frames, n_x).sampled();
  }

  write_tomogram(out_path, result);
  print_header("tomogram", state.digest);
  std::cout << "frames:               " << frames.size() << "\n";
  std::cout << "out:                  " << out_path << "\n";

  double tol = cfg.tol > 0.0 ? cfg.tol : (state.gaussian ? 1e-6 : 1e-3);
  bool ok = true;
  for (size_t m = 0; m < frames.size(); ++m) {
    double res = std::abs(result.slice_integral(static_cast<int>(m)) - 1.0);
    std::cout << "frame mu=" << fmt(frames[m].mu) << " nu=" << fmt(frames[m].nu)
              << " residual=" << fmt(res) << "\n";
    ok = ok && res <= tol;
  }
  std::cout << "status:               " << (ok ? "ok" : "normalization-failure") << "\n";
  return ok ? exit_ok : exit_numeric;
}

int run_invert(const GlobalConfig& cfg, const std::string& in_path,
               const std::string& out_path, const std::string& reference_path,
               double out_window, int out_n) {
  SampledTomogram st = read_tomogram(in_path);
  InversionOptions opts;
  opts.out = GridSpec::symmetric(out_window, out_window, out_n, out_n);
  PhaseGrid rec = invert_tomogram(Tomogram(st), opts);
  write_phasegrid(out_path, rec);

  print_header("invert", file_digest(in_path));
  std::cout << "frames:               " << st.frames.size() << "\n";
  std::cout << "out:                  " << out_path << "\n";
  Moments m = moments_of_grid(rec, 1e-3);
  std::cout << "mean_q:               " << fmt(m.mean[0]) << "\n";
  std::cout << "mean_p:               " << fmt(m.mean[1]) << "\n";
  std::cout << "sigma_qq:             " << fmt(m.sigma_qq()) << "\n";
  std::cout << "sigma_pp:             " << fmt(m.sigma_pp()) << "\n";
  std::cout << "sigma_qp:             " << fmt(m.sigma_qp()) << "\n";

  if (!reference_path.empty()) {
    PhaseGrid ref = read_phasegrid(reference_path);
    double l1 = 0.0;
    for (int i = 0; i < rec.n_q(); ++i) {
      double wi = detail::trapezoid_weight(i, rec.n_q(), rec.dq());
      for (int j = 0; j < rec.n_p(); ++j)
        l1 += wi * detail::trapezoid_weight(j, rec.n_p(), rec.dp()) *
              std::abs(rec.values()(i, j) - ref.sample(rec.q_at(i), rec.p_at(j)));
    }
    std::cout << "reference_l1:         " << fmt(l1) << "\n";
    double tol = cfg.tol > 0.0 ? cfg.tol : 1e-2;
    bool ok = l1 <= tol;
    std::cout << "status:               " << (ok ? "ok" : "l1-failure") << "\n";
    return ok ? exit_ok : exit_numeric;
  }
  std::cout << "status:               ok\n";
  return exit_ok;
}

int run_classify(const StateSpec& spec, const GlobalConfig& cfg,
                 const std::string& json_path, bool strict_truncation) {
  std::vector<std::string> warnings;
  ClassifyOptions opts;
  opts.dim = clamp_dim(cfg.dim, warnings);
  opts.grid_n = cfg.grid_n;
  if (cfg.tol > 0.0) opts.norm_tol = cfg.tol;

  ResolvedState state = resolve_state(spec, cfg);
  AdmissibilityReport rep = state.gaussian
                                ? classify_state(*state.gaussian, cfg.hbar, opts)
                                : classify_state(state.grid, cfg.hbar, opts);
  if (rep.truncation_warning) warnings.push_back("truncation");

  print_header("classify", state.digest);
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::cout << "hbar:                 " << fmt(rep.hbar) << "\n";
  std::cout << "classical_admissible: " << b(rep.classical_admissible) << "\n";
  std::cout << "quantum_admissible:   " << b(rep.quantum_admissible) << "\n";
  std::cout << "quadrant:             " << quadrant_name(rep.quadrant) << "\n";
  std::cout << "min_symbol_value:     " << fmt(rep.min_symbol_value) << "\n";
  std::cout << "min_eigenvalue:       " << fmt(rep.min_eigenvalue) << "\n";
  std::cout << "operator_trace:       " << fmt(rep.operator_trace) << "\n";
  std::cout << "uncertainty_passes:   " << b(rep.uncertainty_verdict.passes) << "\n";
  std::cout << "sr_margin:            " << fmt(rep.uncertainty_verdict.sr_margin) << "\n";
  std::cout << "robertson_margin:     " << fmt(rep.uncertainty_verdict.robertson_margin)
            << "\n";
  std::cout << "correlation_r:        " << fmt(rep.uncertainty_verdict.r) << "\n";
  std::cout << "truncation_l1:        " << fmt(rep.truncation_l1) << "\n";
  if (warnings.empty()) {
    std::cout << "warnings:             none\n";
  } else {
    for (const auto& w : warnings) std::cout << "warnings:             " << w << "\n";
  }

  if (!json_path.empty()) {
    json j;
    j["command"] = "classify";
    j["input_digest"] = state.digest;
    j["hbar"] = rep.hbar;
    j["classical_admissible"] = rep.classical_admissible;
    j["quantum_admissible"] = rep.quantum_admissible;
    j["quadrant"] = quadrant_name(rep.quadrant);
    j["min_symbol_value"] = rep.min_symbol_value;
    j["min_eigenvalue"] = rep.min_eigenvalue;
    j["operator_trace"] = rep.operator_trace;
    j["uncertainty_passes"] = rep.uncertainty_verdict.passes;
    j["sr_margin"] = rep.uncertainty_verdict.sr_margin;
    j["robertson_margin"] = rep.uncertainty_verdict.robertson_margin;
    j["correlation_r"] = rep.uncertainty_verdict.r;
    j["truncation_l1"] = rep.truncation_l1;
    j["warnings"] = warnings;
    atomic_write(json_path, j.dump(2) + "\n");
  }

  if (strict_truncation && rep.truncation_warning) return exit_numeric;
  return exit_ok;
}

int run_scan_hbar(const GlobalConfig& cfg, const std::string& values_csv,
                  const std::string& out_path) {
  std::vector<double> hbars = split_csv(values_csv);
  if (hbars.empty()) throw parse_error("--values must list at least one hbar", 0);
  for (size_t i = 0; i < hbars.size(); ++i) {
    if (hbars[i] <= 0.0) throw parse_error("hbar values must be positive", 0);
    if (i > 0 && hbars[i] >= hbars[i - 1])
      throw parse_error("hbar values must be strictly descending", 0);
  }
  std::vector<std::string> warnings;
  ClassifyOptions opts;
  opts.dim = clamp_dim(cfg.dim, warnings);
  opts.grid_n = cfg.grid_n;

  NonlimitReport rep = nonlimit_demonstration(hbars, opts);
  std::ostringstream csv;
  csv << "hbar,classical_witness_quadrant,classical_witness_min_eigenvalue,"
         "classical_witness_sr_margin,quantum_witness_quadrant,"
         "quantum_witness_min_symbol,sets_differ\n";
  for (const auto& row : rep.rows) {
    csv << fmt(row.hbar) << ',' << quadrant_name(row.classical_witness.quadrant) << ','
        << fmt(row.classical_witness.min_eigenvalue) << ','
        << fmt(row.classical_witness.uncertainty_verdict.sr_margin) << ','
        << quadrant_name(row.quantum_witness.quadrant) << ','
        << fmt(row.quantum_witness.min_symbol_value) << ','
        << (row.classical_only_verified && row.quantum_only_verified ? "true" : "false")
        << '\n';
  }
  atomic_write(out_path, csv.str());

  print_header("scan hbar", fnv1a_hex(values_csv));
  std::cout << "rows:                 " << rep.rows.size() << "\n";
  std::cout << "out:                  " << out_path << "\n";
  std::cout << "sets_never_coincide:  " << (rep.sets_never_coincide ? "true" : "false")
            << "\n";
  for (const auto& w : warnings) std::cout << "warnings:             " << w << "\n";
  std::cout << "status:               ok\n";
  return exit_ok;
}

int run_scan_cross(const StateSpec& spec, bool have_state, const GlobalConfig& cfg,
                   int count, double range, const std::string& out_path) {
  if (count < 2) throw parse_error("--count must be at least 2", 0);
  if (range <= 0.0) throw parse_error("--range must be positive", 0);

  Moments m = Moments::single_mode(cfg.hbar / 2.0, cfg.hbar / 2.0, 0.0);
  std::string digest = fnv1a_hex("vacuum");
  if (have_state) {
    ResolvedState state = resolve_state(spec, cfg);
    m = state.gaussian ? state.gaussian->moments() : moments_of_grid(state.grid, 1e-3);
    digest = state.digest;
  }

  std::ostringstream csv;
  csv << "lambda_q,lambda_p,classical_admissible,quantum_admissible,universal,margin\n";
  for (int i = 0; i < count; ++i) {
    double lq = -range + 2.0 * range * i / (count - 1);
    for (int j = 0; j < count; ++j) {
      double lp = -range + 2.0 * range * j / (count - 1);
      if (lq == 0.0 || lp == 0.0) {
        // points on the classical cross: inadmissible under any rules
        csv << fmt(lq) << ',' << fmt(lp) << ",false,false,false,nan\n";
        continue;
      }
      ScalingVerdict v = classify_scaling(m, ScaleParams(lq, lp), cfg.hbar);
      csv << fmt(lq) << ',' << fmt(lp) << ',' << (v.classical_admissible ? "true" : "false")
          << ',' << (v.quantum_admissible_for_state ? "true" : "false") << ','
          << (v.universal_quantum_admissible ? "true" : "false") << ',' << fmt(v.margin)
          << '\n';
    }
  }
  atomic_write(out_path, csv.str());

  print_header("scan cross", digest);
  std::cout << "points:               " << count * count << "\n";
  std::cout << "out:                  " << out_path << "\n";
  std::cout << "status:               ok\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tomokit: symplectic tomography of classical and quantum states"};
  app.require_subcommand(1);

  GlobalConfig cfg;
  app.add_option("--hbar", cfg.hbar, "Planck parameter")->check(CLI::PositiveNumber);
  app.add_option("--dim", cfg.dim, "oscillator basis truncation");
  app.add_option("--window", cfg.window, "half-extent of state grids");
  app.add_option("--grid-n", cfg.grid_n, "samples per grid axis");
  app.add_option("--tol", cfg.tol, "override the command's numeric tolerance");
  app.add_option("--seed", cfg.seed, "seed for randomized commands");

  // tomogram
  auto* cmd_tomogram = app.add_subcommand("tomogram", "forward tomographic transform");
  cmd_tomogram->fallthrough();
  StateSpec tomo_state;
  add_state_options(cmd_tomogram, tomo_state);
  std::string frames_path, tomo_out;
  int theta_count = 0, n_x = 256;
  double theta_min = 0.0, theta_max = pi, lambda = 0.0;
  cmd_tomogram->add_option("--frames", frames_path, "frame list file (mu nu per line)");
  cmd_tomogram->add_option("--theta-count", theta_count, "number of cutting angles");
  cmd_tomogram->add_option("--theta-min", theta_min, "first angle");
  cmd_tomogram->add_option("--theta-max", theta_max, "last angle");
  cmd_tomogram->add_option("--lambda", lambda, "log scaling of the polar frames");
  cmd_tomogram->add_option("--nx", n_x, "X samples per frame");
  cmd_tomogram->add_option("--out", tomo_out, "output CSV")->required();

  // invert
  auto* cmd_invert = app.add_subcommand("invert", "inverse tomographic transform");
  cmd_invert->fallthrough();
  std::string inv_in, inv_out, inv_ref;
  double out_window = 8.0;
  int out_n = 256;
  cmd_invert->add_option("--input", inv_in, "tomogram CSV")->required();
  cmd_invert->add_option("--out", inv_out, "output phasegrid file")->required();
  cmd_invert->add_option("--reference", inv_ref, "reference phasegrid for an L1 report");
  cmd_invert->add_option("--out-window", out_window, "reconstruction half-extent");
  cmd_invert->add_option("--out-n", out_n, "reconstruction samples per axis");

  // classify
  auto* cmd_classify = app.add_subcommand("classify", "admissibility classification");
  cmd_classify->fallthrough();
  StateSpec cls_state;
  add_state_options(cmd_classify, cls_state);
  std::string json_path;
  bool strict_truncation = false;
  cmd_classify->add_option("--json", json_path, "write a JSON report here");
  cmd_classify->add_flag("--strict-truncation", strict_truncation,
                         "exit 3 when basis truncation is suspect");

  // scan
  auto* cmd_scan = app.add_subcommand("scan", "batch scans for plotting");
  cmd_scan->fallthrough();
  cmd_scan->require_subcommand(1);
  auto* scan_hbar = cmd_scan->add_subcommand("hbar", "witness scan over hbar values");
  scan_hbar->fallthrough();
  std::string hbar_values = "1,0.1,0.01", scan_out;
  scan_hbar->add_option("--values", hbar_values, "descending hbar list");
  scan_hbar->add_option("--out", scan_out, "output CSV")->required();

  auto* scan_cross = cmd_scan->add_subcommand("cross", "scaling-verdict lattice");
  scan_cross->fallthrough();
  StateSpec cross_state;
  add_state_options(scan_cross, cross_state);
  scan_cross->get_option("--state")->required(false);
  int cross_count = 41;
  double cross_range = 4.0;
  std::string cross_out;
  scan_cross->add_option("--count", cross_count, "lattice points per axis");
  scan_cross->add_option("--range", cross_range, "lattice half-extent");
  scan_cross->add_option("--out", cross_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return exit_parse;
  }

  try {
    if (cmd_tomogram->parsed())
      return run_tomogram(tomo_state, cfg, frames_path, theta_count, theta_min, theta_max,
                          lambda, n_x, tomo_out);
    if (cmd_invert->parsed())
      return run_invert(cfg, inv_in, inv_out, inv_ref, out_window, out_n);
    if (cmd_classify->parsed())
      return run_classify(cls_state, cfg, json_path, strict_truncation);
    if (scan_hbar->parsed()) return run_scan_hbar(cfg, hbar_values, scan_out);
    if (scan_cross->parsed())
      return run_scan_cross(cross_state, scan_cross->count("--state") > 0, cfg, cross_count,
                            cross_range, cross_out);
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  }
  return exit_parse;
}
