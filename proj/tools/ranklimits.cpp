// Command line front end for the ranking toolkit. Six subcommands cover the
// usual workflow: print analytic thresholds, run ranking trials, sweep a
// scale grid for the recovery phase portrait, measure observation-graph
// connectivity, probe a single swap failure event, and take a census of
// adjacent failure events.
//
// All results go to stdout (or --out FILE) as CSV; diagnostics and the
// resolved settings echo go to stderr. Exit codes: 0 on success, 1 on
// runtime failures (unreadable files, infeasible parameters reported by the
// library), 2 on usage errors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ranklimits/ranklimits.hpp"

namespace {

using namespace ranklimits;

std::string trim(std::string s) {
  const char* ws = " \t\r\n";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError(what + ": cannot parse '" + s + "' as a number");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError(what + ": cannot parse '" + s + "' as an integer");
  }
}

// "first:last:points" -> evenly spaced grid, endpoints included.
std::vector<double> parse_scale_range(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw CLI::ValidationError("--scales: expected first:last:points");
  const double a = parse_double(parts[0], "--scales");
  const double b = parse_double(parts[1], "--scales");
  const int k = parse_int(parts[2], "--scales");
  if (k < 1) throw CLI::ValidationError("--scales: points must be >= 1");
  if (k == 1 && a != b) {
    throw CLI::ValidationError("--scales: a one-point range needs equal endpoints");
  }
  std::vector<double> grid(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    grid[static_cast<std::size_t>(i)] = k == 1 ? a : std::lerp(a, b, static_cast<double>(i) / (k - 1));
  }
  return grid;
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& what) {
  std::vector<double> out;
  for (const std::string& tok : split(csv, ',')) out.push_back(parse_double(trim(tok), what));
  if (out.empty()) throw CLI::ValidationError(what + ": empty list");
  return out;
}

std::vector<EstimatorKind> parse_estimators(const std::string& csv) {
  std::vector<EstimatorKind> out;
  bool seen_moment = false, seen_map = false;
  for (const std::string& raw : split(csv, ',')) {
    const std::string tok = trim(raw);
    if (tok == "moment") {
      if (seen_moment) throw CLI::ValidationError("--estimators: duplicate 'moment'");
      seen_moment = true;
      out.push_back(EstimatorKind::kMoment);
    } else if (tok == "map") {
      if (seen_map) throw CLI::ValidationError("--estimators: duplicate 'map'");
      seen_map = true;
      out.push_back(EstimatorKind::kMap);
    } else {
      throw CLI::ValidationError("--estimators: unknown estimator '" + tok + "' (use moment, map)");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--estimators: empty list");
  return out;
}

MaskMode parse_mask_mode(const std::string& s) {
  if (s == "per-round") return MaskMode::kPerRound;
  if (s == "fixed") return MaskMode::kFixed;
  throw CLI::ValidationError("--mask-mode: expected per-round or fixed, got '" + s + "'");
}

std::string estimators_to_string(const std::vector<EstimatorKind>& ks) {
  std::string s;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i) s += ',';
    s += estimator_name(ks[i]);
  }
  return s;
}

// Options describing how quality gaps map to win probabilities.
struct LinkOpts {
  std::string kind = "logistic";
  double scale = 1.0;
  double slope = 1.0;
  double floor_v = 0.05;
  double ceil_v = 0.95;
};

void add_link_options(CLI::App* sub, LinkOpts& o) {
  sub->add_option("--link", o.kind, "Link function: logistic or linear")->capture_default_str();
  sub->add_option("--link-scale", o.scale, "Logistic link scale")->capture_default_str();
  sub->add_option("--link-slope", o.slope, "Linear link slope")->capture_default_str();
  sub->add_option("--link-floor", o.floor_v, "Linear link lower clip")->capture_default_str();
  sub->add_option("--link-ceil", o.ceil_v, "Linear link upper clip")->capture_default_str();
}

LinkFunction make_link(const LinkOpts& o) {
  try {
    if (o.kind == "logistic") return LinkFunction::logistic(o.scale);
    if (o.kind == "linear") return LinkFunction::linear(o.slope, o.floor_v, o.ceil_v);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  }
  throw CLI::ValidationError("--link: expected logistic or linear, got '" + o.kind + "'");
}

// Options describing the ground-truth instance: either a uniform-gap
// construction (--n plus --scale plus link flags) or a matrix file.
struct InstanceOpts {
  int n = 0;
  double scale = 0.0;
  double clamp_eps = 1e-6;
  std::string matrix_file;
  LinkOpts link;
};

void add_instance_options(CLI::App* sub, InstanceOpts& o) {
  sub->add_option("--n", o.n, "Number of items");
  sub->add_option("--scale", o.scale, "Quality gap scale of the uniform-gap instance");
  sub->add_option("--clamp-eps", o.clamp_eps, "Clamp link outputs into [eps, 1-eps]")
      ->capture_default_str();
  sub->add_option("--matrix-file", o.matrix_file,
                  "Read the win probability matrix from this file instead of building one");
  add_link_options(sub, o.link);
}

void warn_clamped(const ProbMatrix& M) {
  if (M.clamped_entries > 0) {
    std::fprintf(stderr, "warning: %d link outputs were clamped away from {0, 1}; thresholds may be pessimistic\n",
                 M.clamped_entries);
  }
}

ProbMatrix build_instance(const InstanceOpts& o) {
  if (!o.matrix_file.empty()) {
    std::ifstream in(o.matrix_file);
    if (!in) throw std::runtime_error("cannot open matrix file '" + o.matrix_file + "'");
    ProbMatrix M = load_prob_matrix(in);
    if (o.n != 0 && o.n != M.size()) {
      throw CLI::ValidationError("--n disagrees with the matrix file size");
    }
    return M;
  }
  if (o.n < 2) throw CLI::ValidationError("--n: need at least 2 items (or use --matrix-file)");
  if (!(o.scale > 0.0)) throw CLI::ValidationError("--scale: must be positive (or use --matrix-file)");
  ProbMatrix M = build_sst_matrix(uniform_gap_qualities(o.n, o.scale), make_link(o.link), o.clamp_eps);
  warn_clamped(M);
  return M;
}

// Output sink: stdout by default, a file when --out is given.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;

  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
    os = &file;
  }

  void finish() {
    os->flush();
    if (!*os) throw std::runtime_error("writing output failed");
  }
};

// Reads "key = value" lines ('#' starts a comment; a line without '=' is a
// bare flag) and turns them into long-option tokens.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config: cannot open '" + path + "'");
  std::vector<std::string> toks;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    std::string key = trim(eq == std::string::npos ? line : line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty()) throw CLI::ValidationError("--config: cannot parse line '" + line + "'");
    if (eq == std::string::npos) {
      toks.push_back("--" + key);
    } else {
      toks.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
  }
  return toks;
}

// Pulls --config out of the raw arguments and splices the file's tokens in
// right after the subcommand name, so explicit command line flags land later
// and win under the take-last option policy.
std::vector<std::string> inject_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ValidationError("--config: missing file path");
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;

  std::size_t sub_pos = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].empty() && args[i][0] != '-') {
      sub_pos = i;
      break;
    }
  }
  if (sub_pos == args.size()) {
    throw CLI::ValidationError("--config: a subcommand must be named on the command line");
  }
  const std::vector<std::string> extra = config_tokens(config_path);
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, extra.begin(), extra.end());
  return args;
}

void take_last_everywhere(CLI::App* app) {
  for (CLI::Option* opt : app->get_options()) {
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
  for (CLI::App* sub : app->get_subcommands({})) take_last_everywhere(sub);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and bound calculator for exact recovery of a hidden ranking from noisy pairwise comparisons"};
  app.fallthrough(true);
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  std::string out_path;
  std::string config_path_for_help;
  app.add_option("--seed", seed, "Base seed; every random draw is derived from it")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = RANKLIMITS_THREADS or hardware)")->capture_default_str();
  app.add_option("--out", out_path, "Write CSV here instead of stdout");
  app.add_option("--config", config_path_for_help,
                 "Read 'key = value' defaults from this file (command line flags win)");

  // thresholds
  auto* sub_thresh = app.add_subcommand("thresholds", "Print the analytic gap thresholds for one design");
  InstanceOpts thresh_inst;
  int thresh_m = 0;
  double thresh_p = 1.0, thresh_k0 = 0.0;
  sub_thresh->add_option("--m", thresh_m, "Comparison rounds")->required();
  sub_thresh->add_option("--p", thresh_p, "Observation probability per pair per round")->capture_default_str();
  auto* k0_opt = sub_thresh->add_option("--k0", thresh_k0, "Use this k0 directly instead of deriving it from an instance");
  add_instance_options(sub_thresh, thresh_inst);

  // simulate
  auto* sub_sim = app.add_subcommand("simulate", "Run independent ranking trials and report one CSV row per trial and estimator");
  InstanceOpts sim_inst;
  int sim_m = 0, sim_trials = 100;
  double sim_p = 1.0;
  std::string sim_est = "moment", sim_mask = "per-round", sim_dump;
  bool sim_p_unknown = false, sim_fixed_truth = false;
  sub_sim->add_option("--m", sim_m, "Comparison rounds")->required();
  sub_sim->add_option("--p", sim_p, "Observation probability per pair per round")->capture_default_str();
  sub_sim->add_option("--trials", sim_trials, "Independent trials")->capture_default_str();
  sub_sim->add_option("--estimators", sim_est, "Comma list of rankers to run: moment, map")->capture_default_str();
  sub_sim->add_option("--mask-mode", sim_mask, "Visibility pattern: per-round or fixed")->capture_default_str();
  sub_sim->add_flag("--p-unknown", sim_p_unknown, "Rank without using p (scores only, shifts the win estimates)");
  sub_sim->add_flag("--fixed-truth", sim_fixed_truth, "Keep the strongest-first labeling instead of hiding it");
  sub_sim->add_option("--dump-observations", sim_dump, "Also write trial 0's raw observations to this file");
  add_instance_options(sub_sim, sim_inst);

  // phase
  auto* sub_phase = app.add_subcommand("phase", "Sweep a scale grid and report exact recovery rates with the analytic thresholds");
  int phase_n = 0, phase_m = 0, phase_trials = 200;
  double phase_p = 1.0, phase_clamp = 1e-6;
  std::string phase_scales, phase_scale_list, phase_est = "moment", phase_mask = "per-round";
  bool phase_p_unknown = false, phase_fixed_truth = false;
  LinkOpts phase_link;
  sub_phase->add_option("--n", phase_n, "Number of items")->required();
  sub_phase->add_option("--m", phase_m, "Comparison rounds")->required();
  sub_phase->add_option("--p", phase_p, "Observation probability per pair per round")->capture_default_str();
  auto* scales_opt = sub_phase->add_option("--scales", phase_scales, "Scale grid as first:last:points");
  auto* scale_list_opt = sub_phase->add_option("--scale-list", phase_scale_list, "Explicit comma list of scales");
  scales_opt->excludes(scale_list_opt);
  scale_list_opt->excludes(scales_opt);
  sub_phase->add_option("--trials", phase_trials, "Trials per grid point")->capture_default_str();
  sub_phase->add_option("--estimators", phase_est, "Comma list of rankers to run: moment, map")->capture_default_str();
  sub_phase->add_option("--mask-mode", phase_mask, "Visibility pattern: per-round or fixed")->capture_default_str();
  sub_phase->add_flag("--p-unknown", phase_p_unknown, "Rank without using p");
  sub_phase->add_flag("--fixed-truth", phase_fixed_truth, "Keep the strongest-first labeling instead of hiding it");
  sub_phase->add_option("--clamp-eps", phase_clamp, "Clamp link outputs into [eps, 1-eps]")->capture_default_str();
  add_link_options(sub_phase, phase_link);

  // connectivity
  auto* sub_conn = app.add_subcommand("connectivity", "Estimate the probability that every pair is connected by observations");
  int conn_n = 0, conn_m = 0, conn_trials = 1000;
  std::string conn_c = "0";
  sub_conn->add_option("--n", conn_n, "Number of items")->required();
  sub_conn->add_option("--m", conn_m, "Comparison rounds")->required();
  sub_conn->add_option("--c-list", conn_c, "Comma list of offsets c; each sets p = (ln n + c) / (m n)")->capture_default_str();
  sub_conn->add_option("--trials", conn_trials, "Trials per offset")->capture_default_str();

  // failure-event
  auto* sub_fail = app.add_subcommand("failure-event", "Monte Carlo the swap failure event for one rank pair against its analytic sandwich");
  InstanceOpts fail_inst;
  int fail_m = 0, fail_i1 = 0, fail_i2 = 1, fail_trials = 10000;
  double fail_p = 1.0;
  sub_fail->add_option("--m", fail_m, "Comparison rounds")->required();
  sub_fail->add_option("--p", fail_p, "Observation probability per pair per round")->capture_default_str();
  sub_fail->add_option("--i1", fail_i1, "True rank of the stronger item")->capture_default_str();
  sub_fail->add_option("--i2", fail_i2, "True rank of the weaker item")->capture_default_str();
  sub_fail->add_option("--trials", fail_trials, "Monte Carlo trials")->capture_default_str();
  add_instance_options(sub_fail, fail_inst);

  // census
  auto* sub_census = app.add_subcommand("census", "Count adjacent rank pairs whose swap the exact likelihood would prefer");
  InstanceOpts census_inst;
  int census_m = 0, census_trials = 1000;
  double census_p = 1.0;
  sub_census->add_option("--m", census_m, "Comparison rounds")->required();
  sub_census->add_option("--p", census_p, "Observation probability per pair per round")->capture_default_str();
  sub_census->add_option("--trials", census_trials, "Monte Carlo trials")->capture_default_str();
  add_instance_options(sub_census, census_inst);

  take_last_everywhere(&app);

  try {
    std::vector<std::string> args = inject_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));

    Sink sink;
    sink.open(out_path);

    if (app.got_subcommand(sub_thresh)) {
      int n = thresh_inst.n;
      double k0 = thresh_k0;
      if (k0_opt->count() > 0) {
        if (n < 2) throw CLI::ValidationError("--n: need at least 2 items when --k0 is given directly");
      } else {
        const ProbMatrix M = build_instance(thresh_inst);
        n = M.size();
        k0 = matrix_k0(M);
      }
      std::fprintf(stderr, "# thresholds: n=%d m=%d p=%g k0=%.10g\n", n, thresh_m, thresh_p, k0);
      emit_thresholds_csv(*sink.os, n, thresh_m, thresh_p, k0);
      sink.finish();
      return 0;
    }

    if (app.got_subcommand(sub_sim)) {
      const bool external = !sim_inst.matrix_file.empty();
      const ProbMatrix truth = build_instance(sim_inst);
      SweepConfig cfg;
      cfg.n = truth.size();
      cfg.m = sim_m;
      cfg.p = sim_p;
      cfg.scale_grid = {external ? 1.0 : sim_inst.scale};
      cfg.trials = sim_trials;
      cfg.estimators = parse_estimators(sim_est);
      cfg.seed = seed;
      cfg.mask_mode = parse_mask_mode(sim_mask);
      cfg.p_known = !sim_p_unknown;
      cfg.fixed_truth = sim_fixed_truth;
      cfg.threads = threads;
      cfg.clamp_eps = sim_inst.clamp_eps;
      cfg.validate();
      std::fprintf(stderr,
                   "# simulate: n=%d m=%d p=%g scale=%g trials=%d estimators=%s mask=%s p_known=%d fixed_truth=%d seed=%llu\n",
                   cfg.n, cfg.m, cfg.p, external ? 0.0 : sim_inst.scale, cfg.trials,
                   estimators_to_string(cfg.estimators).c_str(), mask_mode_name(cfg.mask_mode),
                   cfg.p_known ? 1 : 0, cfg.fixed_truth ? 1 : 0,
                   static_cast<unsigned long long>(cfg.seed));

      std::vector<TrialResult> rows(static_cast<std::size_t>(cfg.trials));
      parallel_for(0, cfg.trials, resolve_threads(cfg.threads), [&](int t) {
        rows[static_cast<std::size_t>(t)] = run_trial_detailed(cfg, truth, 0, t);
      });
      emit_ranking_header(*sink.os);
      for (TrialResult& tr : rows) {
        if (external) tr.scale = 0.0;  // scale column is meaningless for a loaded matrix
        emit_ranking_row(*sink.os, cfg, tr);
      }
      if (!sim_dump.empty()) {
        std::ofstream dump(sim_dump);
        if (!dump) throw std::runtime_error("cannot open observation dump file '" + sim_dump + "'");
        dump_observations(trial_setup(cfg, truth, 0, 0).batch, dump);
        if (!dump) throw std::runtime_error("writing observation dump failed");
      }
      sink.finish();
      return 0;
    }

    if (app.got_subcommand(sub_phase)) {
      if (scales_opt->count() == 0 && scale_list_opt->count() == 0) {
        throw CLI::ValidationError("phase: give a grid via --scales or --scale-list");
      }
      SweepConfig cfg;
      cfg.n = phase_n;
      cfg.m = phase_m;
      cfg.p = phase_p;
      cfg.scale_grid = scales_opt->count() > 0 ? parse_scale_range(phase_scales)
                                               : parse_double_list(phase_scale_list, "--scale-list");
      cfg.trials = phase_trials;
      cfg.estimators = parse_estimators(phase_est);
      cfg.seed = seed;
      cfg.mask_mode = parse_mask_mode(phase_mask);
      cfg.p_known = !phase_p_unknown;
      cfg.fixed_truth = phase_fixed_truth;
      cfg.threads = threads;
      cfg.link = make_link(phase_link);
      cfg.clamp_eps = phase_clamp;
      cfg.validate();
      std::fprintf(stderr,
                   "# phase: n=%d m=%d p=%g points=%zu trials=%d estimators=%s mask=%s p_known=%d fixed_truth=%d seed=%llu\n",
                   cfg.n, cfg.m, cfg.p, cfg.scale_grid.size(), cfg.trials,
                   estimators_to_string(cfg.estimators).c_str(), mask_mode_name(cfg.mask_mode),
                   cfg.p_known ? 1 : 0, cfg.fixed_truth ? 1 : 0,
                   static_cast<unsigned long long>(cfg.seed));

      const std::vector<SweepPoint> points = phase_sweep(cfg);
      for (const SweepPoint& sp : points) {
        if (sp.clamped_entries > 0) {
          std::fprintf(stderr, "warning: scale %g clamped %d link outputs\n", sp.scale, sp.clamped_entries);
        }
      }
      emit_phase_csv(*sink.os, points);
      sink.finish();
      return 0;
    }

    if (app.got_subcommand(sub_conn)) {
      const std::vector<double> cs = parse_double_list(conn_c, "--c-list");
      std::fprintf(stderr, "# connectivity: n=%d m=%d offsets=%zu trials=%d seed=%llu\n", conn_n,
                   conn_m, cs.size(), conn_trials, static_cast<unsigned long long>(seed));
      std::vector<ConnectivityResult> results;
      results.reserve(cs.size());
      for (double c : cs) {
        results.push_back(connectivity_experiment(conn_n, conn_m, c, conn_trials, seed, threads));
      }
      emit_connectivity_csv(*sink.os, results);
      sink.finish();
      return 0;
    }

    if (app.got_subcommand(sub_fail)) {
      const ProbMatrix truth = build_instance(fail_inst);
      if (!truth.sst_ordered) {
        throw std::runtime_error("failure-event: matrix rows must be in strength order");
      }
      const int n = truth.size();
      if (fail_i1 < 0 || fail_i1 >= n || fail_i2 < 0 || fail_i2 >= n || fail_i1 == fail_i2) {
        throw CLI::ValidationError("--i1/--i2: need two distinct ranks inside 0..n-1");
      }
      std::fprintf(stderr, "# failure-event: n=%d m=%d p=%g i1=%d i2=%d trials=%d seed=%llu\n", n,
                   fail_m, fail_p, fail_i1, fail_i2, fail_trials,
                   static_cast<unsigned long long>(seed));
      const FailureEventResult r =
          failure_event_mc(truth, fail_p, fail_m, fail_i1, fail_i2, fail_trials, seed, threads);
      emit_failure_event_csv(*sink.os, r);
      sink.finish();
      return 0;
    }

    if (app.got_subcommand(sub_census)) {
      const ProbMatrix truth = build_instance(census_inst);
      std::fprintf(stderr, "# census: n=%d m=%d p=%g trials=%d seed=%llu\n", truth.size(), census_m,
                   census_p, census_trials, static_cast<unsigned long long>(seed));
      const CensusResult r =
          adjacent_failure_census(truth, census_p, census_m, census_trials, seed, threads);
      emit_census_csv(*sink.os, r);
      sink.finish();
      return 0;
    }

    throw CLI::ValidationError("no subcommand selected");
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
