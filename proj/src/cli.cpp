#include "ergodiff/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "ergodiff/drift_fields.hpp"
#include "ergodiff/ergodic.hpp"
#include "ergodiff/integrator.hpp"
#include "ergodiff/io.hpp"
#include "ergodiff/recurrence.hpp"

namespace ergodiff {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Configuration errors map to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out_dir = "out";
  std::size_t workers = 1;
  std::uint64_t seed = 0;
};

struct SimulateArgs {
  std::string field;
  std::string start = "0,0";
  double delta = 1e-4;
  double horizon = 1.0;
  std::string scheme = "taylor15_full";
  std::size_t stride = 100;
  std::uint64_t trajectory = 0;
  double guard = 1e6;
};

struct ClassifyArgs {
  std::string profile;
  std::string field;
  std::size_t dim = 2;
  double alpha = 1.0;
  ClassifierSettings settings;
  std::size_t n_angles = 256;
};

struct ErgodicArgs {
  std::string field = "z4";
  std::string centers;
  double radius = 1.0;
  std::size_t n_traj = 8;
  double horizon = 100.0;
  double delta = 1e-4;
  std::size_t stride = 100;
  std::string scheme = "taylor15_full";
  std::string box = "-10,10";
  double window = 0.25;
  bool negate_noise = false;
};

struct OrderArgs {
  std::string field = "z4";
  std::string start = "0.5,0";
  double horizon = 0.5;
  std::string levels = "6,7,8,9,10";
  int reference_level = 14;
  std::size_t n_paths = 200;
  std::string schemes = "taylor15_full,euler";
};

using ArgList = std::vector<std::pair<std::string, std::string>>;

// Shortest decimal that parses back to the same double.
std::string num(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_numbers(const std::string& text, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

Eigen::Vector2d parse_point(const std::string& text, const std::string& what) {
  const auto v = parse_numbers(text, ',', what);
  if (v.size() != 2) throw UsageError(what + ": expected x1,x2");
  return {v[0], v[1]};
}

std::vector<Eigen::Vector2d> parse_centers(const std::string& text) {
  if (text.empty()) return reference_centers();
  std::vector<Eigen::Vector2d> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(parse_point(item, "--centers"));
  if (out.empty()) throw UsageError("--centers: no center given");
  return out;
}

std::string join_points(const std::vector<Eigen::Vector2d>& points) {
  std::string s;
  for (const auto& p : points) {
    if (!s.empty()) s += ';';
    s += num(p(0)) + ',' + num(p(1));
  }
  return s;
}

PolyDriftField resolve_field(const std::string& spec) {
  try {
    return builtin_field(spec);
  } catch (const std::exception&) {
  }
  if (!fs::exists(spec)) throw UsageError("--field: '" + spec + "' is neither a built-in field nor a file");
  try {
    return load_field(spec);
  } catch (const std::exception& e) {
    throw UsageError("--field: " + std::string(e.what()));
  }
}

PolyDriftField planar_field(const std::string& spec) {
  auto f = resolve_field(spec);
  if (f.dim() != 2) throw UsageError("--field: the integrator needs a planar (dim 2) field");
  return f;
}

Scheme resolve_scheme(const std::string& name) {
  try {
    return parse_scheme(name);
  } catch (const std::exception&) {
    throw UsageError("--scheme: unknown scheme '" + name + "'");
  }
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write " + path.string());
  os << content;
}

std::string seed_default() {
  const char* env = std::getenv("ERGODIFF_SEED");
  if (env == nullptr || *env == '\0') return "0";
  const std::string s(env);
  if (s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError("ERGODIFF_SEED must be a non-negative integer");
  return s;
}

void add_common(CLI::App* cmd, Common& common, const std::string& seed) {
  cmd->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--workers", common.workers, "Concurrent trajectories (outputs do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  common.seed = std::stoull(seed);
  cmd->add_option("--seed", common.seed, "Master seed (default: $ERGODIFF_SEED or 0)")->capture_default_str();
}

ArgList common_args(const Common& c) {
  return {{"--out", c.out_dir}, {"--workers", std::to_string(c.workers)}, {"--seed", std::to_string(c.seed)}};
}

class Manifest {
 public:
  Manifest(std::string subcommand, ArgList args, std::uint64_t seed)
      : subcommand_(std::move(subcommand)), args_(std::move(args)), seed_(seed) {}

  void add_output(const fs::path& p) { outputs_.push_back(p.string()); }

  void write(const fs::path& path, double seconds) const {
    Json j;
    j["subcommand"] = subcommand_;
    j["version"] = ERGODIFF_VERSION;
    j["seed"] = seed_;
    Json config = Json::object();
    Json flat = Json::array();
    for (const auto& [k, v] : args_) {
      config[k.substr(2)] = v;
      flat.push_back(k);
      if (!v.empty()) flat.push_back(v);
    }
    j["config"] = config;
    j["args"] = flat;
    j["outputs"] = outputs_;
    j["wall_seconds"] = seconds;
    write_file(path, j.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  ArgList args_;
  std::uint64_t seed_;
  std::vector<std::string> outputs_;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_simulate(const SimulateArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto field = planar_field(a.field);
  SimulationConfig cfg;
  cfg.field_name = field.name();
  cfg.start = parse_point(a.start, "--start");
  cfg.delta = a.delta;
  cfg.horizon = a.horizon;
  cfg.scheme = resolve_scheme(a.scheme);
  cfg.checkpoint_stride = a.stride;
  cfg.master_seed = c.seed;
  cfg.trajectory_index = a.trajectory;
  cfg.guard_radius = a.guard;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Trajectory traj = simulate(field, cfg);

  ArgList args{{"--field", a.field},
               {"--start", num(cfg.start(0)) + "," + num(cfg.start(1))},
               {"--delta", num(a.delta)},
               {"--T", num(a.horizon)},
               {"--scheme", to_string(cfg.scheme)},
               {"--stride", std::to_string(a.stride)},
               {"--trajectory", std::to_string(a.trajectory)},
               {"--guard", num(a.guard)}};
  for (auto& p : common_args(c)) args.push_back(p);
  Manifest manifest("simulate", args, c.seed);

  const fs::path dir(c.out_dir);
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  write_file(dir / "trajectory.csv", csv.str());
  manifest.add_output(dir / "trajectory.csv");
  manifest.write(dir / "manifest.json", elapsed(t0));
  out << "wrote " << (dir / "trajectory.csv").string() << " (" << traj.states.size() << " checkpoints)\n";
  if (traj.exploded) {
    err << "numerical explosion at t = " << num(*traj.explosion_time) << ": |x| exceeded "
        << num(cfg.guard_radius) << "; output truncated\n";
    return kExitNumerical;
  }
  return kExitOk;
}

RadialProfile resolve_profile(const ClassifyArgs& a) {
  if (a.profile.empty() == a.field.empty()) throw UsageError("classify needs exactly one of --profile or --field");
  if (!a.field.empty()) {
    const auto f = resolve_field(a.field);
    if (f.dim() > 2) throw UsageError("--field: sampled envelopes support dim 1 or 2");
    if (a.n_angles < 8) throw UsageError("--n-angles must be at least 8");
    const double r0 = a.settings.r0;
    return tabulated_profile(sampled_profile(f, a.n_angles), r0, std::ldexp(r0, a.settings.doublings));
  }
  try {
    if (a.profile == "z4") return z4_profile();
    if (a.profile == "flat") return flat_profile();
    if (a.dim < 1) throw UsageError("--dim must be positive");
    if (a.profile == "brownian") return brownian_profile(a.dim);
    if (a.profile == "power-well") return power_well_profile(a.dim, a.alpha);
    if (a.profile == "power-attractive") return power_attractive_profile(a.dim, a.alpha);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("--profile: unknown profile '" + a.profile + "'");
}

int cmd_classify(const ClassifyArgs& a, const Common& c, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto profile = resolve_profile(a);
  const auto& s = a.settings;
  if (!(s.r0 > 0.0) || s.doublings < 4 || !(s.tail_ratio > 0.0) || !(s.geometric_ratio > 0.0) ||
      !(s.cr5_growth > 1.0))
    throw UsageError("classifier settings out of range (r0 > 0, doublings >= 4, tail > 0, ratios > 0, growth > 1)");
  const auto report = classify(profile, s);

  ArgList args;
  if (!a.profile.empty()) {
    args = {{"--profile", a.profile}, {"--dim", std::to_string(a.dim)}, {"--alpha", num(a.alpha)}};
  } else {
    args = {{"--field", a.field}, {"--n-angles", std::to_string(a.n_angles)}};
  }
  ArgList tail{{"--r0", num(s.r0)},
               {"--doublings", std::to_string(s.doublings)},
               {"--blowup-log", num(s.blowup_log)},
               {"--tail-ratio", num(s.tail_ratio)},
               {"--geometric-ratio", num(s.geometric_ratio)},
               {"--cr5-growth", num(s.cr5_growth)}};
  args.insert(args.end(), tail.begin(), tail.end());
  for (auto& p : common_args(c)) args.push_back(p);
  Manifest manifest("classify", args, c.seed);

  const fs::path dir(c.out_dir);
  write_file(dir / "report.json", report_to_json(report));
  manifest.add_output(dir / "report.json");
  manifest.write(dir / "manifest.json", elapsed(t0));
  out << report_to_table(report);
  return kExitOk;
}

Json summary_json(const EnsembleSummary& s, double window) {
  Json j;
  j["center"] = {s.f.center(0), s.f.center(1)};
  j["radius"] = s.f.radius;
  j["mean_terminal"] = s.mean_terminal;
  j["sd_terminal"] = s.sd_terminal;
  j["sem_terminal"] = s.sem_terminal;
  j["exploded"] = s.exploded;
  Json trajs = Json::array();
  for (std::size_t i = 0; i < s.series.size(); ++i) {
    const auto& ser = s.series[i];
    Json t;
    t["seed"] = ser.seed;
    t["start"] = {ser.start(0), ser.start(1)};
    t["terminal_T"] = ser.times.back();
    t["terminal"] = s.terminals[i];
    t["batch_standard_error"] = s.standard_errors[i];
    t["exploded"] = ser.exploded;
    try {
      const auto d = convergence_diagnostic(ser, window);
      t["convergence"] = {{"stabilized", d.stabilized},
                          {"drift_of_mean", d.drift_of_mean},
                          {"pooled_standard_error", d.pooled_standard_error}};
    } catch (const std::invalid_argument&) {
      t["convergence"] = nullptr;
    }
    trajs.push_back(t);
  }
  j["trajectories"] = trajs;
  j["checkpoints"] = {{"T", s.checkpoint_times}, {"mean", s.checkpoint_mean}, {"sd", s.checkpoint_sd}};
  return j;
}

int cmd_ergodic(const ErgodicArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto field = planar_field(a.field);
  const auto centers = parse_centers(a.centers);
  const auto box = parse_numbers(a.box, ',', "--box");
  if (box.size() != 2 || !(box[0] < box[1])) throw UsageError("--box: expected lo,hi with lo < hi");
  if (a.n_traj < 1) throw UsageError("--n-traj must be at least 1");
  if (!(a.radius >= 0.0)) throw UsageError("--radius must be non-negative");
  if (!(a.window > 0.0 && a.window < 0.5)) throw UsageError("--window must be in (0, 0.5)");

  EnsembleConfig cfg;
  cfg.n_traj = a.n_traj;
  cfg.horizon = a.horizon;
  cfg.delta = a.delta;
  cfg.checkpoint_stride = a.stride;
  cfg.scheme = resolve_scheme(a.scheme);
  cfg.master_seed = c.seed;
  cfg.box_lo = box[0];
  cfg.box_hi = box[1];
  cfg.negate_noise = a.negate_noise;
  cfg.workers = c.workers;
  SimulationConfig probe;
  probe.delta = a.delta;
  probe.horizon = a.horizon;
  probe.checkpoint_stride = a.stride;
  try {
    probe.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::vector<IndicatorBall> balls;
  for (const auto& ctr : centers) balls.push_back({ctr, a.radius});
  const auto summaries = run_ensemble(field, balls, cfg);

  ArgList args{{"--field", a.field},
               {"--centers", join_points(centers)},
               {"--radius", num(a.radius)},
               {"--n-traj", std::to_string(a.n_traj)},
               {"--T", num(a.horizon)},
               {"--delta", num(a.delta)},
               {"--stride", std::to_string(a.stride)},
               {"--scheme", to_string(cfg.scheme)},
               {"--box", num(box[0]) + "," + num(box[1])},
               {"--window", num(a.window)}};
  if (a.negate_noise) args.emplace_back("--negate-noise", "");
  for (auto& p : common_args(c)) args.push_back(p);
  Manifest manifest("ergodic", args, c.seed);

  const fs::path dir(c.out_dir);
  Json summary;
  summary["field"] = field.name();
  summary["scheme"] = to_string(cfg.scheme);
  summary["delta"] = a.delta;
  summary["T"] = a.horizon;
  summary["stride"] = a.stride;
  summary["seed"] = c.seed;
  summary["n_traj"] = a.n_traj;
  summary["start_box"] = {box[0], box[1]};
  summary["negate_noise"] = a.negate_noise;
  summary["window"] = a.window;
  summary["centers"] = Json::array();

  std::size_t exploded = 0;
  out << std::left << std::setw(28) << "center" << std::setw(14) << "mean f_T" << std::setw(14) << "sem"
      << std::setw(12) << "stabilized"
      << "exploded\n";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    exploded = std::max(exploded, s.exploded);
    const std::string tag = "c" + std::to_string(i);
    std::ostringstream csv;
    write_series_csv(csv, s.series);
    write_file(dir / ("series_" + tag + ".csv"), csv.str());
    manifest.add_output(dir / ("series_" + tag + ".csv"));

    LineChart chart;
    chart.title = "f_T for the unit ball at (" + num(s.f.center(0)) + ", " +
                  num(s.f.center(1)) + ")";
    chart.x_label = "T";
    chart.y_label = "f_T";
    for (const auto& ser : s.series) {
      std::vector<std::pair<double, double>> line;
      for (std::size_t k = 0; k < ser.times.size(); ++k) line.emplace_back(ser.times[k], ser.averages[k]);
      chart.lines.push_back(std::move(line));
    }
    write_file(dir / ("fT_" + tag + ".svg"), render_svg(chart));
    manifest.add_output(dir / ("fT_" + tag + ".svg"));

    const Json sj = summary_json(s, a.window);
    summary["centers"].push_back(sj);
    std::size_t stable = 0;
    for (const auto& t : sj["trajectories"])
      if (!t["convergence"].is_null() && t["convergence"]["stabilized"].get<bool>()) ++stable;
    std::ostringstream ctr;
    ctr << "(" << std::setprecision(6) << s.f.center(0) << ", " << s.f.center(1) << ")";
    out << std::left << std::setw(28) << ctr.str() << std::setw(14) << std::setprecision(6) << s.mean_terminal
        << std::setw(14) << s.sem_terminal << std::setw(12)
        << (std::to_string(stable) + "/" + std::to_string(s.series.size())) << s.exploded << "\n";
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  manifest.add_output(dir / "summary.json");
  manifest.write(dir / "manifest.json", elapsed(t0));
  if (exploded > 0) {
    err << exploded << " trajectories left the guard radius; their series end at the explosion time\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_order_check(const OrderArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto field = planar_field(a.field);
  StrongOrderSetup setup;
  setup.start = parse_point(a.start, "--start");
  setup.horizon = a.horizon;
  setup.n_paths = a.n_paths;
  setup.master_seed = c.seed;
  setup.workers = c.workers;
  if (!(a.horizon > 0.0)) throw UsageError("--T must be positive");
  if (a.n_paths < 1) throw UsageError("--n-paths must be at least 1");
  if (a.reference_level < 0 || a.reference_level > 24) throw UsageError("--ref-level must be in [0, 24]");
  setup.reference_delta = std::ldexp(a.horizon, -a.reference_level);
  setup.deltas.clear();
  std::vector<int> levels;
  for (double l : parse_numbers(a.levels, ',', "--levels")) {
    if (l != std::floor(l) || l < 0 || l > a.reference_level)
      throw UsageError("--levels: each level must be an integer in [0, ref-level]");
    levels.push_back(static_cast<int>(l));
    setup.deltas.push_back(std::ldexp(a.horizon, -static_cast<int>(l)));
  }
  if (levels.size() < 2) throw UsageError("--levels: need at least two levels for a slope");
  std::vector<Scheme> schemes;
  {
    std::stringstream ss(a.schemes);
    std::string item;
    while (std::getline(ss, item, ',')) schemes.push_back(resolve_scheme(item));
  }
  if (schemes.empty()) throw UsageError("--schemes: no scheme given");

  std::string level_text, scheme_text;
  for (int l : levels) level_text += (level_text.empty() ? "" : ",") + std::to_string(l);
  for (auto s : schemes) scheme_text += (scheme_text.empty() ? "" : ",") + to_string(s);
  ArgList args{{"--field", a.field},
               {"--start", num(setup.start(0)) + "," + num(setup.start(1))},
               {"--T", num(a.horizon)},
               {"--levels", level_text},
               {"--ref-level", std::to_string(a.reference_level)},
               {"--n-paths", std::to_string(a.n_paths)},
               {"--schemes", scheme_text}};
  for (auto& p : common_args(c)) args.push_back(p);
  Manifest manifest("order-check", args, c.seed);

  Json report;
  report["field"] = field.name();
  report["start"] = {setup.start(0), setup.start(1)};
  report["T"] = a.horizon;
  report["n_paths"] = a.n_paths;
  report["seed"] = c.seed;
  report["reference_delta"] = setup.reference_delta;
  report["schemes"] = Json::array();
  int code = kExitOk;
  for (auto scheme : schemes) {
    Json entry;
    entry["scheme"] = to_string(scheme);
    try {
      const auto r = strong_order_estimate(field, scheme, setup);
      entry["deltas"] = r.deltas;
      entry["errors"] = r.errors;
      entry["slope"] = r.slope;
      entry["intercept"] = r.intercept;
      out << to_string(scheme) << "\n";
      out << "  " << std::left << std::setw(16) << "delta"
          << "mean strong error\n";
      for (std::size_t i = 0; i < r.deltas.size(); ++i)
        out << "  " << std::setw(16) << std::setprecision(6) << r.deltas[i] << std::setprecision(6) << r.errors[i]
            << "\n";
      out << "  slope " << std::setprecision(4) << r.slope << "\n";
    } catch (const std::runtime_error& e) {
      err << to_string(scheme) << ": " << e.what() << "\n";
      entry["error"] = e.what();
      code = kExitNumerical;
    }
    report["schemes"].push_back(entry);
  }
  const fs::path dir(c.out_dir);
  write_file(dir / "order.json", report.dump(2) + "\n");
  manifest.add_output(dir / "order.json");
  manifest.write(dir / "manifest.json", elapsed(t0));
  return code;
}

const std::vector<std::string> kSubcommands = {"simulate", "classify", "ergodic", "order-check"};

// Splices the recorded arguments of a manifest in front of the remaining command line, so
// explicit flags (last one wins) override the recorded configuration.
std::vector<std::string> expand_manifest(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--manifest") {
      if (i + 1 >= args.size()) throw UsageError("--manifest needs a file");
      path = args[++i];
    } else if (args[i].rfind("--manifest=", 0) == 0) {
      path = args[i].substr(11);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;
  std::ifstream is(path);
  if (!is) throw UsageError("--manifest: cannot read " + path);
  Json j;
  try {
    j = Json::parse(is);
  } catch (const std::exception& e) {
    throw UsageError("--manifest: " + std::string(e.what()));
  }
  if (!j.contains("subcommand") || !j.contains("args")) throw UsageError("--manifest: missing subcommand or args");
  const std::string sub = j["subcommand"].get<std::string>();
  if (!rest.empty() && std::find(kSubcommands.begin(), kSubcommands.end(), rest.front()) != kSubcommands.end()) {
    if (rest.front() != sub) throw UsageError("--manifest records '" + sub + "', not '" + rest.front() + "'");
    rest.erase(rest.begin());
  }
  std::vector<std::string> out{sub};
  for (const auto& a : j["args"]) out.push_back(a.get<std::string>());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  try {
    const std::vector<std::string> args = expand_manifest(raw_args);
    const std::string seed = seed_default();

    CLI::App app{"ergodiff: simulation, recurrence classification and ergodic averages for dX = b(X)dt + dW"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_config("--config", "", "TOML file with one [subcommand] section; flags override it");
    app.add_option("--manifest", "Replay a run manifest; later flags override its configuration");
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Simulate one trajectory and write its checkpoints as CSV");
    s->add_option("--field", sim.field, "Built-in field name or field definition JSON")->required();
    s->add_option("--start", sim.start, "Starting point x1,x2")->capture_default_str();
    s->add_option("--delta", sim.delta, "Time step")->capture_default_str();
    s->add_option("--T", sim.horizon, "Horizon")->capture_default_str();
    s->add_option("--scheme", sim.scheme, "taylor15 | taylor15_full | taylor15_diagonal | euler")
        ->capture_default_str();
    s->add_option("--stride", sim.stride, "Steps between checkpoints")->capture_default_str();
    s->add_option("--trajectory", sim.trajectory, "Trajectory index within the seed's streams")
        ->capture_default_str();
    s->add_option("--guard", sim.guard, "Explosion guard radius")->capture_default_str();
    add_common(s, common, seed);

    ClassifyArgs cls;
    auto* c = app.add_subcommand("classify", "Evaluate the recurrence and invariant-measure criteria");
    c->add_option("--profile", cls.profile, "brownian | power-well | power-attractive | z4 | flat");
    c->add_option("--field", cls.field, "Classify the sampled envelopes of a field instead");
    c->add_option("--dim", cls.dim, "Dimension of the built-in profile")->capture_default_str();
    c->add_option("--alpha", cls.alpha, "Exponent of the power profiles")->capture_default_str();
    c->add_option("--r0", cls.settings.r0, "Lower integration limit")->capture_default_str();
    c->add_option("--doublings", cls.settings.doublings, "Schedule N = r0 2^k, k = 1..K")->capture_default_str();
    c->add_option("--blowup-log", cls.settings.blowup_log, "Log partial value read as divergence")
        ->capture_default_str();
    c->add_option("--tail-ratio", cls.settings.tail_ratio, "Relative tail increment read as convergence")
        ->capture_default_str();
    c->add_option("--geometric-ratio", cls.settings.geometric_ratio,
                  "Per-doubling increment ratio read as a convergent tail")
        ->capture_default_str();
    c->add_option("--cr5-growth", cls.settings.cr5_growth, "Per-doubling quotient factor read as a trend")
        ->capture_default_str();
    c->add_option("--n-angles", cls.n_angles, "Angles per circle for sampled envelopes")->capture_default_str();
    add_common(c, common, seed);

    ErgodicArgs erg;
    auto* e = app.add_subcommand("ergodic", "Running time averages f_T of unit-ball indicators over an ensemble");
    e->add_option("--field", erg.field, "Built-in field name or field definition JSON")->capture_default_str();
    e->add_option("--centers", erg.centers, "Ball centers x1,x2;x1,x2;... (default: the seven reference centers)");
    e->add_option("--radius", erg.radius, "Ball radius")->capture_default_str();
    e->add_option("--n-traj", erg.n_traj, "Trajectories")->capture_default_str();
    e->add_option("--T", erg.horizon, "Horizon")->capture_default_str();
    e->add_option("--delta", erg.delta, "Time step")->capture_default_str();
    e->add_option("--stride", erg.stride, "Steps between checkpoints")->capture_default_str();
    e->add_option("--scheme", erg.scheme, "Integration scheme")->capture_default_str();
    e->add_option("--box", erg.box, "Start box lo,hi (uniform on [lo,hi]^2)")->capture_default_str();
    e->add_option("--window", erg.window, "Convergence diagnostic window fraction")->capture_default_str();
    e->add_flag("--negate-noise", erg.negate_noise, "Drive every trajectory with the negated noise");
    add_common(e, common, seed);

    OrderArgs ord;
    auto* o = app.add_subcommand("order-check", "Strong error and convergence order on coupled grids");
    o->add_option("--field", ord.field, "Built-in field name or field definition JSON")->capture_default_str();
    o->add_option("--start", ord.start, "Starting point x1,x2")->capture_default_str();
    o->add_option("--T", ord.horizon, "Horizon")->capture_default_str();
    o->add_option("--levels", ord.levels, "Coarse steps T 2^-l")->capture_default_str();
    o->add_option("--ref-level", ord.reference_level, "Reference step T 2^-l")->capture_default_str();
    o->add_option("--n-paths", ord.n_paths, "Monte Carlo paths")->capture_default_str();
    o->add_option("--schemes", ord.schemes, "Comma-separated schemes")->capture_default_str();
    add_common(o, common, seed);

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& pe) {
      err << "error: " << pe.what() << "\n";
      return kExitUsage;
    }

    if (s->parsed()) return cmd_simulate(sim, common, out, err);
    if (c->parsed()) return cmd_classify(cls, common, out);
    if (e->parsed()) return cmd_ergodic(erg, common, out, err);
    return cmd_order_check(ord, common, out, err);
  } catch (const UsageError& ue) {
    err << "error: " << ue.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace ergodiff
