#include "core/experiments.hpp"

#include "core/format.hpp"
#include "core/invariance.hpp"
#include "core/objective.hpp"
#include "core/oracle_sim.hpp"
#include "core/parallel.hpp"
#include "core/reductions.hpp"
#include "core/rng.hpp"
#include "core/variance_lab.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace plateau::experiments {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(seed) ^ mix64(a + 0x9e3779b97f4a7c15ULL) ^ mix64(b + 0x2545f4914f6cdd1dULL));
}

std::uint64_t require_seed(const json& config) {
  if (!config.contains("seed") || config.at("seed").is_null()) {
    throw invalid_argument("config: seed is mandatory");
  }
  return config.at("seed").get<std::uint64_t>();
}

void apply_workers(const json& config) {
  set_workers(config.value("workers", 0));
}

void echo_config(const json& config, const std::string& out_dir) {
  write_file(out_dir + "/config.json", config.dump(2) + "\n");
}

GaussianMixture mixture_from_config(const json& config, int default_dim) {
  if (config.contains("mixture") && !config.at("mixture").is_null()) {
    return GaussianMixture::from_json(config.at("mixture").dump());
  }
  return GaussianMixture::standard(default_dim);
}

Vec vec_from_json(const json& arr) {
  Vec v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr.at(i).get<double>();
  return v;
}

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

// Five-stop viridis ramp, linear interpolation.
std::string color_of(double t) {
  static const double stops[5][3] = {{0x44, 0x01, 0x54},
                                     {0x3b, 0x52, 0x8b},
                                     {0x21, 0x91, 0x8c},
                                     {0x5e, 0xc9, 0x62},
                                     {0xfd, 0xe7, 0x25}};
  t = std::min(1.0, std::max(0.0, t));
  const double pos = t * 4.0;
  const int lo = std::min(3, static_cast<int>(pos));
  const double frac = pos - lo;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(stops[lo][0] + frac * (stops[lo + 1][0] - stops[lo][0])),
                static_cast<int>(stops[lo][1] + frac * (stops[lo + 1][1] - stops[lo][1])),
                static_cast<int>(stops[lo][2] + frac * (stops[lo + 1][2] - stops[lo][2])));
  return buf;
}

std::string heatmap_svg(const Mat& values, const GridSpec& spec, bool log_scale,
                        const std::string& title) {
  const int n = spec.n;
  const double cell = 600.0 / n;
  const double margin = 40.0;

  double vmax = values.maxCoeff();
  double vmin_pos = vmax;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (values(i, j) > 0.0) vmin_pos = std::min(vmin_pos, values(i, j));
  if (!(vmin_pos < vmax)) vmin_pos = vmax > 0.0 ? vmax / 10.0 : 1e-16;
  const double lo = log_scale ? std::log10(std::max(vmin_pos, 1e-16)) : values.minCoeff();
  const double hi = log_scale ? std::log10(std::max(vmax, 1e-300)) : vmax;
  const double span = (hi > lo) ? hi - lo : 1.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(600.0 + 2 * margin)
     << "\" height=\"" << fmt(600.0 + 2 * margin) << "\">\n";
  os << "<text x=\"" << fmt(margin) << "\" y=\"24\" font-family=\"monospace\" font-size=\"14\">"
     << title << "</text>\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = values(i, j);
      double t;
      if (log_scale) {
        t = (std::log10(std::max(v, vmin_pos)) - lo) / span;
      } else {
        t = (v - lo) / span;
      }
      // grid row i = first axis (w1) -> x, column j = second axis (w2) -> y (up)
      const double x = margin + i * cell;
      const double y = margin + (n - 1 - j) * cell;
      os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(cell + 0.5)
         << "\" height=\"" << fmt(cell + 0.5) << "\" fill=\"" << color_of(t) << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

json default_config(const std::string& subcommand) {
  if (subcommand == "landscape") {
    return json{{"workers", 0},
                {"wstar", {2.0, 2.0}},
                {"grid", {{"lo", -3.0}, {"hi", 3.0}, {"n", 201}}},
                {"mixture", nullptr},
                {"estimator", "closed"},
                {"mc_samples", 100000},
                {"svg", true},
                {"log_scale", true},
                {"flatness", {{"exclude_radius", 0.5}, {"grad_tol", 1e-6}}}};
  }
  if (subcommand == "variance_scan") {
    return json{{"workers", 0},
                {"dims", {5, 10, 20}},
                {"radii", {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}},
                {"probe", {{"kind", "random_unit"}, {"scale", 1.0}}},
                {"n_wstar", 200},
                {"gradient", "closed"},
                {"n_x", 100000}};
  }
  if (subcommand == "trajectory") {
    return json{{"workers", 0},
                {"d", 30},
                {"radius", 4.0},
                {"targets", 10},
                {"oracle", {{"enabled", true}, {"epsilon", nullptr}, {"mean_draws", 10000}}},
                {"trainer",
                 {{"kind", "gd"},
                  {"eta", 0.1},
                  {"schedule", "constant"},
                  {"steps", 1000},
                  {"init", {{"kind", "random_unit"}, {"scale", 1.0}, {"offset", 0.01}}},
                  {"batch", 1024},
                  {"record_every", 1}}}};
  }
  if (subcommand == "invariance") {
    return json{{"workers", 0},
                {"d", 8},
                {"m", 100},
                {"holdout", 50},
                {"trials", 5},
                {"tol_orthogonal", 1e-8},
                {"tol_pipeline", 1e-6},
                {"algorithms", {"first_column", "gd_linear", "ridge"}},
                {"control", "coordwise_abs_mean"},
                {"control_min_discrepancy", 0.1},
                {"pipeline", {{"trials", 5}, {"cond_max", 1000.0}}},
                {"transport", {{"d", 6}, {"n", 2}, {"trials", 3}}},
                {"span",
                 {{"directions", 3},
                  {"d", 10},
                  {"m", {2, 5, 20}},
                  {"datasets", 200},
                  {"holdout", 100}}}};
  }
  if (subcommand == "reduction_check") {
    return json{{"workers", 0},
                {"instances", 100},
                {"max_dim", 12},
                {"max_halfspaces", 5},
                {"weight_bound", nullptr},
                {"rounding_pairs", 100000},
                {"padding_checks", 100}};
  }
  throw invalid_argument("unknown subcommand '" + subcommand + "'");
}

json merged_config(const std::string& subcommand, const json& user) {
  json merged = default_config(subcommand);
  merged.merge_patch(user);
  return merged;
}

RunResult run_landscape(const json& config, const std::string& out_dir) {
  const std::uint64_t seed = require_seed(config);
  apply_workers(config);

  GaussianMixture mixture = mixture_from_config(config, 2);
  if (mixture.dim() != 2) throw invalid_argument("landscape: mixture must be 2-D");
  const Vec wstar = vec_from_json(config.at("wstar"));
  if (wstar.size() != 2) throw invalid_argument("landscape: wstar must have 2 coordinates");

  GridSpec spec;
  spec.lo = config.at("grid").at("lo").get<double>();
  spec.hi = config.at("grid").at("hi").get<double>();
  spec.n = config.at("grid").at("n").get<int>();

  Problem problem(mixture, PeriodicFn::cosine(), wstar, PredictorFamily::cosine(2));
  const bool mc = config.at("estimator").get<std::string>() == "mc";
  std::optional<std::int64_t> mc_samples;
  if (mc) mc_samples = config.at("mc_samples").get<std::int64_t>();
  const Mat values = landscape_grid(problem, spec, mc_samples, seed);

  // CSV
  std::ostringstream csv;
  csv << "w1,w2,F\n";
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      csv << fmt(spec.coord(i)) << ',' << fmt(spec.coord(j)) << ',' << fmt(values(i, j)) << '\n';
    }
  }
  write_file(out_dir + "/landscape.csv", csv.str());

  // Extrema
  int min_i = 0, min_j = 0, max_i = 0, max_j = 0;
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      if (values(i, j) < values(min_i, min_j)) {
        min_i = i;
        min_j = j;
      }
      if (values(i, j) > values(max_i, max_j)) {
        max_i = i;
        max_j = j;
      }
    }
  }
  // Second minimum away from the first (captures the symmetric twin).
  int min2_i = -1, min2_j = -1;
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      const double dx = spec.coord(i) - spec.coord(min_i);
      const double dy = spec.coord(j) - spec.coord(min_j);
      if (dx * dx + dy * dy < 1.0) continue;
      if (min2_i < 0 || values(i, j) < values(min2_i, min2_j)) {
        min2_i = i;
        min2_j = j;
      }
    }
  }

  json summary;
  summary["min"] = {{"w", {spec.coord(min_i), spec.coord(min_j)}}, {"value", values(min_i, min_j)}};
  if (min2_i >= 0) {
    summary["second_min"] = {{"w", {spec.coord(min2_i), spec.coord(min2_j)}},
                             {"value", values(min2_i, min2_j)}};
  }
  summary["max"] = {{"w", {spec.coord(max_i), spec.coord(max_j)}}, {"value", values(max_i, max_j)}};

  // Flatness sweep over the closed-form gradient.
  if (problem.has_closed_form()) {
    const double excl = config.at("flatness").at("exclude_radius").get<double>();
    const double tol = config.at("flatness").at("grad_tol").get<double>();
    std::int64_t outside = 0, flat = 0;
    Vec w(2);
    for (int i = 0; i < spec.n; ++i) {
      for (int j = 0; j < spec.n; ++j) {
        w[0] = spec.coord(i);
        w[1] = spec.coord(j);
        const bool near_crit = w.norm() < excl || (w - wstar).norm() < excl ||
                               (w + wstar).norm() < excl;
        if (near_crit) continue;
        ++outside;
        if (grad_closed(problem, w).norm() <= tol) ++flat;
      }
    }
    summary["flatness"] = {{"exclude_radius", excl},
                           {"grad_tol", tol},
                           {"cells_outside", outside},
                           {"cells_flat", flat},
                           {"fraction", outside > 0 ? static_cast<double>(flat) / outside : 1.0}};
  }

  if (config.at("svg").get<bool>()) {
    std::ostringstream title;
    title << "F(w), wstar=(" << fmt(wstar[0]) << "," << fmt(wstar[1]) << ")";
    write_file(out_dir + "/landscape.svg",
               heatmap_svg(values, spec, config.at("log_scale").get<bool>(), title.str()));
  }

  write_file(out_dir + "/summary.json", summary.dump(2) + "\n");
  echo_config(config, out_dir);
  return {RunOutcome::Ok, summary};
}

RunResult run_variance_scan(const json& config, const std::string& out_dir) {
  const std::uint64_t seed = require_seed(config);
  apply_workers(config);

  VarianceScanConfig scan;
  scan.seed = seed;
  for (const auto& d : config.at("dims")) scan.dims.push_back(d.get<int>());
  for (const auto& r : config.at("radii")) scan.radii.push_back(r.get<double>());
  scan.n_wstar = config.at("n_wstar").get<int>();
  scan.n_x = config.at("n_x").get<std::int64_t>();
  scan.closed_form = config.at("gradient").get<std::string>() == "closed";
  const auto& jp = config.at("probe");
  if (jp.at("kind").get<std::string>() == "fixed") {
    scan.probe.kind = ProbeRule::Kind::Fixed;
    scan.probe.fixed = vec_from_json(jp.at("vector"));
  } else {
    scan.probe.kind = ProbeRule::Kind::RandomUnitScaled;
    scan.probe.scale = jp.at("scale").get<double>();
  }

  const VarianceReport report = variance_of_gradient(scan);
  write_file(out_dir + "/variance.csv", report.csv());

  json fits = json::object();
  for (int d : scan.dims) {
    const LineFit f = decay_fit(report, d);
    fits[std::to_string(d)] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
  }
  json summary;
  summary["decay_fit"] = fits;
  write_file(out_dir + "/decay_fit.json", summary.dump(2) + "\n");
  echo_config(config, out_dir);
  return {RunOutcome::Ok, summary};
}

namespace {

const char* branch_name(int branch) {
  switch (branch) {
    case 1:
      return "mean";
    case 2:
      return "true";
    default:
      return "honest";
  }
}

std::string trajectory_jsonl(const TrajectoryRecord& rec) {
  std::ostringstream os;
  for (const auto& s : rec.steps) {
    json line;
    line["t"] = s.t;
    line["w"] = vec_to_json(s.w);
    line["branch"] = branch_name(s.branch);
    line["F"] = s.objective;
    os << line.dump() << '\n';
  }
  json fin;
  fin["t"] = rec.steps.empty() ? 1 : rec.steps.back().t + 1;
  fin["w"] = vec_to_json(rec.final_w);
  fin["branch"] = "final";
  fin["F"] = rec.final_objective;
  os << fin.dump() << '\n';
  return os.str();
}

Trainer trainer_from_config(const json& jt) {
  Trainer t;
  const std::string kind = jt.at("kind").get<std::string>();
  if (kind == "gd") {
    t.kind = Trainer::Kind::GD;
  } else if (kind == "normalized_gd") {
    t.kind = Trainer::Kind::NormalizedGD;
  } else if (kind == "sgd") {
    t.kind = Trainer::Kind::SGD;
  } else {
    throw invalid_argument("trainer kind must be gd, normalized_gd or sgd");
  }
  t.schedule.eta = jt.at("eta").get<double>();
  t.schedule.kind = jt.value("schedule", "constant") == "inv_sqrt" ? StepSchedule::Kind::InvSqrt
                                                                   : StepSchedule::Kind::Constant;
  t.steps = jt.at("steps").get<std::int64_t>();
  if (jt.contains("projection_radius") && !jt.at("projection_radius").is_null()) {
    t.projection_radius = jt.at("projection_radius").get<double>();
  }
  t.sgd_batch = jt.value("batch", 1024);
  t.record_every = jt.value("record_every", 1);

  const auto& ji = jt.at("init");
  const std::string ik = ji.at("kind").get<std::string>();
  if (ik == "zero") {
    t.init.kind = InitRule::Kind::Zero;
  } else if (ik == "fixed") {
    t.init.kind = InitRule::Kind::Fixed;
    t.init.fixed = vec_from_json(ji.at("vector"));
  } else if (ik == "random_unit") {
    t.init.kind = InitRule::Kind::RandomUnit;
    t.init.scale = ji.value("scale", 1.0);
  } else if (ik == "near_target") {
    t.init.kind = InitRule::Kind::NearTarget;
    t.init.offset = ji.value("offset", 0.01);
  } else {
    throw invalid_argument("init kind must be zero, fixed, random_unit or near_target");
  }
  return t;
}

}  // namespace

RunResult run_trajectory(const json& config, const std::string& out_dir) {
  const std::uint64_t seed = require_seed(config);
  apply_workers(config);

  const int d = config.at("d").get<int>();
  const double r = config.at("radius").get<double>();
  const int targets = config.at("targets").get<int>();
  const GaussianMixture mixture = GaussianMixture::standard(d);
  const PredictorFamily family = PredictorFamily::cosine(d);

  Vec wstar0 = Vec::Zero(d);
  wstar0[0] = 2.0 * r;
  Problem prototype(mixture, PeriodicFn::cosine(), wstar0, family);

  const Trainer trainer = trainer_from_config(config.at("trainer"));

  GradientSource source;
  double epsilon = 0.0;
  const auto& jo = config.at("oracle");
  if (jo.at("enabled").get<bool>()) {
    epsilon = jo.at("epsilon").is_null() ? epsilon_recipe(mixture, family, 2.0 * r)
                                         : jo.at("epsilon").get<double>();
    OracleConfig oc;
    oc.epsilon = epsilon;
    oc.mean_draws = jo.at("mean_draws").get<int>();
    oc.mean_seed = derive_seed(seed, 0x3ea7);
    source.kind = GradientSource::Kind::Oracle;
    source.mean = std::make_shared<SphereMeanGradient>(prototype, oc);
    source.epsilon = epsilon;
  } else if (trainer.kind == Trainer::Kind::SGD) {
    source.kind = GradientSource::Kind::Minibatch;
  } else {
    source.kind = GradientSource::Kind::Honest;
  }

  std::vector<TrajectoryRecord> runs;
  const IndependenceReport rep =
      trajectory_independence_check(prototype, targets, trainer, source, seed, &runs);

  for (int k = 0; k < targets; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "/target_%02d.jsonl", k);
    write_file(out_dir + name, trajectory_jsonl(runs[k]));
  }

  json summary;
  summary["n_targets"] = rep.n_targets;
  summary["identical_pairs"] = rep.identical_pairs;
  summary["total_pairs"] = rep.total_pairs;
  summary["fraction_identical"] = rep.fraction_identical();
  summary["earliest_divergence"] = rep.earliest_divergence;
  summary["true_branch_total"] = rep.true_branch_total;
  summary["oracle_valid"] = rep.oracle_valid;
  summary["epsilon"] = epsilon;
  json finals = json::array();
  for (const auto& run : runs) finals.push_back(run.final_objective);
  summary["final_objectives"] = finals;
  write_file(out_dir + "/independence.json", summary.dump(2) + "\n");
  echo_config(config, out_dir);
  return {RunOutcome::Ok, summary};
}

RunResult run_invariance(const json& config, const std::string& out_dir) {
  const std::uint64_t seed = require_seed(config);
  apply_workers(config);

  const int d = config.at("d").get<int>();
  const int m = config.at("m").get<int>();
  const int n_holdout = config.at("holdout").get<int>();
  const int trials = config.at("trials").get<int>();
  const double tol_orth = config.at("tol_orthogonal").get<double>();
  const double tol_pipe = config.at("tol_pipeline").get<double>();

  const DataSource source = DataSource::from_mixture(GaussianMixture::standard(d));
  const Dataset dataset = make_dataset(source, m, derive_seed(seed, 0xd5));
  const Mat holdout = source.sample(n_holdout, derive_seed(seed, 0x801d)).transpose();

  bool all_pass = true;
  json summary;

  json jorth = json::object();
  for (const auto& jname : config.at("algorithms")) {
    const auto& alg = find_algorithm(jname.get<std::string>());
    const auto v = check_orthogonal_invariance(alg, dataset, holdout, trials, seed, tol_orth);
    jorth[alg.name] = {{"max_dataset_discrepancy", v.max_dataset_discrepancy},
                       {"max_holdout_discrepancy", v.max_holdout_discrepancy},
                       {"pass", v.pass}};
    all_pass = all_pass && v.pass;
  }
  {
    const auto& control = find_algorithm(config.at("control").get<std::string>());
    const double min_disc = config.at("control_min_discrepancy").get<double>();
    const auto v = check_orthogonal_invariance(control, dataset, holdout, trials, seed, tol_orth);
    const bool control_fails_as_expected = v.max_dataset_discrepancy >= min_disc;
    jorth[control.name] = {{"max_dataset_discrepancy", v.max_dataset_discrepancy},
                           {"max_holdout_discrepancy", v.max_holdout_discrepancy},
                           {"expected_failure", true},
                           {"pass", control_fails_as_expected}};
    all_pass = all_pass && control_fails_as_expected;
  }
  summary["orthogonal"] = jorth;

  json jpipe = json::object();
  const int pipe_trials = config.at("pipeline").at("trials").get<int>();
  const double cond_max = config.at("pipeline").at("cond_max").get<double>();
  for (const auto& jname : config.at("algorithms")) {
    const auto& alg = find_algorithm(jname.get<std::string>());
    const auto v =
        check_linear_invariance(alg, dataset, holdout, pipe_trials, cond_max, seed, tol_pipe);
    jpipe[alg.name] = {{"max_dataset_discrepancy", v.max_dataset_discrepancy},
                       {"max_holdout_discrepancy", v.max_holdout_discrepancy},
                       {"pass", v.pass}};
    all_pass = all_pass && v.pass;
  }
  summary["whitened_pipeline"] = jpipe;

  {
    const auto& jt = config.at("transport");
    const int td = jt.at("d").get<int>();
    const int tn = jt.at("n").get<int>();
    const int tt = jt.at("trials").get<int>();
    json arr = json::array();
    bool ok = true;
    for (int i = 0; i < tt; ++i) {
      RandomStream rs(derive_seed(seed, 0x7247, i), 0);
      Mat Ws(td, tn), Wt(td, tn);
      for (int a = 0; a < td; ++a)
        for (int b = 0; b < tn; ++b) {
          Ws(a, b) = rs.normal();
          Wt(a, b) = rs.normal();
        }
      const Transport t = transport_construct(Ws, Wt);
      const bool pass = t.residual <= 1e-10 && t.M_norm <= t.certificate * (1.0 + 1e-9);
      arr.push_back({{"residual", t.residual},
                     {"M_norm", t.M_norm},
                     {"certificate", t.certificate},
                     {"pass", pass}});
      ok = ok && pass;
    }
    summary["transport"] = {{"trials", arr}, {"pass", ok}};
    all_pass = all_pass && ok;
  }

  {
    const auto& js = config.at("span");
    const int k = js.at("directions").get<int>();
    const int sd = js.at("d").get<int>();
    const int datasets = js.at("datasets").get<int>();
    const int holdn = js.at("holdout").get<int>();
    RandomStream rs(derive_seed(seed, 0x59a2), 0);
    Mat dirs(k, sd);
    for (int i = 0; i < k; ++i) dirs.row(i) = sphere_point(sd, 1.0, rs).transpose();
    const DataSource degen = DataSource::from_directions(dirs);
    json arr = json::array();
    bool ok = true;
    for (const auto& jm : js.at("m")) {
      const int mm = jm.get<int>();
      const SpanCoverage sc =
          span_coverage(degen, sd, mm, datasets, holdn, derive_seed(seed, 0x59a3, mm));
      const bool pass = sc.mean_probability <= sc.bound + 3.0 * sc.std_error;
      arr.push_back({{"m", mm},
                     {"mean_probability", sc.mean_probability},
                     {"std_error", sc.std_error},
                     {"bound", sc.bound},
                     {"pass", pass}});
      ok = ok && pass;
    }
    summary["span_coverage"] = {{"cases", arr}, {"pass", ok}};
    all_pass = all_pass && ok;
  }

  summary["pass"] = all_pass;
  write_file(out_dir + "/verdict.json", summary.dump(2) + "\n");
  echo_config(config, out_dir);
  return {all_pass ? RunOutcome::Ok : RunOutcome::VerdictFail, summary};
}

RunResult run_reduction_check(const json& config, const std::string& out_dir) {
  const std::uint64_t seed = require_seed(config);
  apply_workers(config);

  const int instances = config.at("instances").get<int>();
  const int max_dim = config.at("max_dim").get<int>();
  const int max_halfspaces = config.at("max_halfspaces").get<int>();
  const int padding_checks = config.at("padding_checks").get<int>();

  std::int64_t mismatches = 0;
  std::int64_t padding_failures = 0;
  double worst_smin_error = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    RandomStream rs(derive_seed(seed, 0x2ed, inst), 0);
    const int d1 = 2 + static_cast<int>(rs.next_u64() % static_cast<std::uint64_t>(max_dim - 1));
    const int n = 1 + static_cast<int>(rs.next_u64() % static_cast<std::uint64_t>(max_halfspaces));
    const std::int64_t bound = config.at("weight_bound").is_null()
                                   ? static_cast<std::int64_t>(d1 + 1)
                                   : config.at("weight_bound").get<std::int64_t>();
    const auto h = HalfspaceIntersection::random(d1, n, bound, derive_seed(seed, 0x9e2, inst));
    const auto net = to_clipped_network(h);
    mismatches += equivalence_mismatches(h, net);

    // Padding on the same network weights.
    const Mat W = net.columns.cast<double>();
    const PaddedNetwork padded = pad_independent(W);
    Eigen::SelfAdjointEigenSolver<Mat> es(W.transpose() * W);
    const double expect = std::sqrt(es.eigenvalues().minCoeff() + 1.0);
    worst_smin_error = std::max(worst_smin_error, std::abs(padded.s_min() - expect));
    const ClippedReluSum original(W);
    const ClippedReluSum lifted(padded.W_tilde);
    for (int t = 0; t < padding_checks; ++t) {
      Vec x(W.rows());
      for (int i = 0; i < x.size(); ++i) x[i] = rs.normal();
      if (original.eval(x) != lifted.eval(padded.lift(x))) ++padding_failures;
    }
  }

  const std::int64_t pairs = config.at("rounding_pairs").get<std::int64_t>();
  std::int64_t rounding_violations = 0;
  {
    std::vector<double> f(pairs), g(pairs);
    RandomStream rs(derive_seed(seed, 0x20d), 0);
    for (std::int64_t i = 0; i < pairs; ++i) {
      f[i] = rs.uniform01();
      g[i] = rs.next_u64() & 1 ? 1.0 : 0.0;
      const RoundBound rb = round_and_bound(std::span(&f[i], 1), std::span(&g[i], 1));
      if (!rb.inequality_holds) ++rounding_violations;
    }
    const RoundBound overall = round_and_bound(f, g);
    if (!overall.inequality_holds) ++rounding_violations;
  }

  const bool pass = mismatches == 0 && padding_failures == 0 && worst_smin_error <= 1e-10 &&
                    rounding_violations == 0;
  json summary;
  summary["instances"] = instances;
  summary["equivalence_mismatches"] = mismatches;
  summary["padding_failures"] = padding_failures;
  summary["worst_smin_identity_error"] = worst_smin_error;
  summary["rounding_pairs"] = pairs;
  summary["rounding_violations"] = rounding_violations;
  summary["pass"] = pass;
  write_file(out_dir + "/verdict.json", summary.dump(2) + "\n");
  echo_config(config, out_dir);
  return {pass ? RunOutcome::Ok : RunOutcome::VerdictFail, summary};
}

}  // namespace plateau::experiments
