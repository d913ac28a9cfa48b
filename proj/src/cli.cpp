#include "slicegeo/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slicegeo/chart.hpp"
#include "slicegeo/config.hpp"
#include "slicegeo/errors.hpp"
#include "slicegeo/fieldspec.hpp"
#include "slicegeo/geodesics.hpp"
#include "slicegeo/random_fields.hpp"
#include "slicegeo/splitting.hpp"
#include "slicegeo/verify.hpp"

namespace slicegeo {

namespace {

using nlohmann::ordered_json;

struct CommonOptions {
  std::string model_path;
  int grid_override = 0;
  std::string out_path;
  std::string csv_path;
  double margin_floor = kDefaultMarginFloor;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  // Long-form help only; the short -h would collide with the --h metric flag.
  cmd->set_help_flag("--help", "print help and exit");
  cmd->add_option("--model", common.model_path, "model configuration JSON")->required();
  cmd->add_option("--grid", common.grid_override, "override grid_n from the config");
  cmd->add_option("--out", common.out_path, "write the JSON record here instead of stdout");
  cmd->add_option("--csv", common.csv_path, "write field/trajectory data as CSV");
  cmd->add_option("--margin-floor", common.margin_floor, "spacelike margin guard");
}

struct Loaded {
  SpacetimeModel model;
  Grid grid;
};

Loaded load(const CommonOptions& common) {
  LoadedModel lm = load_model_file(common.model_path);
  const int n = common.grid_override > 0 ? common.grid_override : lm.grid_n;
  return Loaded{std::move(lm.model), Grid(n)};
}

ordered_json make_record(const std::string& operation, const CommonOptions& common,
                         const Loaded& loaded) {
  ordered_json record;
  record["schema_version"] = 1;
  record["operation"] = operation;
  record["model"] = describe_model(loaded.model, loaded.grid.n);
  record["model"]["config"] = common.model_path;
  record["grid_n"] = loaded.grid.n;
  record["parameters"] = ordered_json::object();
  record["values"] = ordered_json::object();
  record["tolerances"] = {{"margin_floor", common.margin_floor},
                          {"metric_positivity", MetricField::kPositivityTol}};
  return record;
}

void emit(const ordered_json& record, const CommonOptions& common, std::ostream& out) {
  if (!common.out_path.empty()) {
    std::ofstream file(common.out_path);
    if (!file) throw_error(ErrorKind::config_error, "cannot write '" + common.out_path + "'");
    file << record.dump(2) << "\n";
  } else {
    out << record.dump(2) << "\n";
  }
}

void write_csv_field(const std::string& path, const ScalarField& field,
                     const std::string& value_name) {
  std::ofstream file(path);
  if (!file) throw_error(ErrorKind::config_error, "cannot write '" + path + "'");
  file << std::setprecision(17);
  file << "x," << value_name << "\n";
  for (int i = 0; i < field.size(); ++i) file << field.grid().point(i) << "," << field[i] << "\n";
}

void write_csv_trajectory(const std::string& path, const std::vector<double>& s_values,
                          const std::vector<const ScalarField*>& rows) {
  std::ofstream file(path);
  if (!file) throw_error(ErrorKind::config_error, "cannot write '" + path + "'");
  file << std::setprecision(17);
  file << "s";
  for (int i = 0; i < rows.front()->size(); ++i) file << ",x" << i;
  file << "\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    file << s_values[r];
    for (int i = 0; i < rows[r]->size(); ++i) file << "," << (*rows[r])[i];
    file << "\n";
  }
}

std::pair<double, double> parse_window(const std::string& spec) {
  const size_t sep = spec.find(':');
  if (sep == std::string::npos)
    throw_error(ErrorKind::config_error, "window must be '<lo>:<hi>', got '" + spec + "'");
  try {
    const double lo = std::stod(spec.substr(0, sep));
    const double hi = std::stod(spec.substr(sep + 1));
    if (!(hi > lo)) throw std::invalid_argument(spec);
    return {lo, hi};
  } catch (const std::exception&) {
    throw_error(ErrorKind::config_error, "cannot parse window '" + spec + "'");
  }
}

std::pair<double, double> default_window(const SpacetimeModel& model, double fallback_half_width) {
  const TDomain& dom = model.t_domain();
  if (dom.is_finite()) {
    const double pad = 1e-6 * (dom.hi - dom.lo);
    return {dom.lo + pad, dom.hi - pad};
  }
  return {-fallback_half_width, fallback_half_width};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"slicegeo: numerical geometry of spacelike graph slices under an L2 metric"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  // metric
  CommonOptions metric_common;
  std::string metric_f = "const:0", metric_u, metric_v;
  CLI::App* cmd_metric = app.add_subcommand("metric", "evaluate the chart metric G_f(u,v)");
  add_common(cmd_metric, metric_common);
  cmd_metric->add_option("--f", metric_f, "graph function");
  cmd_metric->add_option("--u", metric_u, "first tangent field")->required();
  cmd_metric->add_option("--v", metric_v, "second tangent field")->required();

  // connection
  CommonOptions conn_common;
  std::string conn_f = "const:0", conn_u, conn_v;
  CLI::App* cmd_conn = app.add_subcommand("connection", "evaluate the connection form Gamma_f(u,v)");
  add_common(cmd_conn, conn_common);
  cmd_conn->add_option("--f", conn_f, "graph function");
  cmd_conn->add_option("--u", conn_u, "first tangent field")->required();
  cmd_conn->add_option("--v", conn_v, "second tangent field")->required();

  // curvature
  CommonOptions curv_common;
  std::string curv_f = "const:0", curv_u, curv_v, curv_w, curv_z;
  double curv_fd_step = 0.0;
  CLI::App* cmd_curv =
      app.add_subcommand("curvature", "evaluate the (3,1) curvature tensor and its oracles");
  add_common(cmd_curv, curv_common);
  cmd_curv->add_option("--f", curv_f, "graph function (slice)");
  cmd_curv->add_option("--u", curv_u, "first field")->required();
  cmd_curv->add_option("--v", curv_v, "second field")->required();
  cmd_curv->add_option("--w", curv_w, "third field")->required();
  cmd_curv->add_option("--z", curv_z, "optional fourth field for the (4,0) pairing");
  cmd_curv->add_option("--fd-step", curv_fd_step,
                       "run the finite-difference curvature oracle with this step");

  // sectional
  CommonOptions sect_common;
  std::string sect_slice = "const:0", sect_u, sect_v;
  CLI::App* cmd_sect = app.add_subcommand("sectional", "sectional curvature of span{u,v}");
  add_common(cmd_sect, sect_common);
  cmd_sect->add_option("--slice", sect_slice, "graph function of the slice");
  cmd_sect->add_option("--u", sect_u, "first field")->required();
  cmd_sect->add_option("--v", sect_v, "second field")->required();

  // geodesic-ivp
  CommonOptions ivp_common;
  std::string ivp_f0 = "const:0", ivp_u0;
  double ivp_s_end = 1.0, ivp_ds = 1e-3;
  CLI::App* cmd_ivp = app.add_subcommand("geodesic-ivp", "integrate the geodesic flow");
  add_common(cmd_ivp, ivp_common);
  cmd_ivp->add_option("--f0", ivp_f0, "initial graph function");
  cmd_ivp->add_option("--u0", ivp_u0, "initial chart velocity")->required();
  cmd_ivp->add_option("--s-end", ivp_s_end, "parameter span");
  cmd_ivp->add_option("--ds", ivp_ds, "RK4 step");

  // geodesic-bvp
  CommonOptions bvp_common;
  std::string bvp_f0, bvp_f1;
  int bvp_K = 16, bvp_max_iter = 5000, bvp_multi = 0;
  double bvp_tol = 1e-8;
  uint64_t bvp_seed = 7;
  CLI::App* cmd_bvp = app.add_subcommand("geodesic-bvp", "two-point geodesic by energy descent");
  add_common(cmd_bvp, bvp_common);
  cmd_bvp->add_option("--f0", bvp_f0, "first endpoint")->required();
  cmd_bvp->add_option("--f1", bvp_f1, "second endpoint")->required();
  cmd_bvp->add_option("--K", bvp_K, "number of segments");
  cmd_bvp->add_option("--tol", bvp_tol, "gradient norm tolerance");
  cmd_bvp->add_option("--max-iter", bvp_max_iter, "iteration cap");
  cmd_bvp->add_option("--multi-start", bvp_multi,
                      "also run this many randomly perturbed seeds and compare");
  cmd_bvp->add_option("--seed", bvp_seed, "seed for the multi-start perturbations");

  // distance-bound
  CommonOptions dist_common;
  std::string dist_f0, dist_f1, dist_h = "g0", dist_window;
  CLI::App* cmd_dist =
      app.add_subcommand("distance-bound", "L2 lower bound for the chart distance");
  add_common(cmd_dist, dist_common);
  cmd_dist->add_option("--f0", dist_f0, "first graph function")->required();
  cmd_dist->add_option("--f1", dist_f1, "second graph function")->required();
  cmd_dist->add_option("--h", dist_h, "reference metric");
  cmd_dist->add_option("--t-window", dist_window, "lapse-bound sampling window '<lo>:<hi>'");

  // reparametrize
  CommonOptions rep_common;
  std::string rep_h = "g0", rep_window, rep_export;
  CLI::App* cmd_rep =
      app.add_subcommand("reparametrize", "bounded-lapse time reparametrization certificate");
  add_common(cmd_rep, rep_common);
  cmd_rep->add_option("--h", rep_h, "reference metric");
  cmd_rep->add_option("--t-window", rep_window, "window '<lo>:<hi>' to cover");
  cmd_rep->add_option("--export", rep_export, "write the result as a tabulated model config");

  // verify
  CommonOptions verify_common;
  uint64_t verify_seed = 7;
  CLI::App* cmd_verify = app.add_subcommand("verify", "run the randomized property suite");
  add_common(cmd_verify, verify_common);
  cmd_verify->add_option("--seed", verify_seed, "randomization seed");

  std::vector<const char*> argv;
  argv.push_back("slicegeo");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (app.got_subcommand(cmd_metric)) {
      const Loaded loaded = load(metric_common);
      const ScalarField f = parse_field(metric_f, loaded.grid);
      const ScalarField u = parse_field(metric_u, loaded.grid);
      const ScalarField v = parse_field(metric_v, loaded.grid);
      ordered_json record = make_record("metric", metric_common, loaded);
      record["parameters"] = {{"f", metric_f}, {"u", metric_u}, {"v", metric_v},
                              {"margin_floor", metric_common.margin_floor}};
      record["values"]["G"] = metric_G(loaded.model, f, u, v, metric_common.margin_floor);
      emit(record, metric_common, out);
      return 0;
    }

    if (app.got_subcommand(cmd_conn)) {
      const Loaded loaded = load(conn_common);
      const ScalarField f = parse_field(conn_f, loaded.grid);
      const ScalarField u = parse_field(conn_u, loaded.grid);
      const ScalarField v = parse_field(conn_v, loaded.grid);
      const SliceData s = sample_model(loaded.model, f, conn_common.margin_floor);
      const ScalarField gamma = connection_gamma(s, u, v);
      const ConnectionForm form = connection_form(s);
      ordered_json record = make_record("connection", conn_common, loaded);
      record["parameters"] = {{"f", conn_f}, {"u", conn_u}, {"v", conn_v},
                              {"margin_floor", conn_common.margin_floor}};
      record["values"]["gamma_max_abs"] = gamma.max_abs();
      record["values"]["phi_max_abs"] = form.phi.max_abs();
      record["values"]["psi_max_abs"] = form.psi.max_abs();
      record["values"]["margin"] = s.margin;
      if (!conn_common.csv_path.empty()) write_csv_field(conn_common.csv_path, gamma, "gamma");
      emit(record, conn_common, out);
      return 0;
    }

    if (app.got_subcommand(cmd_curv)) {
      const Loaded loaded = load(curv_common);
      const ScalarField f = parse_field(curv_f, loaded.grid);
      const ScalarField u = parse_field(curv_u, loaded.grid);
      const ScalarField v = parse_field(curv_v, loaded.grid);
      const ScalarField w = parse_field(curv_w, loaded.grid);
      sample_model(loaded.model, f, curv_common.margin_floor);
      const MetricField h = induced_metric(loaded.model, f);
      const ScalarField r31 = curvature_r31(h, u, v, w);
      ordered_json record = make_record("curvature", curv_common, loaded);
      record["parameters"] = {{"f", curv_f}, {"u", curv_u}, {"v", curv_v}, {"w", curv_w},
                              {"margin_floor", curv_common.margin_floor}};
      record["values"]["r31_max_abs"] = r31.max_abs();
      if (!curv_z.empty()) {
        const ScalarField z = parse_field(curv_z, loaded.grid);
        record["parameters"]["z"] = curv_z;
        record["values"]["R4"] =
            riemann_4(loaded.model, f, u, v, w, z, curv_common.margin_floor);
      }
      if (curv_fd_step > 0.0) {
        const ScalarField disc = curvature_fd_oracle(loaded.model, f, u, v, w, curv_fd_step);
        const ScalarField disc_half =
            curvature_fd_oracle(loaded.model, f, u, v, w, 0.5 * curv_fd_step);
        record["parameters"]["fd_step"] = curv_fd_step;
        record["values"]["fd_max_discrepancy"] = disc.max_abs();
        record["values"]["fd_max_discrepancy_half_step"] = disc_half.max_abs();
        record["values"]["fd_ratio"] =
            disc_half.max_abs() > 0.0 ? disc.max_abs() / disc_half.max_abs() : 0.0;
      }
      if (!curv_common.csv_path.empty()) write_csv_field(curv_common.csv_path, r31, "r31");
      emit(record, curv_common, out);
      return 0;
    }

    if (app.got_subcommand(cmd_sect)) {
      const Loaded loaded = load(sect_common);
      const ScalarField f = parse_field(sect_slice, loaded.grid);
      const ScalarField u = parse_field(sect_u, loaded.grid);
      const ScalarField v = parse_field(sect_v, loaded.grid);
      ordered_json record = make_record("sectional", sect_common, loaded);
      record["parameters"] = {{"slice", sect_slice}, {"u", sect_u}, {"v", sect_v},
                              {"margin_floor", sect_common.margin_floor}};
      record["values"]["K"] =
          sectional_curvature(loaded.model, f, u, v, sect_common.margin_floor);
      emit(record, sect_common, out);
      return 0;
    }

    if (app.got_subcommand(cmd_ivp)) {
      const Loaded loaded = load(ivp_common);
      const ScalarField f0 = parse_field(ivp_f0, loaded.grid);
      const ScalarField u0 = parse_field(ivp_u0, loaded.grid);
      const IvpResult traj =
          geodesic_ivp(loaded.model, f0, u0, ivp_s_end, ivp_ds, ivp_common.margin_floor);
      ordered_json record = make_record("geodesic-ivp", ivp_common, loaded);
      record["parameters"] = {{"f0", ivp_f0}, {"u0", ivp_u0}, {"s_end", ivp_s_end},
                              {"ds", ivp_ds}, {"margin_floor", ivp_common.margin_floor}};
      const char* status = traj.status == IvpStatus::ok ? "ok"
                           : traj.status == IvpStatus::spacelike_violation
                               ? "spacelike_violation"
                               : "domain_violation";
      record["values"]["status"] = status;
      record["values"]["steps"] = traj.states.size() - 1;
      if (!traj.states.empty()) {
        const double ref = traj.states.front().speed_sq;
        double drift = 0.0;
        ordered_json speeds = ordered_json::array();
        for (const GeodesicState& st : traj.states) {
          drift = std::max(drift, std::abs(st.speed_sq - ref));
          speeds.push_back(st.speed_sq);
        }
        record["values"]["speed_sq_initial"] = ref;
        record["values"]["speed_sq_final"] = traj.states.back().speed_sq;
        record["values"]["speed_drift_rel"] = drift / std::max(1e-300, std::abs(ref));
        record["values"]["speed_sq"] = std::move(speeds);
      }
      if (!ivp_common.csv_path.empty() && !traj.states.empty()) {
        std::vector<double> s_values;
        std::vector<const ScalarField*> rows;
        for (const GeodesicState& st : traj.states) {
          s_values.push_back(st.s);
          rows.push_back(&st.f);
        }
        write_csv_trajectory(ivp_common.csv_path, s_values, rows);
      }
      emit(record, ivp_common, out);
      return traj.status == IvpStatus::ok ? 0 : 2;
    }

    if (app.got_subcommand(cmd_bvp)) {
      const Loaded loaded = load(bvp_common);
      const ScalarField f0 = parse_field(bvp_f0, loaded.grid);
      const ScalarField f1 = parse_field(bvp_f1, loaded.grid);
      const BvpResult base = geodesic_bvp(loaded.model, f0, f1, bvp_K, bvp_tol, bvp_max_iter,
                                          nullptr, bvp_common.margin_floor);
      ordered_json record = make_record("geodesic-bvp", bvp_common, loaded);
      record["parameters"] = {{"f0", bvp_f0},           {"f1", bvp_f1},
                              {"K", bvp_K},             {"tol", bvp_tol},
                              {"max_iter", bvp_max_iter}, {"multi_start", bvp_multi},
                              {"seed", bvp_seed},       {"margin_floor", bvp_common.margin_floor}};
      record["values"]["energy"] = base.energy;
      record["values"]["length"] = base.length;
      record["values"]["converged"] = base.converged;
      record["values"]["iterations"] = base.iterations;
      record["values"]["grad_norm_final"] = base.grad_norm_final;
      if (bvp_multi > 0) {
        Rng rng(bvp_seed);
        std::vector<BvpResult> runs{base};
        const double scale = std::max(0.05, 0.1 * (f1 - f0).max_abs());
        for (int r = 0; r < bvp_multi; ++r) {
          PathDiscretization seed_path = linear_path(f0, f1, bvp_K);
          for (size_t k = 1; k + 1 < seed_path.knots.size(); ++k)
            seed_path.knots[k] += random_band_limited(loaded.grid, rng, 3, scale);
          runs.push_back(geodesic_bvp(loaded.model, f0, f1, bvp_K, bvp_tol, bvp_max_iter,
                                      &seed_path, bvp_common.margin_floor));
        }
        bool all_converged = true;
        double max_pairwise = 0.0, max_variation = 0.0;
        for (const BvpResult& run : runs) {
          all_converged = all_converged && run.converged;
          for (const ScalarField& knot : run.path.knots)
            max_variation = std::max(max_variation, knot.max() - knot.min());
        }
        for (size_t a = 0; a < runs.size(); ++a)
          for (size_t b = a + 1; b < runs.size(); ++b)
            max_pairwise = std::max(max_pairwise, path_l2_distance(runs[a].path, runs[b].path));
        record["values"]["multi_start"] = {{"count", bvp_multi + 1},
                                           {"all_converged", all_converged},
                                           {"max_pairwise_distance", max_pairwise},
                                           {"max_spatial_variation", max_variation}};
      }
      if (!bvp_common.csv_path.empty()) {
        std::vector<double> s_values;
        std::vector<const ScalarField*> rows;
        for (size_t k = 0; k < base.path.knots.size(); ++k) {
          s_values.push_back(static_cast<double>(k) / bvp_K);
          rows.push_back(&base.path.knots[k]);
        }
        write_csv_trajectory(bvp_common.csv_path, s_values, rows);
      }
      emit(record, bvp_common, out);
      return 0;
    }

    if (app.got_subcommand(cmd_dist)) {
      const Loaded loaded = load(dist_common);
      const ScalarField f0 = parse_field(dist_f0, loaded.grid);
      const ScalarField f1 = parse_field(dist_f1, loaded.grid);
      const MetricField h = parse_reference_metric(dist_h, loaded.grid, loaded.model);
      const auto [w_lo, w_hi] =
          dist_window.empty() ? default_window(loaded.model, 3.0) : parse_window(dist_window);
      const LapseBoundReport lapse = verify_lapse_bound(loaded.model, h, w_lo, w_hi);
      ordered_json record = make_record("distance-bound", dist_common, loaded);
      record["parameters"] = {{"f0", dist_f0}, {"f1", dist_f1}, {"h", dist_h},
                              {"t_window", {w_lo, w_hi}}};
      record["values"]["bound"] = distance_lower_bound(f0, f1, h);
      record["values"]["lapse_bound_min"] = lapse.min_value;
      record["values"]["lapse_bound_pass"] = lapse.pass;
      record["tolerances"]["lapse_bound_slack"] = kLapseBoundSlack;
      emit(record, dist_common, out);
      return 0;
    }

    if (app.got_subcommand(cmd_rep)) {
      const Loaded loaded = load(rep_common);
      const MetricField h = parse_reference_metric(rep_h, loaded.grid, loaded.model);
      const auto [w_lo, w_hi] =
          rep_window.empty() ? default_window(loaded.model, 2.0) : parse_window(rep_window);
      const LapseBoundReport before = verify_lapse_bound(loaded.model, h, w_lo, w_hi);
      const ReparametrizedSplitting rep =
          reparametrize_bounded_lapse(loaded.model, h, w_lo, w_hi);
      double fprime_min = std::numeric_limits<double>::infinity();
      for (double fp : rep.fprime_samples) fprime_min = std::min(fprime_min, fp);
      ordered_json record = make_record("reparametrize", rep_common, loaded);
      record["parameters"] = {{"h", rep_h}, {"t_window", {w_lo, w_hi}}};
      record["values"]["input_bound_min"] = before.min_value;
      record["values"]["input_bound_pass"] = before.pass;
      record["values"]["output_bound_min"] = rep.certificate.min_value;
      record["values"]["output_bound_pass"] = rep.certificate.pass;
      record["values"]["pad"] = rep.pad_used;
      record["values"]["fprime_min"] = fprime_min;
      record["values"]["s_domain"] = {rep.new_model.t_domain().lo, rep.new_model.t_domain().hi};
      record["tolerances"]["lapse_bound_slack"] = kLapseBoundSlack;
      if (!rep_export.empty()) {
        const ordered_json config =
            to_tabulated_config(rep.new_model, loaded.grid.n, loaded.grid.n, 65,
                                rep.new_model.t_domain().lo + 1e-9,
                                rep.new_model.t_domain().hi - 1e-9);
        std::ofstream file(rep_export);
        if (!file) throw_error(ErrorKind::config_error, "cannot write '" + rep_export + "'");
        file << config.dump(2) << "\n";
        record["values"]["exported"] = rep_export;
      }
      emit(record, rep_common, out);
      return 0;
    }

    if (app.got_subcommand(cmd_verify)) {
      const Loaded loaded = load(verify_common);
      const std::vector<CheckResult> results =
          run_verification(loaded.model, loaded.grid.n, verify_seed);
      ordered_json record = make_record("verify", verify_common, loaded);
      record["parameters"] = {{"seed", verify_seed}};
      bool all_pass = true;
      ordered_json checks = ordered_json::array();
      for (const CheckResult& r : results) {
        err << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.detail << ")\n";
        checks.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        all_pass = all_pass && r.pass;
      }
      record["values"]["checks"] = std::move(checks);
      record["values"]["all_pass"] = all_pass;
      emit(record, verify_common, out);
      return all_pass ? 0 : 3;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::config_error ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand dispatched\n";
  return 1;
}

}  // namespace slicegeo
