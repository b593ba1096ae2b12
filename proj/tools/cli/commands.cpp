#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "finsler/curvature/curvature.hpp"
#include "finsler/errors.hpp"
#include "finsler/sampling.hpp"
#include "finsler/verify/verify.hpp"

namespace finsler::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

const std::vector<std::string>& verify_targets() {
  static const std::vector<std::string> t = {"theorem41", "theorem42", "example33", "example34",
                                             "lemma31",   "lemma51",   "lemma81",   "prop32"};
  return t;
}

// A report: machine record plus a flat table for csv.
struct Output {
  json result = json::object();
  std::vector<std::string> columns;
  std::vector<json> rows;
  bool passed = true;
  std::string summary;
};

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string joined(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v(i));
  return s;
}

std::string csv_cell(const json& v) {
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

manifold::ManifoldModel resolve_model(RunConfig& cfg, const std::string& fallback) {
  if (cfg.model.is_null()) cfg.model = fallback;
  return make_model(cfg.model);
}

metrics::Generator resolve_generator(const RunConfig& cfg) {
  if (cfg.metric.is_string()) {
    const auto name = cfg.metric.get<std::string>();
    if (name == "riemannian" || name == "quartic-test") {
      throw ConfigError("this target needs an (alpha1, alpha2) generator, not '" + name + "'");
    }
    return metrics::Generator::from_name(name);
  }
  if (cfg.metric.is_object() && cfg.metric.value("kind", "") == "alpha1-alpha2" && cfg.metric.contains("generator") &&
      cfg.metric["generator"].is_string()) {
    return metrics::Generator::from_name(cfg.metric["generator"].get<std::string>());
  }
  throw ConfigError("this target needs an (alpha1, alpha2) generator");
}

std::vector<ChartPoint> plan_points(const RunConfig& cfg, const manifold::ManifoldModel& model, int dimension,
                                    bool x_independent = false) {
  if (!cfg.point_list.empty()) {
    std::vector<ChartPoint> out;
    for (const auto& p : cfg.point_list) {
      if (static_cast<int>(p.size()) != dimension) {
        throw ConfigError("config field 'points': expected " + std::to_string(dimension) + " coordinates per point");
      }
      out.emplace_back(Eigen::Map<const Eigen::VectorXd>(p.data(), dimension));
      if (!model.in_domain(out.back().span())) throw ConfigError("config field 'points': a point lies outside the chart domain");
    }
    return out;
  }
  if (x_independent || model.dimension() != dimension) return {ChartPoint::origin(dimension)};
  return verify::default_plan(model, cfg.points, cfg.directions, cfg.radius).points;
}

std::vector<manifold::ManifoldModel> models_or_all(RunConfig& cfg) {
  std::vector<manifold::ManifoldModel> out;
  if (!cfg.model.is_null()) {
    out.push_back(make_model(cfg.model));
    return out;
  }
  for (const auto& name : manifold::builtin_model_names()) out.push_back(manifold::builtin_model(name));
  cfg.model = "all built-in";
  return out;
}

void add_checks(Output& o, const std::string& group, const verify::CheckReport& r) {
  o.columns = {"group", "check", "value", "expected", "tolerance", "passed"};
  json checks = json::array();
  for (const auto& c : r.checks) {
    o.rows.push_back(json::array({group, c.name, c.value, c.expected, c.tolerance, c.passed}));
    checks.push_back({{"check", c.name}, {"value", c.value}, {"expected", c.expected}, {"tolerance", c.tolerance},
                      {"passed", c.passed}});
  }
  o.result[group] = {{"checks", checks}, {"passed", r.passed}};
  o.passed = o.passed && r.passed;
}

Output cmd_validate(RunConfig& cfg) {
  const auto model = resolve_model(cfg, "flat-product");
  const auto spec = make_metric(cfg.metric, model);
  const double tol = cfg.tol.value_or(1e-9);
  Output o;
  o.columns = {"x", "positivity_ok", "homogeneity_ok", "convexity_ok", "min_hessian_eigenvalue",
               "homogeneity_residual_max", "euler_residual_max", "worst_direction", "passed"};
  json points = json::array();
  for (const auto& p : plan_points(cfg, model, spec.dimension(), spec.kind() == metrics::MetricKind::raw)) {
    const auto r = metrics::validate_norm(spec, p, cfg.directions, tol);
    o.passed = o.passed && r.passed();
    o.rows.push_back(json::array({joined(p.coords), r.positivity_ok, r.homogeneity_ok, r.convexity_ok,
                                  r.min_hessian_eigenvalue, r.homogeneity_residual_max, r.euler_residual_max,
                                  joined(r.worst_direction.coords), r.passed()}));
    points.push_back({{"x", vec(p.coords)},
                      {"positivity_ok", r.positivity_ok},
                      {"homogeneity_ok", r.homogeneity_ok},
                      {"convexity_ok", r.convexity_ok},
                      {"min_hessian_eigenvalue", r.min_hessian_eigenvalue},
                      {"homogeneity_residual_max", r.homogeneity_residual_max},
                      {"euler_residual_max", r.euler_residual_max},
                      {"worst_direction", vec(r.worst_direction.coords)},
                      {"directions", r.num_directions},
                      {"sequence", r.sequence},
                      {"passed", r.passed()}});
    if (!r.passed()) {
      o.summary += "FAIL at x = (" + joined(p.coords) + "): worst direction (" + joined(r.worst_direction.coords) +
                   "), min Hessian eigenvalue " + format_double(r.min_hessian_eigenvalue) + "\n";
    }
  }
  o.result["points"] = points;
  o.result["tol"] = tol;
  if (o.passed) o.summary = "validate: " + spec.name() + " passes at " + std::to_string(points.size()) + " points\n";
  return o;
}

Output cmd_curvature(RunConfig& cfg) {
  const auto model = resolve_model(cfg, "flat-product");
  const auto spec = make_metric(cfg.metric, model);
  std::vector<curvature::SamplePlanEntry> plan;
  const auto points = plan_points(cfg, model, spec.dimension(), spec.kind() == metrics::MetricKind::raw);
  for (const auto& p : points) plan.push_back({p, cfg.directions});
  const auto rows = curvature::batch_evaluate(spec, plan, cfg.quantities, cfg.nodes);
  Output o;
  o.columns = {"x", "y", "quantity", "value", "method", "error_estimate"};
  json maxima = json::object();
  for (const auto& r : rows) {
    o.rows.push_back(json::array({joined(r.x.coords), joined(r.y.coords), r.quantity, r.value, r.method, r.error_estimate}));
    const auto key = r.quantity.substr(0, r.quantity.find('['));
    maxima[key] = std::max(maxima.value(key, 0.0), std::abs(r.value));
  }
  o.result["column_max_abs"] = maxima;
  o.result["rows"] = rows.size();
  if (std::find(cfg.quantities.begin(), cfg.quantities.end(), "S") != cfg.quantities.end() &&
      spec.kind() != metrics::MetricKind::raw) {
    verify::SamplePlan sp{points, cfg.directions, ""};
    const double floor = verify::max_residuals(metrics::MetricSpec::riemannian(spec.model()), sp, cfg.nodes).s;
    o.result["S_noise_floor"] = std::max(verify::kFloorFactor * floor, verify::kSMinimum);
  }
  o.summary = "curvature: " + std::to_string(rows.size()) + " rows\n";
  return o;
}

json residual_json(const verify::Residuals& r) {
  return {{"max_mean_cartan", r.mean_cartan}, {"max_berwald", r.berwald}, {"max_landsberg", r.landsberg}, {"max_s", r.s}};
}

Output cmd_classify(RunConfig& cfg) {
  const auto model = resolve_model(cfg, "flat-product");
  const auto spec = make_metric(cfg.metric, model);
  if (spec.kind() == metrics::MetricKind::raw) throw ConfigError("classify needs a metric bound to a model");
  verify::SamplePlan plan = verify::default_plan(model, cfg.points, cfg.directions, cfg.radius);
  if (!cfg.point_list.empty()) plan.points = plan_points(cfg, model, spec.dimension());
  const auto r = verify::classify(spec, plan, cfg.nodes);
  Output o;
  o.result = {{"flags",
               {{"riemannian", r.riemannian}, {"berwald", r.berwald}, {"landsberg", r.landsberg}, {"s_vanishing", r.s_vanishing}}},
              {"residuals", residual_json(r.residuals)},
              {"noise_floor", residual_json(r.noise_floor)},
              {"tolerances", residual_json(r.tolerances)},
              {"consistency_enforced", r.consistency_enforced},
              {"plan", r.plan},
              {"samples", r.samples}};
  o.columns = {"quantity", "flag", "residual", "tolerance", "noise_floor"};
  auto row = [&](const char* q, bool flag, double res, double tol, double floor) {
    o.rows.push_back(json::array({q, flag, res, tol, floor}));
    o.summary += std::string("  ") + q + ": " + (flag ? "yes" : "no") + "  (residual " + format_double(res) +
                 ", tolerance " + format_double(tol) + ")\n";
  };
  o.summary = "classify " + spec.name() + " on " + model.name() + ", " + r.plan + "\n";
  row("riemannian", r.riemannian, r.residuals.mean_cartan, r.tolerances.mean_cartan, r.noise_floor.mean_cartan);
  row("berwald", r.berwald, r.residuals.berwald, r.tolerances.berwald, r.noise_floor.berwald);
  row("landsberg", r.landsberg, r.residuals.landsberg, r.tolerances.landsberg, r.noise_floor.landsberg);
  row("s_vanishing", r.s_vanishing, r.residuals.s, r.tolerances.s, r.noise_floor.s);
  return o;
}

Output cmd_verify(RunConfig& cfg, const std::string& target) {
  Output o;
  if (target == "theorem41") {
    const auto model = resolve_model(cfg, "polar-plane");
    const auto gen = resolve_generator(cfg);
    const auto points = plan_points(cfg, model, model.dimension());
    const auto r = verify::verify_theorem41(gen, model, cfg.point_list.empty() ? model.default_point() : points.front(),
                                            verify::default_directions(), cfg.tol.value_or(verify::kTheorem41Relative),
                                            cfg.nodes);
    o.columns = {"a", "a_prime", "S_direct", "S_formula", "rel_err", "abs_err", "passed"};
    json rows = json::array();
    for (const auto& w : r.rows) {
      o.rows.push_back(json::array({w.a, w.a_prime, w.S_direct, w.S_formula, w.rel_err, w.abs_err, w.passed}));
      rows.push_back({{"a", w.a}, {"a_prime", w.a_prime}, {"S_direct", w.S_direct}, {"S_formula", w.S_formula},
                      {"rel_err", w.rel_err}, {"abs_err", w.abs_err}, {"passed", w.passed}});
    }
    o.result = {{"rows", rows}, {"A1", r.A1}, {"A2", r.A2}, {"passed", r.passed}};
    o.passed = r.passed;
  } else if (target == "theorem42") {
    const auto gen = resolve_generator(cfg);
    o.columns = {"model", "x", "identities_hold", "identity_violation", "max_abs_S", "s_vanishes", "agree"};
    for (const auto& model : models_or_all(cfg)) {
      const auto r = verify::verify_theorem42(gen, model, plan_points(cfg, model, model.dimension()),
                                              cfg.tol.value_or(verify::kIdentityTolerance), cfg.directions, cfg.nodes);
      json rows = json::array();
      for (const auto& w : r.rows) {
        o.rows.push_back(json::array({model.name(), joined(w.p.coords), w.identities_hold, w.identity_violation,
                                      w.max_abs_S, w.s_vanishes, w.agree}));
        rows.push_back({{"x", vec(w.p.coords)}, {"identities_hold", w.identities_hold},
                        {"identity_violation", w.identity_violation}, {"max_abs_S", w.max_abs_S},
                        {"s_vanishes", w.s_vanishes}, {"agree", w.agree}});
      }
      o.result[model.name()] = {{"rows", rows}, {"s_threshold", r.s_threshold}, {"passed", r.passed}};
      o.passed = o.passed && r.passed;
    }
  } else if (target == "example33") {
    add_checks(o, "example33", verify::verify_example33(cfg.r0));
  } else if (target == "example34") {
    if (!cfg.model.is_null() && cfg.model != json("hopf-sphere")) throw ConfigError("example34 runs on hopf-sphere only");
    cfg.model = "hopf-sphere";
    add_checks(o, "example34", verify::verify_example34());
  } else if (target == "lemma31") {
    add_checks(o, "lemma31", verify::verify_lemma31(models_or_all(cfg), cfg.tol.value_or(verify::kIdentityTolerance)));
  } else if (target == "prop32") {
    const auto gen = resolve_generator(cfg);
    add_checks(o, "prop32", verify::verify_prop32(gen, models_or_all(cfg), cfg.nodes));
  } else if (target == "lemma51") {
    const auto model = resolve_model(cfg, "hopf-sphere");
    const auto gen = resolve_generator(cfg);
    std::vector<landsberg::LinearMap> maps;
    if (cfg.xi.empty()) {
      maps = landsberg::block_rotations(model.n1(), model.n2(), 5);
    } else {
      maps.push_back(verify::parse_linear_map(cfg.xi, model.n1(), model.n2()));
    }
    add_checks(o, "lemma51", verify::verify_lemma51(gen, model, maps));
  } else if (target == "lemma81") {
    const auto gen = resolve_generator(cfg);
    const auto c = verify::lemma81_certificate(gen, cfg.r0, cfg.tol.value_or(verify::kTensorMinimum));
    cfg.model = "polar-plane";
    o.result = {{"max_landsberg", c.max_landsberg},   {"noise_floor", c.noise_floor},
                {"threshold", c.threshold},           {"witness_x", vec(c.witness_p.coords)},
                {"witness_y", vec(c.witness_y.coords)}, {"trace_nonconstant", c.trace_nonconstant},
                {"trace_spread", c.trace_spread},     {"max_axis_trace", c.max_axis_trace},
                {"passed", c.passed}};
    o.columns = {"check", "value", "threshold", "passed"};
    o.rows.push_back(json::array({"max_landsberg", c.max_landsberg, c.threshold, c.max_landsberg > c.threshold}));
    o.rows.push_back(json::array({"trace_spread", c.trace_spread, 1e-6, c.trace_nonconstant}));
    o.rows.push_back(json::array({"max_axis_trace", c.max_axis_trace, 1e-10, c.max_axis_trace < 1e-10}));
    o.passed = c.passed;
  } else {
    std::string known;
    for (const auto& t : verify_targets()) known += (known.empty() ? "" : ", ") + t;
    throw ConfigError("unknown verify target '" + target + "' (expected one of " + known + ")");
  }
  o.summary = "verify " + target + ": " + (o.passed ? "PASS" : "FAIL") + "\n";
  return o;
}

void emit(const Output& o, const RunConfig& cfg, const std::string& command, const std::string& target, std::ostream& out,
          std::ostream& err) {
  std::string text;
  if (cfg.format == "json") {
    json report = {{"tool", "finsler"},          {"version", kVersion},
                   {"command", command},         {"config", cfg.to_json()},
                   {"passed", o.passed},         {"result", o.result},
                   {"table", {{"columns", o.columns}, {"rows", o.rows}}}};
    if (!target.empty()) report["target"] = target;
    text = report.dump(2) + "\n";
  } else {
    std::ostringstream os;
    for (std::size_t i = 0; i < o.columns.size(); ++i) os << (i ? "," : "") << csv_cell(o.columns[i]);
    os << "\n";
    for (const auto& row : o.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
      os << "\n";
    }
    text = os.str();
  }
  if (cfg.out.empty()) {
    out << text;
    err << o.summary;
  } else {
    std::ofstream f(cfg.out);
    if (!f) throw ConfigError("cannot write output file '" + cfg.out + "'");
    f << text;
    out << o.summary;
  }
}

}  // namespace

std::string check_report(const json& r) {
  if (!r.is_object()) return "report is not an object";
  for (const char* k : {"tool", "version", "command", "config", "passed", "result", "table"}) {
    if (!r.contains(k)) return std::string("missing key '") + k + "'";
  }
  if (r["tool"] != "finsler") return "tool is not finsler";
  const auto cmd = r["command"];
  if (cmd != "validate" && cmd != "curvature" && cmd != "classify" && cmd != "verify") return "unknown command";
  if (cmd == "verify" && (!r.contains("target") || !r["target"].is_string())) return "verify report without target";
  if (!r["passed"].is_boolean()) return "passed is not a boolean";
  if (!r["config"].is_object() || !r["result"].is_object()) return "config and result must be objects";
  try {
    RunConfig c;
    json cfg = r["config"];
    if (cfg["model"].is_string() && cfg["model"] == "all built-in") cfg["model"] = nullptr;
    merge_config(c, cfg);
  } catch (const Error& e) {
    return std::string("config does not re-validate: ") + e.what();
  }
  const auto& t = r["table"];
  if (!t.contains("columns") || !t.contains("rows") || !t["columns"].is_array() || !t["rows"].is_array()) {
    return "table needs columns and rows";
  }
  for (const auto& c : t["columns"]) {
    if (!c.is_string()) return "column names must be strings";
  }
  for (const auto& row : t["rows"]) {
    if (!row.is_array() || row.size() != t["columns"].size()) return "row width does not match the columns";
  }
  return {};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finsler metric curvature, classification and verification"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> model, metric, format, out_path, xi, points;
  std::optional<int> directions, nodes;
  std::optional<double> tol, r0;
  std::string quantities;
  std::string target;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--model", model, "flat-product, polar-plane or hopf-sphere");
    sub->add_option("--metric", metric, "generator name (cross02, linear, cross:<eps>, expr:<L(s,t)>), riemannian or quartic-test");
    sub->add_option("--points", points, "number of base points");
    sub->add_option("--directions", directions, "fiber directions per point");
    sub->add_option("--nodes", nodes, "quadrature nodes for sigma (0 = default)");
    sub->add_option("--tol", tol, "tolerance");
    sub->add_option("--format", format, "json or csv");
    sub->add_option("--out", out_path, "output file");
  };
  auto* validate = app.add_subcommand("validate", "Minkowski norm axioms at sample points");
  auto* curv = app.add_subcommand("curvature", "tabulate curvature quantities");
  auto* classify = app.add_subcommand("classify", "Riemannian / Berwald / Landsberg / S-vanishing flags");
  auto* verify = app.add_subcommand("verify", "run a verification target");
  for (auto* s : {validate, curv, classify, verify}) common(s);
  curv->add_option("--quantities", quantities, "comma separated: g, det_g, C, I, G, berwald, landsberg, sigma, tau, S");
  verify->add_option("target", target, "theorem41, theorem42, example33, example34, lemma31, lemma51, lemma81, prop32")
      ->required();
  verify->add_option("--xi", xi, "linear map for lemma51, e.g. block-rotation:30deg");
  verify->add_option("--r0", r0, "polar-plane radius for example33 and lemma81");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  RunConfig cfg;
  std::string command;
  try {
    if (!config_path.empty()) merge_config(cfg, read_config_file(config_path));
    json flags = json::object();
    if (model) flags["model"] = *model;
    if (metric) flags["metric"] = *metric;
    if (points) {
      try {
        std::size_t used = 0;
        const int count = std::stoi(*points, &used);
        if (used != points->size()) throw std::invalid_argument("trailing");
        flags["points"] = count;
      } catch (const std::logic_error&) {
        throw ConfigError("--points: expected an integer, got '" + *points + "'");
      }
    }
    if (directions) flags["directions"] = *directions;
    if (nodes) flags["nodes"] = *nodes;
    if (tol) flags["tol"] = *tol;
    if (format) flags["format"] = *format;
    if (out_path) flags["out"] = *out_path;
    if (xi) flags["xi"] = *xi;
    if (r0) flags["r0"] = *r0;
    if (!quantities.empty()) {
      json q = json::array();
      std::stringstream ss(quantities);
      std::string item;
      while (std::getline(ss, item, ',')) q.push_back(item);
      flags["quantities"] = q;
    }
    merge_config(cfg, flags);

    Output o;
    if (validate->parsed()) {
      command = "validate";
      o = cmd_validate(cfg);
    } else if (curv->parsed()) {
      command = "curvature";
      o = cmd_curvature(cfg);
    } else if (classify->parsed()) {
      command = "classify";
      o = cmd_classify(cfg);
    } else {
      command = "verify";
      o = cmd_verify(cfg, target);
    }
    emit(o, cfg, command, command == "verify" ? target : "", out, err);
    return o.passed ? kPass : kVerificationFailure;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ModelError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidGeneratorError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "evaluation error: " << e.what() << "\n";
    return kEvaluationError;
  } catch (const std::exception& e) {
    err << "evaluation error: " << e.what() << "\n";
    return kEvaluationError;
  }
}

}  // namespace finsler::cli
