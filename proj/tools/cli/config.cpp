#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "finsler/errors.hpp"

namespace finsler::cli {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number");
  return j.get<double>();
}

int int_at(const json& j, const std::string& field) {
  if (!j.is_number_integer()) bad_field(field, "expected an integer");
  return j.get<int>();
}

std::string string_at(const json& j, const std::string& field) {
  if (!j.is_string()) bad_field(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> vector_at(const json& j, const std::string& field) {
  if (!j.is_array()) bad_field(field, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number_at(j[i], field + "[" + std::to_string(i) + "]"));
  return v;
}

// a number (constant) or a list of terms {"c": coefficient, "e": [exponents]}
manifold::Polynomial polynomial_at(const json& j, const std::string& field, int n) {
  manifold::Polynomial p;
  if (j.is_number()) {
    p.push_back({j.get<double>(), std::vector<int>(static_cast<std::size_t>(n), 0)});
    return p;
  }
  if (!j.is_array()) bad_field(field, "expected a number or a list of {\"c\", \"e\"} terms");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const auto& t = j[i];
    if (!t.is_object() || !t.contains("c")) bad_field(f, "expected {\"c\": number, \"e\": [exponents]}");
    manifold::Monomial m;
    m.coefficient = number_at(t["c"], f + ".c");
    m.exponents.assign(static_cast<std::size_t>(n), 0);
    if (t.contains("e")) {
      const auto& e = t["e"];
      if (!e.is_array() || static_cast<int>(e.size()) != n) bad_field(f + ".e", "expected " + std::to_string(n) + " exponents");
      for (int k = 0; k < n; ++k) {
        const int v = int_at(e[static_cast<std::size_t>(k)], f + ".e[" + std::to_string(k) + "]");
        if (v < 0) bad_field(f + ".e", "exponents must be non-negative");
        m.exponents[static_cast<std::size_t>(k)] = v;
      }
    }
    p.push_back(m);
  }
  return p;
}

manifold::PolynomialMatrix matrix_at(const json& j, const std::string& field, int rows, int cols, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) bad_field(field, "expected " + std::to_string(rows) + " rows");
  manifold::PolynomialMatrix m;
  for (int r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string f = field + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols) bad_field(f, "expected " + std::to_string(cols) + " entries");
    std::vector<manifold::Polynomial> out;
    for (int c = 0; c < cols; ++c) out.push_back(polynomial_at(row[static_cast<std::size_t>(c)], f + "[" + std::to_string(c) + "]", n));
    m.push_back(std::move(out));
  }
  return m;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json RunConfig::to_json() const {
  json j;
  j["model"] = model;
  j["metric"] = metric;
  if (point_list.empty()) {
    j["points"] = points;
  } else {
    j["points"] = point_list;
  }
  j["radius"] = radius;
  j["directions"] = directions;
  j["nodes"] = nodes;
  j["tol"] = tol ? json(*tol) : json(nullptr);
  j["format"] = format;
  j["out"] = out;
  j["quantities"] = quantities;
  j["xi"] = xi;
  j["r0"] = r0;
  return j;
}

void merge_config(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "model") {
      if (!v.is_string() && !v.is_object() && !v.is_null()) bad_field(key, "expected a model name or object");
      c.model = v;
    } else if (key == "metric") {
      if (!v.is_string() && !v.is_object()) bad_field(key, "expected a metric name or object");
      c.metric = v;
    } else if (key == "points") {
      if (v.is_number_integer()) {
        c.points = v.get<int>();
        c.point_list.clear();
      } else if (v.is_array()) {
        c.point_list.clear();
        for (std::size_t i = 0; i < v.size(); ++i) c.point_list.push_back(vector_at(v[i], "points[" + std::to_string(i) + "]"));
      } else {
        bad_field(key, "expected a count or a list of points");
      }
    } else if (key == "radius") {
      c.radius = number_at(v, key);
    } else if (key == "directions") {
      c.directions = int_at(v, key);
    } else if (key == "nodes") {
      c.nodes = int_at(v, key);
    } else if (key == "tol") {
      if (v.is_null()) {
        c.tol.reset();
      } else {
        c.tol = number_at(v, key);
      }
    } else if (key == "format") {
      c.format = string_at(v, key);
    } else if (key == "out") {
      c.out = string_at(v, key);
    } else if (key == "quantities") {
      if (!v.is_array()) bad_field(key, "expected a list of names");
      c.quantities.clear();
      for (std::size_t i = 0; i < v.size(); ++i) c.quantities.push_back(string_at(v[i], "quantities[" + std::to_string(i) + "]"));
    } else if (key == "xi") {
      c.xi = string_at(v, key);
    } else if (key == "r0") {
      c.r0 = number_at(v, key);
    } else {
      bad_field(key, "unknown key");
    }
  }
  if (c.points < 1) bad_field("points", "must be at least 1");
  if (c.directions < 1) bad_field("directions", "must be at least 1");
  if (c.nodes < 0) bad_field("nodes", "must be non-negative");
  if (c.tol && !(*c.tol > 0.0)) bad_field("tol", "must be positive");
  if (!(c.radius > 0.0)) bad_field("radius", "must be positive");
  if (!(c.r0 > 0.0)) bad_field("r0", "must be positive");
  if (c.format != "json" && c.format != "csv") bad_field("format", "expected json or csv");
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

manifold::ManifoldModel make_model(const json& m) {
  if (m.is_string()) return manifold::builtin_model(m.get<std::string>());
  if (!m.is_object()) throw ConfigError("config field 'model': expected a model name or object");
  for (const char* k : {"n1", "n2", "alpha", "v2_frame"}) {
    if (!m.contains(k)) bad_field(std::string("model.") + k, "missing");
  }
  const int n1 = int_at(m["n1"], "model.n1");
  const int n2 = int_at(m["n2"], "model.n2");
  if (n1 < 1 || n2 < 1) bad_field("model", "n1 and n2 must be at least 1");
  const int n = n1 + n2;
  const std::string name = m.contains("name") ? string_at(m["name"], "model.name") : "custom";
  Eigen::VectorXd point = Eigen::VectorXd::Zero(n);
  if (m.contains("point")) {
    const auto v = vector_at(m["point"], "model.point");
    if (static_cast<int>(v.size()) != n) bad_field("model.point", "expected " + std::to_string(n) + " coordinates");
    point = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  }
  for (const auto& [key, v] : m.items()) {
    if (key != "name" && key != "n1" && key != "n2" && key != "alpha" && key != "v2_frame" && key != "point") {
      bad_field("model." + key, "unknown key");
    }
  }
  return manifold::polynomial_model(name, n1, n2, matrix_at(m["alpha"], "model.alpha", n, n, n),
                                    matrix_at(m["v2_frame"], "model.v2_frame", n, n2, n), ChartPoint(point));
}

metrics::MetricSpec make_metric(const json& metric, const manifold::ManifoldModel& model) {
  if (metric.is_string()) {
    const auto name = metric.get<std::string>();
    if (name == "riemannian") return metrics::MetricSpec::riemannian(model);
    if (name == "quartic-test") return metrics::raw_test_metric(name);
    return metrics::MetricSpec::alpha1_alpha2(model, metrics::Generator::from_name(name));
  }
  if (!metric.is_object() || !metric.contains("kind")) bad_field("metric", "expected a name or an object with \"kind\"");
  const auto kind = string_at(metric["kind"], "metric.kind");
  if (kind == "riemannian") return metrics::MetricSpec::riemannian(model);
  if (kind == "alpha1-alpha2") {
    if (!metric.contains("generator")) bad_field("metric.generator", "missing");
    return metrics::MetricSpec::alpha1_alpha2(model,
                                              metrics::Generator::from_name(string_at(metric["generator"], "metric.generator")));
  }
  if (kind == "randers") {
    if (!metric.contains("beta")) bad_field("metric.beta", "missing");
    const int n = model.dimension();
    const auto& b = metric["beta"];
    if (!b.is_array() || static_cast<int>(b.size()) != n) bad_field("metric.beta", "expected " + std::to_string(n) + " components");
    std::vector<manifold::Polynomial> beta;
    for (int i = 0; i < n; ++i) {
      beta.push_back(polynomial_at(b[static_cast<std::size_t>(i)], "metric.beta[" + std::to_string(i) + "]", n));
    }
    VectorField field([beta](auto x) {
      using T = typename decltype(x)::value_type;
      std::vector<T> out;
      for (const auto& p : beta) out.push_back(manifold::evaluate_polynomial<T>(p, x));
      return out;
    });
    return metrics::MetricSpec::randers(model, field);
  }
  if (kind == "test") {
    if (!metric.contains("name")) bad_field("metric.name", "missing");
    return metrics::raw_test_metric(string_at(metric["name"], "metric.name"));
  }
  bad_field("metric.kind", "expected riemannian, alpha1-alpha2, randers or test");
}

}  // namespace finsler::cli
