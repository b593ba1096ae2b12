#include "finsler/metrics/generator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler::metrics {

namespace {

// probe points in the open quadrant, some near the axes
constexpr double kProbes[][2] = {{1.0, 1.0}, {0.36, 0.64}, {0.64, 0.36}, {2.0, 0.5}, {0.1, 0.9}, {0.9, 0.05}};

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

}  // namespace

Generator::Generator(std::string name, GenericFunction<BivariateFn> L, PartialsClosure user_partials)
    : name_(std::move(name)), L_(std::move(L)), user_(std::move(user_partials)) {
  if (!user_) return;
  for (const auto& p : kProbes) {
    const auto j = jet_partials(p[0], p[1]);
    const auto u = user_(p[0], p[1]);
    const double d = std::max({rel_diff(j.L, u.L), rel_diff(j.L1, u.L1), rel_diff(j.L2, u.L2),
                               rel_diff(j.L11, u.L11), rel_diff(j.L12, u.L12), rel_diff(j.L22, u.L22),
                               rel_diff(j.L111, u.L111), rel_diff(j.L112, u.L112), rel_diff(j.L122, u.L122),
                               rel_diff(j.L222, u.L222)});
    if (d > kUserPartialsTolerance) {
      std::ostringstream os;
      os << "generator '" << name_ << "': supplied partials disagree with differentiation of L by " << d
         << " at (s, t) = (" << p[0] << ", " << p[1] << ")";
      throw InvalidGeneratorError(os.str());
    }
  }
}

LPartials Generator::jet_partials(double s, double t) const {
  auto space = derivjet::JetSpace::uniform(2, 3);
  const Jet js = Jet::variable(space, 0, s);
  const Jet jt = Jet::variable(space, 1, t);
  const Jet l = (*this)(js, jt);
  auto d = [&](int a, int b) {
    const int e[2] = {a, b};
    return l.partial(e);
  };
  LPartials p;
  p.L = l.value();
  p.L1 = d(1, 0);
  p.L2 = d(0, 1);
  p.L11 = d(2, 0);
  p.L12 = d(1, 1);
  p.L22 = d(0, 2);
  p.L111 = d(3, 0);
  p.L112 = d(2, 1);
  p.L122 = d(1, 2);
  p.L222 = d(0, 3);
  return p;
}

LPartials Generator::partials(double s, double t) const { return user_ ? user_(s, t) : jet_partials(s, t); }

Jet Generator::partial(int ds, int dt, const Jet& s, const Jet& t) const {
  const int degree = std::max(s.has_space() ? s.space()->max_degree() : 0, t.has_space() ? t.space()->max_degree() : 0);
  if (degree == 0) {
    auto space = derivjet::JetSpace::uniform(2, ds + dt);
    const Jet l = (*this)(Jet::variable(space, 0, s.value()), Jet::variable(space, 1, t.value()));
    const int e[2] = {ds, dt};
    return Jet(l.partial(e));
  }
  auto outer = derivjet::JetSpace::uniform(2, ds + dt + degree);
  const Jet l = (*this)(Jet::variable(outer, 0, s.value()), Jet::variable(outer, 1, t.value()));
  auto inner = derivjet::JetSpace::uniform(2, degree);
  const int shift[2] = {ds, dt};
  const int map[2] = {0, 1};
  const Jet shifted = derivjet::derive_into(l, shift, inner, map);
  return derivjet::compose2(s, t, shifted);
}

bool Generator::is_linear(double tol) const {
  for (const auto& p : kProbes) {
    const auto d = jet_partials(p[0], p[1]);
    if (std::max({std::abs(d.L11), std::abs(d.L12), std::abs(d.L22)}) > tol) return false;
  }
  return true;
}

Generator Generator::linear() {
  return Generator("linear", GenericFunction<BivariateFn>([](const auto& s, const auto& t) { return s + t; }),
                   [](double s, double t) {
                     LPartials p;
                     p.L = s + t;
                     p.L1 = 1.0;
                     p.L2 = 1.0;
                     return p;
                   });
}

Generator Generator::cross(double eps) {
  std::ostringstream name;
  if (eps == 0.2) {
    name << "cross02";
  } else {
    name << "cross:" << eps;
  }
  return Generator(name.str(), GenericFunction<BivariateFn>([eps](const auto& s, const auto& t) {
                     return s + t + eps * s * t / (s + t);
                   }));
}

Generator Generator::from_expression(const std::string& text) {
  auto expr = std::make_shared<const Expression>(Expression::parse(text));
  if (expr->uses(Expression::Op::var_r)) throw ExpressionError("generator expressions use s and t only", 0);
  return Generator(text, GenericFunction<BivariateFn>([expr](const auto& s, const auto& t) {
                     return expr->evaluate(s, t, decltype(s + t)(0.0));
                   }));
}

Generator Generator::from_name(const std::string& name) {
  if (name == "linear") return linear();
  if (name == "cross02") return cross(0.2);
  if (name.rfind("cross:", 0) == 0) {
    const std::string rest = name.substr(6);
    char* end = nullptr;
    const double eps = std::strtod(rest.c_str(), &end);
    if (rest.empty() || *end != '\0') throw ConfigError("bad generator parameter in '" + name + "'");
    return cross(eps);
  }
  try {
    if (name.rfind("expr:", 0) == 0) return from_expression(name.substr(5));
    return from_expression(name);
  } catch (const ExpressionError& e) {
    throw ConfigError("generator '" + name + "': " + e.what());
  }
}

}  // namespace finsler::metrics
