#include "finsler/derivjet/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler::derivjet {

int MultiOrder::x_total() const { return std::accumulate(x_orders.begin(), x_orders.end(), 0); }
int MultiOrder::y_total() const { return std::accumulate(y_orders.begin(), y_orders.end(), 0); }

std::string MultiOrder::to_string() const {
  std::ostringstream os;
  os << "x(";
  for (std::size_t i = 0; i < x_orders.size(); ++i) os << (i ? "," : "") << x_orders[i];
  os << ")y(";
  for (std::size_t i = 0; i < y_orders.size(); ++i) os << (i ? "," : "") << y_orders[i];
  os << ")";
  return os.str();
}

MultiOrder MultiOrder::y(int n, std::initializer_list<int> y_indices) { return xy(n, {}, y_indices); }

MultiOrder MultiOrder::xy(int n, std::initializer_list<int> x_indices, std::initializer_list<int> y_indices) {
  MultiOrder o{std::vector<int>(static_cast<std::size_t>(n), 0), std::vector<int>(static_cast<std::size_t>(n), 0)};
  for (int i : x_indices) ++o.x_orders.at(static_cast<std::size_t>(i));
  for (int i : y_indices) ++o.y_orders.at(static_cast<std::size_t>(i));
  return o;
}

double PartialTable::value(const MultiOrder& order) const {
  auto it = entries.find(order);
  if (it == entries.end()) throw std::out_of_range("PartialTable: order not computed: " + order.to_string());
  return it->second.value;
}

namespace {

void check_order(const MultiOrder& o, int n) {
  if (static_cast<int>(o.x_orders.size()) != n || static_cast<int>(o.y_orders.size()) != n) {
    throw UnsupportedOrderError("order " + o.to_string() + " does not match dimension " + std::to_string(n));
  }
  auto negative = [](int v) { return v < 0; };
  if (std::any_of(o.x_orders.begin(), o.x_orders.end(), negative) ||
      std::any_of(o.y_orders.begin(), o.y_orders.end(), negative)) {
    throw UnsupportedOrderError("negative entry in order " + o.to_string());
  }
  if (o.x_total() > kMaxXOrder || o.y_total() > kMaxYOrder) {
    throw UnsupportedOrderError("order " + o.to_string() + " exceeds caps (x <= 1, y <= 5)");
  }
}

void check_point(const ScalarField& field, const ChartPoint& base, const FiberVector& fiber) {
  const int n = field.dimension();
  if (base.dimension() != n || fiber.dimension() != n) {
    throw DomainError("point dimension does not match field dimension " + std::to_string(n));
  }
  if (fiber.is_zero()) throw DomainError("derivative requested at the zero fiber");
  if (!field.in_domain(base.span())) throw DomainError("base point outside the chart domain");
}

// Active coordinate: kind 0 = x, 1 = y.
using Active = std::pair<int, int>;

std::set<Active> active_of(const MultiOrder& o) {
  std::set<Active> s;
  for (std::size_t i = 0; i < o.x_orders.size(); ++i)
    if (o.x_orders[i] > 0) s.insert({0, static_cast<int>(i)});
  for (std::size_t i = 0; i < o.y_orders.size(); ++i)
    if (o.y_orders[i] > 0) s.insert({1, static_cast<int>(i)});
  return s;
}

void eval_group(const ScalarField& field, const ChartPoint& base, const FiberVector& fiber,
                const std::vector<MultiOrder>& group, PartialTable& table) {
  const int n = field.dimension();
  std::set<Active> active;
  int cap_x = 0;
  int cap_y = 0;
  for (const auto& o : group) {
    auto a = active_of(o);
    active.insert(a.begin(), a.end());
    cap_x = std::max(cap_x, o.x_total());
    cap_y = std::max(cap_y, o.y_total());
  }
  if (active.empty()) {
    const double v = field(base, fiber);
    if (!std::isfinite(v)) throw EvaluationError("non-finite field value at order " + group.front().to_string());
    for (const auto& o : group) table.entries[o] = {v, std::nullopt};
    return;
  }

  std::vector<Active> vars(active.begin(), active.end());
  std::vector<int> groups;
  for (const auto& [kind, idx] : vars) groups.push_back(kind);
  auto space = JetSpace::make(groups, {cap_x, cap_y});

  std::vector<Jet> xj;
  std::vector<Jet> yj;
  for (int i = 0; i < n; ++i) {
    xj.emplace_back(space, base.coords(i));
    yj.emplace_back(space, fiber.coords(i));
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto [kind, idx] = vars[v];
    auto& slot = kind == 0 ? xj[static_cast<std::size_t>(idx)] : yj[static_cast<std::size_t>(idx)];
    slot = Jet::variable(space, static_cast<int>(v), kind == 0 ? base.coords(idx) : fiber.coords(idx));
  }

  const Jet f = field.evaluate<Jet>(std::span<const Jet>(xj), std::span<const Jet>(yj));
  if (!std::isfinite(f.value())) {
    throw EvaluationError("non-finite field value while evaluating order " + group.front().to_string());
  }
  if (!f.has_space()) {
    // field ignored every seeded variable
    for (const auto& o : group) {
      const bool zero = o.x_total() == 0 && o.y_total() == 0;
      table.entries[o] = {zero ? f.value() : 0.0, std::nullopt};
    }
    return;
  }

  std::vector<int> exps(vars.size());
  for (const auto& o : group) {
    for (std::size_t v = 0; v < vars.size(); ++v) {
      const auto [kind, idx] = vars[v];
      exps[v] = kind == 0 ? o.x_orders[static_cast<std::size_t>(idx)] : o.y_orders[static_cast<std::size_t>(idx)];
    }
    const double d = f.partial(exps);
    if (!std::isfinite(d)) throw EvaluationError("non-finite intermediate for order " + o.to_string());
    table.entries[o] = {d, std::nullopt};
  }
}

double binomial(int m, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
  return r;
}

struct Stencil {
  std::vector<Active> coords;
  std::vector<int> orders;
  std::vector<double> steps;
};

Quad stencil_value(const ScalarField& field, const ChartPoint& base, const FiberVector& fiber, const Stencil& s,
                   double scale) {
  const int n = field.dimension();
  std::vector<Quad> x(static_cast<std::size_t>(n));
  std::vector<Quad> y(static_cast<std::size_t>(n));
  std::vector<int> k(s.coords.size(), 0);
  Quad total = 0;
  for (;;) {
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = base.coords(i);
      y[static_cast<std::size_t>(i)] = fiber.coords(i);
    }
    double weight = 1.0;
    for (std::size_t c = 0; c < s.coords.size(); ++c) {
      const int m = s.orders[c];
      const Quad offset = (Quad(m) / 2 - k[c]) * Quad(s.steps[c]) * Quad(scale);
      const auto [kind, idx] = s.coords[c];
      (kind == 0 ? x : y)[static_cast<std::size_t>(idx)] += offset;
      weight *= ((k[c] % 2) ? -1.0 : 1.0) * binomial(m, k[c]);
    }
    std::vector<double> xd(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xd[i] = static_cast<double>(x[i]);
    if (!field.in_domain(xd)) throw DomainError("finite-difference stencil leaves the chart domain");
    const Quad f = field.evaluate<Quad>(std::span<const Quad>(x), std::span<const Quad>(y));
    total += weight * f;

    std::size_t c = 0;
    for (; c < k.size(); ++c) {
      if (++k[c] <= s.orders[c]) break;
      k[c] = 0;
    }
    if (c == k.size()) break;
  }
  Quad denom = 1;
  for (std::size_t c = 0; c < s.coords.size(); ++c) {
    for (int p = 0; p < s.orders[c]; ++p) denom *= Quad(s.steps[c]) * Quad(scale);
  }
  return total / denom;
}

}  // namespace

PartialTable taylor_eval(const ScalarField& field, const ChartPoint& base, const FiberVector& fiber,
                         const std::set<MultiOrder>& orders) {
  check_point(field, base, fiber);
  for (const auto& o : orders) check_order(o, field.dimension());

  PartialTable table;
  table.method = Method::jet;
  std::set<Active> all;
  for (const auto& o : orders) {
    auto a = active_of(o);
    all.insert(a.begin(), a.end());
  }
  constexpr std::size_t kMaxSeeded = 6;
  if (all.size() <= kMaxSeeded) {
    eval_group(field, base, fiber, std::vector<MultiOrder>(orders.begin(), orders.end()), table);
  } else {
    // group orders by their active sets so each jet stays small
    std::map<std::set<Active>, std::vector<MultiOrder>> groups;
    for (const auto& o : orders) groups[active_of(o)].push_back(o);
    for (const auto& [key, group] : groups) eval_group(field, base, fiber, group, table);
  }
  return table;
}

FdResult fd_partial(const ScalarField& field, const ChartPoint& base, const FiberVector& fiber, const MultiOrder& order,
                    double step, int richardson_levels) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_partial: step must be positive");
  if (richardson_levels < 0) throw std::invalid_argument("fd_partial: richardson_levels must be >= 0");
  check_point(field, base, fiber);
  check_order(order, field.dimension());

  Stencil s;
  for (const auto& a : active_of(order)) {
    const auto [kind, idx] = a;
    const double coord = kind == 0 ? base.coords(idx) : fiber.coords(idx);
    s.coords.push_back(a);
    s.orders.push_back(kind == 0 ? order.x_orders[static_cast<std::size_t>(idx)]
                                 : order.y_orders[static_cast<std::size_t>(idx)]);
    s.steps.push_back(step * std::max(1.0, std::abs(coord)));
  }
  if (s.coords.empty()) {
    const double v = field(base, fiber);
    return {v, 0.0};
  }

  // the widest stencil must keep clear of the zero fiber
  const int n = field.dimension();
  bool box_contains_origin = true;
  for (int j = 0; j < n && box_contains_origin; ++j) {
    double reach = 0.0;
    for (std::size_t c = 0; c < s.coords.size(); ++c) {
      if (s.coords[c] == Active{1, j}) reach = 0.5 * s.orders[c] * s.steps[c];
    }
    if (std::abs(fiber.coords(j)) > reach) box_contains_origin = false;
  }
  if (box_contains_origin) throw DomainError("finite-difference stencil crosses the zero fiber");

  const int levels = richardson_levels;
  std::vector<std::vector<Quad>> r(static_cast<std::size_t>(levels) + 1);
  double scale = 1.0;
  for (int j = 0; j <= levels; ++j, scale *= 0.5) {
    r[static_cast<std::size_t>(j)].push_back(stencil_value(field, base, fiber, s, scale));
    Quad factor = 4;
    for (int k = 1; k <= j; ++k, factor *= 4) {
      const Quad prev = r[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)];
      const Quad prev_row = r[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)];
      r[static_cast<std::size_t>(j)].push_back(prev + (prev - prev_row) / (factor - 1));
    }
  }
  const Quad best = r.back().back();
  double err = 0.0;
  if (levels >= 1) {
    err = static_cast<double>(abs(best - r[static_cast<std::size_t>(levels - 1)].back()));
  } else {
    const Quad half = stencil_value(field, base, fiber, s, 0.5);
    err = static_cast<double>(abs(best - half));
  }
  const double v = static_cast<double>(best);
  if (!std::isfinite(v)) throw EvaluationError("non-finite finite-difference value for order " + order.to_string());
  return {v, err};
}

AgreementReport cross_check(const ScalarField& field, const std::vector<Sample>& samples,
                            const std::set<MultiOrder>& orders, double rel_tol, double step, int richardson_levels) {
  if (samples.empty()) throw std::invalid_argument("cross_check: no samples");
  AgreementReport report;
  report.rel_tol = rel_tol;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto prefix = "sample " + std::to_string(s) + ": ";
    try {
      const auto table = taylor_eval(field, samples[s].x, samples[s].y, orders);
      for (const auto& o : orders) {
        const double a = table.value(o);
        const double b = fd_partial(field, samples[s].x, samples[s].y, o, step, richardson_levels).value;
        const double d = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
        if (d > report.max_discrepancy || (s == 0 && report.worst_order.x_orders.empty())) {
          report.max_discrepancy = std::max(report.max_discrepancy, d);
          report.worst_sample = s;
          report.worst_order = o;
        }
      }
    } catch (const DomainError& e) {
      throw DomainError(prefix + e.what());
    } catch (const EvaluationError& e) {
      throw EvaluationError(prefix + e.what());
    }
  }
  report.passed = report.max_discrepancy < rel_tol;
  return report;
}

std::set<MultiOrder> all_orders(int n, int max_x_order, int max_y_order) {
  std::vector<std::vector<int>> xs;
  std::vector<std::vector<int>> ys;
  auto gen = [n](int cap, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int i, int left) -> void {
      if (i == n) {
        out.push_back(cur);
        return;
      }
      for (int e = 0; e <= left; ++e) {
        cur[static_cast<std::size_t>(i)] = e;
        self(self, i + 1, left - e);
      }
      cur[static_cast<std::size_t>(i)] = 0;
    };
    rec(rec, 0, cap);
  };
  gen(max_x_order, xs);
  gen(max_y_order, ys);
  std::set<MultiOrder> out;
  for (const auto& x : xs)
    for (const auto& y : ys) {
      MultiOrder o{x, y};
      if (o.x_total() + o.y_total() == 0) continue;
      out.insert(o);
    }
  return out;
}

}  // namespace finsler::derivjet
