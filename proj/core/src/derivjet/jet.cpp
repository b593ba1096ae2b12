#include "finsler/derivjet/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace finsler::derivjet {

namespace {

constexpr int kBitsPerExponent = 3;
constexpr int kMaxCap = (1 << kBitsPerExponent) - 1;
constexpr int kMaxVars = 64 / kBitsPerExponent;

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void enumerate(const std::vector<int>& group_of_var, const std::vector<int>& caps, std::size_t var,
               std::vector<int>& used, std::vector<std::uint8_t>& current,
               std::vector<std::vector<std::uint8_t>>& out) {
  if (var == group_of_var.size()) {
    out.push_back(current);
    return;
  }
  const auto g = static_cast<std::size_t>(group_of_var[var]);
  for (int e = 0; used[g] + e <= caps[g]; ++e) {
    current[var] = static_cast<std::uint8_t>(e);
    used[g] += e;
    enumerate(group_of_var, caps, var + 1, used, current, out);
    used[g] -= e;
  }
  current[var] = 0;
}

}  // namespace

std::shared_ptr<const JetSpace> JetSpace::make(std::vector<int> group_of_var, std::vector<int> group_caps) {
  if (group_of_var.empty()) throw std::invalid_argument("JetSpace needs at least one variable");
  if (static_cast<int>(group_of_var.size()) > kMaxVars) throw std::invalid_argument("JetSpace: too many variables");
  for (int g : group_of_var) {
    if (g < 0 || g >= static_cast<int>(group_caps.size())) throw std::invalid_argument("JetSpace: bad group index");
  }
  for (int c : group_caps) {
    if (c < 0 || c > kMaxCap) throw std::invalid_argument("JetSpace: group cap out of range");
  }

  auto space = std::shared_ptr<JetSpace>(new JetSpace());
  space->group_of_var_ = std::move(group_of_var);
  space->group_caps_ = std::move(group_caps);
  const std::size_t nv = space->group_of_var_.size();

  std::vector<std::vector<std::uint8_t>> monomials;
  std::vector<int> used(space->group_caps_.size(), 0);
  std::vector<std::uint8_t> current(nv, 0);
  enumerate(space->group_of_var_, space->group_caps_, 0, used, current, monomials);

  auto total = [](const std::vector<std::uint8_t>& m) { return std::accumulate(m.begin(), m.end(), 0); };
  // graded order: total degree first, then reverse lexicographic so that
  // x_0 comes before x_1 among linear terms.
  std::stable_sort(monomials.begin(), monomials.end(), [&](const auto& a, const auto& b) {
    const int da = total(a);
    const int db = total(b);
    if (da != db) return da < db;
    return a > b;
  });

  space->exponents_.reserve(monomials.size() * nv);
  for (std::size_t i = 0; i < monomials.size(); ++i) {
    const auto& m = monomials[i];
    space->exponents_.insert(space->exponents_.end(), m.begin(), m.end());
    space->degrees_.push_back(total(m));
    double w = 1.0;
    for (auto e : m) w *= factorial(e);
    space->factorial_weight_.push_back(w);
    space->index_of_key_.emplace(space->key_of(m), static_cast<std::uint32_t>(i));
    space->max_degree_ = std::max(space->max_degree_, space->degrees_.back());
  }

  std::vector<std::uint8_t> sum(nv);
  const std::size_t n = monomials.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (space->degrees_[a] + space->degrees_[b] > space->max_degree_) continue;
      bool ok = true;
      for (std::size_t v = 0; v < nv; ++v) {
        const int s = monomials[a][v] + monomials[b][v];
        if (s > kMaxCap) {
          ok = false;
          break;
        }
        sum[v] = static_cast<std::uint8_t>(s);
      }
      if (!ok) continue;
      auto it = space->index_of_key_.find(space->key_of(sum));
      if (it == space->index_of_key_.end()) continue;
      space->product_terms_.push_back(
          {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), it->second});
    }
  }
  std::sort(space->product_terms_.begin(), space->product_terms_.end(), [](const auto& x, const auto& y) {
    if (x.out != y.out) return x.out < y.out;
    return x.lhs < y.lhs;
  });
  return space;
}

std::shared_ptr<const JetSpace> JetSpace::uniform(int num_vars, int cap) {
  return make(std::vector<int>(static_cast<std::size_t>(num_vars), 0), {cap});
}

std::span<const std::uint8_t> JetSpace::exponents(std::size_t index) const {
  const auto nv = static_cast<std::size_t>(num_vars());
  return {exponents_.data() + index * nv, nv};
}

std::uint64_t JetSpace::key_of(std::span<const std::uint8_t> exps) const {
  std::uint64_t key = 0;
  for (auto e : exps) key = (key << kBitsPerExponent) | e;
  return key;
}

std::optional<std::size_t> JetSpace::find(std::span<const int> exps) const {
  if (exps.size() != static_cast<std::size_t>(num_vars())) return std::nullopt;
  std::uint64_t key = 0;
  for (int e : exps) {
    if (e < 0 || e > kMaxCap) return std::nullopt;
    key = (key << kBitsPerExponent) | static_cast<std::uint64_t>(e);
  }
  auto it = index_of_key_.find(key);
  if (it == index_of_key_.end()) return std::nullopt;
  return it->second;
}

std::size_t JetSpace::linear_index(int var) const {
  std::vector<int> e(static_cast<std::size_t>(num_vars()), 0);
  e.at(static_cast<std::size_t>(var)) = 1;
  auto idx = find(e);
  if (!idx) throw std::logic_error("JetSpace: variable has cap 0");
  return *idx;
}

// ---------------------------------------------------------------------------

Jet::Jet(JetSpacePtr space, double constant) : space_(std::move(space)), c_(space_->size(), 0.0) {
  c_[0] = constant;
}

Jet Jet::variable(JetSpacePtr space, int var, double value) {
  Jet j(space, value);
  j.c_[space->linear_index(var)] = 1.0;
  return j;
}

double Jet::partial(std::span<const int> exps) const {
  if (!space_) {
    return std::all_of(exps.begin(), exps.end(), [](int e) { return e == 0; }) ? c_[0] : 0.0;
  }
  auto idx = space_->find(exps);
  if (!idx) return 0.0;
  return c_[*idx] * space_->factorial_weight(*idx);
}

Jet Jet::nilpotent() const {
  Jet r = *this;
  r.c_[0] = 0.0;
  return r;
}

void Jet::promote_to(const JetSpacePtr& space) {
  if (space_) return;
  const double v = c_[0];
  space_ = space;
  c_.assign(space->size(), 0.0);
  c_[0] = v;
}

namespace {
void require_same(const JetSpacePtr& a, const JetSpacePtr& b) {
  if (a && b && a != b) throw std::logic_error("Jet arithmetic across different JetSpaces");
}
}  // namespace

Jet& Jet::operator+=(const Jet& other) {
  require_same(space_, other.space_);
  if (!other.space_) {
    c_[0] += other.c_[0];
    return *this;
  }
  promote_to(other.space_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  require_same(space_, other.space_);
  if (!other.space_) {
    c_[0] -= other.c_[0];
    return *this;
  }
  promote_to(other.space_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  require_same(a.space_, b.space_);
  if (!b.space_) {
    Jet r = a;
    for (auto& c : r.c_) c *= b.c_[0];
    return r;
  }
  if (!a.space_) {
    Jet r = b;
    for (auto& c : r.c_) c *= a.c_[0];
    return r;
  }
  Jet r(a.space_, 0.0);
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  double* pr = r.c_.data();
  for (const auto& t : a.space_->product_terms()) pr[t.out] += pa[t.lhs] * pb[t.rhs];
  return r;
}

Jet& Jet::operator*=(const Jet& other) { return *this = *this * other; }

Jet operator/(const Jet& a, const Jet& b) {
  if (!b.space_) {
    Jet r = a;
    for (auto& c : r.c_) c /= b.c_[0];
    return r;
  }
  return a * reciprocal(b);
}

Jet& Jet::operator/=(const Jet& other) { return *this = *this / other; }

Jet operator-(Jet a) {
  for (auto& c : a.c_) c = -c;
  return a;
}

Jet compose(const Jet& x, std::span<const double> taylor) {
  if (!x.space_) {
    return Jet(taylor.empty() ? 0.0 : taylor[0]);
  }
  const int degree = std::min<int>(x.space_->max_degree(), static_cast<int>(taylor.size()) - 1);
  const Jet h = x.nilpotent();
  Jet r(x.space_, taylor[static_cast<std::size_t>(degree)]);
  for (int k = degree - 1; k >= 0; --k) {
    r = r * h;
    r.c_[0] += taylor[static_cast<std::size_t>(k)];
  }
  return r;
}

Jet derive_into(const Jet& source, std::span<const int> shift, const JetSpacePtr& target,
                std::span<const int> var_map) {
  if (!source.space_) {
    const bool zero_shift = std::all_of(shift.begin(), shift.end(), [](int e) { return e == 0; });
    return Jet(target, zero_shift ? source.c_[0] : 0.0);
  }
  const auto& src = *source.space_;
  if (static_cast<int>(shift.size()) != src.num_vars()) throw std::invalid_argument("derive_into: shift size");
  if (static_cast<int>(var_map.size()) != target->num_vars()) throw std::invalid_argument("derive_into: var_map size");
  Jet r(target, 0.0);
  std::vector<int> e(static_cast<std::size_t>(src.num_vars()));
  for (std::size_t t = 0; t < target->size(); ++t) {
    std::copy(shift.begin(), shift.end(), e.begin());
    const auto te = target->exponents(t);
    bool absent = false;
    for (std::size_t v = 0; v < te.size(); ++v) {
      if (var_map[v] < 0) {
        absent = absent || te[v] > 0;
        continue;
      }
      e[static_cast<std::size_t>(var_map[v])] += te[v];
    }
    if (absent) continue;
    auto idx = src.find(e);
    if (!idx) throw std::logic_error("derive_into: target monomial not resolved by source space");
    // c'[b] = c[b + m] * (b + m)! / b!
    double ratio = 1.0;
    for (std::size_t v = 0; v < e.size(); ++v) {
      for (int k = e[v] - shift[v] + 1; k <= e[v]; ++k) ratio *= k;
    }
    r.c_[t] = source.c_[*idx] * ratio;
  }
  return r;
}

Jet compose2(const Jet& u, const Jet& v, const Jet& taylor) {
  if (!taylor.space_ || taylor.space_->num_vars() != 2) throw std::invalid_argument("compose2: bivariate jet expected");
  const auto& ts = *taylor.space_;
  if (!u.space_ && !v.space_) return Jet(taylor.value());
  const JetSpacePtr& space = u.space_ ? u.space_ : v.space_;
  const Jet hu = u.space_ ? u.nilpotent() : Jet(space, 0.0);
  const Jet hv = v.space_ ? v.nilpotent() : Jet(space, 0.0);
  const int degree = std::min(space->max_degree(), ts.max_degree());
  // powers of the nilpotent parts, then a fixed-order double sum
  std::vector<Jet> pu{Jet(space, 1.0)};
  std::vector<Jet> pv{Jet(space, 1.0)};
  for (int k = 1; k <= degree; ++k) {
    pu.push_back(pu.back() * hu);
    pv.push_back(pv.back() * hv);
  }
  Jet r(space, 0.0);
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const auto e = ts.exponents(t);
    if (e[0] + e[1] > degree) continue;
    const double c = taylor.c_[t];
    if (c == 0.0) continue;
    r += c * (pu[e[0]] * pv[e[1]]);
  }
  return r;
}

namespace {

std::vector<double> series_buffer(const Jet& x) {
  const int d = x.has_space() ? x.space()->max_degree() : 0;
  return std::vector<double>(static_cast<std::size_t>(d) + 1, 0.0);
}

}  // namespace

Jet pow(const Jet& x, double p) {
  const double x0 = x.value();
  if (p == std::floor(p) && std::abs(p) <= 64) return pow(x, static_cast<int>(p));
  if (!(x0 > 0.0)) {
    // not smooth at or below zero: poison every derivative
    auto t = series_buffer(x);
    t[0] = std::pow(x0, p);
    for (std::size_t k = 1; k < t.size(); ++k) t[k] = std::numeric_limits<double>::quiet_NaN();
    return compose(x, t);
  }
  auto t = series_buffer(x);
  double coef = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = coef * std::pow(x0, p - static_cast<double>(k));
    coef *= (p - static_cast<double>(k)) / static_cast<double>(k + 1);
  }
  return compose(x, t);
}

Jet pow(const Jet& x, int p) {
  if (p < 0) return reciprocal(pow(x, -p));
  Jet result(1.0);
  Jet base = x;
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p) base = base * base;
  }
  return result;
}

Jet reciprocal(const Jet& x) {
  const double x0 = x.value();
  auto t = series_buffer(x);
  double v = 1.0 / x0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = (k % 2 == 0) ? v : -v;
    v /= x0;
  }
  return compose(x, t);
}

Jet sqrt(const Jet& x) { return pow(x, 0.5); }

Jet exp(const Jet& x) {
  auto t = series_buffer(x);
  const double e0 = std::exp(x.value());
  double f = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) f *= static_cast<double>(k);
    t[k] = e0 / f;
  }
  return compose(x, t);
}

Jet log(const Jet& x) {
  const double x0 = x.value();
  auto t = series_buffer(x);
  t[0] = std::log(x0);
  double v = 1.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    v /= x0;
    t[k] = ((k % 2 == 1) ? v : -v) / static_cast<double>(k);
  }
  return compose(x, t);
}

namespace {
Jet trig(const Jet& x, int phase) {
  // phase 0: sin, 1: cos; d^k sin = sin(x + k pi/2)
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  const double cycle[4] = {s, c, -s, -c};
  auto t = series_buffer(x);
  double f = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) f *= static_cast<double>(k);
    t[k] = cycle[(k + static_cast<std::size_t>(phase)) % 4] / f;
  }
  return compose(x, t);
}
}  // namespace

Jet sin(const Jet& x) { return trig(x, 0); }
Jet cos(const Jet& x) { return trig(x, 1); }

}  // namespace finsler::derivjet
