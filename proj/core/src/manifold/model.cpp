#include "finsler/manifold/model.hpp"

#include <cmath>

#include "finsler/errors.hpp"

namespace finsler::manifold {

ChartPoint ChartMap::to_old(const ChartPoint& z) const {
  auto x = apply<double>(z.span());
  return ChartPoint(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())));
}

FiberVector ChartMap::push_fiber(const FiberVector& y) const { return FiberVector(Eigen::VectorXd(E * y.coords)); }

ManifoldModel::ManifoldModel(std::string name, int n1, int n2, MatrixField alpha, MatrixField b, Domain domain,
                             ChartPoint default_point)
    : name_(std::move(name)),
      n1_(n1),
      n2_(n2),
      alpha_(std::move(alpha)),
      b_(std::move(b)),
      domain_(std::move(domain)),
      default_point_(std::move(default_point)) {
  if (n1 < 1 || n2 < 1) throw ModelError("model '" + name_ + "': split must have n1, n2 >= 1");
  if (default_point_.dimension() != n1 + n2) throw ModelError("model '" + name_ + "': default point dimension");
}

ManifoldModel ManifoldModel::pullback(const ChartMap& map) const {
  if (map.dimension() != dimension()) throw ModelError("chart map dimension does not match model");
  auto self = *this;
  auto transform = [map](const MatrixField& field) {
    return MatrixField([map, field](auto z) {
      using T = typename decltype(z)::value_type;
      const auto x = map.apply<T>(z);
      const auto j = map.jacobian<T>(z);
      return transpose(j) * field.template get<T>()(std::span<const T>(x)) * j;
    });
  };
  Domain dom;
  if (domain_) {
    dom = [map, d = domain_](std::span<const double> z) { return d(map.apply<double>(z)); };
  }
  return ManifoldModel(name_ + "@normal", n1_, n2_, transform(alpha_), transform(b_), dom,
                       ChartPoint::origin(dimension()));
}

ProjectorResidual ManifoldModel::projector_residual(const ChartPoint& x) const {
  const auto a = primal_matrix(alpha<double>(x.span()));
  const auto b = primal_matrix(this->b<double>(x.span()));
  ProjectorResidual r;
  r.symmetry = (b - b.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd ainv_b = a.ldlt().solve(b);
  r.idempotency = (b * ainv_b - b).cwiseAbs().maxCoeff();
  const Eigen::VectorXcd ev = ainv_b.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) r.rank += std::abs(ev(i).real()) > 0.5 ? 1 : 0;
  return r;
}

ManifoldModel ManifoldModel::flat_product(int n1, int n2) {
  const int n = n1 + n2;
  MatrixField alpha([n](auto x) {
    using T = typename decltype(x)::value_type;
    return SmallMatrix<T>::identity(n);
  });
  MatrixField b([n, n1](auto x) {
    using T = typename decltype(x)::value_type;
    SmallMatrix<T> m(n, n);
    for (int i = n1; i < n; ++i) m(i, i) = T(1.0);
    return m;
  });
  return ManifoldModel("flat-product", n1, n2, alpha, b, {}, ChartPoint::origin(n));
}

ManifoldModel ManifoldModel::from_subbundle(std::string name, int n1, int n2, MatrixField alpha, MatrixField frame,
                                            Domain domain, ChartPoint default_point) {
  MatrixField b([alpha, frame](auto x) {
    using T = typename decltype(x)::value_type;
    const auto a = alpha.template get<T>()(x);
    const auto v = frame.template get<T>()(x);
    const auto av = a * v;
    return av * inverse(transpose(v) * av) * transpose(av);
  });
  return ManifoldModel(std::move(name), n1, n2, std::move(alpha), std::move(b), std::move(domain),
                       std::move(default_point));
}

ManifoldModel ManifoldModel::polar_plane(double r0) {
  if (!(r0 > 0.0)) throw ModelError("polar-plane: radius must be positive");
  MatrixField alpha([](auto x) {
    using T = typename decltype(x)::value_type;
    return SmallMatrix<T>::identity(2);
  });
  MatrixField radial([](auto x) {
    using T = typename decltype(x)::value_type;
    SmallMatrix<T> v(2, 1);
    v(0, 0) = x[0];
    v(1, 0) = x[1];
    return v;
  });
  Domain domain = [](std::span<const double> x) { return std::hypot(x[0], x[1]) > 1e-8; };
  return from_subbundle("polar-plane", 1, 1, alpha, radial, domain, ChartPoint{r0, 0.0});
}

namespace {

constexpr int kHopfTerms = 16;

// cos(sqrt(r)), sin(sqrt(r))/sqrt(r) and the derivative of the latter in r,
// as power series so the chart stays smooth through the identity.
template <class T>
void hopf_series(const T& rho, T& c, T& s, T& ds) {
  double fc[kHopfTerms];
  double fs[kHopfTerms];
  double f = 1.0;
  for (int k = 0; k < kHopfTerms; ++k) {
    // f = (2k)!
    fc[k] = ((k % 2) ? -1.0 : 1.0) / f;
    fs[k] = ((k % 2) ? -1.0 : 1.0) / (f * (2 * k + 1));
    f *= (2.0 * k + 1) * (2.0 * k + 2);
  }
  c = T(fc[kHopfTerms - 1]);
  s = T(fs[kHopfTerms - 1]);
  ds = T(fs[kHopfTerms - 1] * (kHopfTerms - 1));
  for (int k = kHopfTerms - 2; k >= 0; --k) {
    c = c * rho + fc[k];
    s = s * rho + fs[k];
    if (k >= 1) ds = ds * rho + fs[k] * k;
  }
}

// unit quaternion exp(x3 i + x1 j + x2 k) and its 4 x 3 Jacobian
template <class T>
void hopf_chart(std::span<const T> x, std::vector<T>& q, SmallMatrix<T>& jac) {
  const T rho = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  T c, s, ds;
  hopf_series(rho, c, s, ds);
  // quaternion slot of each coordinate: x1 -> j, x2 -> k, x3 -> i
  constexpr int slot[3] = {2, 3, 1};
  q.assign(4, T(0.0));
  q[0] = c;
  for (int m = 0; m < 3; ++m) q[static_cast<std::size_t>(slot[m])] = s * x[static_cast<std::size_t>(m)];
  jac = SmallMatrix<T>(4, 3);
  for (int m = 0; m < 3; ++m) {
    const T& xm = x[static_cast<std::size_t>(m)];
    jac(0, m) = -s * xm;
    for (int j = 0; j < 3; ++j) {
      T d = 2.0 * ds * xm * x[static_cast<std::size_t>(j)];
      if (j == m) d += s;
      jac(slot[j], m) = d;
    }
  }
}

}  // namespace

ManifoldModel ManifoldModel::hopf_sphere() {
  MatrixField alpha([](auto x) {
    using T = typename decltype(x)::value_type;
    std::vector<T> q;
    SmallMatrix<T> jac;
    hopf_chart<T>(x, q, jac);
    return transpose(jac) * jac;
  });
  MatrixField b([](auto x) {
    using T = typename decltype(x)::value_type;
    std::vector<T> q;
    SmallMatrix<T> jac;
    hopf_chart<T>(x, q, jac);
    // u = i q is the velocity of t -> e^{it} q; w = alpha v = J^T u
    const std::vector<T> u{-q[1], q[0], -q[3], q[2]};
    const T norm2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
    std::vector<T> w(3, T(0.0));
    for (int m = 0; m < 3; ++m)
      for (int r = 0; r < 4; ++r) w[static_cast<std::size_t>(m)] += jac(r, m) * u[static_cast<std::size_t>(r)];
    SmallMatrix<T> m(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] / norm2;
    return m;
  });
  Domain domain = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < 4.0; };
  return ManifoldModel("hopf-sphere", 2, 1, alpha, b, domain, ChartPoint::origin(3));
}

MatrixField polynomial_matrix_field(PolynomialMatrix table) {
  const int rows = static_cast<int>(table.size());
  if (rows == 0) throw ModelError("empty polynomial table");
  const int cols = static_cast<int>(table.front().size());
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != cols) throw ModelError("ragged polynomial table");
  }
  return MatrixField([table = std::move(table), rows, cols](auto x) {
    using T = typename decltype(x)::value_type;
    SmallMatrix<T> m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        m(i, j) = evaluate_polynomial<T>(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], x);
    return m;
  });
}

ManifoldModel polynomial_model(std::string name, int n1, int n2, PolynomialMatrix alpha, PolynomialMatrix v2_frame,
                               ChartPoint default_point) {
  const int n = n1 + n2;
  auto check = [n](const PolynomialMatrix& t, int cols, const char* what) {
    if (static_cast<int>(t.size()) != n || (!t.empty() && static_cast<int>(t.front().size()) != cols)) {
      throw ModelError(std::string("polynomial model: ") + what + " has the wrong shape");
    }
    for (const auto& row : t)
      for (const auto& p : row)
        for (const auto& m : p)
          if (static_cast<int>(m.exponents.size()) != n) {
            throw ModelError(std::string("polynomial model: ") + what + " exponent length must equal dimension");
          }
  };
  check(alpha, n, "alpha");
  check(v2_frame, n2, "v2 frame");
  auto a_field = polynomial_matrix_field(std::move(alpha));
  auto v_field = polynomial_matrix_field(std::move(v2_frame));
  return ManifoldModel::from_subbundle(std::move(name), n1, n2, a_field, v_field, {}, std::move(default_point));
}

ManifoldModel builtin_model(const std::string& name) {
  if (name == "flat-product") return ManifoldModel::flat_product();
  if (name == "polar-plane") return ManifoldModel::polar_plane();
  if (name == "hopf-sphere") return ManifoldModel::hopf_sphere();
  throw ConfigError("unknown model '" + name + "' (expected flat-product, polar-plane or hopf-sphere)");
}

std::vector<std::string> builtin_model_names() { return {"flat-product", "polar-plane", "hopf-sphere"}; }

}  // namespace finsler::manifold
