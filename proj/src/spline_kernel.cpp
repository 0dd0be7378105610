#include "igalam/spline_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "igalam/errors.hpp"

namespace igalam {

namespace {

constexpr double kDomainTol = 1e-12;

int binomial(int n, int k) {
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// KnotVector

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw SplineError("knot vector: negative degree");
  const auto p = static_cast<std::size_t>(degree_);
  if (knots_.size() < 2 * p + 2)
    throw SplineError("knot vector: fewer than degree+1 basis functions");
  if (!std::is_sorted(knots_.begin(), knots_.end()))
    throw SplineError("knot vector: knots must be non-decreasing");
  if (!(knots_.front() < knots_.back())) throw SplineError("knot vector: empty parametric range");
  for (std::size_t i = 0; i <= p; ++i) {
    if (knots_[i] != knots_.front() || knots_[knots_.size() - 1 - i] != knots_.back())
      throw SplineError("knot vector: end knots must be repeated degree+1 times");
  }
  if (knots_[p + 1] == knots_.front() || knots_[knots_.size() - p - 2] == knots_.back())
    throw SplineError("knot vector: end knots repeated more than degree+1 times");
  // interior multiplicity must stay <= degree
  std::size_t run = 1;
  for (std::size_t i = p + 2; i + p + 1 < knots_.size(); ++i) {
    run = knots_[i] == knots_[i - 1] ? run + 1 : 1;
    if (run > p) throw SplineError("knot vector: interior knot multiplicity exceeds degree");
  }
}

int KnotVector::find_span(double x) const {
  const int n = size() - 1;
  if (x >= knots_[static_cast<std::size_t>(n + 1)]) return n;
  if (x <= knots_[static_cast<std::size_t>(degree_)]) return degree_;
  auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

int KnotVector::regularity() const {
  int max_mult = 0;
  const auto p = static_cast<std::size_t>(degree_);
  std::size_t i = p + 1;
  while (i + p + 1 < knots_.size()) {
    std::size_t j = i;
    while (j + 1 + p + 1 < knots_.size() && knots_[j + 1] == knots_[i]) ++j;
    max_mult = std::max(max_mult, static_cast<int>(j - i + 1));
    i = j + 1;
  }
  return degree_ - max_mult;
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> b;
  for (double k : knots_)
    if (b.empty() || k != b.back()) b.push_back(k);
  return b;
}

KnotVector make_open_uniform_knots(int degree, int n_spans) {
  if (degree < 1 || n_spans < 1)
    throw SplineError("open uniform knots: need degree >= 1 and n_spans >= 1");
  std::vector<double> k;
  k.reserve(static_cast<std::size_t>(n_spans + 2 * degree + 1));
  for (int i = 0; i < degree; ++i) k.push_back(0.0);
  for (int s = 0; s <= n_spans; ++s) k.push_back(static_cast<double>(s) / n_spans);
  for (int i = 0; i < degree; ++i) k.push_back(1.0);
  return KnotVector(degree, std::move(k));
}

// ---------------------------------------------------------------------------
// Univariate evaluation (Piegl & Tiller, A2.2 / A2.3)

UnivariateBasis eval_univariate(const KnotVector& kv, double x, int max_der) {
  if (x < kv.front() - kDomainTol || x > kv.back() + kDomainTol || std::isnan(x)) {
    std::ostringstream os;
    os << "eval_univariate: x = " << x << " outside [" << kv.front() << ", " << kv.back() << "]";
    throw DomainError(os.str());
  }
  x = std::clamp(x, kv.front(), kv.back());
  UnivariateBasis out;
  out.first = kv.find_span(x) - kv.degree();
  out.ders = basis_derivatives<double>(kv, x, max_der);
  return out;
}

std::vector<double> greville_points(const KnotVector& kv) {
  const int p = kv.degree();
  const auto U = kv.knots();
  std::vector<double> g(static_cast<std::size_t>(kv.size()));
  for (int i = 0; i < kv.size(); ++i) {
    if (p == 0) {
      g[static_cast<std::size_t>(i)] = 0.5 * (U[static_cast<std::size_t>(i)] + U[static_cast<std::size_t>(i + 1)]);
      continue;
    }
    double s = 0.0;
    for (int j = 1; j <= p; ++j) s += U[static_cast<std::size_t>(i + j)];
    g[static_cast<std::size_t>(i)] = s / p;
  }
  return g;
}

// ---------------------------------------------------------------------------
// TensorProductSpace

TensorProductSpace::TensorProductSpace(std::array<KnotVector, 3> knots, Box box,
                                       std::vector<double> weights)
    : knots_(std::move(knots)), box_(std::move(box)), weights_(std::move(weights)) {
  for (int d = 0; d < 3; ++d) {
    if (!(box_.extents[d] > 0.0)) throw SplineError("tensor space: box extents must be positive");
    if (knots_[static_cast<std::size_t>(d)].front() != 0.0 || knots_[static_cast<std::size_t>(d)].back() != 1.0)
      throw SplineError("tensor space: knot vectors must span [0, 1]");
  }
  const auto n = static_cast<std::size_t>(size());
  if (weights_.empty()) weights_.assign(n, 1.0);
  if (weights_.size() != n) throw SplineError("tensor space: weight count differs from basis count");
  for (double w : weights_) {
    if (!(w > 0.0)) throw SplineError("tensor space: weights must be positive");
    if (w != 1.0) rational_ = true;
  }

  std::array<std::vector<double>, 3> g;
  for (std::size_t d = 0; d < 3; ++d) g[d] = greville_points(knots_[d]);
  control_grid_.resize(n);
  for (int i3 = 0; i3 < counts()[2]; ++i3)
    for (int i2 = 0; i2 < counts()[1]; ++i2)
      for (int i1 = 0; i1 < counts()[0]; ++i1)
        control_grid_[static_cast<std::size_t>(index(i1, i2, i3))] =
            to_physical(Vec3(g[0][static_cast<std::size_t>(i1)], g[1][static_cast<std::size_t>(i2)],
                             g[2][static_cast<std::size_t>(i3)]));
}

std::array<int, 3> TensorProductSpace::degrees() const {
  return {knots_[0].degree(), knots_[1].degree(), knots_[2].degree()};
}

std::array<int, 3> TensorProductSpace::counts() const {
  return {knots_[0].size(), knots_[1].size(), knots_[2].size()};
}

int TensorProductSpace::size() const {
  const auto c = counts();
  return c[0] * c[1] * c[2];
}

int TensorProductSpace::index(int i1, int i2, int i3) const {
  const auto c = counts();
  return i1 + c[0] * (i2 + c[1] * i3);
}

std::array<int, 3> TensorProductSpace::multi_index(int flat) const {
  const auto c = counts();
  return {flat % c[0], (flat / c[0]) % c[1], flat / (c[0] * c[1])};
}

Vec3 TensorProductSpace::to_parametric(const Vec3& x) const {
  Vec3 xi = (x - box_.origin).cwiseQuotient(box_.extents);
  for (int d = 0; d < 3; ++d) {
    if (!(xi[d] >= -kDomainTol && xi[d] <= 1.0 + kDomainTol)) {
      std::ostringstream os;
      os << "point (" << x.transpose() << ") outside the box";
      throw DomainError(os.str());
    }
    xi[d] = std::clamp(xi[d], 0.0, 1.0);
  }
  return xi;
}

Vec3 TensorProductSpace::to_physical(const Vec3& xi) const {
  return box_.origin + box_.extents.cwiseProduct(xi);
}

Vec3 TensorProductSpace::geometry(const Vec3& xi) const {
  Vec3 x = Vec3::Zero();
  std::array<UnivariateBasis, 3> b;
  for (std::size_t d = 0; d < 3; ++d) b[d] = eval_univariate(knots_[d], xi[static_cast<int>(d)], 0);
  const auto deg = degrees();
  for (int c = 0; c <= deg[2]; ++c)
    for (int bb = 0; bb <= deg[1]; ++bb)
      for (int a = 0; a <= deg[0]; ++a)
        x += b[0].ders(0, a) * b[1].ders(0, bb) * b[2].ders(0, c) *
             control_grid_[static_cast<std::size_t>(index(b[0].first + a, b[1].first + bb, b[2].first + c))];
  return x;
}

Eigen::Matrix3d TensorProductSpace::geometry_jacobian(const Vec3& xi) const {
  std::array<UnivariateBasis, 3> b;
  for (std::size_t d = 0; d < 3; ++d) b[d] = eval_univariate(knots_[d], xi[static_cast<int>(d)], 1);
  const auto deg = degrees();
  Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
  for (int c = 0; c <= deg[2]; ++c)
    for (int bb = 0; bb <= deg[1]; ++bb)
      for (int a = 0; a <= deg[0]; ++a) {
        const Vec3& P = control_grid_[static_cast<std::size_t>(index(b[0].first + a, b[1].first + bb, b[2].first + c))];
        J.col(0) += b[0].ders(1, a) * b[1].ders(0, bb) * b[2].ders(0, c) * P;
        J.col(1) += b[0].ders(0, a) * b[1].ders(1, bb) * b[2].ders(0, c) * P;
        J.col(2) += b[0].ders(0, a) * b[1].ders(0, bb) * b[2].ders(1, c) * P;
      }
  return J;
}

// ---------------------------------------------------------------------------
// BasisTable

BasisTable::BasisTable(std::vector<int> indices, MultiIndex max_orders, Eigen::MatrixXd values)
    : indices_(std::move(indices)), max_orders_(max_orders), values_(std::move(values)) {}

int BasisTable::slot(const MultiIndex& k) const {
  for (int d = 0; d < 3; ++d) {
    if (k[static_cast<std::size_t>(d)] < 0 || k[static_cast<std::size_t>(d)] > max_orders_[static_cast<std::size_t>(d)])
      throw DomainError("basis table: derivative order not tabulated");
  }
  return k[0] + (max_orders_[0] + 1) * (k[1] + (max_orders_[1] + 1) * k[2]);
}

BasisTable basis_table(const TensorProductSpace& space, const Vec3& x, MultiIndex max_orders) {
  for (int o : max_orders)
    if (o < 0 || o > kMaxDerivative) throw DomainError("basis table: derivative order must lie in [0, 3]");
  const Vec3 xi = space.to_parametric(x);
  const auto deg = space.degrees();
  std::array<UnivariateBasis, 3> b;
  for (std::size_t d = 0; d < 3; ++d)
    b[d] = eval_univariate(space.knots(static_cast<int>(d)), xi[static_cast<int>(d)], max_orders[d]);

  const int n1 = deg[0] + 1, n2 = deg[1] + 1, n3 = deg[2] + 1;
  const int nfun = n1 * n2 * n3;
  const int o1 = max_orders[0] + 1, o2 = max_orders[1] + 1, o3 = max_orders[2] + 1;
  const int nslot = o1 * o2 * o3;

  std::vector<int> indices(static_cast<std::size_t>(nfun));
  for (int c = 0; c < n3; ++c)
    for (int bb = 0; bb < n2; ++bb)
      for (int a = 0; a < n1; ++a)
        indices[static_cast<std::size_t>(a + n1 * (bb + n2 * c))] =
            space.index(b[0].first + a, b[1].first + bb, b[2].first + c);

  // parametric tensor-product derivatives
  Eigen::MatrixXd values(nslot, nfun);
  for (int k3 = 0; k3 < o3; ++k3)
    for (int k2 = 0; k2 < o2; ++k2)
      for (int k1 = 0; k1 < o1; ++k1) {
        const int s = k1 + o1 * (k2 + o2 * k3);
        for (int c = 0; c < n3; ++c) {
          const double f3 = b[2].ders(k3, c);
          for (int bb = 0; bb < n2; ++bb) {
            const double f23 = f3 * b[1].ders(k2, bb);
            for (int a = 0; a < n1; ++a) values(s, a + n1 * (bb + n2 * c)) = f23 * b[0].ders(k1, a);
          }
        }
      }

  if (space.is_rational()) {
    const auto w = space.weights();
    Eigen::VectorXd wl(nfun);
    for (int i = 0; i < nfun; ++i) wl[i] = w[static_cast<std::size_t>(indices[static_cast<std::size_t>(i)])];
    // weight function W and its derivatives
    Eigen::VectorXd W = values * wl;
    Eigen::MatrixXd R(nslot, nfun);
    for (int k3 = 0; k3 < o3; ++k3)
      for (int k2 = 0; k2 < o2; ++k2)
        for (int k1 = 0; k1 < o1; ++k1) {
          const int s = k1 + o1 * (k2 + o2 * k3);
          Eigen::RowVectorXd acc = values.row(s).cwiseProduct(wl.transpose());
          for (int j3 = 0; j3 <= k3; ++j3)
            for (int j2 = 0; j2 <= k2; ++j2)
              for (int j1 = 0; j1 <= k1; ++j1) {
                if (j1 + j2 + j3 == 0) continue;
                const int sj = j1 + o1 * (j2 + o2 * j3);
                const int sk = (k1 - j1) + o1 * ((k2 - j2) + o2 * (k3 - j3));
                const double c = binomial(k1, j1) * binomial(k2, j2) * binomial(k3, j3) * W[sj];
                acc -= c * R.row(sk);
              }
          R.row(s) = acc / W[0];
        }
    values = std::move(R);
  }

  // parametric -> physical
  const Vec3 inv = space.box().extents.cwiseInverse();
  for (int k3 = 0; k3 < o3; ++k3)
    for (int k2 = 0; k2 < o2; ++k2)
      for (int k1 = 0; k1 < o1; ++k1) {
        const double scale = std::pow(inv[0], k1) * std::pow(inv[1], k2) * std::pow(inv[2], k3);
        values.row(k1 + o1 * (k2 + o2 * k3)) *= scale;
      }

  return BasisTable(std::move(indices), max_orders, std::move(values));
}

Eigen::MatrixXd eval_field(const TensorProductSpace& space, const Eigen::MatrixXd& coeffs,
                           const Vec3& x, std::span<const MultiIndex> orders) {
  if (coeffs.rows() != space.size())
    throw SplineError("eval_field: coefficient count differs from basis count");
  MultiIndex maxo{0, 0, 0};
  for (const auto& k : orders)
    for (std::size_t d = 0; d < 3; ++d) maxo[d] = std::max(maxo[d], k[d]);
  const BasisTable table = basis_table(space, x, maxo);

  Eigen::MatrixXd local(table.count(), coeffs.cols());
  for (int i = 0; i < table.count(); ++i) local.row(i) = coeffs.row(table.indices()[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(orders.size()), coeffs.cols());
  for (std::size_t r = 0; r < orders.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = table.derivative(orders[r]) * local;
  return out;
}

}  // namespace igalam
