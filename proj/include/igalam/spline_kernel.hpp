/**
 * @file spline_kernel.hpp
 * @brief Univariate and trivariate B-spline / NURBS bases on an axis-aligned box.
 *
 * The parametric domain is the unit cube. The physical domain is a box
 * `origin + extents * xi`, so parametric derivatives map to physical ones
 * through a constant diagonal scaling.
 */
#pragma once

#include <algorithm>

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace igalam {

using Vec3 = Eigen::Vector3d;

/// Highest per-direction derivative order the kernel evaluates.
inline constexpr int kMaxDerivative = 3;

/// Open (clamped) knot vector on [0, 1].
class KnotVector {
 public:
  KnotVector(int degree, std::vector<double> knots);

  int degree() const { return degree_; }
  std::span<const double> knots() const { return knots_; }
  /// Number of basis functions, `knots().size() - degree() - 1`.
  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

  /// Index s with knots[s] <= x < knots[s+1]; the last non-empty span for x == back().
  int find_span(double x) const;

  /// Global continuity order: degree minus the largest interior multiplicity.
  /// A knot vector without interior knots reports its degree.
  int regularity() const;

  /// Distinct knot values in increasing order.
  std::vector<double> breakpoints() const;

 private:
  int degree_;
  std::vector<double> knots_;
};

KnotVector make_open_uniform_knots(int degree, int n_spans);

/// Nonzero univariate basis functions at one parametric coordinate.
struct UnivariateBasis {
  int first = 0;          ///< global index of the first nonzero function
  Eigen::MatrixXd ders;   ///< (max_der + 1) x (degree + 1); row k holds k-th derivatives
};

/// Cox-de Boor values and derivatives up to `max_der`. Orders above the
/// degree are returned as zeros.
UnivariateBasis eval_univariate(const KnotVector& kv, double x, int max_der);

/// Nonzero basis derivatives at x in arithmetic T, (max_der + 1) x (degree + 1),
/// for functions starting at kv.find_span(x) - degree. No domain check.
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> basis_derivatives(const KnotVector& kv, T x, int max_der) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  const int p = kv.degree();
  const auto U = kv.knots();
  const int span = kv.find_span(static_cast<double>(x));
  auto knot = [&](int i) { return static_cast<T>(U[static_cast<std::size_t>(i)]); };

  Mat ndu(p + 1, p + 1);
  std::vector<T> left(static_cast<std::size_t>(p + 1)), right(static_cast<std::size_t>(p + 1));
  ndu(0, 0) = T(1);
  for (int j = 1; j <= p; ++j) {
    left[static_cast<std::size_t>(j)] = x - knot(span + 1 - j);
    right[static_cast<std::size_t>(j)] = knot(span + j) - x;
    T saved = T(0);
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
      const T temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    ndu(j, j) = saved;
  }

  Mat ders = Mat::Zero(max_der + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

  const int n = std::min(max_der, p);
  Mat a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = T(1);
    for (int k = 1; k <= n; ++k) {
      T d = T(0);
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  T fac = T(p);
  for (int k = 1; k <= n; ++k) {
    ders.row(k) *= fac;
    fac *= T(p - k);
  }
  return ders;
}

/// Greville abscissae, one per basis function.
std::vector<double> greville_points(const KnotVector& kv);

/// Per-direction derivative orders, e.g. {2, 0, 1} for d^3/dx1^2 dx3.
using MultiIndex = std::array<int, 3>;

/// Axis-aligned box `[origin, origin + extents]`.
struct Box {
  Vec3 origin = Vec3::Zero();
  Vec3 extents = Vec3::Ones();
};

/// Trivariate tensor-product space with optional rational weights.
class TensorProductSpace {
 public:
  TensorProductSpace(std::array<KnotVector, 3> knots, Box box,
                     std::vector<double> weights = {});

  const KnotVector& knots(int dir) const { return knots_[static_cast<std::size_t>(dir)]; }
  std::array<int, 3> degrees() const;
  std::array<int, 3> counts() const;
  /// Total number of basis functions (= control points).
  int size() const;
  /// Flattened index, first direction fastest.
  int index(int i1, int i2, int i3) const;
  std::array<int, 3> multi_index(int flat) const;

  const Box& box() const { return box_; }
  std::span<const double> weights() const { return weights_; }
  bool is_rational() const { return rational_; }
  /// Control point coordinates, Greville abscissae mapped onto the box.
  std::span<const Vec3> control_grid() const { return control_grid_; }

  /// Physical to parametric; throws DomainError outside the box.
  Vec3 to_parametric(const Vec3& x) const;
  Vec3 to_physical(const Vec3& xi) const;

  /// Geometry map evaluated from the control grid with the polynomial basis.
  Vec3 geometry(const Vec3& xi) const;
  /// Jacobian of `geometry` with respect to xi.
  Eigen::Matrix3d geometry_jacobian(const Vec3& xi) const;

 private:
  std::array<KnotVector, 3> knots_;
  Box box_;
  std::vector<double> weights_;
  bool rational_ = false;
  std::vector<Vec3> control_grid_;
};

/// Nonzero basis functions at one point with all mixed physical derivatives
/// up to per-direction orders `max_orders`.
class BasisTable {
 public:
  BasisTable() = default;
  BasisTable(std::vector<int> indices, MultiIndex max_orders, Eigen::MatrixXd values);

  std::span<const int> indices() const { return indices_; }
  int count() const { return static_cast<int>(indices_.size()); }
  const MultiIndex& max_orders() const { return max_orders_; }

  /// Row of derivatives of every nonzero function for one multi-index.
  auto derivative(const MultiIndex& k) const { return values_.row(slot(k)); }
  double derivative(const MultiIndex& k, int local) const { return values_(slot(k), local); }

 private:
  int slot(const MultiIndex& k) const;

  std::vector<int> indices_;
  MultiIndex max_orders_{0, 0, 0};
  Eigen::MatrixXd values_;
};

/// Basis table at a physical point; rational derivatives use the
/// generalized quotient rule.
BasisTable basis_table(const TensorProductSpace& space, const Vec3& x,
                       MultiIndex max_orders = {2, 2, 2});

/// Field value and derivatives at a physical point.
/// `coeffs` is size() x n_components; the result is orders.size() x n_components.
Eigen::MatrixXd eval_field(const TensorProductSpace& space, const Eigen::MatrixXd& coeffs,
                           const Vec3& x, std::span<const MultiIndex> orders);

}  // namespace igalam
