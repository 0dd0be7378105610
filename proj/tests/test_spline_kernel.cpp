#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "igalam/errors.hpp"
#include "igalam/spline_kernel.hpp"

using namespace igalam;

namespace {

// Textbook recursion over all functions, no span tricks.
double naive_basis(std::span<const double> U, int i, int p, double x) {
  if (p == 0) {
    const bool last = U[static_cast<std::size_t>(i + 1)] == U.back() && x == U.back() &&
                      U[static_cast<std::size_t>(i)] < U[static_cast<std::size_t>(i + 1)];
    return (U[static_cast<std::size_t>(i)] <= x && x < U[static_cast<std::size_t>(i + 1)]) || last ? 1.0 : 0.0;
  }
  const double a = U[static_cast<std::size_t>(i + p)] - U[static_cast<std::size_t>(i)];
  const double b = U[static_cast<std::size_t>(i + p + 1)] - U[static_cast<std::size_t>(i + 1)];
  double v = 0.0;
  if (a > 0) v += (x - U[static_cast<std::size_t>(i)]) / a * naive_basis(U, i, p - 1, x);
  if (b > 0) v += (U[static_cast<std::size_t>(i + p + 1)] - x) / b * naive_basis(U, i + 1, p - 1, x);
  return v;
}

double naive_derivative(std::span<const double> U, int i, int p, double x, int k) {
  if (k == 0) return naive_basis(U, i, p, x);
  const double a = U[static_cast<std::size_t>(i + p)] - U[static_cast<std::size_t>(i)];
  const double b = U[static_cast<std::size_t>(i + p + 1)] - U[static_cast<std::size_t>(i + 1)];
  double v = 0.0;
  if (a > 0) v += p / a * naive_derivative(U, i, p - 1, x, k - 1);
  if (b > 0) v -= p / b * naive_derivative(U, i + 1, p - 1, x, k - 1);
  return v;
}

TensorProductSpace test_space(std::array<int, 3> deg, std::array<int, 3> spans, bool rational) {
  std::array<KnotVector, 3> kv{make_open_uniform_knots(deg[0], spans[0]), make_open_uniform_knots(deg[1], spans[1]),
                               make_open_uniform_knots(deg[2], spans[2])};
  Box box{Vec3(-1.0, 0.5, 2.0), Vec3(2.0, 1.5, 0.75)};
  std::vector<double> w;
  if (rational) {
    const int n = kv[0].size() * kv[1].size() * kv[2].size();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(0.5, 2.0);
    for (int i = 0; i < n; ++i) w.push_back(d(rng));
  }
  return TensorProductSpace(std::move(kv), box, std::move(w));
}

Eigen::MatrixXd random_coeffs(int n, int comps, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::MatrixXd c(n, comps);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < comps; ++j) c(i, j) = d(rng);
  return c;
}

Vec3 random_interior_point(const TensorProductSpace& s, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(0.05, 0.95);
  return s.to_physical(Vec3(d(rng), d(rng), d(rng)));
}

}  // namespace

TEST_CASE("open uniform knot vectors") {
  const auto k1 = make_open_uniform_knots(2, 1);
  CHECK(std::vector<double>(k1.knots().begin(), k1.knots().end()) == std::vector<double>{0, 0, 0, 1, 1, 1});
  const auto k2 = make_open_uniform_knots(1, 2);
  CHECK(std::vector<double>(k2.knots().begin(), k2.knots().end()) == std::vector<double>{0, 0, 0.5, 1, 1});
  CHECK(make_open_uniform_knots(6, 4).size() == 10);
  CHECK(make_open_uniform_knots(6, 4).regularity() == 5);
  CHECK(make_open_uniform_knots(4, 1).regularity() == 4);
}

TEST_CASE("invalid knot vectors are rejected") {
  CHECK_THROWS_AS(KnotVector(2, {0, 0, 1, 1, 1}), SplineError);      // not clamped at the start
  CHECK_THROWS_AS(KnotVector(2, {0, 0, 0, 0.7, 0.5, 1, 1, 1}), SplineError);  // decreasing
  CHECK_THROWS_AS(KnotVector(1, {0, 0, 0.5, 0.5, 0.5, 1, 1}), SplineError);   // multiplicity > degree
  CHECK_THROWS_AS(make_open_uniform_knots(2, 0), SplineError);
}

TEST_CASE("linear hats at the midpoint") {
  const KnotVector kv(1, {0, 0, 1, 1});
  const auto b = eval_univariate(kv, 0.5, 1);
  CHECK(b.first == 0);
  CHECK(b.ders(0, 0) == doctest::Approx(0.5));
  CHECK(b.ders(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("partition of unity and vanishing derivative sums") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int p : {1, 2, 3, 4, 6, 8}) {
    const auto kv = make_open_uniform_knots(p, 5);
    for (int t = 0; t < 100; ++t) {
      const double x = t == 0 ? 0.0 : (t == 1 ? 1.0 : d(rng));
      const auto b = eval_univariate(kv, x, std::min(p, 3));
      CHECK(std::abs(b.ders.row(0).sum() - 1.0) < 1e-12);
      for (int k = 1; k < b.ders.rows(); ++k) CHECK(std::abs(b.ders.row(k).sum()) < 1e-9);
    }
  }
}

TEST_CASE("Cox-de Boor matches the naive recursion") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int p : {2, 3, 5}) {
    const KnotVector kv(p == 5 ? KnotVector(5, {0, 0, 0, 0, 0, 0, 0.2, 0.5, 0.5, 0.9, 1, 1, 1, 1, 1, 1})
                               : make_open_uniform_knots(p, 4));
    for (int t = 0; t < 50; ++t) {
      const double x = d(rng);
      const auto b = eval_univariate(kv, x, 3);
      for (int i = 0; i < kv.size(); ++i) {
        for (int k = 0; k <= 3; ++k) {
          const double expect = naive_derivative(kv.knots(), i, p, x, k);
          const int local = i - b.first;
          const double got = (local >= 0 && local <= p) ? b.ders(k, local) : 0.0;
          CHECK(std::abs(got - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
        }
      }
    }
  }
}

TEST_CASE("evaluation outside the domain throws") {
  const auto kv = make_open_uniform_knots(3, 2);
  CHECK_THROWS_AS(eval_univariate(kv, 1.5, 0), DomainError);
  const auto s = test_space({2, 2, 2}, {1, 1, 1}, false);
  CHECK_THROWS_AS(s.to_parametric(Vec3(5, 5, 5)), DomainError);
}

TEST_CASE("Greville abscissae") {
  const auto g = greville_points(KnotVector(2, {0, 0, 0, 1, 1, 1}));
  REQUIRE(g.size() == 3);
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(0.5));
  CHECK(g[2] == doctest::Approx(1.0));

  const auto g1 = greville_points(make_open_uniform_knots(1, 4));
  const auto bp = make_open_uniform_knots(1, 4).breakpoints();
  REQUIRE(g1.size() == bp.size());
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == doctest::Approx(bp[i]));

  const auto g6 = greville_points(make_open_uniform_knots(6, 4));
  REQUIRE(g6.size() == 10);
  for (std::size_t i = 0; i < g6.size(); ++i) {
    CHECK(g6[i] >= 0.0);
    CHECK(g6[i] <= 1.0);
    if (i > 0) CHECK(g6[i] >= g6[i - 1]);
    CHECK(std::abs(g6[i] + g6[g6.size() - 1 - i] - 1.0) < 1e-14);
  }
}

TEST_CASE("geometry map is affine with a constant diagonal Jacobian") {
  const auto s = test_space({3, 2, 4}, {2, 3, 1}, true);
  std::mt19937 rng(3);
  for (int t = 0; t < 10; ++t) {
    const Vec3 xi(0.1 * t, 0.37, 0.9 - 0.05 * t);
    CHECK((s.geometry(xi) - s.to_physical(xi)).norm() < 1e-13);
    const Eigen::Matrix3d j = s.geometry_jacobian(xi);
    CHECK((j - Eigen::Matrix3d(s.box().extents.asDiagonal())).norm() < 1e-12);
  }
}

TEST_CASE("rational partition of unity") {
  for (bool rational : {false, true}) {
    const auto s = test_space({3, 4, 2}, {2, 1, 3}, rational);
    std::mt19937 rng(4);
    for (int t = 0; t < 100; ++t) {
      const BasisTable b = basis_table(s, random_interior_point(s, rng), {1, 1, 1});
      CHECK(std::abs(b.derivative({0, 0, 0}).sum() - 1.0) < 1e-12);
      CHECK(std::abs(b.derivative({1, 0, 0}).sum()) < 1e-10);
      CHECK(std::abs(b.derivative({1, 1, 1}).sum()) < 1e-9);
    }
  }
}

TEST_CASE("constant and linear precision of eval_field") {
  const auto s = test_space({3, 3, 2}, {2, 2, 1}, false);
  const std::vector<MultiIndex> orders{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 1, 1}};
  const Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(s.size(), 1, 3.25);
  Eigen::MatrixXd x1(s.size(), 1);
  for (int i = 0; i < s.size(); ++i) x1(i, 0) = s.control_grid()[static_cast<std::size_t>(i)].x();

  std::mt19937 rng(5);
  for (int t = 0; t < 10; ++t) {
    const Vec3 x = random_interior_point(s, rng);
    const Eigen::MatrixXd c = eval_field(s, constant, x, orders);
    CHECK(c(0, 0) == doctest::Approx(3.25));
    for (int k = 1; k < 5; ++k) CHECK(std::abs(c(k, 0)) < 1e-10);
    const Eigen::MatrixXd l = eval_field(s, x1, x, orders);
    CHECK(l(0, 0) == doctest::Approx(x.x()));
    CHECK(l(1, 0) == doctest::Approx(1.0));
    CHECK(std::abs(l(2, 0)) < 1e-12);
    CHECK(std::abs(l(4, 0)) < 1e-9);
  }
}

TEST_CASE("every derivative order matches finite differences of the order below") {
  for (bool rational : {false, true}) {
    const auto s = test_space({4, 4, 3}, {2, 3, 2}, rational);
    const Eigen::MatrixXd coeffs = random_coeffs(s.size(), 2, 11);
    std::vector<MultiIndex> all;
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b)
        for (int c = 0; c <= 3; ++c) all.push_back({a, b, c});

    std::mt19937 rng(6);
    for (int t = 0; t < 5; ++t) {
      const Vec3 x = random_interior_point(s, rng);
      const Eigen::MatrixXd d = eval_field(s, coeffs, x, all);
      for (std::size_t i = 0; i < all.size(); ++i) {
        const MultiIndex k = all[i];
        for (int dir = 0; dir < 3; ++dir) {
          if (k[static_cast<std::size_t>(dir)] == 0) continue;
          MultiIndex lower = k;
          --lower[static_cast<std::size_t>(dir)];
          // fourth-order central stencil
          const double h = 2.5e-4 * s.box().extents[dir];
          const std::vector<MultiIndex> one{lower};
          auto at = [&](double step) {
            Vec3 y = x;
            y[dir] += step;
            return Eigen::MatrixXd(eval_field(s, coeffs, y, one));
          };
          const Eigen::MatrixXd fd = (8 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12 * h);
          for (int comp = 0; comp < 2; ++comp) {
            const double scale = std::max(1.0, std::abs(d(static_cast<Eigen::Index>(i), comp)));
            INFO("rational " << rational << " k " << k[0] << k[1] << k[2] << " dir " << dir);
            CHECK(std::abs(fd(0, comp) - d(static_cast<Eigen::Index>(i), comp)) <= 1e-6 * scale);
          }
        }
      }
    }
  }
}

TEST_CASE("least squares reproduces polynomials of degree <= p") {
  const auto s = test_space({3, 3, 2}, {2, 1, 2}, false);
  auto poly = [](const Vec3& x) {
    return 1.0 + x.x() - 2 * x.y() * x.z() + x.x() * x.x() * x.x() - 0.5 * x.y() * x.y() * x.z() * x.z() +
           x.x() * x.y() * x.z();
  };
  std::mt19937 rng(8);
  const int n_samples = 4 * s.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_samples, s.size());
  Eigen::VectorXd f(n_samples);
  for (int r = 0; r < n_samples; ++r) {
    const Vec3 x = random_interior_point(s, rng);
    const BasisTable b = basis_table(s, x, {0, 0, 0});
    for (int l = 0; l < b.count(); ++l) A(r, b.indices()[static_cast<std::size_t>(l)]) = b.derivative({0, 0, 0}, l);
    f[r] = poly(x);
  }
  const Eigen::MatrixXd c = A.colPivHouseholderQr().solve(f);
  const std::vector<MultiIndex> value{{0, 0, 0}};
  for (int t = 0; t < 20; ++t) {
    const Vec3 x = random_interior_point(s, rng);
    CHECK(std::abs(eval_field(s, c, x, value)(0, 0) - poly(x)) < 1e-11);
  }
}

TEST_CASE("extended-precision basis agrees with the double version") {
  const auto kv = make_open_uniform_knots(8, 8);
  for (double x : {0.0, 0.013, 0.5, 0.77, 1.0}) {
    const auto d = eval_univariate(kv, x, 2);
    const auto ld = basis_derivatives<long double>(kv, static_cast<long double>(x), 2);
    CHECK((d.ders - ld.cast<double>()).cwiseAbs().maxCoeff() < 1e-9);
  }
}
