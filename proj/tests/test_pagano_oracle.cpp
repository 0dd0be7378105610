#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "igalam/errors.hpp"
#include "igalam/pagano_oracle.hpp"

using namespace igalam;

namespace {

constexpr double kPi = std::numbers::pi;

ModalProblem cross_ply(int n, double S) {
  return make_modal_problem(alternating_cross_ply(n, 1.0, benchmark_ply_material(), PlyOrientation::Deg90), S, 1.0);
}

// Largest per-component discrepancy of the stress amplitudes, relative to each component's peak.
double discrepancy(const ModalSolution& a, const ModalSolution& b) {
  const auto& p = a.problem();
  Vector6 peak = Vector6::Zero(), diff = Vector6::Zero();
  for (int i = 0; i <= 400; ++i) {
    const double z = p.interfaces.front() + (p.interfaces.back() - p.interfaces.front()) * i / 400.0;
    const Vector6 sa = a.stress_amplitudes(z), sb = b.stress_amplitudes(z);
    peak = peak.cwiseMax(sa.cwiseAbs());
    diff = diff.cwiseMax((sa - sb).cwiseAbs());
  }
  return (diff.array() / peak.array()).maxCoeff();
}

}  // namespace

TEST_CASE("modal reduction against a direct 3D evaluation of the ansatz") {
  // Quadratic amplitudes, so the 3D field is known in closed form.
  const ElasticityMatrix c = rotate_ply_90(stiffness_from_engineering(benchmark_ply_material()));
  const double a = 0.3, b = 0.7;
  const Vec3 y0(0.2, -0.1, 0.5), y1(0.05, 0.3, -0.2), y2(-0.4, 0.1, 0.25);
  auto amp = [&](double z) { return Vec3(y0 + y1 * z + y2 * z * z); };
  auto damp = [&](double z) { return Vec3(y1 + 2 * y2 * z); };
  auto u = [&](const Vec3& x) {
    const Vec3 y = amp(x.z());
    return Vec3(y[0] * std::cos(a * x.x()) * std::sin(b * x.y()), y[1] * std::sin(a * x.x()) * std::cos(b * x.y()),
                y[2] * std::sin(a * x.x()) * std::sin(b * x.y()));
  };
  auto stress = [&](const Vec3& x) {
    const double h = 1e-4;
    Eigen::Matrix3d g;  // g(j, m) = d u_m / d x_j
    for (int j = 0; j < 3; ++j) {
      Vec3 e = Vec3::Zero();
      e[j] = h;
      g.row(j) = ((8 * (u(x + e) - u(x - e)) - (u(x + 2 * e) - u(x - 2 * e))) / (12 * h)).transpose();
    }
    Vector6 eps;
    eps << g(0, 0), g(1, 1), g(2, 2), g(2, 1) + g(1, 2), g(2, 0) + g(0, 2), g(1, 0) + g(0, 1);
    return Vector6(c.matrix() * eps);
  };
  const Vec3 x(1.3, 0.4, 0.6);

  // stress amplitudes times angular factors
  const Vector6 s = modal_stress_amplitudes(c, a, b, amp(x.z()), damp(x.z())).cwiseProduct(angular_factors(a, b, x.x(), x.y()));
  CHECK((s - stress(x)).norm() < 1e-7 * s.norm());

  // ODE residual equals the amplitudes of div sigma
  const ModalOde ode = reduce_to_modal_ode(c, a, b);
  const Vec3 r = ode.residual(amp(x.z()), damp(x.z()), 2 * y2);
  const double h = 1e-3;
  Vec3 div = Vec3::Zero();
  const int rows[3][3] = {{k11, k12, k13}, {k12, k22, k23}, {k13, k23, k33}};
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = h;
    const Vector6 d = (8 * (stress(x + e) - stress(x - e)) - (stress(x + 2 * e) - stress(x - 2 * e))) / (12 * h);
    for (int i = 0; i < 3; ++i) div[i] += d[rows[i][j]];
  }
  const Vec3 ang(std::cos(a * x.x()) * std::sin(b * x.y()), std::sin(a * x.x()) * std::cos(b * x.y()),
                 std::sin(a * x.x()) * std::sin(b * x.y()));
  CHECK((r.cwiseProduct(ang) - div).norm() < 1e-5 * r.norm());

  // traction amplitudes
  const Vec3 t = ode.T1 * damp(x.z()) + ode.T0 * amp(x.z());
  const Vector6 sa = modal_stress_amplitudes(c, a, b, amp(x.z()), damp(x.z()));
  CHECK((t - Vec3(sa[k13], sa[k23], sa[k33])).norm() < 1e-12 * t.norm());
}

TEST_CASE("single isotropic term check") {
  const ElasticityMatrix c = stiffness_from_engineering({1, 1, 1, 0.5, 0.5, 0.5, 0, 0, 0});
  const double a = 0.4, b = 0.9, W = 1.7;
  const ModalOde ode = reduce_to_modal_ode(c, a, b);
  const Vec3 r = ode.residual(Vec3(0, 0, W), Vec3::Zero(), Vec3::Zero());
  CHECK(r[0] == doctest::Approx(0.0));
  CHECK(r[1] == doctest::Approx(0.0));
  CHECK(std::abs(r[2]) == doctest::Approx((a * a * c(5, 5) + b * b * c(4, 4)) * W));
}

TEST_CASE("homogeneous isotropic layer satisfies the surface conditions") {
  EngineeringConstants iso{1000, 1000, 1000, 500, 500, 500, 0, 0, 0};
  const Layup one({Ply{2.0, PlyOrientation::Deg0, iso}});
  const ModalProblem p = make_modal_problem(one, 10.0, 1.0);
  CHECK(p.alpha == doctest::Approx(kPi / 20.0));
  for (ModalBackend be : {ModalBackend::Propagation, ModalBackend::SplineCollocation}) {
    const ModalSolution s = solve_modal(p, be);
    CHECK(s.traction_amplitudes(-1.0, 0).norm() < 1e-10);
    CHECK((s.traction_amplitudes(1.0, 0) - Vec3(0, 0, 1)).norm() < 1e-10);
    const double L = 20.0;
    CHECK(reference_stress(s, L / 2, L / 2, 1.0)[k33] == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("backends agree and the spline backend self-converges") {
  for (int n : {3, 11}) {
    const ModalProblem p = cross_ply(n, 20.0);
    const ModalSolution a = solve_modal(p, ModalBackend::Propagation);
    CHECK(a.backend() == ModalBackend::Propagation);
    CHECK(a.warning().empty());
    const ModalSolution b8 = solve_modal(p, ModalBackend::SplineCollocation, {8, 8});
    const ModalSolution b16 = solve_modal(p, ModalBackend::SplineCollocation, {8, 16});
    CHECK(discrepancy(a, b8) < 1e-8);
    CHECK(discrepancy(b8, b16) < 1e-9);
  }
}

TEST_CASE("interface continuity and surface tractions") {
  const double S = 20.0;
  const ModalProblem p = cross_ply(11, S);
  const ModalSolution s = solve_modal(p);
  CHECK(s.traction_amplitudes(p.interfaces.front(), 0).norm() < 1e-8);
  CHECK((s.traction_amplitudes(p.interfaces.back(), 10) - Vec3(0, 0, 1)).norm() < 1e-8);
  double inplane_jump = 0.0, inplane_peak = 0.0;
  for (int k = 1; k < 11; ++k) {
    const double z = p.interfaces[static_cast<std::size_t>(k)];
    const Vector6 lo = s.stress_amplitudes(z, k - 1), hi = s.stress_amplitudes(z, k);
    for (int i : {k13, k23, k33}) CHECK(std::abs(lo[i] - hi[i]) < 1e-8 * S);
    CHECK((s.amplitudes(z, k - 1).head<3>() - s.amplitudes(z, k).head<3>()).norm() <
          1e-10 * s.amplitudes(z, k).head<3>().norm());
    inplane_jump = std::max(inplane_jump, std::abs(lo[k11] - hi[k11]));
    inplane_peak = std::max(inplane_peak, std::abs(lo[k11]));
  }
  CHECK(inplane_jump > 0.1 * inplane_peak);  // sigma_11 jumps between 0 and 90 plies
}

TEST_CASE("angular structure") {
  const ModalProblem p = cross_ply(3, 20.0);
  const ModalSolution s = solve_modal(p);
  const double L = 60.0;
  for (double z : {-1.2, 0.3, 1.5}) {
    CHECK(std::abs(reference_displacement(s, 0.0, 17.0, z)[2]) < 1e-14);
    CHECK(std::abs(reference_displacement(s, 0.0, 17.0, z)[1]) < 1e-14);
    CHECK(std::abs(reference_stress(s, L, 17.0, z)[k11]) < 1e-10);
    const double edge = std::abs(reference_stress(s, 0.0, 17.0, z)[k13]);
    for (double x1 : {5.0, 15.0, 30.0}) CHECK(std::abs(reference_stress(s, x1, 17.0, z)[k13]) <= edge);
    CHECK(std::abs(reference_stress(s, L / 2, L / 2, z)[k13]) < 1e-12 * edge);
  }
}

TEST_CASE("sigma_11 profile of the 3-ply plate") {
  const ModalProblem p = cross_ply(3, 20.0);
  const ModalSolution s = solve_modal(p);
  const double L = 60.0, x = 0.25 * L;
  const double bottom = reference_stress(s, x, x, -1.5)[k11], top = reference_stress(s, x, x, 1.5)[k11];
  CHECK(bottom * top < 0.0);
  CHECK(std::abs(bottom + top) < 0.1 * std::max(std::abs(bottom), std::abs(top)));
  // jump at the lower interface
  const double below = s.stress_amplitudes(-0.5, 0)[k11], above = s.stress_amplitudes(-0.5, 1)[k11];
  CHECK(std::abs(below - above) > 0.1 * std::abs(below));
}

TEST_CASE("layer lookup and input checks") {
  const ModalProblem p = cross_ply(3, 20.0);
  const ModalSolution s = solve_modal(p);
  CHECK(s.layer_at(-1.5) == 0);
  CHECK(s.layer_at(-0.5) == 1);
  CHECK(s.layer_at(1.5) == 2);
  ModalProblem bad = p;
  bad.interfaces.pop_back();
  CHECK_THROWS_AS(solve_modal(bad), DomainError);
  bad = p;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(solve_modal(bad), DomainError);
}

TEST_CASE("ill-conditioned propagation falls back to spline collocation") {
  const ModalProblem p = cross_ply(3, 0.02);
  const ModalSolution s = solve_modal(p, ModalBackend::Propagation);
  CHECK(s.backend() == ModalBackend::SplineCollocation);
  CHECK_FALSE(s.warning().empty());
}
