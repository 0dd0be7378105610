#include "igalam/stress_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "igalam/errors.hpp"

namespace igalam {

namespace {

MultiIndex plus(MultiIndex a, const MultiIndex& b) {
  for (std::size_t d = 0; d < 3; ++d) a[d] += b[d];
  return a;
}

constexpr std::array<MultiIndex, 3> kUnit{MultiIndex{1, 0, 0}, MultiIndex{0, 1, 0}, MultiIndex{0, 0, 1}};

/// Voigt stress from a displacement gradient G(j, m) = d u_m / d x_j.
Vector6 stress_from_gradient(const ElasticityMatrix& c, const Eigen::Matrix3d& g) {
  Vector6 eps;
  eps[k11] = g(0, 0);
  eps[k22] = g(1, 1);
  eps[k33] = g(2, 2);
  eps[k23] = g(2, 1) + g(1, 2);
  eps[k13] = g(2, 0) + g(0, 2);
  eps[k12] = g(1, 0) + g(0, 1);
  return c.matrix() * eps;
}

/// Stress derivatives d^D sigma for several multi-indices D at one point,
/// sharing one basis table.
std::vector<Vector6> stress_derivatives(const DisplacementField& field, const ElasticityMatrix& c,
                                        const Vec3& x, std::span<const MultiIndex> ds) {
  std::vector<MultiIndex> orders;
  orders.reserve(3 * ds.size());
  for (const auto& d : ds)
    for (const auto& e : kUnit) orders.push_back(plus(d, e));
  const Eigen::MatrixXd vals = field.eval(x, orders);
  std::vector<Vector6> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Eigen::Matrix3d g = vals.middleRows(static_cast<Eigen::Index>(3 * i), 3);
    out.push_back(stress_from_gradient(c, g));
  }
  return out;
}

/// Integrates f(z, c) over [bottom, x] with the plan's per-segment rule; c is
/// the stiffness of the segment.
template <class F>
auto cumulative(const RecoveryPlan& plan, double x, F&& f) {
  using T = decltype(f(0.0, std::declval<const ElasticityMatrix&>()));
  T acc = T::Zero();
  for (std::size_t s = 0; s + 1 < plan.breaks.size(); ++s) {
    const double lo = plan.breaks[s];
    const double hi = std::min(plan.breaks[s + 1], x);
    if (!(hi > lo)) break;
    const ElasticityMatrix& c = plan.stiffness.at(0.5 * (plan.breaks[s] + plan.breaks[s + 1]));
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t g = 0; g < plan.rule.nodes.size(); ++g)
      acc += (plan.rule.weights[g] * half) * f(mid + half * plan.rule.nodes[g], c);
  }
  return acc;
}

void check_height(const RecoveryPlan& plan, double x3) {
  const double tol = 1e-12 * (plan.top() - plan.bottom());
  if (x3 < plan.bottom() - tol || x3 > plan.top() + tol)
    throw DomainError("recovery: height outside the plate thickness");
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one point");
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;  // P_{k-1}, P_k
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    r.nodes[lo] = -x;
    r.nodes[hi] = x;
    r.weights[lo] = r.weights[hi] = w;
  }
  return r;
}

StiffnessProfile::StiffnessProfile(std::vector<double> interfaces, std::vector<ElasticityMatrix> layers)
    : interfaces_(std::move(interfaces)), layers_(std::move(layers)) {
  if (layers_.empty() || interfaces_.size() != layers_.size() + 1)
    throw DomainError("stiffness profile: need layers.size() + 1 interfaces");
  for (std::size_t k = 0; k + 1 < interfaces_.size(); ++k)
    if (!(interfaces_[k + 1] > interfaces_[k])) throw DomainError("stiffness profile: interfaces must increase");
}

StiffnessProfile StiffnessProfile::uniform(const ElasticityMatrix& c, double bottom, double top) {
  return StiffnessProfile({bottom, top}, {c});
}

StiffnessProfile StiffnessProfile::plywise(const Layup& layup, double bottom) {
  std::vector<double> z{bottom};
  for (const auto& p : layup.plies()) z.push_back(z.back() + p.thickness);
  return StiffnessProfile(std::move(z), layup.ply_stiffness());
}

int StiffnessProfile::layer_at(double z) const {
  const auto it = std::upper_bound(interfaces_.begin() + 1, interfaces_.end() - 1, z);
  return static_cast<int>(it - interfaces_.begin()) - 1;
}

RecoveryPlan make_recovery_plan(const DisplacementField& field, StiffnessProfile stiffness, double x1,
                                double x2, int points_per_span) {
  const auto& space = field.space;
  // domain check on the station
  space.to_parametric(Vec3(x1, x2, space.box().origin[2]));
  const double bottom = space.box().origin[2], top = bottom + space.box().extents[2];
  const double tol = 1e-12 * (top - bottom);
  const std::vector<double> zi = stiffness.interfaces();
  if (std::abs(zi.front() - bottom) > tol || std::abs(zi.back() - top) > tol)
    throw DomainError("recovery: stiffness profile does not span the plate thickness");

  RecoveryPlan plan{x1, x2, {}, {}, std::move(stiffness)};
  for (double b : space.knots(2).breakpoints()) plan.breaks.push_back(bottom + (top - bottom) * b);
  for (std::size_t k = 1; k + 1 < zi.size(); ++k) plan.breaks.push_back(zi[k]);
  std::sort(plan.breaks.begin(), plan.breaks.end());
  plan.breaks.erase(std::unique(plan.breaks.begin(), plan.breaks.end(),
                                [tol](double a, double b) { return b - a <= tol; }),
                    plan.breaks.end());
  plan.breaks.front() = bottom;
  plan.breaks.back() = top;
  plan.rule = gauss_legendre(points_per_span > 0 ? points_per_span : space.degrees()[2] + 2);
  return plan;
}

RecoveryPlan make_recovery_plan(const DisplacementField& field, const ElasticityMatrix& c, double x1,
                                double x2, int points_per_span) {
  const auto& box = field.space.box();
  return make_recovery_plan(field, StiffnessProfile::uniform(c, box.origin[2], box.origin[2] + box.extents[2]),
                            x1, x2, points_per_span);
}

Eigen::Vector2d shear_integrand(const DisplacementField& field, const ElasticityMatrix& c,
                                const RecoveryPlan& plan, double zeta) {
  static constexpr std::array<MultiIndex, 2> ds{MultiIndex{1, 0, 0}, MultiIndex{0, 1, 0}};
  const Vec3 x(plan.x1, plan.x2, zeta);
  const auto s = stress_derivatives(field, c, x, ds);
  const Vec3 b = plan.body_force(x);
  return {s[0][k11] + s[1][k12] + b[0], s[0][k12] + s[1][k22] + b[1]};
}

Eigen::Vector2d recover_shear(const DisplacementField& field, const RecoveryPlan& plan, double x3) {
  check_height(plan, x3);
  const Eigen::Vector2d integral = cumulative(
      plan, x3, [&](double z, const ElasticityMatrix& c) { return shear_integrand(field, c, plan, z); });
  return plan.bottom_traction.head<2>() - integral;
}

double recover_sigma33(const DisplacementField& field, const RecoveryPlan& plan, double x3) {
  const auto& space = field.space;
  if (space.knots(0).regularity() < 3 || space.knots(1).regularity() < 3)
    throw RecoveryError("recover_sigma33: in-plane basis must be at least C^3");
  if (space.knots(2).regularity() < 2)
    throw RecoveryError("recover_sigma33: thickness basis must be at least C^2");
  check_height(plan, x3);

  // d/dx1 of the sigma_13 integrand plus d/dx2 of the sigma_23 integrand:
  // sigma_11,11 + 2 sigma_12,12 + sigma_22,22 + b_1,1 + b_2,2.
  // The repeated integral collapses to one pass:
  //   int_a^x int_a^z f dz' dz = int_a^x (x - z) f(z) dz
  static constexpr std::array<MultiIndex, 3> ds{MultiIndex{2, 0, 0}, MultiIndex{1, 1, 0}, MultiIndex{0, 2, 0}};
  auto bottom_anchored = [&](double upper) {
    auto integrand = [&](double z, const ElasticityMatrix& c) {
      const Vec3 x(plan.x1, plan.x2, z);
      const auto s = stress_derivatives(field, c, x, ds);
      const double div = s[0][k11] + 2.0 * s[1][k12] + s[2][k22] + plan.body_force_inplane_div(x);
      Eigen::Matrix<double, 1, 1> v;
      v[0] = -(upper - z) * div + plan.body_force(x)[2];
      return v;
    };
    return plan.bottom_traction[2] - cumulative(plan, upper, integrand)[0];
  };
  const double value = bottom_anchored(x3);
  if (plan.sigma33_anchor == Sigma33Anchor::Bottom) return value;
  const double top = bottom_anchored(plan.top());
  return value - 0.5 * (top - plan.top_traction[2]);
}

Vector6 normalize_stress(const Vector6& s, double sigma0, double slenderness) {
  Vector6 n = s;
  const double inplane = sigma0 * slenderness * slenderness;
  const double shear = sigma0 * slenderness;
  n[k11] /= inplane;
  n[k22] /= inplane;
  n[k12] /= inplane;
  n[k13] /= shear;
  n[k23] /= shear;
  n[k33] /= sigma0;
  return n;
}

Eigen::MatrixXd StressProfile::raw_normalized() const {
  Eigen::MatrixXd out(raw.rows(), 6);
  for (Eigen::Index i = 0; i < raw.rows(); ++i)
    out.row(i) = normalize_stress(raw.row(i).transpose(), sigma0, slenderness).transpose();
  return out;
}

Eigen::MatrixXd StressProfile::recovered_normalized() const {
  Eigen::MatrixXd out = recovered;
  out.col(0) /= sigma0 * slenderness;
  out.col(1) /= sigma0 * slenderness;
  out.col(2) /= sigma0;
  return out;
}

StressProfile profile(const DisplacementField& field, const RecoveryPlan& plan, int n_samples,
                      double sigma0, double slenderness) {
  if (n_samples < 2) throw DomainError("profile: need at least two samples");
  StressProfile p;
  p.sigma0 = sigma0;
  p.slenderness = slenderness;
  p.raw.resize(n_samples, 6);
  p.recovered.resize(n_samples, 3);
  // the last sample is the top surface, so the balanced shift comes for free
  RecoveryPlan bottom_plan = plan;
  bottom_plan.sigma33_anchor = Sigma33Anchor::Bottom;
  const double a = plan.bottom(), b = plan.top();
  for (int i = 0; i < n_samples; ++i) {
    const double z = i == n_samples - 1 ? b : a + (b - a) * i / (n_samples - 1);
    p.x3.push_back(z);
    p.raw.row(i) = stress_at(field, plan.stiffness.at(z), Vec3(plan.x1, plan.x2, z)).transpose();
    const Eigen::Vector2d sh = recover_shear(field, plan, z);
    p.recovered(i, 0) = sh[0];
    p.recovered(i, 1) = sh[1];
    p.recovered(i, 2) = recover_sigma33(field, bottom_plan, z);
  }
  if (plan.sigma33_anchor == Sigma33Anchor::Balanced)
    p.recovered.col(2).array() -= 0.5 * (p.recovered(n_samples - 1, 2) - plan.top_traction[2]);
  return p;
}

}  // namespace igalam
