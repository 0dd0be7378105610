#include "igalam/pagano_oracle.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "igalam/errors.hpp"

namespace igalam {

namespace {

// Transfer-matrix interface systems with a reciprocal condition estimate
// below this are handed to the spline backend.
constexpr double kPropagationRcondFloor = 1e-14;

}  // namespace

ModalOde reduce_to_modal_ode(const ElasticityMatrix& c, double a, double b) {
  const double c11 = c(1, 1), c22 = c(2, 2), c33 = c(3, 3);
  const double c12 = c(1, 2), c13 = c(1, 3), c23 = c(2, 3);
  const double c44 = c(4, 4), c55 = c(5, 5), c66 = c(6, 6);
  ModalOde ode;
  ode.D = Vec3(c55, c44, c33).asDiagonal();
  ode.K << a * a * c11 + b * b * c66, a * b * (c12 + c66), 0.0,
           a * b * (c12 + c66), a * a * c66 + b * b * c22, 0.0,
           0.0, 0.0, a * a * c55 + b * b * c44;
  ode.G << 0.0, 0.0, -a * (c13 + c55),
           0.0, 0.0, -b * (c23 + c44),
           a * (c13 + c55), b * (c23 + c44), 0.0;
  ode.T1 = ode.D;
  ode.T0 << 0.0, 0.0, a * c55,
            0.0, 0.0, b * c44,
            -a * c13, -b * c23, 0.0;
  return ode;
}

Matrix6x6 ModalOde::first_order() const {
  const Matrix3 t1inv = T1.inverse();
  const Matrix3 gt = G + T0;
  Matrix6x6 a;
  a.topLeftCorner<3, 3>() = -t1inv * T0;
  a.topRightCorner<3, 3>() = t1inv;
  a.bottomLeftCorner<3, 3>() = K - gt * t1inv * T0;
  a.bottomRightCorner<3, 3>() = gt * t1inv;
  return a;
}

Vector6 modal_stress_amplitudes(const ElasticityMatrix& c, double a, double b, const Vec3& y, const Vec3& dy) {
  const double U = y[0], V = y[1], W = y[2];
  Vector6 s;
  s[k11] = -a * c(1, 1) * U - b * c(1, 2) * V + c(1, 3) * dy[2];
  s[k22] = -a * c(1, 2) * U - b * c(2, 2) * V + c(2, 3) * dy[2];
  s[k33] = -a * c(1, 3) * U - b * c(2, 3) * V + c(3, 3) * dy[2];
  s[k23] = c(4, 4) * (dy[1] + b * W);
  s[k13] = c(5, 5) * (dy[0] + a * W);
  s[k12] = c(6, 6) * (b * U + a * V);
  return s;
}

Vector6 angular_factors(double a, double b, double x1, double x2) {
  const double s1 = std::sin(a * x1), c1 = std::cos(a * x1);
  const double s2 = std::sin(b * x2), c2 = std::cos(b * x2);
  Vector6 f;
  f[k11] = f[k22] = f[k33] = s1 * s2;
  f[k23] = s1 * c2;
  f[k13] = c1 * s2;
  f[k12] = c1 * c2;
  return f;
}

ModalProblem make_modal_problem(const Layup& layup, double slenderness, double sigma0) {
  if (!(slenderness > 0.0)) throw DomainError("modal problem: slenderness must be positive");
  ModalProblem p;
  const double h = layup.total_thickness();
  p.alpha = p.beta = std::numbers::pi / (slenderness * h);
  p.layers = layup.ply_stiffness();
  p.sigma0 = sigma0;
  double z = -0.5 * h;
  p.interfaces.push_back(z);
  for (const auto& ply : layup.plies()) {
    z += ply.thickness;
    p.interfaces.push_back(z);
  }
  p.interfaces.back() = 0.5 * h;
  return p;
}

// ---------------------------------------------------------------------------

ModalSolution::ModalSolution(ModalProblem problem, ModalBackend backend,
                             std::variant<PropagationData, SplineData> data, std::string warning)
    : problem_(std::move(problem)), backend_(backend), data_(std::move(data)), warning_(std::move(warning)) {
  for (const auto& c : problem_.layers) odes_.push_back(reduce_to_modal_ode(c, problem_.alpha, problem_.beta));
}

ModalSolution ModalSolution::scaled(double factor) const {
  ModalSolution out = *this;
  out.problem_.sigma0 *= factor;
  if (auto* p = std::get_if<PropagationData>(&out.data_))
    for (auto& s : p->bottom) s *= factor;
  else
    for (auto& c : std::get<SplineData>(out.data_).coeffs) c *= factor;
  return out;
}

int ModalSolution::layer_at(double z) const {
  const auto& zi = problem_.interfaces;
  const double tol = 1e-12 * (zi.back() - zi.front());
  if (z < zi.front() - tol || z > zi.back() + tol) throw DomainError("modal solution: height outside the plate");
  for (int k = problem_.size() - 1; k > 0; --k)
    if (z >= zi[static_cast<std::size_t>(k)]) return k;
  return 0;
}

State6 ModalSolution::amplitudes(double z, int layer) const {
  const auto k = static_cast<std::size_t>(layer);
  const double z0 = problem_.interfaces[k];
  const ModalOde& ode = odes_[k];
  State6 out;
  if (const auto* prop = std::get_if<PropagationData>(&data_)) {
    const Matrix6x6 e = (prop->a[k] * (z - z0)).exp();
    const State6 s = e * prop->bottom[k];
    const Vec3 y = s.head<3>();
    const Vec3 dy = ode.T1.inverse() * (s.tail<3>() - ode.T0 * y);
    out << y, dy;
    return out;
  }
  const auto& sp = std::get<SplineData>(data_);
  const double h = problem_.interfaces[k + 1] - z0;
  const auto basis = eval_univariate(sp.knots[k], (z - z0) / h, 1);
  const int p = sp.knots[k].degree();
  const Eigen::MatrixXd local = sp.coeffs[k].middleRows(basis.first, p + 1);
  const Vec3 y = (basis.ders.row(0) * local).transpose();
  const Vec3 dy = (basis.ders.row(1) * local).transpose() / h;
  out << y, dy;
  return out;
}

Vec3 ModalSolution::traction_amplitudes(double z, int layer) const {
  const State6 s = amplitudes(z, layer);
  const ModalOde& ode = odes_[static_cast<std::size_t>(layer)];
  return ode.T1 * s.tail<3>() + ode.T0 * s.head<3>();
}

Vector6 ModalSolution::stress_amplitudes(double z, int layer) const {
  const State6 s = amplitudes(z, layer);
  return modal_stress_amplitudes(problem_.layers[static_cast<std::size_t>(layer)], problem_.alpha, problem_.beta,
                                 s.head<3>(), s.tail<3>());
}

// ---------------------------------------------------------------------------

namespace {

ModalSolution solve_spline(const ModalProblem& pr, const SplineOptions& opt, std::string warning) {
  // Assembled and factored in extended precision: the thin-plate modal
  // system loses roughly S^2 digits to cancellation.
  using Real = long double;
  using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  const int n = pr.size();
  std::vector<KnotVector> knots;
  std::vector<ModalOde> odes;
  for (int k = 0; k < n; ++k) {
    knots.push_back(make_open_uniform_knots(opt.degree, opt.spans_per_layer));
    odes.push_back(reduce_to_modal_ode(pr.layers[static_cast<std::size_t>(k)], pr.alpha, pr.beta));
  }
  const KnotVector& kv = knots.front();
  const int m = kv.size();
  const int per_layer = 3 * m;
  const int nd = per_layer * n;
  MatR A = MatR::Zero(nd, nd);
  VecR rhs = VecR::Zero(nd);
  auto col = [&](int layer, int comp, int i) { return per_layer * layer + m * comp + i; };

  const auto greville = greville_points(kv);
  auto basis = [&](double xi, int max_der) {
    return std::make_pair(kv.find_span(xi) - kv.degree(), basis_derivatives<Real>(kv, static_cast<Real>(xi), max_der));
  };

  // adds sign * traction rows of `layer` at parametric end `xi` to rows r0..r0+2
  auto add_traction = [&](int r0, int layer, double xi, Real sign) {
    const auto k = static_cast<std::size_t>(layer);
    const Real h = static_cast<Real>(pr.interfaces[k + 1]) - static_cast<Real>(pr.interfaces[k]);
    const auto [first, b] = basis(xi, 1);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        for (int a = 0; a <= opt.degree; ++a)
          A(r0 + r, col(layer, c, first + a)) += sign * (static_cast<Real>(odes[k].T1(r, c)) * b(1, a) / h +
                                                         static_cast<Real>(odes[k].T0(r, c)) * b(0, a));
  };
  auto add_value = [&](int r0, int layer, double xi, Real sign) {
    const auto [first, b] = basis(xi, 0);
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a <= opt.degree; ++a) A(r0 + c, col(layer, c, first + a)) += sign * b(0, a);
  };

  for (int k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Real h = static_cast<Real>(pr.interfaces[ku + 1]) - static_cast<Real>(pr.interfaces[ku]);
    const int base = per_layer * k;
    const auto& ode = odes[ku];
    // interior Greville points: ODE rows
    for (int j = 1; j < m - 1; ++j) {
      const auto [first, b] = basis(greville[static_cast<std::size_t>(j)], 2);
      const int r0 = base + 3 * j;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          for (int a = 0; a <= opt.degree; ++a)
            A(r0 + r, col(k, c, first + a)) += static_cast<Real>(ode.D(r, c)) * b(2, a) / (h * h) -
                                               static_cast<Real>(ode.G(r, c)) * b(1, a) / h -
                                               static_cast<Real>(ode.K(r, c)) * b(0, a);
    }
    // bottom end: traction-free bottom or displacement continuity
    const int rb = base;
    if (k == 0) {
      add_traction(rb, 0, 0.0, 1);
    } else {
      add_value(rb, k, 0.0, 1);
      add_value(rb, k - 1, 1.0, -1);
    }
    // top end: loaded top or traction continuity
    const int rt = base + 3 * (m - 1);
    add_traction(rt, k, 1.0, 1);
    if (k == n - 1)
      rhs[rt + 2] = static_cast<Real>(pr.sigma0);
    else
      add_traction(rt, k + 1, 0.0, -1);
  }

  for (int r = 0; r < nd; ++r) {
    const Real s = A.row(r).cwiseAbs().maxCoeff();
    if (!(s > 0)) throw SolverError("modal spline collocation: empty row");
    A.row(r) /= s;
    rhs[r] /= s;
  }
  Eigen::PartialPivLU<MatR> lu(A);
  if (!(lu.rcond() > 1e-20L)) throw SolverError("modal spline collocation: singular system");
  const Eigen::VectorXd x = lu.solve(rhs).template cast<double>();
  if (!x.allFinite()) throw SolverError("modal spline collocation: non-finite solution");

  ModalSolution::SplineData data;
  data.knots = knots;
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd c(m, 3);
    for (int comp = 0; comp < 3; ++comp) c.col(comp) = x.segment(col(k, comp, 0), m);
    data.coeffs.push_back(std::move(c));
  }
  return ModalSolution(pr, ModalBackend::SplineCollocation, std::move(data), std::move(warning));
}

}  // namespace

ModalSolution solve_modal(const ModalProblem& pr, ModalBackend backend, SplineOptions options) {
  const int n = pr.size();
  if (n < 1 || static_cast<int>(pr.interfaces.size()) != n + 1)
    throw DomainError("modal problem: interfaces must bracket every layer");
  if (!(pr.alpha > 0.0) || !(pr.beta > 0.0)) throw DomainError("modal problem: wave numbers must be positive");
  for (int k = 0; k < n; ++k)
    if (!(pr.interfaces[static_cast<std::size_t>(k + 1)] > pr.interfaces[static_cast<std::size_t>(k)]))
      throw DomainError("modal problem: layer thickness must be positive");

  if (backend == ModalBackend::SplineCollocation) return solve_spline(pr, options, {});

  // Unknowns: state at the bottom of every layer. Rows: bottom traction (3),
  // interface continuity s_{k+1} = E_k s_k (6 per interface), top traction (3).
  ModalSolution::PropagationData data;
  std::vector<Matrix6x6> e(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    data.a.push_back(reduce_to_modal_ode(pr.layers[ku], pr.alpha, pr.beta).first_order());
    e[ku] = (data.a[ku] * (pr.interfaces[ku + 1] - pr.interfaces[ku])).exp();
  }
  const int nd = 6 * n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nd, nd);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nd);
  A.block(0, 3, 3, 3).setIdentity();
  for (int k = 0; k + 1 < n; ++k) {
    const int r0 = 3 + 6 * k;
    A.block(r0, 6 * (k + 1), 6, 6).setIdentity();
    A.block(r0, 6 * k, 6, 6) = -e[static_cast<std::size_t>(k)];
  }
  A.block(nd - 3, 6 * (n - 1), 3, 6) = e.back().bottomRows<3>();
  rhs[nd - 1] = pr.sigma0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  Eigen::VectorXd x;
  if (rcond > kPropagationRcondFloor) x = lu.solve(rhs);
  if (!(rcond > kPropagationRcondFloor) || !x.allFinite()) {
    std::ostringstream os;
    os << "modal propagation ill-conditioned (rcond = " << rcond << "); using spline collocation";
    std::cerr << "warning: " << os.str() << '\n';
    return solve_spline(pr, options, os.str());
  }
  for (int k = 0; k < n; ++k) data.bottom.push_back(x.segment<6>(6 * k));
  return ModalSolution(pr, ModalBackend::Propagation, std::move(data));
}

Vector6 reference_stress(const ModalSolution& sol, double x1, double x2, double x3) {
  const auto& p = sol.problem();
  return sol.stress_amplitudes(x3).cwiseProduct(angular_factors(p.alpha, p.beta, x1, x2));
}

Vec3 reference_displacement(const ModalSolution& sol, double x1, double x2, double x3) {
  const auto& p = sol.problem();
  const State6 s = sol.amplitudes(x3);
  const double s1 = std::sin(p.alpha * x1), c1 = std::cos(p.alpha * x1);
  const double s2 = std::sin(p.beta * x2), c2 = std::cos(p.beta * x2);
  return {s[0] * c1 * s2, s[1] * s1 * c2, s[2] * s1 * s2};
}

}  // namespace igalam
