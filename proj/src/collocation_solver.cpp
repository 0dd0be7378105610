#include "igalam/collocation_solver.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "igalam/errors.hpp"

namespace igalam {

namespace {

constexpr MultiIndex kD1{1, 0, 0}, kD2{0, 1, 0}, kD3{0, 0, 1};

/// Voigt strain operator of one scalar basis function with gradient g,
/// 6 x 3 over displacement components.
Eigen::Matrix<double, 6, 3> strain_operator(const Vec3& g) {
  Eigen::Matrix<double, 6, 3> b = Eigen::Matrix<double, 6, 3>::Zero();
  b(k11, 0) = g[0];
  b(k22, 1) = g[1];
  b(k33, 2) = g[2];
  b(k23, 1) = g[2];
  b(k23, 2) = g[1];
  b(k13, 0) = g[2];
  b(k13, 2) = g[0];
  b(k12, 0) = g[1];
  b(k12, 1) = g[0];
  return b;
}

/// Maps a Voigt stress to the traction sigma . n.
Eigen::Matrix<double, 3, 6> traction_operator(const Vec3& n) {
  return strain_operator(n).transpose();
}

RowBlock empty_block(const BasisTable& table) {
  RowBlock rb;
  rb.basis.assign(table.indices().begin(), table.indices().end());
  rb.coeffs = Eigen::MatrixXd::Zero(3, 3 * table.count());
  return rb;
}

Vec3 gradient(const BasisTable& table, int a) {
  return {table.derivative(kD1, a), table.derivative(kD2, a), table.derivative(kD3, a)};
}

}  // namespace

Vec3 outward_normal(Face f) {
  switch (f) {
    case Face::X1Min: return {-1, 0, 0};
    case Face::X1Max: return {1, 0, 0};
    case Face::X2Min: return {0, -1, 0};
    case Face::X2Max: return {0, 1, 0};
    case Face::X3Min: return {0, 0, -1};
    case Face::X3Max: return {0, 0, 1};
  }
  return Vec3::Zero();
}

std::vector<Face> CollocationPoint::faces() const {
  std::vector<Face> out;
  for (Face f : kAllFaces)
    if (on(f)) out.push_back(f);
  return out;
}

PointKind CollocationPoint::kind() const {
  switch (std::popcount(face_mask)) {
    case 0: return PointKind::Interior;
    case 1: return PointKind::Face;
    case 2: return PointKind::Edge;
    default: return PointKind::Corner;
  }
}

int CollocationGrid::count(PointKind kind) const {
  int n = 0;
  for (const auto& p : points) n += p.kind() == kind;
  return n;
}

CollocationGrid build_grid(const TensorProductSpace& space) {
  CollocationGrid grid;
  for (int d = 0; d < 3; ++d) grid.greville[static_cast<std::size_t>(d)] = greville_points(space.knots(d));
  const auto n = space.counts();
  grid.points.reserve(static_cast<std::size_t>(space.size()));
  for (int i3 = 0; i3 < n[2]; ++i3)
    for (int i2 = 0; i2 < n[1]; ++i2)
      for (int i1 = 0; i1 < n[0]; ++i1) {
        CollocationPoint p;
        p.ijk = {i1, i2, i3};
        p.xi = Vec3(grid.greville[0][static_cast<std::size_t>(i1)], grid.greville[1][static_cast<std::size_t>(i2)],
                    grid.greville[2][static_cast<std::size_t>(i3)]);
        p.x = space.to_physical(p.xi);
        for (int d = 0; d < 3; ++d) {
          if (p.xi[d] == 0.0) p.face_mask |= static_cast<std::uint8_t>(1u << (2 * d));
          if (p.xi[d] == 1.0) p.face_mask |= static_cast<std::uint8_t>(1u << (2 * d + 1));
        }
        grid.points.push_back(p);
      }
  return grid;
}

// ---------------------------------------------------------------------------

BoundaryConditions simply_supported_plate(double sigma0, double length) {
  BoundaryConditions bc;
  const double k = std::numbers::pi / length;
  bc.on(Face::X3Max).data = [sigma0, k](const Vec3& x) {
    return Vec3(0.0, 0.0, sigma0 * std::sin(k * x[0]) * std::sin(k * x[1]));
  };
  for (Face f : {Face::X1Min, Face::X1Max})
    bc.on(f).kinds = {BcKind::Traction, BcKind::Dirichlet, BcKind::Dirichlet};
  for (Face f : {Face::X2Min, Face::X2Max})
    bc.on(f).kinds = {BcKind::Dirichlet, BcKind::Traction, BcKind::Dirichlet};
  return bc;
}

BoundaryConditions all_dirichlet(VectorField displacement) {
  BoundaryConditions bc;
  for (auto& f : bc.faces) {
    f.kinds = {BcKind::Dirichlet, BcKind::Dirichlet, BcKind::Dirichlet};
    f.data = displacement;
  }
  return bc;
}

// ---------------------------------------------------------------------------

RowBlock interior_rows(const BasisTable& table, const ElasticityMatrix& c, const Vec3& body_force) {
  RowBlock rb = empty_block(table);
  const double c11 = c(1, 1), c22 = c(2, 2), c33 = c(3, 3);
  const double c12 = c(1, 2), c13 = c(1, 3), c23 = c(2, 3);
  const double c44 = c(4, 4), c55 = c(5, 5), c66 = c(6, 6);
  for (int a = 0; a < table.count(); ++a) {
    const double h11 = table.derivative({2, 0, 0}, a);
    const double h22 = table.derivative({0, 2, 0}, a);
    const double h33 = table.derivative({0, 0, 2}, a);
    const double h12 = table.derivative({1, 1, 0}, a);
    const double h13 = table.derivative({1, 0, 1}, a);
    const double h23 = table.derivative({0, 1, 1}, a);

    const double k11 = c11 * h11 + c66 * h22 + c55 * h33;
    const double k22 = c66 * h11 + c22 * h22 + c44 * h33;
    const double k33 = c55 * h11 + c44 * h22 + c33 * h33;
    const double k12 = (c12 + c66) * h12;
    const double k13 = (c13 + c55) * h13;
    const double k23 = (c23 + c44) * h23;

    auto blk = rb.coeffs.middleCols(3 * a, 3);
    blk << k11, k12, k13,
           k12, k22, k23,
           k13, k23, k33;
  }
  rb.rhs = -body_force;
  return rb;
}

RowBlock neumann_rows(const BasisTable& table, const ElasticityMatrix& c, const Vec3& normal,
                      const Vec3& traction) {
  RowBlock rb = empty_block(table);
  const Eigen::Matrix<double, 3, 6> nc = traction_operator(normal) * c.matrix();
  for (int a = 0; a < table.count(); ++a)
    rb.coeffs.middleCols(3 * a, 3) = nc * strain_operator(gradient(table, a));
  rb.rhs = traction;
  return rb;
}

RowBlock dirichlet_rows(const BasisTable& table, const Vec3& value) {
  RowBlock rb = empty_block(table);
  const auto values = table.derivative({0, 0, 0});
  for (int a = 0; a < table.count(); ++a)
    for (int comp = 0; comp < 3; ++comp) rb.coeffs(comp, 3 * a + comp) = values[a];
  rb.rhs = value;
  return rb;
}

RowBlock simple_support_rows(const BasisTable& table, const ElasticityMatrix& c, Face face) {
  const int dir = static_cast<int>(face) / 2;
  if (dir == 2) throw AssemblyError("simple support is defined on lateral faces only");
  RowBlock rb = dirichlet_rows(table, Vec3::Zero());
  const RowBlock t = neumann_rows(table, c, outward_normal(face), Vec3::Zero());
  rb.coeffs.row(dir) = t.coeffs.row(dir);
  rb.rhs[dir] = 0.0;
  return rb;
}

RowBlock resolve_boundary_rows(const BasisTable& table, const ElasticityMatrix& c,
                               const CollocationPoint& pt, const BoundaryConditions& bc) {
  const auto faces = pt.faces();
  if (faces.empty()) throw AssemblyError("resolve_boundary_rows: point is not on the boundary");

  std::vector<Vec3> data;
  data.reserve(faces.size());
  for (Face f : faces) data.push_back(bc.on(f).data(pt.x));

  RowBlock rb = empty_block(table);
  const auto values = table.derivative({0, 0, 0});
  std::vector<RowBlock> traction(faces.size());

  for (int comp = 0; comp < 3; ++comp) {
    bool dirichlet = false;
    double value = 0.0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (bc.on(faces[f]).kinds[static_cast<std::size_t>(comp)] != BcKind::Dirichlet) continue;
      const double v = data[f][comp];
      if (dirichlet && std::abs(v - value) > 1e-12 * (1.0 + std::abs(value))) {
        std::ostringstream os;
        os << "conflicting Dirichlet values " << value << " and " << v << " for component " << comp + 1
           << " at (" << pt.x.transpose() << ")";
        throw AssemblyError(os.str());
      }
      dirichlet = true;
      value = v;
    }
    if (dirichlet) {
      for (int a = 0; a < table.count(); ++a) rb.coeffs(comp, 3 * a + comp) = values[a];
      rb.rhs[comp] = value;
      continue;
    }
    const double w = 1.0 / static_cast<double>(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (traction[f].basis.empty())
        traction[f] = neumann_rows(table, c, outward_normal(faces[f]), data[f]);
      rb.coeffs.row(comp) += w * traction[f].coeffs.row(comp);
      rb.rhs[comp] += w * traction[f].rhs[comp];
    }
  }
  return rb;
}

// ---------------------------------------------------------------------------

void CollocationSystem::set_rows(int point, const RowBlock& block) {
  const int r0 = 3 * point;
  matrix.middleRows(r0, 3).setZero();
  for (std::size_t a = 0; a < block.basis.size(); ++a)
    matrix.block(r0, 3 * block.basis[a], 3, 3) = block.coeffs.middleCols(3 * static_cast<Eigen::Index>(a), 3);
  rhs.segment<3>(r0) = block.rhs;
}

void assemble_rows(CollocationSystem& system, const TensorProductSpace& space,
                   const ElasticityMatrix& c, const BoundaryConditions& bc,
                   const CollocationGrid& grid, int begin, int end) {
  for (int p = begin; p < end; ++p) {
    const auto& pt = grid.points[static_cast<std::size_t>(p)];
    const BasisTable table = basis_table(space, pt.x, {2, 2, 2});
    if (pt.kind() == PointKind::Interior)
      system.set_rows(p, interior_rows(table, c, bc.body_force(pt.x)));
    else
      system.set_rows(p, resolve_boundary_rows(table, c, pt, bc));
  }
}

CollocationSystem assemble(const TensorProductSpace& space, const ElasticityMatrix& c,
                           const BoundaryConditions& bc, const CollocationGrid& grid,
                           unsigned n_threads) {
  const int n = static_cast<int>(grid.points.size());
  if (n != space.size()) throw AssemblyError("assemble: grid and space sizes differ");
  CollocationSystem system(n);
  n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(n)));
  if (n_threads == 1) {
    assemble_rows(system, space, c, bc, grid, 0, n);
    return system;
  }
  std::vector<std::jthread> workers;
  std::vector<std::exception_ptr> errors(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) {
    const int b = static_cast<int>(static_cast<long>(n) * t / n_threads);
    const int e = static_cast<int>(static_cast<long>(n) * (t + 1) / n_threads);
    workers.emplace_back([&, b, e, t] {
      try {
        assemble_rows(system, space, c, bc, grid, b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  workers.clear();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
  return system;
}

Eigen::VectorXd solve_dense(const CollocationSystem& system, double* relative_residual) {
  if (system.matrix.rows() != system.matrix.cols() || system.matrix.rows() != system.rhs.size())
    throw SolverError("solve: system is not square");
  for (Eigen::Index r = 0; r < system.matrix.rows(); ++r)
    if (system.matrix.row(r).cwiseAbs().maxCoeff() == 0.0) {
      std::ostringstream os;
      os << "solve: row " << r << " is identically zero";
      throw SolverError(os.str());
    }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.matrix);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-20)) {
    std::ostringstream os;
    os << "solve: matrix is numerically singular (rcond = " << rcond << ")";
    throw SolverError(os.str());
  }
  Eigen::VectorXd x = lu.solve(system.rhs);
  if (!x.allFinite()) throw SolverError("solve: solution is not finite");
  if (relative_residual) {
    const double bn = system.rhs.norm();
    const double rn = (system.matrix * x - system.rhs).norm();
    *relative_residual = bn > 0.0 ? rn / bn : rn;
  }
  return x;
}

SolveResult solve(const CollocationSystem& system, const TensorProductSpace& space) {
  if (system.size() != 3 * space.size()) throw SolverError("solve: system size differs from 3 x basis count");
  double res = 0.0;
  const Eigen::VectorXd x = solve_dense(system, &res);
  Eigen::MatrixXd coeffs(space.size(), 3);
  for (int i = 0; i < space.size(); ++i) coeffs.row(i) = x.segment<3>(3 * i).transpose();
  return SolveResult{DisplacementField{space, std::move(coeffs)}, res};
}

Vector6 stress_at(const DisplacementField& field, const ElasticityMatrix& c, const Vec3& x) {
  static constexpr std::array<MultiIndex, 3> orders{kD1, kD2, kD3};
  const Eigen::MatrixXd g = field.eval(x, orders);  // row j: d/dx_j of (u1, u2, u3)
  Vector6 eps;
  eps[k11] = g(0, 0);
  eps[k22] = g(1, 1);
  eps[k33] = g(2, 2);
  eps[k23] = g(2, 1) + g(1, 2);
  eps[k13] = g(2, 0) + g(0, 2);
  eps[k12] = g(1, 0) + g(0, 1);
  return c.matrix() * eps;
}

// ---------------------------------------------------------------------------

BoundaryConditions PlateProblem::boundary_conditions() const {
  BoundaryConditions bc = simply_supported_plate(sigma0, length());
  bc.body_force = body_force;
  return bc;
}

TensorProductSpace make_plate_space(double length, double thickness, std::array<int, 3> degrees,
                                    int inplane_spans, int thickness_spans) {
  Box box;
  box.origin = Vec3(0.0, 0.0, -0.5 * thickness);
  box.extents = Vec3(length, length, thickness);
  return TensorProductSpace({make_open_uniform_knots(degrees[0], inplane_spans),
                             make_open_uniform_knots(degrees[1], inplane_spans),
                             make_open_uniform_knots(degrees[2], thickness_spans)},
                            box);
}

}  // namespace igalam
