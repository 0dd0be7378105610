/**
 * @file collocation_solver.hpp
 * @brief Strong-form isogeometric collocation for linear orthotropic elasticity on a box.
 *
 * Unknowns are interleaved control coefficients, column `3*i + c` for basis
 * function i and displacement component c. Rows follow the same layout over
 * the Greville collocation points.
 */
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "igalam/laminate_material.hpp"
#include "igalam/spline_kernel.hpp"

namespace igalam {

enum class Face : int { X1Min = 0, X1Max, X2Min, X2Max, X3Min, X3Max };

inline constexpr std::array<Face, 6> kAllFaces{Face::X1Min, Face::X1Max, Face::X2Min,
                                               Face::X2Max, Face::X3Min, Face::X3Max};

Vec3 outward_normal(Face f);

enum class PointKind { Interior, Face, Edge, Corner };

struct CollocationPoint {
  std::array<int, 3> ijk{};
  Vec3 xi;           ///< parametric coordinates
  Vec3 x;            ///< physical coordinates
  std::uint8_t face_mask = 0;  ///< bit f set when the point lies on face f

  bool on(Face f) const { return (face_mask >> static_cast<int>(f)) & 1u; }
  std::vector<Face> faces() const;
  PointKind kind() const;
};

/// Tensor grid of Greville abscissae with boundary classification.
struct CollocationGrid {
  std::array<std::vector<double>, 3> greville;
  std::vector<CollocationPoint> points;

  int count(PointKind kind) const;
};

CollocationGrid build_grid(const TensorProductSpace& space);

// ---------------------------------------------------------------------------
// Boundary data

enum class BcKind { Dirichlet, Traction };

using VectorField = std::function<Vec3(const Vec3&)>;

/// Per-component condition on one face. `data` returns the prescribed
/// displacement for Dirichlet components and the prescribed traction
/// (sigma . n with outward n) for traction components.
struct FaceCondition {
  std::array<BcKind, 3> kinds{BcKind::Traction, BcKind::Traction, BcKind::Traction};
  VectorField data = [](const Vec3&) { return Vec3::Zero(); };
};

struct BoundaryConditions {
  std::array<FaceCondition, 6> faces;
  VectorField body_force = [](const Vec3&) { return Vec3::Zero(); };

  const FaceCondition& on(Face f) const { return faces[static_cast<std::size_t>(f)]; }
  FaceCondition& on(Face f) { return faces[static_cast<std::size_t>(f)]; }
};

/// Simply supported edges on the four lateral faces, sinusoidal normal load
/// on top, traction-free bottom.
BoundaryConditions simply_supported_plate(double sigma0, double length);

/// Prescribed displacement on all six faces.
BoundaryConditions all_dirichlet(VectorField displacement);

// ---------------------------------------------------------------------------
// Row blocks

/// Three consecutive rows of the collocation system at one point.
struct RowBlock {
  std::vector<int> basis;    ///< global basis indices of the nonzero functions
  Eigen::MatrixXd coeffs;    ///< 3 x (3 * basis.size()), column 3*local + component
  Vec3 rhs = Vec3::Zero();
};

/// Navier equations sigma_ij,j = -b_i. Needs second derivatives in the table.
RowBlock interior_rows(const BasisTable& table, const ElasticityMatrix& c, const Vec3& body_force);

/// Traction rows sigma(u) n = t.
RowBlock neumann_rows(const BasisTable& table, const ElasticityMatrix& c, const Vec3& normal,
                      const Vec3& traction);

/// Displacement rows u = value.
RowBlock dirichlet_rows(const BasisTable& table, const Vec3& value);

/// Simple support on a lateral face: zero normal traction, zero tangential
/// and transverse displacements.
RowBlock simple_support_rows(const BasisTable& table, const ElasticityMatrix& c, Face face);

/// Rows at a boundary point. Any Dirichlet component wins for that component;
/// remaining components average the traction rows of the adjoining faces.
/// Throws AssemblyError when faces prescribe different Dirichlet values.
RowBlock resolve_boundary_rows(const BasisTable& table, const ElasticityMatrix& c,
                               const CollocationPoint& pt, const BoundaryConditions& bc);

// ---------------------------------------------------------------------------
// System

struct CollocationSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;

  explicit CollocationSystem(int n_points = 0)
      : matrix(Eigen::MatrixXd::Zero(3 * n_points, 3 * n_points)),
        rhs(Eigen::VectorXd::Zero(3 * n_points)) {}

  int size() const { return static_cast<int>(rhs.size()); }
  /// Writes the three rows of collocation point `point`.
  void set_rows(int point, const RowBlock& block);
};

/// Fills the rows of grid points [begin, end); disjoint ranges may run concurrently.
void assemble_rows(CollocationSystem& system, const TensorProductSpace& space,
                   const ElasticityMatrix& c, const BoundaryConditions& bc,
                   const CollocationGrid& grid, int begin, int end);

CollocationSystem assemble(const TensorProductSpace& space, const ElasticityMatrix& c,
                           const BoundaryConditions& bc, const CollocationGrid& grid,
                           unsigned n_threads = 1);

struct DisplacementField {
  TensorProductSpace space;
  Eigen::MatrixXd coeffs;  ///< size() x 3 control coefficients (u, v, w)

  /// Displacement or its derivatives at a physical point, one row per order.
  Eigen::MatrixXd eval(const Vec3& x, std::span<const MultiIndex> orders) const {
    return eval_field(space, coeffs, x, orders);
  }
};

struct SolveResult {
  DisplacementField field;
  double relative_residual = 0.0;
};

/// Dense LU with partial pivoting. Throws SolverError on singular systems.
Eigen::VectorXd solve_dense(const CollocationSystem& system, double* relative_residual = nullptr);

SolveResult solve(const CollocationSystem& system, const TensorProductSpace& space);

/// Voigt stress C : eps(grad u) at a physical point.
Vector6 stress_at(const DisplacementField& field, const ElasticityMatrix& c, const Vec3& x);

// ---------------------------------------------------------------------------
// Plate benchmark

struct PlateProblem {
  TensorProductSpace space;
  ElasticityMatrix cbar;
  double sigma0 = 1.0;       ///< MPa
  double slenderness = 20.0;
  double thickness = 1.0;    ///< mm
  VectorField body_force = [](const Vec3&) { return Vec3::Zero(); };

  double length() const { return slenderness * thickness; }
  BoundaryConditions boundary_conditions() const;
};

/// Box [0, L] x [0, L] x [-t/2, t/2] with open uniform knots.
TensorProductSpace make_plate_space(double length, double thickness, std::array<int, 3> degrees,
                                    int inplane_spans, int thickness_spans);

}  // namespace igalam
