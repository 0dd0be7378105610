/**
 * @file laminate_material.hpp
 * @brief Orthotropic ply stiffness, 0/90 rotation and symmetric-layup homogenization.
 *
 * Voigt order throughout: 11, 22, 33, 23, 13, 12.
 */
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace igalam {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Voigt slots.
enum Voigt : int { k11 = 0, k22 = 1, k33 = 2, k23 = 3, k13 = 4, k12 = 5 };

struct EngineeringConstants {
  double E1 = 0, E2 = 0, E3 = 0;
  double G23 = 0, G13 = 0, G12 = 0;
  double nu23 = 0, nu13 = 0, nu12 = 0;
};

/// Unidirectional ply data used by the benchmark (values in MPa).
EngineeringConstants benchmark_ply_material();

/// Symmetric positive definite orthotropic stiffness in Voigt form.
class ElasticityMatrix {
 public:
  /// Validates symmetry, the orthotropic zero pattern and positive definiteness.
  explicit ElasticityMatrix(const Matrix6& c);

  const Matrix6& matrix() const { return c_; }
  /// 1-based Voigt entry, `C(1,1)` ... `C(6,6)`.
  double operator()(int i, int j) const { return c_(i - 1, j - 1); }

  bool operator==(const ElasticityMatrix& o) const { return c_ == o.c_; }

 private:
  Matrix6 c_;
};

/// Throws MaterialError when the compliance is singular or not SPD.
ElasticityMatrix stiffness_from_engineering(const EngineeringConstants& ec);

/// In-plane rotation by 90 degrees: swaps the 1 and 2 material axes.
ElasticityMatrix rotate_ply_90(const ElasticityMatrix& c);

enum class PlyOrientation { Deg0, Deg90 };

struct Ply {
  double thickness = 1.0;  ///< mm
  PlyOrientation orientation = PlyOrientation::Deg0;
  EngineeringConstants material;
};

/// Plies ordered bottom to top.
class Layup {
 public:
  explicit Layup(std::vector<Ply> plies);

  const std::vector<Ply>& plies() const { return plies_; }
  int size() const { return static_cast<int>(plies_.size()); }
  double total_thickness() const;
  std::vector<double> volume_fractions() const;
  /// Ply-wise stiffness with orientation applied.
  std::vector<ElasticityMatrix> ply_stiffness() const;
  /// True iff the ply sequence mirrors about the mid-plane.
  bool is_symmetric() const;
  Layup flipped() const;

 private:
  std::vector<Ply> plies_;
};

/// N plies of equal thickness alternating 0/90 upward from `bottom`.
Layup alternating_cross_ply(int n_plies, double ply_thickness, const EngineeringConstants& material,
                            PlyOrientation bottom = PlyOrientation::Deg0);

/// Equivalent single-layer stiffness of a symmetric layup.
/// Throws HomogenizationError for non-symmetric layups or a non-SPD result.
ElasticityMatrix homogenize(const Layup& layup);

}  // namespace igalam
