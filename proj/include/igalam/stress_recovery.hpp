/**
 * @file stress_recovery.hpp
 * @brief Out-of-plane stresses from through-thickness integration of equilibrium.
 *
 * In-plane stress divergence follows from second (and for sigma_33, third)
 * displacement derivatives and a stiffness that is constant inside each
 * integration segment:
 *
 *   sigma_13(x3) = -int_{bottom}^{x3} (sigma_11,1 + sigma_12,2 + b_1) dz
 *   sigma_23(x3) = -int_{bottom}^{x3} (sigma_12,1 + sigma_22,2 + b_2) dz
 *   sigma_33(x3) = -int_{bottom}^{x3} (sigma_13,1 + sigma_23,2 + b_3) dz
 *
 * where sigma_13,1 is itself a cumulative integral of sigma_11,11 + sigma_12,21.
 * Integration constants are the bottom-surface tractions, zero for a
 * traction-free bottom.
 *
 * The stiffness may be the homogenized one (uniform) or the ply stiffness
 * of whichever layer contains the height (ply-wise).
 */
#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "igalam/collocation_solver.hpp"
#include "igalam/laminate_material.hpp"

namespace igalam {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Integration constant for sigma_33. Bottom takes the bottom traction. Balanced
/// then shifts the whole profile by half of the mismatch with the prescribed
/// top traction, splitting the defect between the two surfaces.
enum class Sigma33Anchor { Bottom, Balanced };

/// Piecewise-constant stiffness through the thickness.
class StiffnessProfile {
 public:
  /// `interfaces` holds layers.size() + 1 increasing heights.
  StiffnessProfile(std::vector<double> interfaces, std::vector<ElasticityMatrix> layers);

  static StiffnessProfile uniform(const ElasticityMatrix& c, double bottom, double top);
  /// Ply stiffness of `layup` stacked upward from `bottom`.
  static StiffnessProfile plywise(const Layup& layup, double bottom);

  const std::vector<double>& interfaces() const { return interfaces_; }
  const std::vector<ElasticityMatrix>& layers() const { return layers_; }
  /// Layer containing z. An interface belongs to the layer above it, the top
  /// surface to the top layer.
  int layer_at(double z) const;
  const ElasticityMatrix& at(double z) const { return layers_[static_cast<std::size_t>(layer_at(z))]; }

 private:
  std::vector<double> interfaces_;
  std::vector<ElasticityMatrix> layers_;
};

struct RecoveryPlan {
  double x1 = 0.0, x2 = 0.0;        ///< in-plane station, mm
  /// Union of thickness knot-span boundaries and stiffness interfaces, bottom
  /// to top, mm. The integrands are polynomial between consecutive breaks.
  std::vector<double> breaks;
  GaussRule rule;                   ///< per-segment rule
  StiffnessProfile stiffness;
  /// (sigma_13, sigma_23, sigma_33) at the bottom of the station. Treated as
  /// locally constant in-plane when integrating sigma_33.
  Vec3 bottom_traction = Vec3::Zero();
  /// Prescribed (sigma_13, sigma_23, sigma_33) at the top; used by Balanced.
  Vec3 top_traction = Vec3::Zero();
  Sigma33Anchor sigma33_anchor = Sigma33Anchor::Bottom;
  VectorField body_force = [](const Vec3&) { return Vec3::Zero(); };
  /// b_1,1 + b_2,2, needed for sigma_33.
  std::function<double(const Vec3&)> body_force_inplane_div = [](const Vec3&) { return 0.0; };

  double bottom() const { return breaks.front(); }
  double top() const { return breaks.back(); }
};

/// Plan with `points_per_span` Gauss points per segment (0 picks r + 2).
/// The stiffness profile must span the plate thickness.
RecoveryPlan make_recovery_plan(const DisplacementField& field, StiffnessProfile stiffness, double x1,
                                double x2, int points_per_span = 0);
/// Uniform-stiffness plan.
RecoveryPlan make_recovery_plan(const DisplacementField& field, const ElasticityMatrix& c, double x1,
                                double x2, int points_per_span = 0);

/// (sigma_11,1 + sigma_12,2 + b_1, sigma_12,1 + sigma_22,2 + b_2) at (x1, x2, zeta)
/// using the stiffness `c`.
Eigen::Vector2d shear_integrand(const DisplacementField& field, const ElasticityMatrix& c,
                                const RecoveryPlan& plan, double zeta);

/// Recovered (sigma_13, sigma_23) at height x3.
Eigen::Vector2d recover_shear(const DisplacementField& field, const RecoveryPlan& plan, double x3);

/// Recovered sigma_33 at height x3. Throws RecoveryError when the in-plane
/// basis is less than C^3 or the thickness basis less than C^2.
double recover_sigma33(const DisplacementField& field, const RecoveryPlan& plan, double x3);

/// Normalized Voigt stress: in-plane / (sigma0 S^2), transverse shear / (sigma0 S),
/// sigma_33 / sigma0.
Vector6 normalize_stress(const Vector6& s, double sigma0, double slenderness);

struct StressProfile {
  std::vector<double> x3;       ///< sample heights, mm
  Eigen::MatrixXd raw;          ///< n x 6 stresses from the displacement gradient (Voigt)
  Eigen::MatrixXd recovered;    ///< n x 3: sigma_13, sigma_23, sigma_33
  double sigma0 = 1.0;
  double slenderness = 1.0;

  Eigen::MatrixXd raw_normalized() const;
  Eigen::MatrixXd recovered_normalized() const;
};

/// Uniform sampling from bottom to top, both surfaces included. Raw stresses
/// use the plan's stiffness at each height.
StressProfile profile(const DisplacementField& field, const RecoveryPlan& plan, int n_samples,
                      double sigma0, double slenderness);

}  // namespace igalam
