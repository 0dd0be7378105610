/**
 * @file pagano_oracle.hpp
 * @brief Exact 3D elasticity reference for a simply supported cross-ply plate
 *        under a single-mode sinusoidal load.
 *
 * With u1 = U(z) cos(a x1) sin(b x2), u2 = V(z) sin(a x1) cos(b x2) and
 * u3 = W(z) sin(a x1) sin(b x2), equilibrium in each orthotropic layer reduces
 * to the linear ODE system D y'' = G y' + K y for y = (U, V, W). Traction
 * amplitudes on z-planes are T = T1 y' + T0 y, giving sigma_13 = T_x cos sin,
 * sigma_23 = T_y sin cos, sigma_33 = T_z sin sin.
 *
 * Two solvers are provided: exact transfer matrices of the first-order form
 * and high-order spline collocation of the second-order form.
 */
#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "igalam/laminate_material.hpp"
#include "igalam/spline_kernel.hpp"

namespace igalam {

using Matrix3 = Eigen::Matrix3d;
using State6 = Eigen::Matrix<double, 6, 1>;
using Matrix6x6 = Eigen::Matrix<double, 6, 6>;

struct ModalOde {
  Matrix3 D;   ///< second-order coefficients, diag(C55, C44, C33)
  Matrix3 G;   ///< first-order coupling
  Matrix3 K;   ///< zero-order terms
  Matrix3 T1;  ///< traction amplitudes, y' part
  Matrix3 T0;  ///< traction amplitudes, y part

  /// ODE residual D y'' - G y' - K y.
  Vec3 residual(const Vec3& y, const Vec3& dy, const Vec3& d2y) const { return D * d2y - G * dy - K * y; }
  /// s' = A s for s = (U, V, W, T_x, T_y, T_z).
  Matrix6x6 first_order() const;
};

ModalOde reduce_to_modal_ode(const ElasticityMatrix& c, double alpha, double beta);

/// Voigt stress amplitudes (without angular factors) from y and y'.
Vector6 modal_stress_amplitudes(const ElasticityMatrix& c, double alpha, double beta,
                                const Vec3& y, const Vec3& dy);

/// Angular factor multiplying each Voigt amplitude at (x1, x2).
Vector6 angular_factors(double alpha, double beta, double x1, double x2);

struct ModalProblem {
  double alpha = 0.0, beta = 0.0;          ///< wave numbers, 1/mm
  std::vector<ElasticityMatrix> layers;    ///< bottom to top, orientation applied
  std::vector<double> interfaces;          ///< layers.size() + 1 heights, mm
  double sigma0 = 1.0;

  int size() const { return static_cast<int>(layers.size()); }
};

/// alpha = beta = pi / (S h); plate centred on z = 0.
ModalProblem make_modal_problem(const Layup& layup, double slenderness, double sigma0);

enum class ModalBackend { Propagation, SplineCollocation };

struct SplineOptions {
  int degree = 8;
  int spans_per_layer = 8;
};

class ModalSolution {
 public:
  struct PropagationData {
    std::vector<Matrix6x6> a;       ///< per-layer first-order matrices
    std::vector<State6> bottom;     ///< state at each layer bottom
  };
  struct SplineData {
    std::vector<KnotVector> knots;           ///< per layer, on [0, 1]
    std::vector<Eigen::MatrixXd> coeffs;     ///< per layer, m x 3
  };

  ModalSolution(ModalProblem problem, ModalBackend backend, std::variant<PropagationData, SplineData> data,
                std::string warning = {});

  const ModalProblem& problem() const { return problem_; }
  ModalBackend backend() const { return backend_; }
  /// Non-empty when the solver fell back to another backend.
  const std::string& warning() const { return warning_; }

  /// Same solution for the load multiplied by `factor`.
  ModalSolution scaled(double factor) const;

  /// Layer holding z; interface heights belong to the upper layer, the top to the last.
  int layer_at(double z) const;
  /// (U, V, W, U', V', W') evaluated with the data of `layer`.
  State6 amplitudes(double z, int layer) const;
  State6 amplitudes(double z) const { return amplitudes(z, layer_at(z)); }
  /// Traction amplitudes (T_x, T_y, T_z) evaluated with the data of `layer`.
  Vec3 traction_amplitudes(double z, int layer) const;
  Vector6 stress_amplitudes(double z, int layer) const;
  Vector6 stress_amplitudes(double z) const { return stress_amplitudes(z, layer_at(z)); }

 private:
  ModalProblem problem_;
  ModalBackend backend_;
  std::variant<PropagationData, SplineData> data_;
  std::string warning_;
  std::vector<ModalOde> odes_;
};

/// Solves the layered problem. The propagation backend falls back to spline
/// collocation (with a warning) when its interface system is ill-conditioned.
ModalSolution solve_modal(const ModalProblem& problem, ModalBackend backend = ModalBackend::Propagation,
                          SplineOptions options = {});

/// Reference Voigt stress at a physical point.
Vector6 reference_stress(const ModalSolution& sol, double x1, double x2, double x3);
/// Reference displacement at a physical point.
Vec3 reference_displacement(const ModalSolution& sol, double x1, double x2, double x3);

}  // namespace igalam
