#include "igalam/laminate_material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "igalam/errors.hpp"

namespace igalam {

namespace {

bool is_spd(const Matrix6& m) {
  Eigen::LLT<Matrix6> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

EngineeringConstants benchmark_ply_material() {
  EngineeringConstants ec;
  ec.E1 = 25000.0;
  ec.E2 = 1000.0;
  ec.E3 = 1000.0;
  ec.G23 = 200.0;
  ec.G13 = 500.0;
  ec.G12 = 500.0;
  ec.nu23 = 0.25;
  ec.nu13 = 0.25;
  ec.nu12 = 0.25;
  return ec;
}

ElasticityMatrix::ElasticityMatrix(const Matrix6& c) : c_(c) {
  if (!c_.allFinite()) throw MaterialError("elasticity matrix: non-finite entries");
  const double scale = c_.cwiseAbs().maxCoeff();
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (std::abs(c_(i, j) - c_(j, i)) > 1e-12 * scale)
        throw MaterialError("elasticity matrix: not symmetric");
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const bool normal_block = i < 3 && j < 3;
      if (!normal_block && i != j && c_(i, j) != 0.0)
        throw MaterialError("elasticity matrix: violates the orthotropic zero pattern");
    }
  if (!is_spd(c_)) throw MaterialError("elasticity matrix: not positive definite");
}

ElasticityMatrix stiffness_from_engineering(const EngineeringConstants& ec) {
  for (double m : {ec.E1, ec.E2, ec.E3, ec.G23, ec.G13, ec.G12})
    if (!(m > 0.0)) throw MaterialError("engineering constants: moduli must be positive");

  Eigen::Matrix3d s;
  s << 1.0 / ec.E1, -ec.nu12 / ec.E1, -ec.nu13 / ec.E1,
      -ec.nu12 / ec.E1, 1.0 / ec.E2, -ec.nu23 / ec.E2,
      -ec.nu13 / ec.E1, -ec.nu23 / ec.E2, 1.0 / ec.E3;
  Eigen::LLT<Eigen::Matrix3d> llt(s);
  if (llt.info() != Eigen::Success)
    throw MaterialError("engineering constants: compliance is not positive definite");

  Matrix6 c = Matrix6::Zero();
  c.topLeftCorner<3, 3>() = llt.solve(Eigen::Matrix3d::Identity());
  // exact symmetry
  c.topLeftCorner<3, 3>() = 0.5 * (c.topLeftCorner<3, 3>() + c.topLeftCorner<3, 3>().transpose()).eval();
  c(3, 3) = ec.G23;
  c(4, 4) = ec.G13;
  c(5, 5) = ec.G12;
  return ElasticityMatrix(c);
}

ElasticityMatrix rotate_ply_90(const ElasticityMatrix& cm) {
  const Matrix6& c = cm.matrix();
  Matrix6 r = c;
  r(0, 0) = c(1, 1);
  r(1, 1) = c(0, 0);
  r(0, 2) = r(2, 0) = c(1, 2);
  r(1, 2) = r(2, 1) = c(0, 2);
  r(3, 3) = c(4, 4);
  r(4, 4) = c(3, 3);
  return ElasticityMatrix(r);
}

// ---------------------------------------------------------------------------

Layup::Layup(std::vector<Ply> plies) : plies_(std::move(plies)) {
  if (plies_.empty()) throw MaterialError("layup: no plies");
  for (const auto& p : plies_)
    if (!(p.thickness > 0.0)) throw MaterialError("layup: ply thickness must be positive");
}

double Layup::total_thickness() const {
  double h = 0.0;
  for (const auto& p : plies_) h += p.thickness;
  return h;
}

std::vector<double> Layup::volume_fractions() const {
  const double h = total_thickness();
  std::vector<double> v;
  v.reserve(plies_.size());
  for (const auto& p : plies_) v.push_back(p.thickness / h);
  return v;
}

std::vector<ElasticityMatrix> Layup::ply_stiffness() const {
  std::vector<ElasticityMatrix> out;
  out.reserve(plies_.size());
  for (const auto& p : plies_) {
    auto c = stiffness_from_engineering(p.material);
    out.push_back(p.orientation == PlyOrientation::Deg90 ? rotate_ply_90(c) : c);
  }
  return out;
}

bool Layup::is_symmetric() const {
  const auto n = plies_.size();
  for (std::size_t k = 0; k < n / 2; ++k) {
    const Ply& a = plies_[k];
    const Ply& b = plies_[n - 1 - k];
    const auto& ma = a.material;
    const auto& mb = b.material;
    const bool same_material = ma.E1 == mb.E1 && ma.E2 == mb.E2 && ma.E3 == mb.E3 &&
                               ma.G23 == mb.G23 && ma.G13 == mb.G13 && ma.G12 == mb.G12 &&
                               ma.nu23 == mb.nu23 && ma.nu13 == mb.nu13 && ma.nu12 == mb.nu12;
    if (a.thickness != b.thickness || a.orientation != b.orientation || !same_material) return false;
  }
  return true;
}

Layup Layup::flipped() const { return Layup(std::vector<Ply>(plies_.rbegin(), plies_.rend())); }

Layup alternating_cross_ply(int n_plies, double ply_thickness, const EngineeringConstants& material,
                            PlyOrientation bottom) {
  if (n_plies < 1) throw MaterialError("layup: need at least one ply");
  const PlyOrientation other = bottom == PlyOrientation::Deg0 ? PlyOrientation::Deg90 : PlyOrientation::Deg0;
  std::vector<Ply> plies;
  for (int k = 0; k < n_plies; ++k) plies.push_back({ply_thickness, k % 2 == 0 ? bottom : other, material});
  return Layup(std::move(plies));
}

// ---------------------------------------------------------------------------
// Sun & Li effective constants. The correction sums are anchored at the
// bottom ply (k = 1) and run over k >= 2.

ElasticityMatrix homogenize(const Layup& layup) {
  if (!layup.is_symmetric())
    throw HomogenizationError(
        "homogenize: layup is not mirror-symmetric about the mid-plane; a single "
        "homogenized element cannot represent it");

  const auto C = layup.ply_stiffness();
  const auto v = layup.volume_fractions();
  const std::size_t n = C.size();
  // a homogeneous stack is its own average; skip the reciprocal round trips
  if (std::all_of(C.begin(), C.end(), [&](const ElasticityMatrix& c) { return c == C[0]; })) return C[0];

  double inv33 = 0.0;
  for (std::size_t k = 0; k < n; ++k) inv33 += v[k] / C[k](3, 3);
  const double c33 = 1.0 / inv33;

  auto mean = [&](int i, int j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += v[k] * C[k](i, j);
    return s;
  };
  // sum_{k>=2} (first(k) - first_bar) v_k (C_ab^(1) - C_ab^(k)) / C33^(k)
  auto correction = [&](int i1, int j1, double bar, int a, int b) {
    double s = 0.0;
    for (std::size_t k = 1; k < n; ++k)
      s += (C[k](i1, j1) - bar) * v[k] * (C[0](a, b) - C[k](a, b)) / C[k](3, 3);
    return s;
  };

  const double c13 = mean(1, 3) + correction(3, 3, c33, 1, 3);
  const double c23 = mean(2, 3) + correction(3, 3, c33, 2, 3);
  const double c11 = mean(1, 1) + correction(1, 3, c13, 1, 3);
  const double c12 = mean(1, 2) + correction(1, 3, c13, 2, 3);
  const double c22 = mean(2, 2) + correction(2, 3, c23, 2, 3);

  double s44 = 0.0, s55 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double delta_k = C[k](4, 4) * C[k](5, 5);
    s44 += v[k] * C[k](4, 4) / delta_k;
    s55 += v[k] * C[k](5, 5) / delta_k;
  }
  const double delta = s44 * s55;
  const double c44 = s44 / delta;
  const double c55 = s55 / delta;
  const double c66 = mean(6, 6);

  Matrix6 m = Matrix6::Zero();
  m(0, 0) = c11;
  m(0, 1) = m(1, 0) = c12;
  m(0, 2) = m(2, 0) = c13;
  m(1, 1) = c22;
  m(1, 2) = m(2, 1) = c23;
  m(2, 2) = c33;
  m(3, 3) = c44;
  m(4, 4) = c55;
  m(5, 5) = c66;
  try {
    return ElasticityMatrix(m);
  } catch (const MaterialError& e) {
    throw HomogenizationError(std::string("homogenize: ") + e.what());
  }
}

}  // namespace igalam
