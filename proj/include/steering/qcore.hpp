#pragma once

// Two-qubit Werner states, projective qubit measurements and the joint
// outcome tables they produce.
//
// Conventions: computational basis is the sigma_z eigenbasis, the first
// tensor factor belongs to Alice, and the singlet is (|01> - |10>)/sqrt(2),
// so <u.sigma (x) v.sigma> = -u.v on the singlet.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace steering {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Real 3-vector on or inside the unit ball.
class BlochVector {
 public:
  BlochVector() = default;
  BlochVector(double x, double y, double z) : v_(x, y, z) {}
  explicit BlochVector(const Eigen::Vector3d& v) : v_(v) {}

  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  const Eigen::Vector3d& vec() const { return v_; }

  double dot(const BlochVector& o) const { return v_.dot(o.v_); }
  BlochVector cross(const BlochVector& o) const { return BlochVector(v_.cross(o.v_)); }
  double norm() const { return v_.norm(); }
  BlochVector normalized() const { return BlochVector(v_.normalized()); }

  friend BlochVector operator+(const BlochVector& a, const BlochVector& b) { return BlochVector(a.v_ + b.v_); }
  friend BlochVector operator-(const BlochVector& a, const BlochVector& b) { return BlochVector(a.v_ - b.v_); }
  friend BlochVector operator*(double s, const BlochVector& a) { return BlochVector(s * a.v_); }
  BlochVector operator-() const { return BlochVector(-v_); }

  static BlochVector unit_x() { return {1, 0, 0}; }
  static BlochVector unit_y() { return {0, 1, 0}; }
  static BlochVector unit_z() { return {0, 0, 1}; }

 private:
  Eigen::Vector3d v_ = Eigen::Vector3d::Zero();
};

/// Throws InvalidArgument unless |u| = 1 within 1e-12.
void require_unit(const BlochVector& u, const char* what = "measurement direction");

/// Mixing probability of a Werner state, validated to [0, 1].
class WernerParam {
 public:
  explicit WernerParam(double mu);
  double value() const { return mu_; }

  /// mu = (4F - 1)/3 for singlet fidelity F.
  static WernerParam from_fidelity(double fidelity);

 private:
  double mu_;
};

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

/// Validated two-qubit density matrix: Hermitian and unit trace to 1e-12,
/// eigenvalues >= -1e-10.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix4c& rho);

  const Matrix4c& matrix() const { return rho_; }
  Eigen::Vector4d eigenvalues() const;
  double purity() const;
  double singlet_fidelity() const;

 private:
  Matrix4c rho_;
};

enum class Outcome : int { Plus = +1, Minus = -1 };

inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::Plus, Outcome::Minus};

/// Per-setting 2x2 outcome table p(a, b), a for Alice and b for Bob.
class JointTable {
 public:
  /// Rows are Alice's outcome (+1, -1), columns Bob's (+1, -1). Entries are
  /// checked to lie in [0, 1] and sum to 1 within 1e-12; round-off negatives
  /// above -1e-12 are clamped to zero.
  JointTable(std::array<std::array<double, 2>, 2> p, int setting = 1);

  int setting() const { return setting_; }
  double p(Outcome a, Outcome b) const { return p_[index(a)][index(b)]; }
  double alice_marginal(Outcome a) const { return p_[index(a)][0] + p_[index(a)][1]; }
  double bob_marginal(Outcome b) const { return p_[0][index(b)] + p_[1][index(b)]; }

  /// sum_ab a*b*p(a,b)
  double correlation() const { return p_[0][0] - p_[0][1] - p_[1][0] + p_[1][1]; }
  const std::array<std::array<double, 2>, 2>& entries() const { return p_; }

  static std::size_t index(Outcome o) { return o == Outcome::Plus ? 0 : 1; }

 private:
  std::array<std::array<double, 2>, 2> p_;
  int setting_;
};

/// Ordered measurement directions for both parties; index i of Alice pairs
/// with index i of Bob.
struct MeasurementSettings {
  std::vector<BlochVector> alice;
  std::vector<BlochVector> bob;

  std::size_t size() const { return alice.size(); }
};

/// mu |psi_s><psi_s| + (1 - mu)/4 I
DensityMatrix werner_state(WernerParam mu);

/// (I + o u.sigma)/2 for outcome o; u must be a unit vector.
Matrix2c bloch_projector(const BlochVector& u, Outcome outcome);

/// Born-rule table tr[(P_a(u) (x) P_b(v)) rho].
JointTable joint_table_trace(const DensityMatrix& rho, const BlochVector& u, const BlochVector& v,
                             int setting = 1);

/// Werner closed form p(a,b) = (1 - a b mu u.v)/4.
JointTable joint_table_closed(WernerParam mu, const BlochVector& u, const BlochVector& v, int setting = 1);

/// Mutually unbiased settings with Alice rotated in-plane by alpha and her
/// plane tilted by phi (both in degrees). Bob: (z, x) for m=2, (z, y, x) for m=3.
MeasurementSettings mub_settings(int m, double alpha_deg, double phi_deg);

/// Fixed non-orthogonal settings for Alice: u1=(0,0,1), u2=(sqrt3/2,0,1/2),
/// u3=(1/(2 sqrt3), sqrt(2/3), 1/2). Bob's orthogonal axes are ordered
/// (z, x) or (z, x, y) so that u_i pairs with the axis it overlaps.
MeasurementSettings nom_settings(int m);

/// E_xy = sum_ab a b p(a,b|x,y) for every pair of Alice setting x and Bob
/// setting y, evaluated through the trace path.
Eigen::MatrixXd correlation_matrix(const DensityMatrix& rho, const MeasurementSettings& s);

/// Same, from the Werner closed form -mu u_x.v_y.
Eigen::MatrixXd correlation_matrix(WernerParam mu, const MeasurementSettings& s);

}  // namespace steering
