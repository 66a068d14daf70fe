#include "steering/qcore.hpp"

#include "steering/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace steering {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kStateTol = 1e-12;
constexpr double kPsdTol = 1e-10;

const std::complex<double> kI{0.0, 1.0};

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Eigen::Vector4cd singlet() {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(1) = 1.0 / std::sqrt(2.0);   // |01>
  psi(2) = -1.0 / std::sqrt(2.0);  // |10>
  return psi;
}

void require_settings_count(int m) {
  if (m != 2 && m != 3)
    throw InvalidArgument("settings count must be 2 or 3, got " + std::to_string(m));
}

}  // namespace

void require_unit(const BlochVector& u, const char* what) {
  if (!std::isfinite(u.norm()) || std::abs(u.norm() - 1.0) > kUnitTol)
    throw InvalidArgument(std::string(what) + " must be a unit vector (norm " + std::to_string(u.norm()) + ")");
}

WernerParam::WernerParam(double mu) : mu_(mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidArgument("mixing probability must lie in [0, 1], got " + std::to_string(mu));
}

WernerParam WernerParam::from_fidelity(double fidelity) { return WernerParam((4.0 * fidelity - 1.0) / 3.0); }

DensityMatrix::DensityMatrix(const Matrix4c& rho) : rho_(rho) {
  if (!rho_.allFinite()) throw InvalidArgument("density matrix has non-finite entries");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
    throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - 1.0) > kStateTol) throw InvalidArgument("density matrix trace differs from 1");
  if (eigenvalues().minCoeff() < -kPsdTol) throw InvalidArgument("density matrix has a negative eigenvalue");
}

Eigen::Vector4d DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::singlet_fidelity() const {
  const Eigen::Vector4cd psi = singlet();
  return (psi.adjoint() * rho_ * psi)(0, 0).real();
}

JointTable::JointTable(std::array<std::array<double, 2>, 2> p, int setting) : p_(p), setting_(setting) {
  double total = 0.0;
  for (auto& row : p_) {
    for (double& x : row) {
      if (!std::isfinite(x) || x < -kStateTol || x > 1.0 + kStateTol)
        throw InvalidArgument("joint probability outside [0, 1]: " + std::to_string(x));
      x = std::clamp(x, 0.0, 1.0);
      total += x;
    }
  }
  if (std::abs(total - 1.0) > kStateTol)
    throw InvalidArgument("joint probabilities sum to " + std::to_string(total) + ", expected 1");
}

DensityMatrix werner_state(WernerParam mu) {
  const Eigen::Vector4cd psi = singlet();
  const double m = mu.value();
  Matrix4c rho = m * (psi * psi.adjoint()) + ((1.0 - m) / 4.0) * Matrix4c::Identity();
  return DensityMatrix(rho);
}

Matrix2c bloch_projector(const BlochVector& u, Outcome outcome) {
  require_unit(u);
  Matrix2c sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, -kI, kI, 0;
  sz << 1, 0, 0, -1;
  const double sign = outcome == Outcome::Plus ? 1.0 : -1.0;
  return 0.5 * (Matrix2c::Identity() + sign * (u.x() * sx + u.y() * sy + u.z() * sz));
}

JointTable joint_table_trace(const DensityMatrix& rho, const BlochVector& u, const BlochVector& v, int setting) {
  std::array<std::array<double, 2>, 2> p{};
  for (Outcome a : kOutcomes) {
    const Matrix2c pa = bloch_projector(u, a);
    for (Outcome b : kOutcomes) {
      const Matrix4c op = kron(pa, bloch_projector(v, b));
      p[JointTable::index(a)][JointTable::index(b)] = (op * rho.matrix()).trace().real();
    }
  }
  return JointTable(p, setting);
}

JointTable joint_table_closed(WernerParam mu, const BlochVector& u, const BlochVector& v, int setting) {
  require_unit(u);
  require_unit(v);
  const double overlap = mu.value() * u.dot(v);
  std::array<std::array<double, 2>, 2> p{};
  for (Outcome a : kOutcomes)
    for (Outcome b : kOutcomes) {
      const double ab = static_cast<int>(a) * static_cast<int>(b);
      p[JointTable::index(a)][JointTable::index(b)] = (1.0 - ab * overlap) / 4.0;
    }
  return JointTable(p, setting);
}

MeasurementSettings mub_settings(int m, double alpha_deg, double phi_deg) {
  require_settings_count(m);
  const double a = deg_to_rad(alpha_deg);
  const double f = deg_to_rad(phi_deg);
  const BlochVector x = BlochVector::unit_x(), y = BlochVector::unit_y(), z = BlochVector::unit_z();

  // Tilted in-plane axis; the plane rotates about z.
  const BlochVector x_tilt = std::cos(f) * x + std::sin(f) * y;
  const BlochVector first = std::cos(a) * z + std::sin(a) * x_tilt;
  const BlochVector last = -std::sin(a) * z + std::cos(a) * x_tilt;

  MeasurementSettings s;
  if (m == 2) {
    s.alice = {first, last};
    s.bob = {z, x};
  } else {
    const BlochVector middle = std::cos(f) * y - std::sin(f) * x;
    s.alice = {first, middle, last};
    s.bob = {z, y, x};
  }
  return s;
}

MeasurementSettings nom_settings(int m) {
  require_settings_count(m);
  const double r3 = std::sqrt(3.0);
  const BlochVector u1{0.0, 0.0, 1.0};
  const BlochVector u2{r3 / 2.0, 0.0, 0.5};
  const BlochVector u3{1.0 / (2.0 * r3), std::sqrt(2.0 / 3.0), 0.5};

  MeasurementSettings s;
  if (m == 2) {
    s.alice = {u1, u2};
    s.bob = {BlochVector::unit_z(), BlochVector::unit_x()};
  } else {
    s.alice = {u1, u2, u3};
    s.bob = {BlochVector::unit_z(), BlochVector::unit_x(), BlochVector::unit_y()};
  }
  return s;
}

Eigen::MatrixXd correlation_matrix(const DensityMatrix& rho, const MeasurementSettings& s) {
  if (s.alice.size() != s.bob.size()) throw InvalidArgument("Alice and Bob need the same number of settings");
  const auto n = static_cast<Eigen::Index>(s.alice.size());
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y) e(x, y) = joint_table_trace(rho, s.alice[x], s.bob[y]).correlation();
  return e;
}

Eigen::MatrixXd correlation_matrix(WernerParam mu, const MeasurementSettings& s) {
  if (s.alice.size() != s.bob.size()) throw InvalidArgument("Alice and Bob need the same number of settings");
  const auto n = static_cast<Eigen::Index>(s.alice.size());
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y) {
      require_unit(s.alice[x]);
      require_unit(s.bob[y]);
      e(x, y) = -mu.value() * s.alice[x].dot(s.bob[y]);
    }
  return e;
}

}  // namespace steering
