#include <doctest.h>

#include "oracle.hpp"
#include "steering/error.hpp"
#include "steering/qcore.hpp"

#include <random>

using namespace steering;
using doctest::Approx;

namespace {

BlochVector to_bloch(const oracle::Vec3& v) { return {v[0], v[1], v[2]}; }

oracle::Vec3 random_direction(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  oracle::Vec3 v{n(gen), n(gen), n(gen)};
  const double len = std::sqrt(oracle::dot(v, v));
  for (double& x : v) x /= len;
  return v;
}

void check_vec(const BlochVector& v, double x, double y, double z, double tol = 1e-12) {
  CHECK(std::abs(v.x() - x) <= tol);
  CHECK(std::abs(v.y() - y) <= tol);
  CHECK(std::abs(v.z() - z) <= tol);
}

}  // namespace

TEST_CASE("werner state at the ends of the mixing range") {
  const DensityMatrix noise = werner_state(WernerParam(0.0));
  CHECK((noise.matrix() - Matrix4c::Identity() / 4.0).norm() < 1e-15);

  const DensityMatrix singlet = werner_state(WernerParam(1.0));
  CHECK(singlet.purity() == Approx(1.0).epsilon(1e-12));
  CHECK(singlet.singlet_fidelity() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("werner spectrum matches the plain-array density matrix") {
  const Eigen::Vector4d ev = werner_state(WernerParam(0.5)).eigenvalues();
  std::vector<double> sorted(ev.data(), ev.data() + 4);
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted[0] == Approx(0.125).epsilon(1e-12));
  CHECK(sorted[1] == Approx(0.125).epsilon(1e-12));
  CHECK(sorted[2] == Approx(0.125).epsilon(1e-12));
  CHECK(sorted[3] == Approx(0.625).epsilon(1e-12));

  for (double mu : {0.0, 0.2, 0.37, 0.8, 1.0}) {
    const auto ref = oracle::werner(mu);
    const Matrix4c& rho = werner_state(WernerParam(mu)).matrix();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(std::abs(rho(i, j) - ref[i][j]) < 1e-15);
  }
}

TEST_CASE("singlet fidelity is (1 + 3 mu) / 4") {
  for (int k = 0; k <= 20; ++k) {
    const double mu = k / 20.0;
    CHECK(std::abs(werner_state(WernerParam(mu)).singlet_fidelity() - (1.0 + 3.0 * mu) / 4.0) < 1e-12);
  }
}

TEST_CASE("fidelity conversion") {
  CHECK(WernerParam::from_fidelity(0.98).value() == Approx(0.973333333333).epsilon(1e-12));
  CHECK(WernerParam::from_fidelity(0.972).value() == Approx(0.962666666667).epsilon(1e-12));
  CHECK_THROWS_AS(WernerParam::from_fidelity(0.1), InvalidArgument);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(WernerParam(1.0000001), InvalidArgument);
  CHECK_THROWS_AS(WernerParam(-0.1), InvalidArgument);
  CHECK_THROWS_AS(WernerParam(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(require_unit(BlochVector{1.0, 1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(bloch_projector(BlochVector{0.0, 0.0, 0.9}, Outcome::Plus), InvalidArgument);
  CHECK_THROWS_AS(JointTable({{{0.5, 0.5}, {0.5, 0.0}}}), InvalidArgument);
  CHECK_THROWS_AS(JointTable({{{1.1, -0.1}, {0.0, 0.0}}}), InvalidArgument);
  CHECK_THROWS_AS(mub_settings(4, 0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(nom_settings(1), InvalidArgument);

  Matrix4c bad = Matrix4c::Identity() / 4.0;
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{bad}, InvalidArgument);
  Matrix4c negative = Matrix4c::Zero();
  negative.diagonal() << 0.6, 0.6, -0.1, -0.1;
  CHECK_THROWS_AS(DensityMatrix{negative}, InvalidArgument);
}

TEST_CASE("bloch projectors") {
  const std::complex<double> i{0, 1};
  const Matrix2c pz = bloch_projector(BlochVector::unit_z(), Outcome::Plus);
  Matrix2c expect;
  expect << 1, 0, 0, 0;
  CHECK((pz - expect).norm() < 1e-15);

  expect << 0.5, 0.5, 0.5, 0.5;
  CHECK((bloch_projector(BlochVector::unit_x(), Outcome::Plus) - expect).norm() < 1e-15);

  expect << 0.5, 0.5 * i, -0.5 * i, 0.5;
  CHECK((bloch_projector(BlochVector::unit_y(), Outcome::Minus) - expect).norm() < 1e-15);
}

TEST_CASE("joint tables: worked values") {
  const auto z = BlochVector::unit_z();
  const JointTable t1 = joint_table_trace(werner_state(WernerParam(1.0)), z, z);
  CHECK(std::abs(t1.p(Outcome::Plus, Outcome::Plus)) < 1e-15);
  CHECK(t1.p(Outcome::Plus, Outcome::Minus) == Approx(0.5).epsilon(1e-15));
  CHECK(t1.p(Outcome::Minus, Outcome::Plus) == Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(t1.p(Outcome::Minus, Outcome::Minus)) < 1e-15);

  const JointTable t0 = joint_table_trace(werner_state(WernerParam(0.0)), z, BlochVector::unit_x());
  for (Outcome a : kOutcomes)
    for (Outcome b : kOutcomes) CHECK(t0.p(a, b) == Approx(0.25).epsilon(1e-15));

  const JointTable th = joint_table_trace(werner_state(WernerParam(0.5)), z, z);
  CHECK(th.p(Outcome::Plus, Outcome::Plus) == Approx(0.125).epsilon(1e-14));
  CHECK(th.p(Outcome::Plus, Outcome::Minus) == Approx(0.375).epsilon(1e-14));

  const JointTable aligned = joint_table_closed(WernerParam(1.0), z, z);
  CHECK(aligned.p(Outcome::Plus, Outcome::Plus) == 0.0);
  CHECK(aligned.p(Outcome::Plus, Outcome::Minus) == 0.5);
  const JointTable orth = joint_table_closed(WernerParam(1.0), z, BlochVector::unit_x());
  for (Outcome a : kOutcomes)
    for (Outcome b : kOutcomes) CHECK(orth.p(a, b) == Approx(0.25).epsilon(1e-15));

  const JointTable nominal = joint_table_closed(WernerParam(0.963), z, z);
  CHECK(nominal.p(Outcome::Plus, Outcome::Minus) == Approx(0.49075).epsilon(1e-14));
}

TEST_CASE("trace path, closed form and oracle agree on random directions") {
  std::mt19937_64 gen(20241);
  for (int k = 0; k <= 10; ++k) {
    const double mu = k / 10.0;
    const WernerParam w(mu);
    const DensityMatrix rho = werner_state(w);
    for (int n = 0; n < 100; ++n) {
      const auto u = random_direction(gen), v = random_direction(gen);
      const JointTable tr = joint_table_trace(rho, to_bloch(u), to_bloch(v));
      const JointTable cl = joint_table_closed(w, to_bloch(u), to_bloch(v));
      const auto ref = oracle::table(mu, u, v);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          CHECK(std::abs(tr.entries()[a][b] - cl.entries()[a][b]) <= 1e-12);
          CHECK(std::abs(tr.entries()[a][b] - ref[a][b]) <= 1e-12);
        }
      for (Outcome o : kOutcomes) {
        CHECK(std::abs(tr.alice_marginal(o) - 0.5) <= 1e-12);
        CHECK(std::abs(tr.bob_marginal(o) - 0.5) <= 1e-12);
      }
      CHECK(std::abs(cl.correlation() + mu * oracle::dot(u, v)) <= 1e-12);
    }
  }
}

TEST_CASE("mub settings: worked geometry") {
  const auto aligned = mub_settings(2, 0.0, 0.0);
  check_vec(aligned.alice[0], 0, 0, 1);
  check_vec(aligned.alice[1], 1, 0, 0);
  check_vec(aligned.bob[0], 0, 0, 1);
  check_vec(aligned.bob[1], 1, 0, 0);

  const auto quarter = mub_settings(2, 90.0, 0.0);
  check_vec(quarter.alice[0], 1, 0, 0);
  check_vec(quarter.alice[1], 0, 0, -1);

  const auto tilted = mub_settings(3, 0.0, 30.0);
  check_vec(tilted.alice[1], -0.5, std::sqrt(3.0) / 2.0, 0);
  check_vec(tilted.bob[1], 0, 1, 0);
}

TEST_CASE("mub settings: orthogonality and overlaps") {
  for (double alpha = -90.0; alpha <= 90.0; alpha += 7.5)
    for (double phi = -90.0; phi <= 90.0; phi += 15.0)
      for (int m : {2, 3}) {
        const auto s = mub_settings(m, alpha, phi);
        const auto ref = oracle::mub(m, alpha, phi);
        for (int i = 0; i < m; ++i) {
          CHECK(std::abs(s.alice[i].norm() - 1.0) < 1e-12);
          for (int j = i + 1; j < m; ++j) {
            CHECK(std::abs(s.alice[i].dot(s.alice[j])) < 1e-12);
            CHECK(std::abs(s.bob[i].dot(s.bob[j])) < 1e-12);
          }
          for (int c = 0; c < 3; ++c) CHECK(std::abs(s.alice[i].vec()[c] - ref.alice[i][c]) < 1e-12);
        }
        const double ca = std::cos(deg_to_rad(alpha)), cp = std::cos(deg_to_rad(phi));
        CHECK(std::abs(s.alice[0].dot(s.bob[0]) - ca) < 1e-12);
        CHECK(std::abs(s.alice[m - 1].dot(s.bob[m - 1]) - cp * ca) < 1e-12);
        if (m == 3) CHECK(std::abs(s.alice[1].dot(s.bob[1]) - cp) < 1e-12);
      }
}

TEST_CASE("nom settings") {
  const auto two = nom_settings(2);
  CHECK(two.alice[1].dot(two.alice[0]) == Approx(0.5).epsilon(1e-15));
  const auto three = nom_settings(3);
  CHECK(three.alice[2].dot(three.alice[0]) == Approx(0.5).epsilon(1e-15));
  for (const auto& u : three.alice) CHECK(std::abs(u.norm() - 1.0) < 1e-15);
  const auto ref = oracle::nom(3);
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(three.alice[i].vec()[c] - ref.alice[i][c]) < 1e-15);
      CHECK(std::abs(three.bob[i].vec()[c] - ref.bob[i][c]) < 1e-15);
    }
}

TEST_CASE("correlation matrices") {
  const auto aligned = mub_settings(3, 0.0, 0.0);
  const Eigen::MatrixXd e1 = correlation_matrix(werner_state(WernerParam(1.0)), aligned);
  CHECK((e1 + Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(correlation_matrix(WernerParam(0.0), aligned).norm() == 0.0);

  const Eigen::MatrixXd nom = correlation_matrix(WernerParam(0.963), nom_settings(2));
  CHECK(nom(0, 0) == Approx(-0.963).epsilon(1e-14));
  CHECK(nom(1, 1) == Approx(-0.963 * std::sqrt(3.0) / 2.0).epsilon(1e-14));

  for (double mu : {0.1, 0.55, 0.97}) {
    const auto s = mub_settings(3, 23.0, 41.0);
    const Eigen::MatrixXd tr = correlation_matrix(werner_state(WernerParam(mu)), s);
    const Eigen::MatrixXd cl = correlation_matrix(WernerParam(mu), s);
    CHECK((tr - cl).cwiseAbs().maxCoeff() < 1e-12);
  }
}
