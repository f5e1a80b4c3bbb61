#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "emkit/chains.hpp"
#include "emkit/oracle.hpp"
#include "test_support.hpp"

using namespace emkit;
using Catch::Approx;

TEST_CASE("cluster construction: dimensions, hermiticity, open boundary") {
  const auto model = rice_mele_chain(1.0, 0.5, 0.5);
  const ClusterModel cl = cluster_from_model(model, {10, 1, 1});
  CHECK(cl.hamiltonian.rows() == 20);
  CHECK(cl.electron_count == 10);
  CHECK((cl.hamiltonian - cl.hamiltonian.adjoint()).norm() < 1e-14);
  // 10 intra-cell bonds, 9 inter-cell bonds survive the open boundary
  int nonzero = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = i + 1; j < 20; ++j)
      if (std::abs(cl.hamiltonian(i, j)) > 0) ++nonzero;
  CHECK(nonzero == 19);
  CHECK(cl.positions[0][0] == Approx(0.0));
  CHECK(cl.positions[3][0] == Approx(1.5));  // cell 1, orbital B
}

TEST_CASE("cluster size cap raises SizeError") {
  const auto model = rice_mele_chain(1.0, 0.5, 0.5);
  CHECK_THROWS_AS(cluster_from_model(model, {501, 1, 1}, 1000), SizeError);
  CHECK_THROWS_AS(cluster_from_model(model, {0, 1, 1}), ValidationError);
}

TEST_CASE("molecule dipole is the plain position expectation") {
  const double d = 1.4;
  const auto model = dimer_molecule(d, -1.0);
  const ClusterModel cl = cluster_from_model(model, {1, 1, 1});
  const Vec3 p = cluster_dipole(cl);
  // symmetric bonding state: electron centroid is the box center
  CHECK(p[0] == Approx(-10.0).margin(1e-10));
  CHECK(p[1] == Approx(-10.0).margin(1e-10));
  CHECK(p[2] == Approx(-10.0).margin(1e-10));
}

TEST_CASE("cluster Wannier centers are robust to the edge exclusion choice") {
  const auto model = rice_mele_chain(1.0, 0.5, 0.5);
  const ClusterModel cl = cluster_from_model(model, {200, 1, 1});
  const Vec3 a = cluster_dipole(cl, 1.0, 0.25);
  const Vec3 b = cluster_dipole(cl, 1.0, 0.35);
  CHECK((a - b).norm() < 1e-4);
}

TEST_CASE("cluster occupation bookkeeping is validated") {
  const auto model = rice_mele_chain(1.0, 0.5, 0.5);
  const ClusterModel cl = cluster_from_model(model, {11, 1, 1});
  CHECK_THROWS_AS(cluster_dipole(cl, 2.0), ValidationError);  // 11 not divisible
  CHECK_THROWS_AS(cluster_dipole(cl, 0.5), ValidationError);
  CHECK_THROWS_AS(cluster_dipole(cl, 1.0, 0.25, 100), ValidationError);
}

TEST_CASE("gapless clusters are refused") {
  // the topological SSH open chain carries midgap edge modes
  const auto model = ssh_chain(0.5, 1.0, 1.0, 2);
  const ClusterModel cl = cluster_from_model(model, {60, 1, 1});
  CHECK_THROWS_AS(cluster_dipole(cl, 2.0), GaplessClusterError);
}

TEST_CASE("edge exclusion that removes every center is reported") {
  const auto model = rice_mele_chain(1.0, 0.5, 0.5);
  const ClusterModel cl = cluster_from_model(model, {20, 1, 1});
  CHECK_THROWS_AS(cluster_dipole(cl, 1.0, 0.499999), SizeError);
}

TEST_CASE("cluster transition dipole agrees with the two-level analytic value") {
  const double d = 1.4;
  const auto model = dimer_molecule(d, -1.0);
  const ClusterModel cl = cluster_from_model(model, {1, 1, 1});
  const Vec3c mu = cluster_transition_dipole(cl, 0, 1);
  CHECK(std::abs(mu[0]) == Approx(d / 2.0).margin(1e-10));
  CHECK(std::abs(mu[1]) < 1e-12);
}

TEST_CASE("finite differences: accuracy orders and error estimates") {
  auto fn = [](double x) { return Vec3(std::sin(x), std::exp(x), 0.0); };
  const double x0 = 0.7;
  const Vec3 exact(std::cos(x0), std::exp(x0), 0.0);

  const auto second = finite_difference(fn, x0, 1e-3, 2);
  const auto fourth = finite_difference(fn, x0, 1e-2, 4);
  CHECK((second.value - exact).norm() < 1e-7);
  CHECK((fourth.value - exact).norm() < 1e-9);
  // the Richardson estimate bounds the truncation error to within a factor
  CHECK((second.value - exact).norm() < 10.0 * second.error_estimate + 1e-12);
  CHECK_THROWS_AS(finite_difference(fn, x0, 1e-3, 3), ValidationError);

  double err = 0.0;
  const double ds = finite_difference_scalar(
      [](double x) { return x * x * x; }, 2.0, 1e-4, 2, &err);
  CHECK(ds == Approx(12.0).margin(1e-7));
  CHECK(err >= 0.0);
}

TEST_CASE("cluster oracle tracks ionic charges") {
  // neutral atomic-limit chain: ionic and electronic dipoles cancel
  const auto model = flat_band_chain(0.3, 0.0, 1.0, 1, 1.0);
  const ClusterModel cl = cluster_from_model(model, {60, 1, 1});
  CHECK(cl.ion_dipole_per_cell[0] == Approx(0.3).margin(1e-12));
  CHECK(cluster_dipole(cl).norm() < 1e-8);
}
