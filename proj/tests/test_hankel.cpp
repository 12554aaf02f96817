#include <catch2/catch.hpp>

#include <algorithm>
#include <complex>

#include <obhmc/hankel.hpp>
#include <obhmc/rng.hpp>

using namespace obhmc;
using Catch::Detail::Approx;

namespace {

Snapshot random_snapshot(Eigen::Index m, std::uint64_t seed) {
  Rng rng(seed);
  Snapshot s;
  s.values.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) s.values(k) = {rng.gaussian(), rng.gaussian()};
  s.mask.assign(static_cast<std::size_t>(m), true);
  return s;
}

}  // namespace

TEST_CASE("hankel dimensions follow the near-square rule") {
  REQUIRE(hankel_dims(7).n1 == 4);
  REQUIRE(hankel_dims(7).n2 == 4);
  REQUIRE(hankel_dims(152).n1 == 76);
  REQUIRE(hankel_dims(152).n2 == 77);
  REQUIRE(hankel_dims(1).n1 == 1);
  REQUIRE(hankel_dims(1).n2 == 1);
  for (Eigen::Index m = 1; m <= 60; ++m) {
    const HankelDims d = hankel_dims(m);
    REQUIRE(d.n1 + d.n2 == m + 1);
    REQUIRE(std::abs(d.n1 - d.n2) <= 1);
  }
  REQUIRE_THROWS_AS(hankel_dims(0), std::domain_error);
}

TEST_CASE("build_hankel lifts along anti-diagonals") {
  Snapshot x;
  x.values.resize(3);
  x.values << 1.0, 2.0, 3.0;
  x.mask = {true, true, true};
  const HankelLift lift = build_hankel(x);
  REQUIRE(lift.matrix.rows() == 2);
  REQUIRE(lift.matrix.cols() == 2);
  REQUIRE(lift.matrix(0, 0) == std::complex<double>(1, 0));
  REQUIRE(lift.matrix(0, 1) == std::complex<double>(2, 0));
  REQUIRE(lift.matrix(1, 0) == std::complex<double>(2, 0));
  REQUIRE(lift.matrix(1, 1) == std::complex<double>(3, 0));
  REQUIRE(lift.omega.count() == 4);
}

TEST_CASE("mask propagates to the observation set by the anti-diagonal rule") {
  Snapshot x;
  x.values.resize(3);
  x.values << std::complex<double>(5, 1), 0.0, std::complex<double>(0, 7);
  x.mask = {true, false, true};
  const HankelLift lift = build_hankel(x);
  REQUIRE(lift.omega.count() == 2);
  REQUIRE(lift.omega.indices[0] == std::make_pair<Eigen::Index, Eigen::Index>(0, 0));
  REQUIRE(lift.omega.indices[1] == std::make_pair<Eigen::Index, Eigen::Index>(1, 1));
  REQUIRE(lift.matrix(0, 1) == std::complex<double>(0, 0));
  REQUIRE(lift.matrix(1, 0) == std::complex<double>(0, 0));
}

TEST_CASE("reference geometry observation count") {
  const ArrayGeometry g =
      virtual_array({1, 19, 37, 55, 79, 91}, {12, 22, 25, 39, 58, 62, 70, 73});
  TargetScene two{{{-57.0, 1.0, 0.0}, {-34.0, 1.0, 0.0}}, 0.5};
  const Snapshot x = apply_mask(synthesize_snapshot(two, g.grid_size, 0.0, 0), g);
  const HankelLift lift = build_hankel(x);

  // independent enumeration of anti-diagonal lengths
  const Eigen::Index n1 = lift.omega.n1, n2 = lift.omega.n2;
  Eigen::Index expected = 0;
  for (int k : g.virtual_positions)
    expected += std::min({static_cast<Eigen::Index>(k) + 1, n1, n2,
                          static_cast<Eigen::Index>(g.grid_size - k)});
  REQUIRE(lift.omega.count() == expected);
  REQUIRE(lift.omega.count() == 1943);
}

TEST_CASE("omega count equals the anti-diagonal length sum for random masks") {
  Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index m = 17 + static_cast<Eigen::Index>(rng.below(40));
    Snapshot x = random_snapshot(m, 100 + rep);
    for (Eigen::Index k = 0; k < m; ++k)
      if (rng.unit() < 0.4) {
        x.mask[static_cast<std::size_t>(k)] = false;
        x.values(k) = 0.0;
      }
    const HankelLift lift = build_hankel(x);
    const Eigen::Index n1 = lift.omega.n1, n2 = lift.omega.n2;
    Eigen::Index expected = 0;
    for (Eigen::Index k = 0; k < m; ++k)
      if (x.mask[static_cast<std::size_t>(k)])
        expected += std::min({k + 1, n1, n2, m - k});
    REQUIRE(lift.omega.count() == expected);
  }
}

TEST_CASE("build_hankel is linear") {
  const Snapshot a = random_snapshot(21, 3);
  const Snapshot b = random_snapshot(21, 4);
  Snapshot sum;
  sum.values = a.values + b.values;
  sum.mask = a.mask;
  const Eigen::MatrixXcd ha = build_hankel(a).matrix;
  const Eigen::MatrixXcd hb = build_hankel(b).matrix;
  const Eigen::MatrixXcd hsum = build_hankel(sum).matrix;
  REQUIRE(hsum == ha + hb);
}

TEST_CASE("dehankel averages anti-diagonals") {
  Eigen::MatrixXcd h(2, 2);
  h << 1.0, 2.0, 2.0, 3.0;
  const Eigen::VectorXcd x = dehankel(h);
  REQUIRE(x(0) == std::complex<double>(1, 0));
  REQUIRE(x(1) == std::complex<double>(2, 0));
  REQUIRE(x(2) == std::complex<double>(3, 0));

  Eigen::MatrixXcd g(2, 2);
  g << 0.0, 4.0, 0.0, 3.0;
  const Eigen::VectorXcd y = dehankel(g);
  REQUIRE(y(0) == std::complex<double>(0, 0));
  REQUIRE(y(1) == std::complex<double>(2, 0));
  REQUIRE(y(2) == std::complex<double>(3, 0));
}

TEST_CASE("dehankel inverts the lift to machine precision") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Snapshot x = random_snapshot(33, seed);
    const Eigen::VectorXcd back = dehankel(build_hankel(x).matrix);
    REQUIRE((back - x.values).norm() / x.values.norm() < 1e-14);
  }
}

TEST_CASE("square truncation override") {
  const Snapshot x = random_snapshot(10, 5);
  const HankelLift square = build_hankel(x, {5, 5});
  REQUIRE(square.matrix.rows() == 5);
  REQUIRE(square.matrix.cols() == 5);
  REQUIRE(square.matrix(4, 4) == x.values(8));  // last element unused
  REQUIRE_THROWS_AS(build_hankel(x, {6, 6}), std::domain_error);
}

TEST_CASE("noiseless target scenes have Vandermonde rank P") {
  const RankCheck one = verify_vandermonde_rank(TargetScene{{{23.0, 1.0, 0.0}}, 0.5}, 8);
  REQUIRE(one.numerical_rank == 1);

  TargetScene two{{{-57.0, 1.0, 0.0}, {-34.0, 1.0, 0.0}}, 0.5};
  const RankCheck rc = verify_vandermonde_rank(two, 152);
  REQUIRE(rc.numerical_rank == 2);
  REQUIRE(rc.singular_values(2) / rc.singular_values(0) < 1e-10);
}

TEST_CASE("verify_vandermonde_rank rejects oversized scenes") {
  TargetScene five;
  for (int k = 0; k < 5; ++k) five.targets.push_back({-40.0 + 15.0 * k, 1.0, 0.0});
  REQUIRE_THROWS_AS(verify_vandermonde_rank(five, 7), std::domain_error);
  TargetScene dup{{{10.0, 1.0, 0.0}, {10.0, 1.0, 0.0}}, 0.5};
  REQUIRE_THROWS_AS(verify_vandermonde_rank(dup, 31), std::domain_error);
}
