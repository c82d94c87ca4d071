#include <doctest.h>

#include "topoflow/objective.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace topoflow;

namespace {

const WarnFn quiet = [](const std::string&) {};

VectorFieldP2 constant_field(const P2DofMap& dm, double x, double y) {
  return {{Eigen::VectorXd::Constant(dm.n_scalar_dofs(), x)},
          {Eigen::VectorXd::Constant(dm.n_scalar_dofs(), y)}};
}

ElementwiseField random_chi(const TriMesh& mesh, std::mt19937& rng) {
  std::bernoulli_distribution coin(0.5);
  ElementwiseField chi{Eigen::VectorXd::Zero(mesh.num_triangles())};
  for (int e = 0; e < mesh.num_triangles(); ++e) chi.values[e] = coin(rng) ? 1.0 : 0.0;
  return chi;
}

}  // namespace

TEST_CASE("objective values for constant fields") {
  const TriMesh mesh = build_unit_square_mesh(6, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  const double u_t = 0.1;

  CHECK(evaluate_objective(mesh, dm, constant_field(dm, 0.0, 0.0), u_t) ==
        doctest::Approx(0.01).epsilon(1e-12));
  CHECK(evaluate_objective(mesh, dm, constant_field(dm, 0.2, 0.0), u_t) == 0.0);
  CHECK(evaluate_objective(mesh, dm, constant_field(dm, 0.05, 0.0), u_t) ==
        doctest::Approx(0.0025).epsilon(1e-12));
  CHECK_THROWS_AS(evaluate_objective(mesh, dm, constant_field(dm, 0.0, 0.0), 0.0),
                  std::invalid_argument);
}

TEST_CASE("fulfillment fraction for constant fields") {
  const TriMesh mesh = build_unit_square_mesh(6, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  CHECK(fulfillment_fraction(mesh, dm, constant_field(dm, 0.0, 0.0), 0.1) == 0.0);
  CHECK(fulfillment_fraction(mesh, dm, constant_field(dm, 0.2, 0.0), 0.1) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("objective is nonnegative and vanishes exactly at full fulfillment") {
  const TriMesh mesh = build_unit_square_mesh(5, quiet);
  const P2DofMap dm = build_p2_dofmap(mesh);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(0.0, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    VectorFieldP2 u = constant_field(dm, 0.0, 0.0);
    for (int d = 0; d < dm.n_scalar_dofs(); ++d) {
      u.x_component.coeffs[d] = dist(rng);
      u.y_component.coeffs[d] = dist(rng);
    }
    const double J = evaluate_objective(mesh, dm, u, 0.1);
    const double fulfill = fulfillment_fraction(mesh, dm, u, 0.1);
    CHECK(J >= 0.0);
    // quadrature-point agreement; the fraction carries summation roundoff
    CHECK((J == 0.0) == (fulfill >= 1.0 - 1e-12));
  }
}

TEST_CASE("shape distance") {
  const TriMesh mesh = build_unit_square_mesh(8, quiet);
  ElementwiseField all_fluid{Eigen::VectorXd::Ones(mesh.num_triangles())};
  ElementwiseField all_solid{Eigen::VectorXd::Zero(mesh.num_triangles())};

  CHECK(shape_distance(mesh, all_fluid, all_fluid) == 0.0);
  CHECK(shape_distance(mesh, all_fluid, all_solid) ==
        doctest::Approx(1.0).epsilon(1e-13));

  // shapes differing on exactly half the area
  ElementwiseField half = all_solid;
  for (int e = 0; e < mesh.num_triangles() / 2; ++e) half.values[e] = 1.0;
  CHECK(shape_distance(mesh, all_solid, half) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));

  ElementwiseField wrong_size{Eigen::VectorXd::Zero(3)};
  CHECK_THROWS_AS(shape_distance(mesh, all_fluid, wrong_size), std::invalid_argument);
  ElementwiseField not_binary{Eigen::VectorXd::Constant(mesh.num_triangles(), 0.5)};
  CHECK_THROWS_AS(shape_distance(mesh, all_fluid, not_binary), std::invalid_argument);
}

TEST_CASE("shape distance is a metric on random triples") {
  const TriMesh mesh = build_unit_square_mesh(8, quiet);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const ElementwiseField a = random_chi(mesh, rng);
    const ElementwiseField b = random_chi(mesh, rng);
    const ElementwiseField c = random_chi(mesh, rng);
    const double dab = shape_distance(mesh, a, b);
    const double dba = shape_distance(mesh, b, a);
    const double dac = shape_distance(mesh, a, c);
    const double dbc = shape_distance(mesh, b, c);
    CHECK(dab == dba);
    CHECK(dab >= 0.0);
    CHECK((dab == 0.0) == (a.values == b.values));
    CHECK(dac <= dab + dbc + 1e-12);
  }
}

TEST_CASE("penalty function") {
  PenaltyParams params;  // gamma 0.4, delta 50

  CHECK(penalty(params.gamma, params) == 1.0);
  CHECK(penalty(0.8, params) == doctest::Approx(std::exp(-30.0)).epsilon(1e-12));
  CHECK(penalty(0.0, params) == std::exp(params.exponent_max));
  CHECK_THROWS_AS(penalty(-0.1, params), std::invalid_argument);

  // monotone non-increasing from the floor; strictly decreasing once the
  // exponent leaves the upper clamp (around r = 0.016 for these parameters)
  double previous = penalty(params.r_min, params);
  for (double r = params.r_min + 0.001; r < 2.0; r += 0.001) {
    const double value = penalty(r, params);
    CHECK(value <= previous);
    if (r > 0.02) CHECK(value < previous);
    previous = value;
  }
}

TEST_CASE("total penalty over an archive") {
  const TriMesh mesh = build_unit_square_mesh(10, quiet);
  PenaltyParams params;

  ElementwiseField chi{Eigen::VectorXd::Zero(mesh.num_triangles())};
  ShapeArchive archive;
  CHECK(total_penalty(mesh, chi, archive, params) == 0.0);

  // entry identical to the query: distance floor produces the clamped maximum
  archive.add({chi, 0, 0.0, 0.0});
  CHECK(total_penalty(mesh, chi, archive, params) == std::exp(params.exponent_max));

  // entry at distance exactly gamma: 0.16 / (1/200 per element) = 32 elements
  ShapeArchive at_gamma;
  ElementwiseField entry = chi;
  for (int e = 0; e < 32; ++e) entry.values[e] = 1.0;
  REQUIRE(shape_distance(mesh, chi, entry) == doctest::Approx(0.4).epsilon(1e-13));
  at_gamma.add({entry, 0, 0.0, 0.0});
  CHECK(total_penalty(mesh, chi, at_gamma, params) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // second entry at distance 2 gamma: 0.64 area difference = 128 elements
  ElementwiseField far = chi;
  for (int e = 0; e < 128; ++e) far.values[e] = 1.0;
  REQUIRE(shape_distance(mesh, chi, far) == doctest::Approx(0.8).epsilon(1e-13));
  at_gamma.add({far, 1, 0.0, 0.0});
  CHECK(total_penalty(mesh, chi, at_gamma, params) ==
        doctest::Approx(1.0 + std::exp(-30.0)).epsilon(1e-12));

  // invariant under archive reordering
  ShapeArchive reversed;
  reversed.add(at_gamma.entries[1]);
  reversed.add(at_gamma.entries[0]);
  CHECK(total_penalty(mesh, chi, reversed, params) ==
        total_penalty(mesh, chi, at_gamma, params));
}

TEST_CASE("deflated objective is the plain sum") {
  CHECK(deflated_objective(0.01, 0.0) == 0.01);
  CHECK(deflated_objective(0.0, 1.0) == 1.0);
  CHECK(deflated_objective(0.0025, std::exp(-30.0)) ==
        doctest::Approx(0.0025 + 9.36e-14).epsilon(1e-3));
}
