#include <doctest.h>

#include <cmath>
#include <random>

#include "relqm/frames.hpp"
#include "relqm/protocols.hpp"

using namespace relqm;
using namespace relqm::protocols;
using lattice::GaussianComponent;
using lattice::Lattice;
using lattice::LatticeState;

namespace {

algebra::FrameSpec mirror_frame(const Rational& m_m, const Rational& m_o) {
  return algebra::FrameSpec("O", m_o, {{"L", m_m}, {"R", m_m}});
}

LatticeState random_gaussian(const Lattice& lat, const algebra::FrameSpec& f,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(-4.0, 4.0);
  std::uniform_real_distribution<double> width(1.5, 2.6);
  std::uniform_real_distribution<double> mom(-0.8, 0.8);
  std::vector<GaussianComponent> comps;
  for (std::size_t a = 0; a < lat.dim(); ++a)
    comps.push_back({center(rng), width(rng), mom(rng)});
  return lattice::gaussian_product_state(lat, f, comps);
}

}  // namespace

TEST_CASE("delta_c equals i hbar m_M/m_O, independent of the state") {
  Lattice lat({"L", "R"}, 128, 40.0);
  algebra::FrameSpec f = mirror_frame(Rational(1), Rational(10000));
  std::mt19937_64 rng(73);

  // oracle: the c-number commutator expectation of the two-body rule
  const double expected = 1e-4;

  std::vector<double> values;
  for (int trial = 0; trial < 10; ++trial) {
    auto state = random_gaussian(lat, f, rng);
    auto result = delta_c(state, "L", "R");
    CHECK(std::abs(result.delta_c.imag() / state.hbar() - expected) < 1e-8);
    CHECK(std::abs(result.delta_c.real()) < 1e-10);
    CHECK(result.abs_error < 1e-8);
    values.push_back(result.delta_c.imag());
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  CHECK(*hi - *lo < 1e-8);
}

TEST_CASE("delta_c vanishes in the classical-observers limit") {
  Lattice lat({"L", "R"}, 64, 40.0);
  algebra::FrameSpec f = mirror_frame(Rational(1), Rational(1000000000));
  std::mt19937_64 rng(79);
  auto state = random_gaussian(lat, f, rng);
  auto result = delta_c(state, "L", "R");
  CHECK(std::abs(result.delta_c) < 1e-8);
}

TEST_CASE("delta_c rejections: same body, unequal masses") {
  Lattice lat({"L", "R"}, 64, 40.0);
  algebra::FrameSpec f = mirror_frame(Rational(1), Rational(100));
  std::mt19937_64 rng(83);
  auto state = random_gaussian(lat, f, rng);
  CHECK_THROWS_AS(delta_c(state, "L", "L"), std::invalid_argument);

  algebra::FrameSpec unequal("O", Rational(100),
                             {{"L", Rational(1)}, {"R", Rational(2)}});
  auto state2 = random_gaussian(lat, unequal, rng);
  CHECK_THROWS_AS(delta_c(state2, "L", "R"), std::invalid_argument);
}

TEST_CASE("delta_c sweep is linear across four decades") {
  std::vector<Rational> ratios{Rational(1, 100), Rational(1, 1000),
                               Rational(1, 10000), Rational(1, 100000),
                               Rational(1, 1000000)};
  SweepOptions opts;
  opts.n = 64;
  auto rows = delta_c_sweep(ratios, opts);
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) CHECK(row.relative_error < 1e-6);
}

TEST_CASE("uncertainty matrix: bounds hold for random product states") {
  Lattice lat({"L", "R"}, 64, 40.0);
  std::mt19937_64 rng(89);
  std::uniform_int_distribution<std::int64_t> mnum(1, 40);
  for (int trial = 0; trial < 20; ++trial) {
    const Rational m(mnum(rng), mnum(rng));
    algebra::FrameSpec f = mirror_frame(m, Rational(mnum(rng), mnum(rng)));
    auto state = random_gaussian(lat, f, rng);
    auto matrix = uncertainty_matrix(state);
    CHECK(matrix.entries.size() == 4);
    for (const auto& e : matrix.entries) CHECK(e.margin > -1e-8);
  }
}

TEST_CASE("uncertainty matrix entries carry the documented bounds") {
  Lattice lat({"L", "R"}, 64, 40.0);
  algebra::FrameSpec f = mirror_frame(Rational(1), Rational(1));
  std::mt19937_64 rng(97);
  auto state = random_gaussian(lat, f, rng);
  auto matrix = uncertainty_matrix(state);
  for (const auto& e : matrix.entries) {
    if (e.coord_i == e.body_j)
      CHECK(e.bound == doctest::Approx(1.0));  // (1/2)(1 + 1)
    else
      CHECK(e.bound == doctest::Approx(0.5));  // (1/2)(1/1)
  }

  algebra::FrameSpec heavy = mirror_frame(Rational(1), Rational(1000000));
  auto state2 = random_gaussian(lat, heavy, rng);
  auto matrix2 = uncertainty_matrix(state2);
  for (const auto& e : matrix2.entries) {
    if (e.coord_i == e.body_j)
      CHECK(e.bound == doctest::Approx(0.5).epsilon(1e-5));
    else
      CHECK(e.bound == doctest::Approx(5e-7).epsilon(1e-6));
  }
}

TEST_CASE("uncertainty bounds are covariant under the frame change") {
  Lattice lat({"L", "R"}, 64, 40.0);
  algebra::FrameSpec f("O", Rational(2),
                       {{"L", Rational(1)}, {"R", Rational(3)}});
  auto state = lattice::gaussian_product_state(
      lat, f, {{1.0, 2.0, 0.2}, {-1.5, 2.0, -0.1}});
  frames::FrameMap map(lat, f, "R");
  auto mapped = frames::transform_state(state, map);

  auto matrix = uncertainty_matrix(mapped);
  // new observer mass 3; bodies L (1) and O (2)
  for (const auto& e : matrix.entries) {
    const double mj = (e.body_j == "L") ? 1.0 : 2.0;
    const double expected =
        0.5 * ((e.coord_i == e.body_j ? 1.0 : 0.0) + mj / 3.0);
    CHECK(e.bound == doctest::Approx(expected));
    CHECK(e.margin > -1e-8);
  }
}
