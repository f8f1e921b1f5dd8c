#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <random>

#include "relqm/frames.hpp"

using namespace relqm;
using namespace relqm::frames;
using lattice::GaussianComponent;
using lattice::Lattice;
using lattice::LatticeState;
using lattice::ProductComponent;

namespace {

algebra::FrameSpec pair_frame(Rational m_i, Rational m_sp, Rational m_s) {
  return algebra::FrameSpec("s", m_s, {{"i", m_i}, {"sp", m_sp}});
}

// Random normalized mixture of two Gaussian products.
LatticeState random_mixture(const Lattice& lat, const algebra::FrameSpec& f,
                            std::mt19937_64& rng) {
  const double w_lo = std::max(1.8, 2.0 * lat.spacing());
  const double w_hi = w_lo + 0.6;
  const double c_max = 0.5 * lat.length() - 5.0 * w_hi - 1.0;
  std::uniform_real_distribution<double> center(-c_max, c_max);
  std::uniform_real_distribution<double> width(w_lo, w_hi);
  std::uniform_real_distribution<double> mom(-1.0, 1.0);
  auto component = [&] {
    std::vector<GaussianComponent> c;
    for (std::size_t a = 0; a < lat.dim(); ++a)
      c.push_back({center(rng), width(rng), mom(rng)});
    return c;
  };
  auto s1 = lattice::gaussian_product_state(lat, f, component());
  auto s2 = lattice::gaussian_product_state(lat, f, component());
  std::vector<std::complex<double>> amp(lat.size());
  for (std::size_t k = 0; k < amp.size(); ++k)
    amp[k] = s1.amplitudes()[k] + std::complex<double>(0.3, 0.4) * s2.amplitudes()[k];
  return LatticeState(lat, f, std::move(amp), {}, lattice::Normalize::rescale);
}

// Position-basis mutual information over grid indices (test oracle).
double position_mutual_information(const LatticeState& state) {
  const Lattice& lat = state.lattice();
  const std::size_t n = lat.points_per_axis();
  const double w = lat.spacing() * lat.spacing();
  std::map<std::size_t, double> mi, mj;
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  const auto& amp = state.amplitudes();
  for (std::size_t flat = 0; flat < amp.size(); ++flat) {
    const double p = std::norm(amp[flat]) * w;
    if (p < 1e-300) continue;
    const std::size_t a = flat / n, b = flat % n;
    joint[{a, b}] += p;
    mi[a] += p;
    mj[b] += p;
  }
  double out = 0.0;
  for (const auto& [key, p] : joint)
    out += p * std::log(p / (mi[key.first] * mj[key.second]));
  return out;
}

}  // namespace

TEST_CASE("localized observer: transformation is a pure translation") {
  const std::size_t n = 128;
  Lattice lat({"i", "sp"}, n, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  const double c = 5.0;  // on-grid: 16 spacings

  std::vector<ProductComponent> comps{
      GaussianComponent{-2.0, 2.0, 0.0}, lattice::DeltaComponent{c}};
  auto psi = lattice::product_state(lat, f, comps);

  FrameMap map(lat, f, "sp");
  auto out = transform_state(psi, map);
  CHECK(out.frame().observer_id() == "sp");
  CHECK(out.frame().bodies() == std::vector<std::string>{"i", "s"});

  // source profile along x_i on the delta column
  const std::size_t kc = lat.nearest_index(c);
  std::vector<std::complex<double>> profile(n);
  for (std::size_t k = 0; k < n; ++k)
    profile[k] = psi.amplitudes()[k * n + kc];

  // image: localized at x'_s = -c, profile translated by c' = -c, i.e.
  // psi'(x') = psi(x' + c)
  const std::size_t kcp = lat.nearest_index(-c);
  const Lattice& tlat = out.lattice();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const std::complex<double> got = out.amplitudes()[a * n + b];
      if (b == kcp) {
        const std::size_t shifted = tlat.nearest_index(tlat.position(a) + c);
        CHECK(std::abs(got - profile[shifted]) < 1e-12);
      } else {
        CHECK(std::abs(got) < 1e-15);
      }
    }
  }
  CHECK(std::abs(out.norm() - 1.0) < 1e-12);
}

TEST_CASE("observer in superposition: two displaced branches, no translation") {
  const std::size_t n = 64;
  Lattice lat({"i", "sp"}, n, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  const double c = 5.0;

  // phi = (|c> + |-c>)/sqrt(2)
  std::vector<std::complex<double>> amp(lat.size(), {0.0, 0.0});
  auto gauss = lattice::gaussian_product_state(
      lat, f, {{0.0, 2.0, 0.0}, {0.0, 2.0, 0.0}});
  const std::size_t kp = lat.nearest_index(c);
  const std::size_t km = lat.nearest_index(-c);
  for (std::size_t a = 0; a < n; ++a) {
    // reuse the gaussian column of coordinate i
    const std::complex<double> g = gauss.amplitudes()[a * n + n / 2];
    amp[a * n + kp] = g;
    amp[a * n + km] = g;
  }
  auto psi = LatticeState(lat, f, std::move(amp), {},
                          lattice::Normalize::rescale);

  FrameMap map(lat, f, "sp");
  auto out = transform_state(psi, map);

  // branches supported on the two observer columns x'_s = -c and x'_s = +c
  const std::size_t bp = lat.nearest_index(-c);
  const std::size_t bm = lat.nearest_index(c);
  double wp = 0.0, wm = 0.0, rest = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const double v = std::norm(out.amplitudes()[a * n + b]);
      if (b == bp)
        wp += v;
      else if (b == bm)
        wm += v;
      else
        rest += v;
    }
  CHECK(wp == doctest::Approx(wm).epsilon(1e-10));
  CHECK(rest < 1e-20);
  CHECK(wp > 0.0);

  // the two branch profiles are displaced against each other by 2c
  const Lattice& tlat = out.lattice();
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t a2 = tlat.nearest_index(tlat.position(a) + 2.0 * c);
    CHECK(std::abs(out.amplitudes()[a * n + bp] -
                   out.amplitudes()[a2 * n + bm]) < 1e-12);
  }
}

TEST_CASE("transform then inverse returns the original state") {
  Lattice lat({"i", "sp"}, 64, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  std::mt19937_64 rng(17);
  auto psi = random_mixture(lat, f, rng);
  FrameMap map(lat, f, "sp");
  auto back = transform_state(transform_state(psi, map), map.inverse());
  for (std::size_t k = 0; k < psi.amplitudes().size(); ++k)
    CHECK(psi.amplitudes()[k] == back.amplitudes()[k]);
}

TEST_CASE("amplitude preservation over random state pairs") {
  Lattice lat({"i", "sp"}, 64, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  FrameMap map(lat, f, "sp");
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    auto phi = random_mixture(lat, f, rng);
    auto psi = random_mixture(lat, f, rng);
    auto check = amplitude_preservation_check(phi, psi, map);
    CHECK(check.abs_difference < 1e-12);
  }
}

TEST_CASE("amplitude preservation: equal and orthogonal pairs") {
  Lattice lat({"i", "sp"}, 64, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  FrameMap map(lat, f, "sp");
  std::mt19937_64 rng(23);
  auto psi = random_mixture(lat, f, rng);
  auto same = amplitude_preservation_check(psi, psi, map);
  CHECK(std::abs(same.source_amplitude - 1.0) < 1e-12);
  CHECK(std::abs(same.target_amplitude - 1.0) < 1e-12);

  // symmetric/antisymmetric combination: exactly orthogonal
  auto g1 = lattice::gaussian_product_state(
      lat, f, {{4.0, 2.0, 0.0}, {0.0, 2.0, 0.0}});
  auto g2 = lattice::gaussian_product_state(
      lat, f, {{-4.0, 2.0, 0.0}, {0.0, 2.0, 0.0}});
  std::vector<std::complex<double>> sym(lat.size()), asym(lat.size());
  for (std::size_t k = 0; k < sym.size(); ++k) {
    sym[k] = g1.amplitudes()[k] + g2.amplitudes()[k];
    asym[k] = g1.amplitudes()[k] - g2.amplitudes()[k];
  }
  auto phi_s = LatticeState(lat, f, std::move(sym), {},
                            lattice::Normalize::rescale);
  auto phi_a = LatticeState(lat, f, std::move(asym), {},
                            lattice::Normalize::rescale);
  auto ortho = amplitude_preservation_check(phi_s, phi_a, map);
  CHECK(std::abs(ortho.source_amplitude) < 1e-12);
  CHECK(std::abs(ortho.target_amplitude) < 1e-12);
}

TEST_CASE("composition of maps equals the direct map exactly") {
  // two-coordinate chain s1 -> s2 -> i == s1 -> i
  Lattice lat({"i", "s2"}, 64, 40.0);
  algebra::FrameSpec f1("s1", Rational(2),
                        {{"i", Rational(1)}, {"s2", Rational(3)}});
  FrameMap to2(lat, f1, "s2");
  FrameMap toi(to2.target_lattice(), to2.target_frame(), "i");
  FrameMap chained = to2.then(toi);
  FrameMap direct(lat, f1, "i", toi.target_frame().bodies());
  CHECK(chained == direct);

  // three-coordinate chain
  Lattice lat3({"i", "s2", "s3"}, 16, 40.0);
  algebra::FrameSpec g1(
      "s1", Rational(2),
      {{"i", Rational(1)}, {"s2", Rational(3)}, {"s3", Rational(5)}});
  FrameMap a(lat3, g1, "s2");
  FrameMap b(a.target_lattice(), a.target_frame(), "s3");
  FrameMap direct3(lat3, g1, "s3", b.target_frame().bodies());
  CHECK(a.then(b) == direct3);
}

TEST_CASE("expectation covariance across the transformation") {
  Lattice lat({"i", "sp"}, 128, 40.0);
  const Rational m_i(1), m_sp(3), m_s(2);
  algebra::FrameSpec f = pair_frame(m_i, m_sp, m_s);
  // keep the difference coordinate x_i - x_sp clear of the wrap seam too
  auto psi = lattice::gaussian_product_state(
      lat, f, {{1.0, 1.5, 0.7}, {-2.0, 1.5, -0.4}});
  FrameMap map(lat, f, "sp");
  auto out = transform_state(psi, map);

  const double xi = lattice::mean_position(psi, "i");
  const double xsp = lattice::mean_position(psi, "sp");
  const double xi_t = lattice::mean_position(out, "i");
  const double xs_t = lattice::mean_position(out, "s");
  CHECK(xi == doctest::Approx(xi_t - xs_t).epsilon(1e-8));
  CHECK(xsp == doctest::Approx(-xs_t).epsilon(1e-8));

  const double pi = lattice::mean_physical_p(psi, "i");
  const double psp = lattice::mean_physical_p(psi, "sp");
  const double pi_t = lattice::mean_physical_p(out, "i");
  const double ps_t = lattice::mean_physical_p(out, "s");
  const double ratio_i = (m_i / m_s).to_double();
  const double ratio_sp = (m_sp / m_s).to_double();
  CHECK(pi == doctest::Approx(pi_t - ratio_i * ps_t).epsilon(1e-8));
  CHECK(psp == doctest::Approx(-ratio_sp * ps_t).epsilon(1e-8));
}

TEST_CASE("entanglement is frame-dependent for delocalized observers") {
  Lattice lat({"i", "sp"}, 64, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  auto psi = lattice::gaussian_product_state(
      lat, f, {{1.0, 2.0, 0.0}, {-2.0, 2.0, 0.0}});
  CHECK(position_mutual_information(psi) < 1e-10);

  FrameMap map(lat, f, "sp");
  auto out = transform_state(psi, map);
  CHECK(position_mutual_information(out) > 0.1);

  // delta-like observer: the image stays a product
  std::vector<ProductComponent> comps{GaussianComponent{1.0, 2.0, 0.0},
                                      lattice::DeltaComponent{-2.5}};
  auto loc = lattice::product_state(lat, f, comps);
  auto loc_out = transform_state(loc, map);
  CHECK(position_mutual_information(loc_out) < 1e-10);
}

TEST_CASE("projection transport commutes with the transformation") {
  Lattice lat({"i", "sp"}, 64, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  FrameMap map(lat, f, "sp");
  std::mt19937_64 rng(29);

  PositionWindow window{"i", -3.0, 2.0};
  CorrelatedWindow transported = transport_projection(window, map);
  CHECK(transported.coord_i == "i");
  CHECK(transported.coord_s == "s");

  for (int trial = 0; trial < 5; ++trial) {
    auto psi = random_mixture(lat, f, rng);
    auto a = transform_state(project(psi, window), map);
    auto b = project(transform_state(psi, map), transported);
    for (std::size_t k = 0; k < a.amplitudes().size(); ++k)
      CHECK(a.amplitudes()[k] == b.amplitudes()[k]);
  }
}

TEST_CASE("transported point window with a localized observer") {
  Lattice lat({"i", "sp"}, 64, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  FrameMap map(lat, f, "sp");
  const double c = 5.0, xa = 1.25;  // both on-grid

  PositionWindow point{"i", xa, xa};
  CorrelatedWindow moved = transport_projection(point, map);

  std::vector<ProductComponent> comps{GaussianComponent{0.0, 2.0, 0.0},
                                      lattice::DeltaComponent{c}};
  auto psi = lattice::product_state(lat, f, comps);
  auto out = project(transform_state(psi, map), moved);

  // observer sits at x'_s = -c, so the window acts at x'_i = xa - c
  PositionWindow effective = effective_window_for_localized_observer(moved, -c);
  CHECK(effective.lo == doctest::Approx(xa - c));
  auto direct = project(transform_state(psi, map), effective);
  for (std::size_t k = 0; k < out.amplitudes().size(); ++k)
    CHECK(out.amplitudes()[k] == direct.amplitudes()[k]);

  // support is the single line x'_i = xa - c
  const Lattice& tlat = out.lattice();
  const std::size_t expect_row = tlat.nearest_index(xa - c);
  for (std::size_t a = 0; a < 64; ++a)
    for (std::size_t b = 0; b < 64; ++b)
      if (a != expect_row)
        CHECK(std::abs(out.amplitudes()[a * 64 + b]) == 0.0);
}

TEST_CASE("full window projector is the identity") {
  Lattice lat({"i", "sp"}, 32, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  std::mt19937_64 rng(31);
  auto psi = random_mixture(lat, f, rng);
  PositionWindow full{"i", -20.0, 20.0};
  auto projected = project(psi, full);
  for (std::size_t k = 0; k < psi.amplitudes().size(); ++k)
    CHECK(projected.amplitudes()[k] == psi.amplitudes()[k]);

  FrameMap map(lat, f, "sp");
  auto a = transform_state(project(psi, full), map);
  auto b = project(transform_state(psi, map), transport_projection(full, map));
  for (std::size_t k = 0; k < a.amplitudes().size(); ++k)
    CHECK(a.amplitudes()[k] == b.amplitudes()[k]);
}

TEST_CASE("transform_state rejects mismatched sources") {
  Lattice lat({"i", "sp"}, 32, 40.0);
  Lattice other({"i", "sp"}, 64, 40.0);
  algebra::FrameSpec f = pair_frame(Rational(1), Rational(3), Rational(2));
  FrameMap map(lat, f, "sp");
  auto psi = lattice::gaussian_product_state(
      other, f, {{0.0, 2.0, 0.0}, {0.0, 2.0, 0.0}});
  CHECK_THROWS_AS(transform_state(psi, map), std::invalid_argument);
}
