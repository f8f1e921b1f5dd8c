#include "relqm/protocols.hpp"

#include <cmath>
#include <stdexcept>

namespace relqm::protocols {

using lattice::LatticeState;
using lattice::OperatorExpr;

ProtocolResult delta_c(const LatticeState& state, const std::string& body_l,
                       const std::string& body_r) {
  if (body_l == body_r)
    throw std::invalid_argument("delta_c: L and R must be distinct bodies");
  const algebra::FrameSpec& frame = state.frame();
  const Rational m_l = frame.mass_of(body_l);
  const Rational m_r = frame.mass_of(body_r);
  if (m_l != m_r)
    throw std::invalid_argument(
        "delta_c: the two measured bodies must have equal mass");

  const OperatorExpr x = OperatorExpr::position(body_l);
  const OperatorExpr p = OperatorExpr::physical_p(body_r);
  const std::complex<double> x_mean = lattice::expectation(state, x);
  const std::complex<double> p_mean = lattice::expectation(state, p);
  const OperatorExpr dx = x - OperatorExpr::identity().scaled(x_mean);
  const OperatorExpr dp = p - OperatorExpr::identity().scaled(p_mean);

  ProtocolResult out;
  out.moment_xp = lattice::expectation(state, dx * dp);
  out.moment_px = lattice::expectation(state, dp * dx);
  out.delta_c = out.moment_xp - out.moment_px;
  const double ratio = (m_r / frame.observer_mass()).to_double();
  out.predicted = std::complex<double>(0.0, state.hbar() * ratio);
  out.abs_error = std::abs(out.delta_c - out.predicted);
  return out;
}

UncertaintyMatrix uncertainty_matrix(const LatticeState& state) {
  UncertaintyMatrix out;
  bool first = true;
  for (const auto& coord_i : state.frame().bodies()) {
    for (const auto& body_j : state.frame().bodies()) {
      const auto pair = lattice::uncertainty_pair(state, coord_i, body_j);
      UncertaintyEntry e{coord_i,     body_j,      pair.delta_x,
                         pair.delta_p, pair.product, pair.bound,
                         pair.product - pair.bound};
      if (first || e.margin < out.worst_margin) out.worst_margin = e.margin;
      first = false;
      out.entries.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<SweepRow> delta_c_sweep(const std::vector<Rational>& ratios,
                                    const SweepOptions& opts) {
  std::vector<SweepRow> rows;
  rows.reserve(ratios.size());
  lattice::Lattice lat({"L", "R"}, opts.n, opts.length);
  const lattice::PhysConstants consts{opts.hbar};
  for (const auto& ratio : ratios) {
    if (!(ratio > Rational(0)))
      throw std::invalid_argument("delta_c_sweep: ratios must be positive");
    const Rational m_m(1);
    const Rational m_o = m_m / ratio;
    algebra::FrameSpec frame("O", m_o, {{"L", m_m}, {"R", m_m}});
    auto state = lattice::gaussian_product_state(
        lat, frame, {{2.0, opts.width, 0.3}, {-2.0, opts.width, -0.2}},
        consts);
    const auto result = delta_c(state, "L", "R");
    SweepRow row;
    row.mass_ratio = ratio.to_double();
    row.measured = std::abs(result.delta_c) / opts.hbar;
    row.predicted = row.mass_ratio;
    row.relative_error =
        std::abs(row.measured - row.predicted) / row.predicted;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace relqm::protocols
