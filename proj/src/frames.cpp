#include "relqm/frames.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace relqm::frames {

using lattice::Lattice;
using lattice::LatticeState;

namespace {

std::size_t axis_stride(std::size_t dim, std::size_t n, std::size_t axis) {
  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < dim; ++a) stride *= n;
  return stride;
}

bool in_window(const Lattice& lat, double x, double lo, double hi) {
  const double eps = 1e-9 * lat.spacing();
  return x >= lo - eps && x <= hi + eps;
}

}  // namespace

FrameMap::FrameMap(const Lattice& source_lattice,
                   const algebra::FrameSpec& source_frame,
                   const std::string& new_observer,
                   std::optional<std::vector<std::string>> target_coord_order)
    : source_lattice_(source_lattice),
      source_frame_(source_frame),
      target_frame_(source_frame),
      new_observer_(new_observer) {
  if (source_frame.axes() != 1)
    throw std::invalid_argument("FrameMap: single-axis frames only");
  if (source_frame.bodies() != source_lattice.coords())
    throw std::invalid_argument(
        "FrameMap: source lattice coordinates must match the frame bodies");
  const std::size_t b = source_frame.body_index(new_observer);

  std::vector<std::string> order;
  if (target_coord_order) {
    order = *target_coord_order;
  } else {
    order = source_frame.bodies();
    order[b] = source_frame.observer_id();
  }

  std::vector<std::pair<std::string, Rational>> target_bodies;
  for (const auto& label : order) {
    if (label == source_frame.observer_id())
      target_bodies.emplace_back(label, source_frame.observer_mass());
    else
      target_bodies.emplace_back(label, source_frame.mass_of(label));
  }
  target_frame_ = algebra::FrameSpec(new_observer,
                                     source_frame.mass_of(new_observer),
                                     std::move(target_bodies), 1);
  target_lattice_ =
      Lattice(target_frame_.bodies(), source_lattice.points_per_axis(),
              source_lattice.length());

  const std::size_t dim = source_lattice.dim();
  const std::size_t n = source_lattice.points_per_axis();
  const std::size_t half = n / 2;

  // source coordinate slot feeding each target slot (old observer slot maps
  // from the new observer's source slot)
  std::vector<std::size_t> source_slot(dim);
  std::size_t obs_target_slot = dim;
  for (std::size_t t = 0; t < dim; ++t) {
    const std::string& label = target_frame_.bodies()[t];
    if (label == source_frame.observer_id()) {
      source_slot[t] = b;
      obs_target_slot = t;
    } else {
      source_slot[t] = source_frame.body_index(label);
    }
  }
  if (obs_target_slot == dim)
    throw std::invalid_argument(
        "FrameMap: target order must contain the old observer");

  gather_.resize(source_lattice.size());
  std::vector<std::size_t> tgt(dim);
  for (std::size_t flat = 0; flat < gather_.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = 0; a < dim; ++a) {
      const std::size_t stride = axis_stride(dim, n, a);
      tgt[a] = rem / stride;
      rem %= stride;
    }
    // invert the coordinate rules: k_b = (n - k'_s) mod n,
    // k_j = (k'_j + k_b - n/2) mod n for every remaining body
    const std::size_t k_b = (n - tgt[obs_target_slot]) % n;
    std::size_t src_flat = 0;
    for (std::size_t t = 0; t < dim; ++t) {
      std::size_t k_src;
      if (t == obs_target_slot)
        k_src = k_b;
      else
        k_src = (tgt[t] + k_b + n - half) % n;
      src_flat += k_src * axis_stride(dim, n, source_slot[t]);
    }
    gather_[flat] = src_flat;
  }
}

FrameMap FrameMap::then(const FrameMap& next) const {
  if (next.source_frame_ != target_frame_ ||
      next.source_lattice_ != target_lattice_)
    throw std::invalid_argument("FrameMap::then: maps do not chain");
  FrameMap out;
  out.source_lattice_ = source_lattice_;
  out.target_lattice_ = next.target_lattice_;
  out.source_frame_ = source_frame_;
  out.target_frame_ = next.target_frame_;
  out.new_observer_ = next.new_observer_;
  out.gather_.resize(gather_.size());
  for (std::size_t t = 0; t < gather_.size(); ++t)
    out.gather_[t] = gather_[next.gather_[t]];
  return out;
}

FrameMap FrameMap::inverse() const {
  FrameMap out;
  out.source_lattice_ = target_lattice_;
  out.target_lattice_ = source_lattice_;
  out.source_frame_ = target_frame_;
  out.target_frame_ = source_frame_;
  out.new_observer_ = source_frame_.observer_id();
  out.gather_.resize(gather_.size());
  for (std::size_t t = 0; t < gather_.size(); ++t)
    out.gather_[gather_[t]] = t;
  return out;
}

bool operator==(const FrameMap& a, const FrameMap& b) {
  return a.source_frame_ == b.source_frame_ &&
         a.target_frame_ == b.target_frame_ &&
         a.source_lattice_ == b.source_lattice_ &&
         a.target_lattice_ == b.target_lattice_ && a.gather_ == b.gather_;
}

LatticeState transform_state(const LatticeState& state, const FrameMap& map) {
  if (state.lattice() != map.source_lattice() ||
      state.frame() != map.source_frame())
    throw std::invalid_argument(
        "transform_state: state does not live on the map's source lattice");
  const auto& in = state.amplitudes();
  std::vector<std::complex<double>> out(in.size());
  const auto& gather = map.gather();
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = in[gather[t]];
  return LatticeState(map.target_lattice(), map.target_frame(),
                      std::move(out), state.constants(),
                      lattice::Normalize::none);
}

AmplitudeCheck amplitude_preservation_check(const LatticeState& phi,
                                            const LatticeState& psi,
                                            const FrameMap& map) {
  AmplitudeCheck out;
  out.source_amplitude = lattice::inner_product(phi, psi);
  out.target_amplitude = lattice::inner_product(transform_state(phi, map),
                                                transform_state(psi, map));
  out.abs_difference = std::abs(out.target_amplitude - out.source_amplitude);
  return out;
}

LatticeState project(const LatticeState& state, const PositionWindow& window) {
  const Lattice& lat = state.lattice();
  const std::size_t axis = lat.coord_index(window.coord);
  const std::size_t n = lat.points_per_axis();
  const std::size_t stride = axis_stride(lat.dim(), n, axis);
  std::vector<std::complex<double>> amp = state.amplitudes();
  for (std::size_t flat = 0; flat < amp.size(); ++flat) {
    const double x = lat.position((flat / stride) % n);
    if (!in_window(lat, x, window.lo, window.hi)) amp[flat] = {0.0, 0.0};
  }
  return state.with_amplitudes(std::move(amp));
}

LatticeState project(const LatticeState& state,
                     const CorrelatedWindow& window) {
  const Lattice& lat = state.lattice();
  const std::size_t ai = lat.coord_index(window.coord_i);
  const std::size_t as = lat.coord_index(window.coord_s);
  const std::size_t n = lat.points_per_axis();
  const std::size_t si = axis_stride(lat.dim(), n, ai);
  const std::size_t ss = axis_stride(lat.dim(), n, as);
  const std::size_t half = n / 2;
  std::vector<std::complex<double>> amp = state.amplitudes();
  for (std::size_t flat = 0; flat < amp.size(); ++flat) {
    const std::size_t ki = (flat / si) % n;
    const std::size_t ks = (flat / ss) % n;
    // wrap(x_i - x_s) realized in index arithmetic
    const double diff = lat.position((ki + n + half - ks) % n);
    if (!in_window(lat, diff, window.lo, window.hi)) amp[flat] = {0.0, 0.0};
  }
  return state.with_amplitudes(std::move(amp));
}

CorrelatedWindow transport_projection(const PositionWindow& window,
                                      const FrameMap& map) {
  if (!map.source_lattice().has_coord(window.coord))
    throw std::invalid_argument(
        "transport_projection: window coordinate not on the source lattice");
  if (window.coord == map.new_observer())
    throw std::invalid_argument(
        "transport_projection: window coordinate becomes the observer");
  return CorrelatedWindow{window.coord, map.source_frame().observer_id(),
                          window.lo, window.hi};
}

PositionWindow effective_window_for_localized_observer(
    const CorrelatedWindow& window, double observer_position) {
  return PositionWindow{window.coord_i, window.lo + observer_position,
                        window.hi + observer_position};
}

}  // namespace relqm::frames
