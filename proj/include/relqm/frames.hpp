#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "relqm/lattice.hpp"

namespace relqm::frames {

/// General observer transformation realized as an exact bijection on grid
/// indices: x'_k = x_k - x_b for every remaining body, x'_s = -x_b, where
/// body b of the source frame becomes the observer. With a single body the
/// map reduces to x_s = -x_i.
class FrameMap {
 public:
  FrameMap(const lattice::Lattice& source_lattice,
           const algebra::FrameSpec& source_frame,
           const std::string& new_observer,
           std::optional<std::vector<std::string>> target_coord_order = {});

  const lattice::Lattice& source_lattice() const { return source_lattice_; }
  const lattice::Lattice& target_lattice() const { return target_lattice_; }
  const algebra::FrameSpec& source_frame() const { return source_frame_; }
  const algebra::FrameSpec& target_frame() const { return target_frame_; }
  const std::string& new_observer() const { return new_observer_; }

  /// Flat source index feeding each flat target index.
  const std::vector<std::size_t>& gather() const { return gather_; }

  /// Composition source->target->next.target; `next` must start where this
  /// map ends (same lattice and frame).
  FrameMap then(const FrameMap& next) const;
  FrameMap inverse() const;

  /// True when the index maps agree pointwise (frames must match too).
  friend bool operator==(const FrameMap& a, const FrameMap& b);

 private:
  FrameMap() = default;

  lattice::Lattice source_lattice_{{"_"}, 2, 1.0};
  lattice::Lattice target_lattice_{{"_"}, 2, 1.0};
  algebra::FrameSpec source_frame_{"_", Rational(1), {{"b", Rational(1)}}};
  algebra::FrameSpec target_frame_{"_", Rational(1), {{"b", Rational(1)}}};
  std::string new_observer_;
  std::vector<std::size_t> gather_;
};

/// Permutes the amplitudes; an exact isometry on the grid.
lattice::LatticeState transform_state(const lattice::LatticeState& state,
                                      const FrameMap& map);

struct AmplitudeCheck {
  std::complex<double> source_amplitude;
  std::complex<double> target_amplitude;
  double abs_difference = 0.0;
};

/// <Phi|Psi> before and after the transformation (the map is an exact
/// isometry, so the difference is round-off only).
AmplitudeCheck amplitude_preservation_check(const lattice::LatticeState& phi,
                                            const lattice::LatticeState& psi,
                                            const FrameMap& map);

/// Grid-diagonal window keeping x_coord in [lo, hi].
struct PositionWindow {
  std::string coord;
  double lo = 0.0;
  double hi = 0.0;
};

/// Grid-diagonal window on two coordinates keeping wrap(x_i - x_s) in
/// [lo, hi]: the transported image of a single-coordinate window.
struct CorrelatedWindow {
  std::string coord_i;
  std::string coord_s;
  double lo = 0.0;
  double hi = 0.0;
};

/// Applies the projector (no renormalization).
lattice::LatticeState project(const lattice::LatticeState& state,
                              const PositionWindow& window);
lattice::LatticeState project(const lattice::LatticeState& state,
                              const CorrelatedWindow& window);

/// Transports a position-window projector through the frame map: the image
/// keeps x'_i - x'_s inside the original window, so that transforming then
/// projecting equals projecting then transforming on any state.
CorrelatedWindow transport_projection(const PositionWindow& window,
                                      const FrameMap& map);

/// With the observer localized at x'_s = x_obs, the correlated window acts
/// on x'_i alone; this returns that effective single-coordinate window.
PositionWindow effective_window_for_localized_observer(
    const CorrelatedWindow& window, double observer_position);

}  // namespace relqm::frames
