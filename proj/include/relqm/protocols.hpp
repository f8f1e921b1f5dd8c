#pragma once

#include <complex>
#include <string>
#include <vector>

#include "relqm/lattice.hpp"

namespace relqm::protocols {

/// Protocol-ordered centered second moments and their difference
/// delta_c = <dx_L dp_R> - <dp_R dx_L>, which equals the c-number
/// i hbar m_M/m_O for any admissible state.
struct ProtocolResult {
  std::complex<double> moment_xp;  // protocol 2 order: <dx_L dp_R>
  std::complex<double> moment_px;  // protocol 1 order: <dp_R dx_L>
  std::complex<double> delta_c;
  std::complex<double> predicted;  // i hbar m_M/m_O
  double abs_error = 0.0;
};

/// Evaluates both ordered moments on the state; L and R must be distinct
/// bodies of equal mass.
ProtocolResult delta_c(const lattice::LatticeState& state,
                       const std::string& body_l, const std::string& body_r);

struct UncertaintyEntry {
  std::string coord_i;
  std::string body_j;
  double delta_x = 0.0;
  double delta_p = 0.0;
  double product = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // product - bound
};

struct UncertaintyMatrix {
  std::vector<UncertaintyEntry> entries;
  double worst_margin = 0.0;
};

/// Full Delta x_i * Delta p_j matrix against the (hbar/2)(delta_ij + m_j/m_s)
/// bounds.
UncertaintyMatrix uncertainty_matrix(const lattice::LatticeState& state);

struct SweepRow {
  double mass_ratio = 0.0;
  double measured = 0.0;   // |delta_c| / hbar
  double predicted = 0.0;  // m_M/m_O
  double relative_error = 0.0;
};

struct SweepOptions {
  std::size_t n = 128;
  double length = 40.0;
  double hbar = 1.0;
  double width = 2.0;
};

/// |delta_c|/hbar across exact mirror-to-observer mass ratios, evaluated on
/// a fresh Gaussian product state per ratio.
std::vector<SweepRow> delta_c_sweep(const std::vector<Rational>& ratios,
                                    const SweepOptions& opts = {});

}  // namespace relqm::protocols
