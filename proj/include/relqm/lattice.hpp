#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "relqm/algebra.hpp"
#include "relqm/rational.hpp"

namespace relqm::lattice {

struct PhysConstants {
  double hbar = 1.0;
};

/// Joint periodic position grid for up to three coordinates, one per external
/// body. Every coordinate shares the same point count (a power of two) and
/// box length so that frame changes act as exact index bijections.
class Lattice {
 public:
  Lattice(std::vector<std::string> coords, std::size_t n, double length);

  const std::vector<std::string>& coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  std::size_t points_per_axis() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(n_); }
  std::size_t size() const;  // n^D

  std::size_t coord_index(const std::string& label) const;
  bool has_coord(const std::string& label) const;

  /// Grid position of index k: -L/2 + k * spacing.
  double position(std::size_t k) const {
    return -0.5 * length_ + static_cast<double>(k) * spacing();
  }
  /// Signed wavenumber of FFT mode m: 2*pi*m~/L with m~ in [-n/2, n/2).
  double wavenumber(std::size_t m) const;
  /// Wraps a displacement into [-L/2, L/2).
  double wrap(double x) const;
  /// Index of the grid point nearest to x (after wrapping).
  std::size_t nearest_index(double x) const;

  std::vector<std::size_t> shape() const {
    return std::vector<std::size_t>(coords_.size(), n_);
  }

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.coords_ == b.coords_ && a.n_ == b.n_ && a.length_ == b.length_;
  }
  friend bool operator!=(const Lattice& a, const Lattice& b) {
    return !(a == b);
  }

 private:
  std::vector<std::string> coords_;
  std::size_t n_;
  double length_;
};

/// What to do about the unit-norm invariant when constructing a state.
/// `none` is for intermediate vectors produced by operator application.
enum class Normalize { require, rescale, none };

/// Complex amplitude array over the joint grid, unit-normalized with weight
/// spacing^D, together with the frame it describes.
class LatticeState {
 public:
  LatticeState(Lattice lattice, algebra::FrameSpec frame,
               std::vector<std::complex<double>> amplitudes,
               PhysConstants consts = {},
               Normalize normalize = Normalize::require);

  const Lattice& lattice() const { return lattice_; }
  const algebra::FrameSpec& frame() const { return frame_; }
  double hbar() const { return consts_.hbar; }
  const PhysConstants& constants() const { return consts_; }

  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }
  std::vector<std::complex<double>>& amplitudes() { return amp_; }

  double norm() const;

  LatticeState with_amplitudes(std::vector<std::complex<double>> amp,
                               Normalize normalize = Normalize::none) const {
    return LatticeState(lattice_, frame_, std::move(amp), consts_, normalize);
  }

 private:
  Lattice lattice_;
  algebra::FrameSpec frame_;
  PhysConstants consts_;
  std::vector<std::complex<double>> amp_;
};

/// Inner product <a|b> with the spacing^D weight.
std::complex<double> inner_product(const LatticeState& a,
                                   const LatticeState& b);

/// Exact rational linear maps between physical momenta p and canonical
/// auxiliary momenta pi: p_k = pi_k + (m_k/m_s) sum_l pi_l and its inverse
/// pi_k = p_k - (m_k/M_total) sum_l p_l.
class MomentumMap {
 public:
  static MomentumMap for_frame(const algebra::FrameSpec& frame);

  std::size_t dim() const { return n_; }
  const Rational& p_from_pi(std::size_t k, std::size_t l) const {
    return p_from_pi_[k * n_ + l];
  }
  const Rational& pi_from_p(std::size_t k, std::size_t l) const {
    return pi_from_p_[k * n_ + l];
  }
  /// Verifies p_from_pi * pi_from_p == identity in exact arithmetic.
  bool is_exact_inverse() const;

 private:
  MomentumMap(std::size_t n, std::vector<Rational> fwd,
              std::vector<Rational> inv)
      : n_(n), p_from_pi_(std::move(fwd)), pi_from_p_(std::move(inv)) {}
  std::size_t n_;
  std::vector<Rational> p_from_pi_;
  std::vector<Rational> pi_from_p_;
};

struct GaussianComponent {
  double center = 0.0;
  double width = 1.0;    // position standard deviation
  double momentum = 0.0;  // mean canonical momentum <pi>
};

/// Kronecker column at the grid point nearest `center`, carrying the
/// 1/sqrt(spacing) normalization of a discretized Dirac delta.
struct DeltaComponent {
  double center = 0.0;
};

using ProductComponent = std::variant<GaussianComponent, DeltaComponent>;

/// Product of periodic Gaussians with the requested per-coordinate moments.
/// Widths below 2*spacing or centers closer than 5 widths to the wrap seam
/// are rejected (aliasing guard).
LatticeState gaussian_product_state(const Lattice& lattice,
                                    const algebra::FrameSpec& frame,
                                    const std::vector<GaussianComponent>& comps,
                                    PhysConstants consts = {});

/// Product state mixing Gaussian and delta-localized coordinates.
LatticeState product_state(const Lattice& lattice,
                           const algebra::FrameSpec& frame,
                           const std::vector<ProductComponent>& comps,
                           PhysConstants consts = {});

/// Plane wave in the canonical momenta with integer mode numbers per
/// coordinate; an exact eigenstate of every pi and every physical p.
LatticeState momentum_basis_state(const Lattice& lattice,
                                  const algebra::FrameSpec& frame,
                                  const std::vector<int>& modes,
                                  PhysConstants consts = {});

/// Physical momentum eigenvalues of a momentum-basis state: p = M pi over
/// the mode wavenumbers.
std::vector<double> physical_momenta_of_modes(const Lattice& lattice,
                                              const algebra::FrameSpec& frame,
                                              const std::vector<int>& modes,
                                              PhysConstants consts = {});

/// Spectral derivative -i hbar d/dx along one coordinate.
LatticeState apply_canonical_pi(const LatticeState& state,
                                const std::string& coord);

/// Physical momentum of one body: the MomentumMap combination of canonical
/// pi applications, matching the modified differential form.
LatticeState apply_physical_p(const LatticeState& state,
                              const std::string& body);

/// Multiplication by the sawtooth coordinate in [-L/2, L/2).
LatticeState apply_position(const LatticeState& state,
                            const std::string& coord);

struct OpFactor {
  enum class Kind { position, canonical_pi, physical_p };
  Kind kind;
  std::string label;
};

/// Sum of scalar-weighted products of {x, pi, p} factors; products apply
/// right-to-left like operator composition.
class OperatorExpr {
 public:
  struct Product {
    std::complex<double> coeff{1.0, 0.0};
    std::vector<OpFactor> factors;
  };

  OperatorExpr() = default;

  static OperatorExpr identity();
  static OperatorExpr position(const std::string& coord);
  static OperatorExpr canonical_pi(const std::string& coord);
  static OperatorExpr physical_p(const std::string& body);

  const std::vector<Product>& products() const { return products_; }

  OperatorExpr scaled(std::complex<double> c) const;
  friend OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b);
  friend OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b);
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);

  static OperatorExpr commutator(const OperatorExpr& a,
                                 const OperatorExpr& b) {
    return a * b - b * a;
  }

 private:
  std::vector<Product> products_;
};

/// Applies an operator expression (result is generally unnormalized).
LatticeState apply(const LatticeState& state, const OperatorExpr& op);

/// <Psi|O|Psi> via operator application and the weighted inner product.
std::complex<double> expectation(const LatticeState& state,
                                 const OperatorExpr& op);

struct UncertaintyPair {
  double delta_x = 0.0;
  double delta_p = 0.0;
  double product = 0.0;
  double bound = 0.0;  // (hbar/2)(delta_ij + m_j/m_s)
};

UncertaintyPair uncertainty_pair(const LatticeState& state,
                                 const std::string& coord_i,
                                 const std::string& body_j);

double mean_position(const LatticeState& state, const std::string& coord);
double position_stddev(const LatticeState& state, const std::string& coord);
double mean_physical_p(const LatticeState& state, const std::string& body);
double physical_p_stddev(const LatticeState& state, const std::string& body);

/// Mutual information (nats) between the physical momenta of two bodies,
/// grouping spectral probabilities by exact rational momentum values.
double momentum_mutual_information(const LatticeState& state,
                                   const std::string& body_i,
                                   const std::string& body_j);

/// CSV rows: one line per grid point with the coordinate positions followed
/// by the real and imaginary amplitude parts.
void export_csv(const LatticeState& state, std::ostream& os);

/// Little-endian binary dump: u32 D, u32 n, f64 L, f64 hbar, then n^D
/// (f64 re, f64 im) pairs in row-major order (last coordinate fastest).
void export_binary(const LatticeState& state, const std::string& path);

/// Reads a dump written by export_binary; frame and coordinate labels are
/// supplied by the caller since the dump stores geometry only.
LatticeState import_binary(const std::string& path, const Lattice& lattice,
                           const algebra::FrameSpec& frame);

}  // namespace relqm::lattice
