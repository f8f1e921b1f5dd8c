#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relqm/rational.hpp"

namespace relqm::algebra {

/// One observer-relative description: who observes, which external bodies
/// exist, and the exact masses of everything involved.
///
/// The observer's own position/momentum relative to itself is deliberately
/// not a generator; frames only carry external bodies.
class FrameSpec {
 public:
  FrameSpec(std::string observer_id, Rational observer_mass,
            std::vector<std::pair<std::string, Rational>> bodies,
            int axes = 1);

  const std::string& observer_id() const { return observer_id_; }
  const Rational& observer_mass() const { return observer_mass_; }
  const std::vector<std::string>& bodies() const { return bodies_; }
  int axes() const { return axes_; }

  std::size_t body_count() const { return bodies_.size(); }
  std::size_t coord_count() const { return bodies_.size() * axes_; }

  /// Index of `body` in declaration order; throws naming the label if absent.
  std::size_t body_index(const std::string& body) const;
  bool has_body(const std::string& body) const;
  const Rational& mass_of(const std::string& body) const;
  const Rational& mass_of_index(std::size_t i) const { return masses_[i]; }

  Rational total_mass() const;  // observer + all bodies

  std::size_t coord_index(const std::string& body, int axis = 0) const;
  std::size_t coord_body(std::size_t coord) const { return coord / axes_; }
  int coord_axis(std::size_t coord) const {
    return static_cast<int>(coord % axes_);
  }
  std::string coord_label(std::size_t coord) const;

  friend bool operator==(const FrameSpec& a, const FrameSpec& b);
  friend bool operator!=(const FrameSpec& a, const FrameSpec& b) {
    return !(a == b);
  }

 private:
  std::string observer_id_;
  Rational observer_mass_;
  std::vector<std::string> bodies_;
  std::vector<Rational> masses_;
  int axes_;
};

/// Body-level commutator constants A[i][j] with [x_i, p_j] = i hbar A[i][j].
/// For a finite-mass observer A[i][j] = delta_ij + m_j/m_s; the canonical()
/// variant zeroes every mass ratio (classical-observers limit).
class CommutationMatrix {
 public:
  static CommutationMatrix for_frame(const FrameSpec& frame);
  static CommutationMatrix canonical(std::size_t n_bodies);

  std::size_t body_count() const { return n_; }
  const Rational& body_entry(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }
  /// Coordinate-level entry; cross-axis commutators vanish.
  Rational coord_entry(const FrameSpec& frame, std::size_t ci,
                       std::size_t cj) const;

  friend bool operator==(const CommutationMatrix& a,
                         const CommutationMatrix& b) {
    return a.n_ == b.n_ && a.entries_ == b.entries_;
  }
  friend bool operator!=(const CommutationMatrix& a,
                         const CommutationMatrix& b) {
    return !(a == b);
  }

 private:
  CommutationMatrix(std::size_t n, std::vector<Rational> entries)
      : n_(n), entries_(std::move(entries)) {}
  std::size_t n_ = 0;
  std::vector<Rational> entries_;
};

enum class GenKind { position, momentum };

/// A generator reference by role, used when feeding raw products in.
struct RawFactor {
  GenKind kind;
  std::string body;
  int axis = 0;
};

/// One un-normalized product of generators with its scalar prefactor.
struct RawTerm {
  GaussRational coeff{Rational(1)};
  std::uint32_t hbar = 0;
  std::vector<RawFactor> factors;
};

/// Monomial key of a canonical term: exponents over the fixed generator list
/// (all positions body-major/axis-minor, then all momenta), plus the hbar
/// power of the coefficient.
struct TermKey {
  std::vector<std::uint32_t> exps;
  std::uint32_t hbar = 0;

  friend bool operator<(const TermKey& a, const TermKey& b) {
    if (a.exps != b.exps) return a.exps < b.exps;
    return a.hbar < b.hbar;
  }
  friend bool operator==(const TermKey& a, const TermKey& b) {
    return a.exps == b.exps && a.hbar == b.hbar;
  }
};

/// Normal-ordered noncommutative polynomial in the position/momentum
/// generators of one frame, with exact Gaussian-rational * hbar^n
/// coefficients. Always stored in canonical form: within every term all
/// position generators precede all momentum generators, zero coefficients
/// pruned.
class AlgebraElement {
 public:
  using TermMap = std::map<TermKey, GaussRational>;

  static AlgebraElement zero(const FrameSpec& frame);
  static AlgebraElement zero(const FrameSpec& frame,
                             const CommutationMatrix& matrix);
  static AlgebraElement scalar(const FrameSpec& frame, GaussRational c,
                               std::uint32_t hbar = 0);
  static AlgebraElement position(const FrameSpec& frame,
                                 const std::string& body, int axis = 0);
  static AlgebraElement momentum(const FrameSpec& frame,
                                 const std::string& body, int axis = 0);

  const FrameSpec& frame() const { return ctx_->frame; }
  const CommutationMatrix& matrix() const { return ctx_->matrix; }
  const TermMap& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  /// True when the element is a pure scalar (possibly times hbar^n).
  bool is_scalar() const;

  AlgebraElement operator-() const;
  friend AlgebraElement operator+(const AlgebraElement& a,
                                  const AlgebraElement& b);
  friend AlgebraElement operator-(const AlgebraElement& a,
                                  const AlgebraElement& b);
  friend AlgebraElement operator*(const AlgebraElement& a,
                                  const AlgebraElement& b);
  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);

  AlgebraElement scaled(const GaussRational& c) const;
  /// Multiplies every term by hbar^n.
  AlgebraElement times_hbar(std::uint32_t n) const;

  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b);
  friend bool operator!=(const AlgebraElement& a, const AlgebraElement& b) {
    return !(a == b);
  }

  std::string to_string() const;

  struct Context {
    FrameSpec frame;
    CommutationMatrix matrix;
  };
  using ContextPtr = std::shared_ptr<const Context>;
  const ContextPtr& context() const { return ctx_; }

  AlgebraElement(ContextPtr ctx, TermMap terms)
      : ctx_(std::move(ctx)), terms_(std::move(terms)) {}

 private:
  ContextPtr ctx_;
  TermMap terms_;
};

/// Rewrites an arbitrary generator product list into canonical normal order
/// using p_j x_i -> x_i p_j - i hbar A[i][j] (per axis; cross-axis terms
/// commute exactly). Unknown body labels are rejected by name.
AlgebraElement normal_order(const FrameSpec& frame,
                            const std::vector<RawTerm>& terms);
AlgebraElement normal_order(const FrameSpec& frame,
                            const CommutationMatrix& matrix,
                            const std::vector<RawTerm>& terms);

/// normal_order(ab - ba); both elements must live over the same frame and
/// commutation matrix.
AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b);

/// Invertible linear change of generators between two frames. Applying it
/// replaces every source generator by its linear image and re-normal-orders
/// under the target frame's commutation matrix.
class FrameSubstitution {
 public:
  using Rule = std::vector<std::pair<std::size_t, Rational>>;  // target gen id

  /// The observer-exchange rules x_k -> x'_k - x'_s, p_k -> p'_k -
  /// (m_k/m_s) p'_s, x_b -> -x'_s, p_b -> -(m_b/m_s) p'_s, where body b of
  /// `source` becomes the observer and the old observer s becomes a body.
  static FrameSubstitution change_observer(
      const FrameSpec& source, const std::string& new_observer,
      std::optional<std::vector<std::string>> target_body_order = {});

  static FrameSubstitution identity(const FrameSpec& frame);

  /// Explicit rules; entries absent from `rules` stay unmapped and applying
  /// the substitution to an element using them fails naming the generator.
  static FrameSubstitution from_rules(
      FrameSpec source, FrameSpec target,
      std::map<std::pair<GenKind, std::string>, std::vector<std::tuple<GenKind, std::string, Rational>>> rules);

  const FrameSpec& source() const { return source_; }
  const FrameSpec& target() const { return target_; }

  /// Composition: apply *this (source->target), then `next` (target->next
  /// target). Frames must chain exactly.
  FrameSubstitution then(const FrameSubstitution& next) const;
  FrameSubstitution inverse() const;

  const std::optional<Rule>& rule_for(std::size_t source_gen) const {
    return rules_[source_gen];
  }

  friend AlgebraElement substitute_frame(const AlgebraElement& e,
                                         const FrameSubstitution& sub);

 private:
  FrameSubstitution(FrameSpec source, FrameSpec target,
                    std::vector<std::optional<Rule>> rules,
                    bool check_invertible);

  void verify_invertible() const;

  FrameSpec source_;
  FrameSpec target_;
  // indexed by source generator id (positions then momenta)
  std::vector<std::optional<Rule>> rules_;
};

AlgebraElement substitute_frame(const AlgebraElement& e,
                                const FrameSubstitution& sub);

struct IdentityCheck {
  std::string name;
  bool pass = false;
  AlgebraElement residual;
  std::string expected;
};

struct CovarianceReport {
  bool all_pass = false;
  std::vector<IdentityCheck> checks;
};

/// Checks that the pullback of every primed-frame commutator reproduces the
/// primed-frame constants with zero residual (the three derivation blocks of
/// the observer-exchange computation plus the vanishing x-x / p-p pairs).
CovarianceReport verify_covariance(const FrameSpec& frame_s,
                                   const FrameSpec& frame_sp);

struct AngularMomentumReport {
  bool all_pass = false;
  Rational factor;  // 1 + m_i/m_s (or 1 in the canonical limit)
  std::vector<IdentityCheck> checks;
};

/// Verifies [L_x, L_y] = i hbar (1 + m_i/m_s) L_z and cyclic permutations
/// for L = x cross p of one body; requires a 3-axis frame.
AngularMomentumReport angular_momentum_check(const FrameSpec& frame,
                                             const std::string& body);
AngularMomentumReport angular_momentum_check(const FrameSpec& frame,
                                             const std::string& body,
                                             const CommutationMatrix& matrix);

struct GalileanCheck {
  bool symmetric = false;
  std::vector<AlgebraElement> residuals;  // [H, p_body] per axis
};

/// True iff [H, p_body] vanishes identically for every axis.
GalileanCheck galilean_symmetry_check(const AlgebraElement& hamiltonian,
                                      const std::string& body);

/// Sum_k p_k^2/2m_k - P_total^2/2M_total over all axes, the frame-consistent
/// free Hamiltonian.
AlgebraElement free_hamiltonian(const FrameSpec& frame);

/// (k/2) Sum_axis (x_a - x_b)^2.
AlgebraElement harmonic_interaction(const FrameSpec& frame,
                                    const std::string& body_a,
                                    const std::string& body_b,
                                    const Rational& stiffness);

}  // namespace relqm::algebra
