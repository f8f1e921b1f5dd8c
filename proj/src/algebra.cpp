#include "relqm/algebra.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace relqm::algebra {

namespace {

using Letters = std::vector<std::uint16_t>;

struct Word {
  GaussRational coeff;
  std::uint32_t hbar = 0;
  Letters letters;  // gen ids: coord c position -> c, momentum -> D + c
};

AlgebraElement::ContextPtr make_context(const FrameSpec& frame,
                                        const CommutationMatrix& matrix) {
  return std::make_shared<const AlgebraElement::Context>(
      AlgebraElement::Context{frame, matrix});
}

AlgebraElement::ContextPtr make_context(const FrameSpec& frame) {
  return make_context(frame, CommutationMatrix::for_frame(frame));
}

// Rewrites a batch of words into canonical normal order. A momentum letter
// immediately left of a position letter is swapped, spawning the c-number
// correction word with one extra power of hbar; once no such pair remains the
// word is an x-block followed by a p-block and each block sorts freely.
AlgebraElement::TermMap normal_order_words(const FrameSpec& frame,
                                           const CommutationMatrix& matrix,
                                           std::deque<Word> work) {
  const std::size_t d = frame.coord_count();
  AlgebraElement::TermMap out;

  auto accumulate = [&](const TermKey& key, const GaussRational& c) {
    auto [it, inserted] = out.try_emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) out.erase(it);
    } else if (it->second.is_zero()) {
      out.erase(it);
    }
  };

  while (!work.empty()) {
    Word w = std::move(work.front());
    work.pop_front();
    if (w.coeff.is_zero()) continue;

    bool rewritten = false;
    for (std::size_t k = 0; k + 1 < w.letters.size(); ++k) {
      const bool left_is_momentum = w.letters[k] >= d;
      const bool right_is_position = w.letters[k + 1] < d;
      if (!(left_is_momentum && right_is_position)) continue;

      const std::size_t cj = w.letters[k] - d;  // momentum coordinate
      const std::size_t ci = w.letters[k + 1];  // position coordinate

      Word swapped = w;
      std::swap(swapped.letters[k], swapped.letters[k + 1]);
      work.push_back(std::move(swapped));

      const Rational a = matrix.coord_entry(frame, ci, cj);
      if (!a.is_zero()) {
        // p_j x_i = x_i p_j - i hbar A[i][j]
        Word corr;
        corr.coeff = w.coeff * GaussRational(Rational(0), -a);
        corr.hbar = w.hbar + 1;
        corr.letters.reserve(w.letters.size() - 2);
        for (std::size_t t = 0; t < w.letters.size(); ++t)
          if (t != k && t != k + 1) corr.letters.push_back(w.letters[t]);
        work.push_back(std::move(corr));
      }
      rewritten = true;
      break;
    }
    if (rewritten) continue;

    std::sort(w.letters.begin(), w.letters.end());
    TermKey key;
    key.exps.assign(2 * d, 0);
    for (auto g : w.letters) ++key.exps[g];
    key.hbar = w.hbar;
    accumulate(key, w.coeff);
  }
  return out;
}

Letters expand_key(const TermKey& key) {
  Letters letters;
  for (std::size_t g = 0; g < key.exps.size(); ++g)
    for (std::uint32_t r = 0; r < key.exps[g]; ++r)
      letters.push_back(static_cast<std::uint16_t>(g));
  return letters;
}

void require_same_context(const AlgebraElement& a, const AlgebraElement& b,
                          const char* what) {
  if (a.frame() != b.frame() || a.matrix() != b.matrix())
    throw std::invalid_argument(std::string(what) +
                                ": elements live over different frames");
}

std::string gen_name(const FrameSpec& frame, std::size_t gen) {
  const std::size_t d = frame.coord_count();
  const bool momentum = gen >= d;
  const std::size_t coord = momentum ? gen - d : gen;
  return (momentum ? "p_" : "x_") + frame.coord_label(coord);
}

}  // namespace

// ---------------------------------------------------------------------------
// FrameSpec

FrameSpec::FrameSpec(std::string observer_id, Rational observer_mass,
                     std::vector<std::pair<std::string, Rational>> bodies,
                     int axes)
    : observer_id_(std::move(observer_id)),
      observer_mass_(observer_mass),
      axes_(axes) {
  if (axes_ != 1 && axes_ != 3)
    throw std::invalid_argument("FrameSpec: axes must be 1 or 3");
  if (!(observer_mass_ > Rational(0)))
    throw std::invalid_argument("FrameSpec: observer mass must be positive");
  if (bodies.empty())
    throw std::invalid_argument("FrameSpec: at least one external body");
  for (auto& [label, mass] : bodies) {
    if (label == observer_id_)
      throw std::invalid_argument("FrameSpec: observer '" + observer_id_ +
                                  "' cannot also be a body");
    if (std::find(bodies_.begin(), bodies_.end(), label) != bodies_.end())
      throw std::invalid_argument("FrameSpec: duplicate body '" + label + "'");
    if (!(mass > Rational(0)))
      throw std::invalid_argument("FrameSpec: mass of '" + label +
                                  "' must be positive");
    bodies_.push_back(label);
    masses_.push_back(mass);
  }
}

std::size_t FrameSpec::body_index(const std::string& body) const {
  auto it = std::find(bodies_.begin(), bodies_.end(), body);
  if (it == bodies_.end())
    throw std::invalid_argument("unknown body '" + body + "' in frame of '" +
                                observer_id_ + "'");
  return static_cast<std::size_t>(it - bodies_.begin());
}

bool FrameSpec::has_body(const std::string& body) const {
  return std::find(bodies_.begin(), bodies_.end(), body) != bodies_.end();
}

const Rational& FrameSpec::mass_of(const std::string& body) const {
  return masses_[body_index(body)];
}

Rational FrameSpec::total_mass() const {
  Rational total = observer_mass_;
  for (const auto& m : masses_) total += m;
  return total;
}

std::size_t FrameSpec::coord_index(const std::string& body, int axis) const {
  if (axis < 0 || axis >= axes_)
    throw std::invalid_argument("axis out of range for frame of '" +
                                observer_id_ + "'");
  return body_index(body) * axes_ + static_cast<std::size_t>(axis);
}

std::string FrameSpec::coord_label(std::size_t coord) const {
  static const char* axis_names[3] = {"x", "y", "z"};
  const std::string& body = bodies_[coord_body(coord)];
  if (axes_ == 1) return body;
  return body + "." + axis_names[coord_axis(coord)];
}

bool operator==(const FrameSpec& a, const FrameSpec& b) {
  return a.observer_id_ == b.observer_id_ &&
         a.observer_mass_ == b.observer_mass_ && a.bodies_ == b.bodies_ &&
         a.masses_ == b.masses_ && a.axes_ == b.axes_;
}

// ---------------------------------------------------------------------------
// CommutationMatrix

CommutationMatrix CommutationMatrix::for_frame(const FrameSpec& frame) {
  const std::size_t n = frame.body_count();
  std::vector<Rational> entries(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rational ratio = frame.mass_of_index(j) / frame.observer_mass();
      entries[i * n + j] = (i == j) ? Rational(1) + ratio : ratio;
    }
  return CommutationMatrix(n, std::move(entries));
}

CommutationMatrix CommutationMatrix::canonical(std::size_t n_bodies) {
  std::vector<Rational> entries(n_bodies * n_bodies, Rational(0));
  for (std::size_t i = 0; i < n_bodies; ++i)
    entries[i * n_bodies + i] = Rational(1);
  return CommutationMatrix(n_bodies, std::move(entries));
}

Rational CommutationMatrix::coord_entry(const FrameSpec& frame, std::size_t ci,
                                        std::size_t cj) const {
  if (frame.coord_axis(ci) != frame.coord_axis(cj)) return Rational(0);
  return body_entry(frame.coord_body(ci), frame.coord_body(cj));
}

// ---------------------------------------------------------------------------
// AlgebraElement

AlgebraElement AlgebraElement::zero(const FrameSpec& frame) {
  return AlgebraElement(make_context(frame), {});
}

AlgebraElement AlgebraElement::zero(const FrameSpec& frame,
                                    const CommutationMatrix& matrix) {
  return AlgebraElement(make_context(frame, matrix), {});
}

AlgebraElement AlgebraElement::scalar(const FrameSpec& frame, GaussRational c,
                                      std::uint32_t hbar) {
  TermMap terms;
  if (!c.is_zero()) {
    TermKey key;
    key.exps.assign(2 * frame.coord_count(), 0);
    key.hbar = hbar;
    terms.emplace(std::move(key), c);
  }
  return AlgebraElement(make_context(frame), std::move(terms));
}

AlgebraElement AlgebraElement::position(const FrameSpec& frame,
                                        const std::string& body, int axis) {
  TermKey key;
  key.exps.assign(2 * frame.coord_count(), 0);
  key.exps[frame.coord_index(body, axis)] = 1;
  TermMap terms;
  terms.emplace(std::move(key), GaussRational(Rational(1)));
  return AlgebraElement(make_context(frame), std::move(terms));
}

AlgebraElement AlgebraElement::momentum(const FrameSpec& frame,
                                        const std::string& body, int axis) {
  TermKey key;
  key.exps.assign(2 * frame.coord_count(), 0);
  key.exps[frame.coord_count() + frame.coord_index(body, axis)] = 1;
  TermMap terms;
  terms.emplace(std::move(key), GaussRational(Rational(1)));
  return AlgebraElement(make_context(frame), std::move(terms));
}

bool AlgebraElement::is_scalar() const {
  for (const auto& [key, coeff] : terms_)
    for (auto e : key.exps)
      if (e != 0) return false;
  return true;
}

AlgebraElement AlgebraElement::operator-() const {
  TermMap terms = terms_;
  for (auto& [key, coeff] : terms) coeff = -coeff;
  return AlgebraElement(ctx_, std::move(terms));
}

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_context(a, b, "operator+");
  AlgebraElement::TermMap terms = a.terms_;
  for (const auto& [key, coeff] : b.terms_) {
    auto [it, inserted] = terms.try_emplace(key, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second.is_zero()) terms.erase(it);
    }
  }
  return AlgebraElement(a.ctx_, std::move(terms));
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  return a + (-b);
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_context(a, b, "operator*");
  std::deque<Word> work;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) {
      Word w;
      w.coeff = ca * cb;
      w.hbar = ka.hbar + kb.hbar;
      w.letters = expand_key(ka);
      Letters rhs = expand_key(kb);
      w.letters.insert(w.letters.end(), rhs.begin(), rhs.end());
      work.push_back(std::move(w));
    }
  return AlgebraElement(
      a.ctx_, normal_order_words(a.frame(), a.matrix(), std::move(work)));
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  return *this = *this + o;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  return *this = *this - o;
}

AlgebraElement AlgebraElement::scaled(const GaussRational& c) const {
  if (c.is_zero()) return AlgebraElement(ctx_, {});
  TermMap terms = terms_;
  for (auto& [key, coeff] : terms) coeff *= c;
  return AlgebraElement(ctx_, std::move(terms));
}

AlgebraElement AlgebraElement::times_hbar(std::uint32_t n) const {
  if (n == 0) return *this;
  TermMap terms;
  for (const auto& [key, coeff] : terms_) {
    TermKey shifted = key;
    shifted.hbar += n;
    terms.emplace(std::move(shifted), coeff);
  }
  return AlgebraElement(ctx_, std::move(terms));
}

bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
  return a.frame() == b.frame() && a.matrix() == b.matrix() &&
         a.terms_ == b.terms_;
}

std::string AlgebraElement::to_string() const {
  if (terms_.empty()) return "0";
  const std::size_t d = frame().coord_count();
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, coeff] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << coeff.to_string();
    if (key.hbar > 0) {
      os << "*hbar";
      if (key.hbar > 1) os << "^" << key.hbar;
    }
    for (std::size_t g = 0; g < key.exps.size(); ++g) {
      if (key.exps[g] == 0) continue;
      os << "*" << (g < d ? "x_" : "p_") << frame().coord_label(g < d ? g : g - d);
      if (key.exps[g] > 1) os << "^" << key.exps[g];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// normal_order / commutator

AlgebraElement normal_order(const FrameSpec& frame,
                            const std::vector<RawTerm>& terms) {
  return normal_order(frame, CommutationMatrix::for_frame(frame), terms);
}

AlgebraElement normal_order(const FrameSpec& frame,
                            const CommutationMatrix& matrix,
                            const std::vector<RawTerm>& terms) {
  const std::size_t d = frame.coord_count();
  std::deque<Word> work;
  for (const auto& term : terms) {
    Word w;
    w.coeff = term.coeff;
    w.hbar = term.hbar;
    for (const auto& f : term.factors) {
      const std::size_t coord = frame.coord_index(f.body, f.axis);
      w.letters.push_back(static_cast<std::uint16_t>(
          f.kind == GenKind::position ? coord : d + coord));
    }
    work.push_back(std::move(w));
  }
  return AlgebraElement(make_context(frame, matrix),
                        normal_order_words(frame, matrix, std::move(work)));
}

AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_context(a, b, "commutator");
  return a * b - b * a;
}

// ---------------------------------------------------------------------------
// FrameSubstitution

FrameSubstitution::FrameSubstitution(FrameSpec source, FrameSpec target,
                                     std::vector<std::optional<Rule>> rules,
                                     bool check_invertible)
    : source_(std::move(source)),
      target_(std::move(target)),
      rules_(std::move(rules)) {
  if (check_invertible) verify_invertible();
}

namespace {

// Gauss-Jordan inverse over the rationals; throws when singular.
std::vector<std::vector<Rational>> invert_rational(
    std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col].is_zero()) ++pivot;
    if (pivot == n)
      throw std::invalid_argument(
          "FrameSubstitution: generator map is not invertible");
    std::swap(m[pivot], m[col]);
    std::swap(inv[pivot], inv[col]);
    const Rational p = m[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      m[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      const Rational f = m[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace

void FrameSubstitution::verify_invertible() const {
  const std::size_t ns = 2 * source_.coord_count();
  const std::size_t nt = 2 * target_.coord_count();
  if (ns != nt)
    throw std::invalid_argument(
        "FrameSubstitution: source and target generator counts differ");
  std::vector<std::vector<Rational>> m(ns, std::vector<Rational>(ns));
  for (std::size_t g = 0; g < ns; ++g) {
    if (!rules_[g]) continue;  // partial maps checked at application time
    for (const auto& [tg, c] : *rules_[g]) m[g][tg] = c;
  }
  bool complete = true;
  for (const auto& r : rules_)
    if (!r) complete = false;
  if (complete) invert_rational(std::move(m));
}

FrameSubstitution FrameSubstitution::identity(const FrameSpec& frame) {
  const std::size_t n = 2 * frame.coord_count();
  std::vector<std::optional<Rule>> rules(n);
  for (std::size_t g = 0; g < n; ++g)
    rules[g] = Rule{{g, Rational(1)}};
  return FrameSubstitution(frame, frame, std::move(rules), true);
}

FrameSubstitution FrameSubstitution::change_observer(
    const FrameSpec& source, const std::string& new_observer,
    std::optional<std::vector<std::string>> target_body_order) {
  const std::size_t b = source.body_index(new_observer);
  const Rational m_new = source.mass_of_index(b);
  const Rational& m_old = source.observer_mass();
  const std::string& old_observer = source.observer_id();

  std::vector<std::string> order;
  if (target_body_order) {
    order = *target_body_order;
  } else {
    order = source.bodies();
    order[b] = old_observer;
  }

  std::vector<std::pair<std::string, Rational>> target_bodies;
  for (const auto& label : order) {
    if (label == old_observer)
      target_bodies.emplace_back(label, m_old);
    else
      target_bodies.emplace_back(label, source.mass_of(label));
  }
  FrameSpec target(new_observer, m_new, std::move(target_bodies),
                   source.axes());

  const std::size_t d = source.coord_count();
  std::vector<std::optional<Rule>> rules(2 * d);
  for (std::size_t body = 0; body < source.body_count(); ++body) {
    const std::string& label = source.bodies()[body];
    for (int axis = 0; axis < source.axes(); ++axis) {
      const std::size_t src_coord = body * source.axes() + axis;
      const std::size_t tgt_obs_coord = target.coord_index(old_observer, axis);
      if (body == b) {
        // the body that becomes the observer
        rules[src_coord] = Rule{{tgt_obs_coord, Rational(-1)}};
        rules[d + src_coord] =
            Rule{{d + tgt_obs_coord, -(m_new / m_old)}};
      } else {
        const std::size_t tgt_coord = target.coord_index(label, axis);
        rules[src_coord] =
            Rule{{tgt_coord, Rational(1)}, {tgt_obs_coord, Rational(-1)}};
        rules[d + src_coord] =
            Rule{{d + tgt_coord, Rational(1)},
                 {d + tgt_obs_coord, -(source.mass_of_index(body) / m_old)}};
      }
    }
  }
  return FrameSubstitution(source, std::move(target), std::move(rules), true);
}

FrameSubstitution FrameSubstitution::from_rules(
    FrameSpec source, FrameSpec target,
    std::map<std::pair<GenKind, std::string>,
             std::vector<std::tuple<GenKind, std::string, Rational>>> rules) {
  const std::size_t ds = source.coord_count();
  const std::size_t dt = target.coord_count();
  std::vector<std::optional<Rule>> out(2 * ds);
  for (const auto& [lhs, imgs] : rules) {
    const auto& [kind, body] = lhs;
    const std::size_t coord = source.coord_index(body);
    const std::size_t g = (kind == GenKind::position) ? coord : ds + coord;
    Rule rule;
    for (const auto& [tkind, tbody, c] : imgs) {
      const std::size_t tcoord = target.coord_index(tbody);
      rule.emplace_back(tkind == GenKind::position ? tcoord : dt + tcoord, c);
    }
    out[g] = std::move(rule);
  }
  return FrameSubstitution(std::move(source), std::move(target),
                           std::move(out), false);
}

FrameSubstitution FrameSubstitution::then(const FrameSubstitution& next) const {
  if (target_ != next.source_)
    throw std::invalid_argument(
        "FrameSubstitution::then: frames do not chain");
  std::vector<std::optional<Rule>> rules(rules_.size());
  for (std::size_t g = 0; g < rules_.size(); ++g) {
    if (!rules_[g]) continue;
    std::map<std::size_t, Rational> acc;
    bool ok = true;
    for (const auto& [mid, c] : *rules_[g]) {
      if (!next.rules_[mid]) {
        ok = false;
        break;
      }
      for (const auto& [tg, c2] : *next.rules_[mid]) acc[tg] += c * c2;
    }
    if (!ok) continue;
    Rule rule;
    for (const auto& [tg, c] : acc)
      if (!c.is_zero()) rule.emplace_back(tg, c);
    rules[g] = std::move(rule);
  }
  return FrameSubstitution(source_, next.target_, std::move(rules), true);
}

FrameSubstitution FrameSubstitution::inverse() const {
  const std::size_t n = 2 * source_.coord_count();
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
  for (std::size_t g = 0; g < n; ++g) {
    if (!rules_[g])
      throw std::invalid_argument(
          "FrameSubstitution::inverse: substitution is partial");
    for (const auto& [tg, c] : *rules_[g]) m[g][tg] = c;
  }
  auto inv = invert_rational(std::move(m));
  // inv maps target gens back to source gens: row = target gen index after
  // transposition of the rule matrix. rules_[g][t] is matrix M[g][t] with
  // image(g) = sum_t M[g][t] * gen_t; the inverse substitution needs
  // image'(t) = sum_g Minv[t][g] * gen_g where Minv is the matrix inverse.
  std::vector<std::optional<Rule>> rules(n);
  for (std::size_t t = 0; t < n; ++t) {
    Rule rule;
    for (std::size_t g = 0; g < n; ++g)
      if (!inv[t][g].is_zero()) rule.emplace_back(g, inv[t][g]);
    rules[t] = std::move(rule);
  }
  return FrameSubstitution(target_, source_, std::move(rules), true);
}

AlgebraElement substitute_frame(const AlgebraElement& e,
                                const FrameSubstitution& sub) {
  if (e.frame() != sub.source())
    throw std::invalid_argument(
        "substitute_frame: element frame does not match substitution source");
  const FrameSpec& target = sub.target();
  const CommutationMatrix target_matrix = CommutationMatrix::for_frame(target);

  std::deque<Word> work;
  for (const auto& [key, coeff] : e.terms()) {
    const Letters letters = expand_key(key);
    for (auto g : letters)
      if (!sub.rule_for(g))
        throw std::invalid_argument("substitute_frame: no rule for generator " +
                                    gen_name(e.frame(), g));
    // distribute the product of linear images
    std::vector<Word> partial{Word{coeff, key.hbar, {}}};
    for (auto g : letters) {
      const auto& rule = *sub.rule_for(g);
      std::vector<Word> grown;
      grown.reserve(partial.size() * rule.size());
      for (const auto& w : partial)
        for (const auto& [tg, c] : rule) {
          Word nw = w;
          nw.coeff *= GaussRational(c);
          nw.letters.push_back(static_cast<std::uint16_t>(tg));
          grown.push_back(std::move(nw));
        }
      partial = std::move(grown);
    }
    for (auto& w : partial) work.push_back(std::move(w));
  }
  return AlgebraElement(
      std::make_shared<const AlgebraElement::Context>(
          AlgebraElement::Context{target, target_matrix}),
      normal_order_words(target, target_matrix, std::move(work)));
}

// ---------------------------------------------------------------------------
// verify_covariance

CovarianceReport verify_covariance(const FrameSpec& frame_s,
                                   const FrameSpec& frame_sp) {
  // Roles of s and s' exchanged: s' observes the same particles plus s.
  if (!frame_sp.has_body(frame_s.observer_id()) ||
      !frame_s.has_body(frame_sp.observer_id()))
    throw std::invalid_argument(
        "verify_covariance: frames must exchange observer roles");
  if (frame_s.mass_of(frame_sp.observer_id()) != frame_sp.observer_mass() ||
      frame_sp.mass_of(frame_s.observer_id()) != frame_s.observer_mass())
    throw std::invalid_argument(
        "verify_covariance: exchanged observer masses disagree");

  // Pull the primed generators back into the s-frame algebra.
  const FrameSubstitution pullback = FrameSubstitution::change_observer(
      frame_sp, frame_s.observer_id(), frame_s.bodies());
  if (pullback.target() != frame_s)
    throw std::invalid_argument(
        "verify_covariance: frames do not describe the same bodies/masses");

  const CommutationMatrix primed = CommutationMatrix::for_frame(frame_sp);
  const std::size_t d = frame_sp.coord_count();

  CovarianceReport report;
  report.all_pass = true;

  auto pulled = [&](GenKind kind, std::size_t coord) {
    const std::string body = frame_sp.bodies()[frame_sp.coord_body(coord)];
    const int axis = frame_sp.coord_axis(coord);
    AlgebraElement gen = (kind == GenKind::position)
                             ? AlgebraElement::position(frame_sp, body, axis)
                             : AlgebraElement::momentum(frame_sp, body, axis);
    return substitute_frame(gen, pullback);
  };

  auto check = [&](const std::string& name, const AlgebraElement& got,
                   const AlgebraElement& expected,
                   const std::string& expected_desc) {
    AlgebraElement residual = got - expected;
    IdentityCheck c{name, residual.is_zero(), std::move(residual),
                    expected_desc};
    report.all_pass = report.all_pass && c.pass;
    report.checks.push_back(std::move(c));
  };

  for (std::size_t ci = 0; ci < d; ++ci) {
    for (std::size_t cj = 0; cj < d; ++cj) {
      const Rational a = primed.coord_entry(frame_sp, ci, cj);
      AlgebraElement expected = AlgebraElement::zero(frame_s);
      if (!a.is_zero())
        expected = AlgebraElement::scalar(
            frame_s, GaussRational(Rational(0), a), 1);
      check("[x'_" + frame_sp.coord_label(ci) + ", p'_" +
                frame_sp.coord_label(cj) + "]",
            commutator(pulled(GenKind::position, ci),
                       pulled(GenKind::momentum, cj)),
            expected,
            a.is_zero() ? "0" : "i*hbar*(" + a.to_string() + ")");
    }
  }
  for (std::size_t ci = 0; ci < d; ++ci)
    for (std::size_t cj = ci + 1; cj < d; ++cj) {
      check("[x'_" + frame_sp.coord_label(ci) + ", x'_" +
                frame_sp.coord_label(cj) + "]",
            commutator(pulled(GenKind::position, ci),
                       pulled(GenKind::position, cj)),
            AlgebraElement::zero(frame_s), "0");
      check("[p'_" + frame_sp.coord_label(ci) + ", p'_" +
                frame_sp.coord_label(cj) + "]",
            commutator(pulled(GenKind::momentum, ci),
                       pulled(GenKind::momentum, cj)),
            AlgebraElement::zero(frame_s), "0");
    }
  return report;
}

// ---------------------------------------------------------------------------
// angular momentum

AngularMomentumReport angular_momentum_check(const FrameSpec& frame,
                                             const std::string& body) {
  return angular_momentum_check(frame, body,
                                CommutationMatrix::for_frame(frame));
}

AngularMomentumReport angular_momentum_check(const FrameSpec& frame,
                                             const std::string& body,
                                             const CommutationMatrix& matrix) {
  if (frame.axes() != 3)
    throw std::invalid_argument(
        "angular_momentum_check: frame must enable 3 axes");
  const std::size_t i = frame.body_index(body);

  auto x = [&](int axis) {
    RawTerm t;
    t.factors = {{GenKind::position, body, axis}};
    return normal_order(frame, matrix, {t});
  };
  auto p = [&](int axis) {
    RawTerm t;
    t.factors = {{GenKind::momentum, body, axis}};
    return normal_order(frame, matrix, {t});
  };
  // L_x = y p_z - z p_y and cyclic
  auto angular = [&](int a, int b) { return x(a) * p(b) - x(b) * p(a); };
  const AlgebraElement lx = angular(1, 2);
  const AlgebraElement ly = angular(2, 0);
  const AlgebraElement lz = angular(0, 1);

  const Rational factor = matrix.body_entry(i, i);
  const GaussRational ihbar_factor(Rational(0), factor);

  AngularMomentumReport report;
  report.factor = factor;
  report.all_pass = true;

  auto check = [&](const std::string& name, const AlgebraElement& lhs,
                   const AlgebraElement& rhs) {
    AlgebraElement expected = rhs.scaled(ihbar_factor).times_hbar(1);
    AlgebraElement residual = lhs - expected;
    IdentityCheck c{name, residual.is_zero(), std::move(residual),
                    "i*hbar*(" + factor.to_string() + ")*L"};
    report.all_pass = report.all_pass && c.pass;
    report.checks.push_back(std::move(c));
  };

  check("[L_x, L_y] = i*hbar*(1+m/m_s)*L_z", commutator(lx, ly), lz);
  check("[L_y, L_z] = i*hbar*(1+m/m_s)*L_x", commutator(ly, lz), lx);
  check("[L_z, L_x] = i*hbar*(1+m/m_s)*L_y", commutator(lz, lx), ly);
  return report;
}

// ---------------------------------------------------------------------------
// dynamics-facing symbolic pieces

GalileanCheck galilean_symmetry_check(const AlgebraElement& hamiltonian,
                                      const std::string& body) {
  const FrameSpec& frame = hamiltonian.frame();
  GalileanCheck out;
  out.symmetric = true;
  for (int axis = 0; axis < frame.axes(); ++axis) {
    RawTerm t;
    t.factors = {{GenKind::momentum, body, axis}};
    const AlgebraElement p = normal_order(frame, hamiltonian.matrix(), {t});
    AlgebraElement residual = commutator(hamiltonian, p);
    out.symmetric = out.symmetric && residual.is_zero();
    out.residuals.push_back(std::move(residual));
  }
  return out;
}

AlgebraElement free_hamiltonian(const FrameSpec& frame) {
  AlgebraElement h = AlgebraElement::zero(frame);
  const Rational total = frame.total_mass();
  for (int axis = 0; axis < frame.axes(); ++axis) {
    for (std::size_t b = 0; b < frame.body_count(); ++b) {
      const AlgebraElement p =
          AlgebraElement::momentum(frame, frame.bodies()[b], axis);
      h += (p * p).scaled(
          GaussRational(Rational(1) / (Rational(2) * frame.mass_of_index(b))));
    }
    AlgebraElement p_total = AlgebraElement::zero(frame);
    for (std::size_t b = 0; b < frame.body_count(); ++b)
      p_total += AlgebraElement::momentum(frame, frame.bodies()[b], axis);
    h -= (p_total * p_total)
             .scaled(GaussRational(Rational(1) / (Rational(2) * total)));
  }
  return h;
}

AlgebraElement harmonic_interaction(const FrameSpec& frame,
                                    const std::string& body_a,
                                    const std::string& body_b,
                                    const Rational& stiffness) {
  AlgebraElement v = AlgebraElement::zero(frame);
  for (int axis = 0; axis < frame.axes(); ++axis) {
    const AlgebraElement diff =
        AlgebraElement::position(frame, body_a, axis) -
        AlgebraElement::position(frame, body_b, axis);
    v += (diff * diff).scaled(GaussRational(stiffness / Rational(2)));
  }
  return v;
}

}  // namespace relqm::algebra
