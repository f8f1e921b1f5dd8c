#include "relqm/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "relqm/fft.hpp"

namespace relqm::lattice {

namespace {

constexpr double kNormTolerance = 1e-12;

double pow_spacing(const Lattice& lattice) {
  double w = 1.0;
  for (std::size_t d = 0; d < lattice.dim(); ++d) w *= lattice.spacing();
  return w;
}

std::size_t axis_stride(const Lattice& lattice, std::size_t axis) {
  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < lattice.dim(); ++a)
    stride *= lattice.points_per_axis();
  return stride;
}

std::size_t axis_index_of(const Lattice& lattice, std::size_t flat,
                          std::size_t axis) {
  return (flat / axis_stride(lattice, axis)) % lattice.points_per_axis();
}

void require_state_coord(const LatticeState& state, const std::string& label,
                         const char* what) {
  if (!state.lattice().has_coord(label))
    throw std::invalid_argument(std::string(what) + ": unknown coordinate '" +
                                label + "'");
}

// Spectral multiply: forward FFT on all axes, scale each mode by
// multiplier(mode wavenumbers), inverse FFT.
std::vector<std::complex<double>> spectral_apply(
    const LatticeState& state,
    const std::function<std::complex<double>(const std::vector<double>&)>&
        multiplier) {
  const Lattice& lat = state.lattice();
  const auto shape = lat.shape();
  std::vector<std::complex<double>> data = state.amplitudes();
  fft::transform_all_axes(data, shape, false);

  const std::size_t d = lat.dim();
  std::vector<double> k(d);
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    for (std::size_t a = 0; a < d; ++a)
      k[a] = lat.wavenumber(axis_index_of(lat, flat, a));
    data[flat] *= multiplier(k);
  }
  fft::transform_all_axes(data, shape, true);
  return data;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lattice

Lattice::Lattice(std::vector<std::string> coords, std::size_t n, double length)
    : coords_(std::move(coords)), n_(n), length_(length) {
  if (coords_.empty() || coords_.size() > 3)
    throw std::invalid_argument("Lattice: between 1 and 3 coordinates");
  for (std::size_t a = 0; a < coords_.size(); ++a)
    for (std::size_t b = a + 1; b < coords_.size(); ++b)
      if (coords_[a] == coords_[b])
        throw std::invalid_argument("Lattice: duplicate coordinate '" +
                                    coords_[a] + "'");
  if (n_ < 2 || (n_ & (n_ - 1)) != 0)
    throw std::invalid_argument(
        "Lattice: points per axis must be a power of two >= 2");
  if (!(length_ > 0.0))
    throw std::invalid_argument("Lattice: box length must be positive");
}

std::size_t Lattice::size() const {
  std::size_t s = 1;
  for (std::size_t a = 0; a < coords_.size(); ++a) s *= n_;
  return s;
}

std::size_t Lattice::coord_index(const std::string& label) const {
  auto it = std::find(coords_.begin(), coords_.end(), label);
  if (it == coords_.end())
    throw std::invalid_argument("Lattice: unknown coordinate '" + label + "'");
  return static_cast<std::size_t>(it - coords_.begin());
}

bool Lattice::has_coord(const std::string& label) const {
  return std::find(coords_.begin(), coords_.end(), label) != coords_.end();
}

double Lattice::wavenumber(std::size_t m) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  auto signed_m = static_cast<std::ptrdiff_t>(m);
  if (signed_m >= n / 2) signed_m -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(signed_m) / length_;
}

double Lattice::wrap(double x) const {
  double y = std::fmod(x + 0.5 * length_, length_);
  if (y < 0) y += length_;
  return y - 0.5 * length_;
}

std::size_t Lattice::nearest_index(double x) const {
  const double w = wrap(x);
  auto k = static_cast<std::ptrdiff_t>(std::llround((w + 0.5 * length_) / spacing()));
  const auto n = static_cast<std::ptrdiff_t>(n_);
  k %= n;
  if (k < 0) k += n;
  return static_cast<std::size_t>(k);
}

// ---------------------------------------------------------------------------
// LatticeState

LatticeState::LatticeState(Lattice lattice, algebra::FrameSpec frame,
                           std::vector<std::complex<double>> amplitudes,
                           PhysConstants consts, Normalize normalize)
    : lattice_(std::move(lattice)),
      frame_(std::move(frame)),
      consts_(consts),
      amp_(std::move(amplitudes)) {
  if (!(consts_.hbar > 0.0))
    throw std::invalid_argument("LatticeState: hbar must be positive");
  if (frame_.axes() != 1)
    throw std::invalid_argument(
        "LatticeState: lattice states use single-axis frames");
  if (frame_.bodies() != lattice_.coords())
    throw std::invalid_argument(
        "LatticeState: lattice coordinates must match the frame's bodies");
  if (amp_.size() != lattice_.size())
    throw std::invalid_argument("LatticeState: amplitude array has size " +
                                std::to_string(amp_.size()) + ", expected " +
                                std::to_string(lattice_.size()));
  if (normalize == Normalize::rescale) {
    const double n = norm();
    if (n == 0.0)
      throw std::invalid_argument("LatticeState: cannot normalize zero state");
    for (auto& a : amp_) a /= n;
  } else if (normalize == Normalize::require) {
    if (std::abs(norm() - 1.0) > kNormTolerance)
      throw std::invalid_argument(
          "LatticeState: amplitudes are not unit-normalized");
  }
}

double LatticeState::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s * pow_spacing(lattice_));
}

std::complex<double> inner_product(const LatticeState& a,
                                   const LatticeState& b) {
  if (a.lattice() != b.lattice())
    throw std::invalid_argument("inner_product: lattices differ");
  std::complex<double> s{0.0, 0.0};
  const auto& x = a.amplitudes();
  const auto& y = b.amplitudes();
  for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  return s * pow_spacing(a.lattice());
}

// ---------------------------------------------------------------------------
// MomentumMap

MomentumMap MomentumMap::for_frame(const algebra::FrameSpec& frame) {
  const std::size_t n = frame.body_count();
  const Rational m_s = frame.observer_mass();
  const Rational m_total = frame.total_mass();
  std::vector<Rational> fwd(n * n), inv(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      const Rational mk = frame.mass_of_index(k);
      fwd[k * n + l] = (k == l) ? Rational(1) + mk / m_s : mk / m_s;
      inv[k * n + l] = (k == l) ? Rational(1) - mk / m_total : -(mk / m_total);
    }
  return MomentumMap(n, std::move(fwd), std::move(inv));
}

bool MomentumMap::is_exact_inverse() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      Rational s(0);
      for (std::size_t k = 0; k < n_; ++k)
        s += p_from_pi(i, k) * pi_from_p(k, j);
      if (s != Rational(i == j ? 1 : 0)) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// state construction

namespace {

void validate_gaussian(const Lattice& lattice, const GaussianComponent& g) {
  if (g.width < 2.0 * lattice.spacing())
    throw std::invalid_argument(
        "gaussian_product_state: width " + std::to_string(g.width) +
        " is below 2*spacing (aliasing guard)");
  const double clearance = 0.5 * lattice.length() - std::abs(g.center);
  if (clearance < 5.0 * g.width)
    throw std::invalid_argument(
        "gaussian_product_state: center " + std::to_string(g.center) +
        " is closer than 5 widths to the boundary");
}

std::vector<std::complex<double>> component_column(
    const Lattice& lattice, const ProductComponent& comp, double hbar) {
  const std::size_t n = lattice.points_per_axis();
  std::vector<std::complex<double>> col(n);
  if (const auto* g = std::get_if<GaussianComponent>(&comp)) {
    validate_gaussian(lattice, *g);
    for (std::size_t k = 0; k < n; ++k) {
      const double x = lattice.position(k);
      const double w = lattice.wrap(x - g->center);
      const double envelope = std::exp(-w * w / (4.0 * g->width * g->width));
      col[k] = std::polar(envelope, g->momentum * x / hbar);
    }
  } else {
    const auto& d = std::get<DeltaComponent>(comp);
    col[lattice.nearest_index(d.center)] = {1.0, 0.0};
  }
  return col;
}

}  // namespace

LatticeState product_state(const Lattice& lattice,
                           const algebra::FrameSpec& frame,
                           const std::vector<ProductComponent>& comps,
                           PhysConstants consts) {
  if (comps.size() != lattice.dim())
    throw std::invalid_argument(
        "product_state: one component per lattice coordinate required");
  std::vector<std::vector<std::complex<double>>> cols;
  cols.reserve(comps.size());
  for (const auto& c : comps)
    cols.push_back(component_column(lattice, c, consts.hbar));

  std::vector<std::complex<double>> amp(lattice.size());
  const std::size_t d = lattice.dim();
  for (std::size_t flat = 0; flat < amp.size(); ++flat) {
    std::complex<double> v{1.0, 0.0};
    for (std::size_t a = 0; a < d; ++a)
      v *= cols[a][axis_index_of(lattice, flat, a)];
    amp[flat] = v;
  }
  return LatticeState(lattice, frame, std::move(amp), consts,
                      Normalize::rescale);
}

LatticeState gaussian_product_state(const Lattice& lattice,
                                    const algebra::FrameSpec& frame,
                                    const std::vector<GaussianComponent>& comps,
                                    PhysConstants consts) {
  std::vector<ProductComponent> pc(comps.begin(), comps.end());
  return product_state(lattice, frame, pc, consts);
}

LatticeState momentum_basis_state(const Lattice& lattice,
                                  const algebra::FrameSpec& frame,
                                  const std::vector<int>& modes,
                                  PhysConstants consts) {
  if (modes.size() != lattice.dim())
    throw std::invalid_argument(
        "momentum_basis_state: one mode per coordinate required");
  const std::size_t d = lattice.dim();
  const auto n = static_cast<double>(lattice.points_per_axis());
  std::vector<std::complex<double>> amp(lattice.size());
  for (std::size_t flat = 0; flat < amp.size(); ++flat) {
    double phase = 0.0;
    for (std::size_t a = 0; a < d; ++a)
      phase += 2.0 * std::numbers::pi * static_cast<double>(modes[a]) *
               static_cast<double>(axis_index_of(lattice, flat, a)) / n;
    amp[flat] = std::polar(1.0, phase);
  }
  return LatticeState(lattice, frame, std::move(amp), consts,
                      Normalize::rescale);
}

std::vector<double> physical_momenta_of_modes(const Lattice& lattice,
                                              const algebra::FrameSpec& frame,
                                              const std::vector<int>& modes,
                                              PhysConstants consts) {
  const MomentumMap map = MomentumMap::for_frame(frame);
  const std::size_t d = lattice.dim();
  std::vector<double> pi(d), p(d, 0.0);
  for (std::size_t a = 0; a < d; ++a)
    pi[a] = consts.hbar * 2.0 * std::numbers::pi *
            static_cast<double>(modes[a]) / lattice.length();
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l)
      p[k] += map.p_from_pi(k, l).to_double() * pi[l];
  return p;
}

// ---------------------------------------------------------------------------
// operator application

LatticeState apply_canonical_pi(const LatticeState& state,
                                const std::string& coord) {
  require_state_coord(state, coord, "apply_canonical_pi");
  const std::size_t axis = state.lattice().coord_index(coord);
  const double hbar = state.hbar();
  auto data = spectral_apply(
      state, [axis, hbar](const std::vector<double>& k) {
        return std::complex<double>(hbar * k[axis], 0.0);
      });
  return state.with_amplitudes(std::move(data));
}

LatticeState apply_physical_p(const LatticeState& state,
                              const std::string& body) {
  require_state_coord(state, body, "apply_physical_p");
  const MomentumMap map = MomentumMap::for_frame(state.frame());
  const std::size_t row = state.frame().body_index(body);
  const std::size_t d = state.lattice().dim();
  std::vector<double> coeff(d);
  for (std::size_t l = 0; l < d; ++l)
    coeff[l] = map.p_from_pi(row, l).to_double();
  const double hbar = state.hbar();
  auto data = spectral_apply(
      state, [&coeff, hbar, d](const std::vector<double>& k) {
        double v = 0.0;
        for (std::size_t l = 0; l < d; ++l) v += coeff[l] * k[l];
        return std::complex<double>(hbar * v, 0.0);
      });
  return state.with_amplitudes(std::move(data));
}

LatticeState apply_position(const LatticeState& state,
                            const std::string& coord) {
  require_state_coord(state, coord, "apply_position");
  const Lattice& lat = state.lattice();
  const std::size_t axis = lat.coord_index(coord);
  std::vector<std::complex<double>> data = state.amplitudes();
  for (std::size_t flat = 0; flat < data.size(); ++flat)
    data[flat] *= lat.position(axis_index_of(lat, flat, axis));
  return state.with_amplitudes(std::move(data));
}

OperatorExpr OperatorExpr::identity() {
  OperatorExpr e;
  e.products_.push_back({});
  return e;
}

OperatorExpr OperatorExpr::position(const std::string& coord) {
  OperatorExpr e;
  e.products_.push_back({{1.0, 0.0}, {{OpFactor::Kind::position, coord}}});
  return e;
}

OperatorExpr OperatorExpr::canonical_pi(const std::string& coord) {
  OperatorExpr e;
  e.products_.push_back({{1.0, 0.0}, {{OpFactor::Kind::canonical_pi, coord}}});
  return e;
}

OperatorExpr OperatorExpr::physical_p(const std::string& body) {
  OperatorExpr e;
  e.products_.push_back({{1.0, 0.0}, {{OpFactor::Kind::physical_p, body}}});
  return e;
}

OperatorExpr OperatorExpr::scaled(std::complex<double> c) const {
  OperatorExpr e = *this;
  for (auto& p : e.products_) p.coeff *= c;
  return e;
}

OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) {
  OperatorExpr e = a;
  e.products_.insert(e.products_.end(), b.products_.begin(),
                     b.products_.end());
  return e;
}

OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) {
  return a + b.scaled({-1.0, 0.0});
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  OperatorExpr e;
  for (const auto& pa : a.products_)
    for (const auto& pb : b.products_) {
      OperatorExpr::Product prod;
      prod.coeff = pa.coeff * pb.coeff;
      prod.factors = pa.factors;
      prod.factors.insert(prod.factors.end(), pb.factors.begin(),
                          pb.factors.end());
      e.products_.push_back(std::move(prod));
    }
  return e;
}

LatticeState apply(const LatticeState& state, const OperatorExpr& op) {
  std::vector<std::complex<double>> acc(state.amplitudes().size(),
                                        {0.0, 0.0});
  for (const auto& prod : op.products()) {
    LatticeState current = state;
    // rightmost factor acts first
    for (auto it = prod.factors.rbegin(); it != prod.factors.rend(); ++it) {
      switch (it->kind) {
        case OpFactor::Kind::position:
          current = apply_position(current, it->label);
          break;
        case OpFactor::Kind::canonical_pi:
          current = apply_canonical_pi(current, it->label);
          break;
        case OpFactor::Kind::physical_p:
          current = apply_physical_p(current, it->label);
          break;
      }
    }
    const auto& amp = current.amplitudes();
    for (std::size_t k = 0; k < acc.size(); ++k)
      acc[k] += prod.coeff * amp[k];
  }
  return state.with_amplitudes(std::move(acc));
}

std::complex<double> expectation(const LatticeState& state,
                                 const OperatorExpr& op) {
  return inner_product(state, apply(state, op));
}

// ---------------------------------------------------------------------------
// moments and uncertainties

double mean_position(const LatticeState& state, const std::string& coord) {
  require_state_coord(state, coord, "mean_position");
  const Lattice& lat = state.lattice();
  const std::size_t axis = lat.coord_index(coord);
  const double w = pow_spacing(lat);
  double s = 0.0;
  const auto& amp = state.amplitudes();
  for (std::size_t flat = 0; flat < amp.size(); ++flat)
    s += std::norm(amp[flat]) * lat.position(axis_index_of(lat, flat, axis));
  return s * w;
}

double position_stddev(const LatticeState& state, const std::string& coord) {
  require_state_coord(state, coord, "position_stddev");
  const Lattice& lat = state.lattice();
  const std::size_t axis = lat.coord_index(coord);
  const double w = pow_spacing(lat);
  double m1 = 0.0, m2 = 0.0;
  const auto& amp = state.amplitudes();
  for (std::size_t flat = 0; flat < amp.size(); ++flat) {
    const double x = lat.position(axis_index_of(lat, flat, axis));
    const double p = std::norm(amp[flat]);
    m1 += p * x;
    m2 += p * x * x;
  }
  m1 *= w;
  m2 *= w;
  return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

double mean_physical_p(const LatticeState& state, const std::string& body) {
  const LatticeState pv = apply_physical_p(state, body);
  return inner_product(state, pv).real();
}

double physical_p_stddev(const LatticeState& state, const std::string& body) {
  const LatticeState pv = apply_physical_p(state, body);
  const double m1 = inner_product(state, pv).real();
  const double m2 = inner_product(pv, pv).real();
  return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

UncertaintyPair uncertainty_pair(const LatticeState& state,
                                 const std::string& coord_i,
                                 const std::string& body_j) {
  UncertaintyPair out;
  out.delta_x = position_stddev(state, coord_i);
  out.delta_p = physical_p_stddev(state, body_j);
  out.product = out.delta_x * out.delta_p;
  const algebra::FrameSpec& frame = state.frame();
  const Rational ratio = frame.mass_of(body_j) / frame.observer_mass();
  const Rational factor =
      (coord_i == body_j) ? Rational(1) + ratio : ratio;
  out.bound = 0.5 * state.hbar() * factor.to_double();
  return out;
}

// ---------------------------------------------------------------------------
// momentum-basis mutual information

double momentum_mutual_information(const LatticeState& state,
                                   const std::string& body_i,
                                   const std::string& body_j) {
  require_state_coord(state, body_i, "momentum_mutual_information");
  require_state_coord(state, body_j, "momentum_mutual_information");
  if (body_i == body_j)
    throw std::invalid_argument(
        "momentum_mutual_information: bodies must differ");

  const Lattice& lat = state.lattice();
  const std::size_t d = lat.dim();
  const std::size_t n = lat.points_per_axis();
  const MomentumMap map = MomentumMap::for_frame(state.frame());
  const std::size_t bi = state.frame().body_index(body_i);
  const std::size_t bj = state.frame().body_index(body_j);

  std::vector<std::complex<double>> spec = state.amplitudes();
  fft::transform_all_axes(spec, lat.shape(), false);
  const double weight =
      pow_spacing(lat) / static_cast<double>(lat.size());

  // Physical momentum values in mode units are exact rationals: p = M k~.
  std::map<std::pair<Rational, Rational>, double> joint;
  std::map<Rational, double> marg_i, marg_j;
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    const double prob = std::norm(spec[flat]) * weight;
    if (prob < 1e-300) continue;
    Rational pi_val(0), pj_val(0);
    for (std::size_t a = 0; a < d; ++a) {
      auto m = static_cast<std::ptrdiff_t>(axis_index_of(lat, flat, a));
      if (m >= static_cast<std::ptrdiff_t>(n / 2))
        m -= static_cast<std::ptrdiff_t>(n);
      const Rational mode(static_cast<std::int64_t>(m));
      pi_val += map.p_from_pi(bi, a) * mode;
      pj_val += map.p_from_pi(bj, a) * mode;
    }
    joint[{pi_val, pj_val}] += prob;
    marg_i[pi_val] += prob;
    marg_j[pj_val] += prob;
  }

  double mi = 0.0;
  for (const auto& [key, p] : joint) {
    const double pi_m = marg_i.at(key.first);
    const double pj_m = marg_j.at(key.second);
    if (p > 0.0 && pi_m > 0.0 && pj_m > 0.0)
      mi += p * std::log(p / (pi_m * pj_m));
  }
  return std::max(0.0, mi);
}

// ---------------------------------------------------------------------------
// export

void export_csv(const LatticeState& state, std::ostream& os) {
  const Lattice& lat = state.lattice();
  os << "# ";
  for (const auto& c : lat.coords()) os << "x_" << c << ",";
  os << "re,im\n";
  os.precision(17);
  const auto& amp = state.amplitudes();
  for (std::size_t flat = 0; flat < amp.size(); ++flat) {
    for (std::size_t a = 0; a < lat.dim(); ++a)
      os << lat.position(axis_index_of(lat, flat, a)) << ",";
    os << amp[flat].real() << "," << amp[flat].imag() << "\n";
  }
}

void export_binary(const LatticeState& state, const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "binary dumps are written little-endian");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("export_binary: cannot open " + path);
  const auto d = static_cast<std::uint32_t>(state.lattice().dim());
  const auto n = static_cast<std::uint32_t>(state.lattice().points_per_axis());
  const double length = state.lattice().length();
  const double hbar = state.hbar();
  os.write(reinterpret_cast<const char*>(&d), sizeof d);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&length), sizeof length);
  os.write(reinterpret_cast<const char*>(&hbar), sizeof hbar);
  for (const auto& a : state.amplitudes()) {
    const double re = a.real();
    const double im = a.imag();
    os.write(reinterpret_cast<const char*>(&re), sizeof re);
    os.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
  if (!os) throw std::runtime_error("export_binary: write failed for " + path);
}

LatticeState import_binary(const std::string& path, const Lattice& lattice,
                           const algebra::FrameSpec& frame) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("import_binary: cannot open " + path);
  std::uint32_t d = 0, n = 0;
  double length = 0.0, hbar = 0.0;
  is.read(reinterpret_cast<char*>(&d), sizeof d);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&length), sizeof length);
  is.read(reinterpret_cast<char*>(&hbar), sizeof hbar);
  if (!is || d != lattice.dim() || n != lattice.points_per_axis() ||
      length != lattice.length())
    throw std::runtime_error("import_binary: header does not match lattice");
  std::vector<std::complex<double>> amp(lattice.size());
  for (auto& a : amp) {
    double re = 0.0, im = 0.0;
    is.read(reinterpret_cast<char*>(&re), sizeof re);
    is.read(reinterpret_cast<char*>(&im), sizeof im);
    a = {re, im};
  }
  if (!is) throw std::runtime_error("import_binary: truncated file " + path);
  return LatticeState(lattice, frame, std::move(amp), PhysConstants{hbar},
                      Normalize::require);
}

}  // namespace relqm::lattice
