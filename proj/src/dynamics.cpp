#include "relqm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "relqm/fft.hpp"

namespace relqm::dynamics {

using lattice::Lattice;
using lattice::LatticeState;

namespace {

std::size_t axis_stride(std::size_t dim, std::size_t n, std::size_t axis) {
  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < dim; ++a) stride *= n;
  return stride;
}

std::size_t axis_index_of(std::size_t flat, std::size_t dim, std::size_t n,
                          std::size_t axis) {
  return (flat / axis_stride(dim, n, axis)) % n;
}

// (1/2) pi^T K pi per mode over the full grid.
std::vector<double> kinetic_energy_grid(
    const Lattice& lat, const std::vector<std::vector<double>>& k_form,
    double hbar) {
  const std::size_t d = lat.dim();
  const std::size_t n = lat.points_per_axis();
  std::vector<double> energy(lat.size());
  std::vector<double> pi(d);
  for (std::size_t flat = 0; flat < energy.size(); ++flat) {
    for (std::size_t a = 0; a < d; ++a)
      pi[a] = hbar * lat.wavenumber(axis_index_of(flat, d, n, a));
    double e = 0.0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) e += k_form[a][b] * pi[a] * pi[b];
    energy[flat] = 0.5 * e;
  }
  return energy;
}

struct PairGrid {
  std::size_t stride_a;
  std::size_t stride_b;
};

PairGrid pair_strides(const Lattice& lat, const std::string& a,
                      const std::string& b) {
  const std::size_t d = lat.dim();
  const std::size_t n = lat.points_per_axis();
  return {axis_stride(d, n, lat.coord_index(a)),
          axis_stride(d, n, lat.coord_index(b))};
}

std::vector<double> difference_sampled(
    const Lattice& lat, const std::string& body_a, const std::string& body_b,
    const std::vector<double>& by_difference_index) {
  const std::size_t n = lat.points_per_axis();
  if (by_difference_index.size() != n)
    throw std::invalid_argument(
        "potential table must have one entry per grid point");
  const PairGrid pg = pair_strides(lat, body_a, body_b);
  std::vector<double> grid(lat.size());
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const std::size_t ka = (flat / pg.stride_a) % n;
    const std::size_t kb = (flat / pg.stride_b) % n;
    grid[flat] = by_difference_index[(ka + n + n / 2 - kb) % n];
  }
  return grid;
}

// Expectation recorder: all momentum statistics come from one forward
// transform of the step-end state, positions from one position-space pass.
class Recorder {
 public:
  Recorder(const Lattice& lat, const algebra::FrameSpec& frame, double hbar,
           std::vector<double> kinetic_grid,
           const std::vector<double>* potential,
           const std::vector<double>* gradient)
      : lat_(lat),
        dim_(lat.dim()),
        n_(lat.points_per_axis()),
        kinetic_(std::move(kinetic_grid)),
        potential_(potential),
        gradient_(gradient) {
    const lattice::MomentumMap map = lattice::MomentumMap::for_frame(frame);
    p_values_.resize(dim_, std::vector<double>(lat.size()));
    std::vector<double> row(dim_);
    for (std::size_t b = 0; b < dim_; ++b) {
      for (std::size_t l = 0; l < dim_; ++l)
        row[l] = map.p_from_pi(b, l).to_double();
      for (std::size_t flat = 0; flat < lat.size(); ++flat) {
        double v = 0.0;
        for (std::size_t l = 0; l < dim_; ++l)
          v += row[l] * hbar * lat.wavenumber(axis_index_of(flat, dim_, n_, l));
        p_values_[b][flat] = v;
      }
    }
    spacing_w_ = 1.0;
    for (std::size_t a = 0; a < dim_; ++a) spacing_w_ *= lat.spacing();
  }

  StepRecord record(const std::vector<std::complex<double>>& psi,
                    double t) const {
    StepRecord rec;
    rec.t = t;
    rec.x_mean.assign(dim_, 0.0);
    rec.x_std.assign(dim_, 0.0);
    rec.p_mean.assign(dim_, 0.0);
    rec.p_std.assign(dim_, 0.0);

    std::vector<double> x2(dim_, 0.0);
    std::vector<std::size_t> idx(dim_, 0);
    double v_energy = 0.0, grad = 0.0;
    for (std::size_t flat = 0; flat < psi.size(); ++flat) {
      const double prob = std::norm(psi[flat]) * spacing_w_;
      for (std::size_t a = 0; a < dim_; ++a) {
        const double x = lat_.position(idx[a]);
        rec.x_mean[a] += prob * x;
        x2[a] += prob * x * x;
      }
      if (potential_) v_energy += prob * (*potential_)[flat];
      if (gradient_) grad += prob * (*gradient_)[flat];
      for (std::size_t a = dim_; a-- > 0;) {
        if (++idx[a] < n_) break;
        idx[a] = 0;
      }
    }
    for (std::size_t a = 0; a < dim_; ++a)
      rec.x_std[a] =
          std::sqrt(std::max(0.0, x2[a] - rec.x_mean[a] * rec.x_mean[a]));

    std::vector<std::complex<double>> spec = psi;
    fft::transform_all_axes(spec, lat_.shape(), false);
    const double mode_w = spacing_w_ / static_cast<double>(psi.size());
    std::vector<double> p2(dim_, 0.0);
    double kin = 0.0;
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
      const double prob = std::norm(spec[flat]) * mode_w;
      kin += prob * kinetic_[flat];
      for (std::size_t b = 0; b < dim_; ++b) {
        const double p = p_values_[b][flat];
        rec.p_mean[b] += prob * p;
        p2[b] += prob * p * p;
      }
    }
    for (std::size_t b = 0; b < dim_; ++b)
      rec.p_std[b] =
          std::sqrt(std::max(0.0, p2[b] - rec.p_mean[b] * rec.p_mean[b]));
    rec.energy = kin + v_energy;
    rec.grad_v_mean = grad;
    return rec;
  }

  const std::vector<double>& kinetic_grid() const { return kinetic_; }

 private:
  const Lattice& lat_;
  std::size_t dim_;
  std::size_t n_;
  std::vector<double> kinetic_;
  const std::vector<double>* potential_;
  const std::vector<double>* gradient_;
  std::vector<std::vector<double>> p_values_;
  double spacing_w_ = 1.0;
};

}  // namespace

// ---------------------------------------------------------------------------
// HamiltonianSpec

HamiltonianSpec HamiltonianSpec::free_n(algebra::FrameSpec frame) {
  return {HamiltonianKind::free_n, std::move(frame), std::monostate{}};
}

HamiltonianSpec HamiltonianSpec::two_body(algebra::FrameSpec frame,
                                          PotentialSpec potential) {
  if (std::holds_alternative<std::monostate>(potential))
    throw std::invalid_argument("two_body: a potential is required");
  return {HamiltonianKind::two_body_interacting, std::move(frame),
          std::move(potential)};
}

HamiltonianSpec HamiltonianSpec::single_body_effective(
    algebra::FrameSpec frame) {
  if (frame.body_count() != 1)
    throw std::invalid_argument(
        "single_body_effective: frame must have exactly one body");
  return {HamiltonianKind::single_body_effective, std::move(frame),
          std::monostate{}};
}

std::vector<std::vector<Rational>> build_kinetic_form(
    const HamiltonianSpec& spec) {
  const algebra::FrameSpec& frame = spec.frame;
  const std::size_t d = frame.body_count();
  std::vector<std::vector<Rational>> k(d, std::vector<Rational>(d));
  const Rational inv_ms = Rational(1) / frame.observer_mass();
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      k[a][b] = inv_ms;
      if (a == b) k[a][b] += Rational(1) / frame.mass_of_index(a);
    }
  return k;
}

std::vector<double> potential_grid(const HamiltonianSpec& spec,
                                   const Lattice& lat) {
  if (std::holds_alternative<std::monostate>(spec.potential))
    return std::vector<double>(lat.size(), 0.0);
  const std::size_t n = lat.points_per_axis();
  std::vector<double> by_diff(n);
  if (const auto* h = std::get_if<HarmonicPotential>(&spec.potential)) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = lat.position(j);
      by_diff[j] = 0.5 * h->stiffness * d * d;
    }
    return difference_sampled(lat, h->body_a, h->body_b, by_diff);
  }
  const auto& tab = std::get<TabulatedPotential>(spec.potential);
  return difference_sampled(lat, tab.body_a, tab.body_b, tab.values);
}

std::vector<double> potential_gradient_grid(const HamiltonianSpec& spec,
                                            const Lattice& lat) {
  if (std::holds_alternative<std::monostate>(spec.potential))
    return std::vector<double>(lat.size(), 0.0);
  const std::size_t n = lat.points_per_axis();
  std::vector<double> by_diff(n);
  if (const auto* h = std::get_if<HarmonicPotential>(&spec.potential)) {
    for (std::size_t j = 0; j < n; ++j)
      by_diff[j] = h->stiffness * lat.position(j);
    return difference_sampled(lat, h->body_a, h->body_b, by_diff);
  }
  const auto& tab = std::get<TabulatedPotential>(spec.potential);
  if (tab.values.size() != n)
    throw std::invalid_argument(
        "potential table must have one entry per grid point");
  for (std::size_t j = 0; j < n; ++j) {
    const double prev = tab.values[(j + n - 1) % n];
    const double next = tab.values[(j + 1) % n];
    by_diff[j] = (next - prev) / (2.0 * lat.spacing());
  }
  return difference_sampled(lat, tab.body_a, tab.body_b, by_diff);
}

// ---------------------------------------------------------------------------
// evolution

Trajectory evolve_quadratic(const LatticeState& initial,
                            const std::vector<std::vector<double>>& k_form,
                            const std::vector<double>* potential,
                            const std::vector<double>* gradient, double dt,
                            std::size_t steps, const EvolveOptions& opts,
                            bool exact_phases) {
  const Lattice& lat = initial.lattice();
  const double hbar = initial.hbar();
  auto kinetic = kinetic_energy_grid(lat, k_form, hbar);

  if (!exact_phases) {
    double e_max = 0.0;
    for (double e : kinetic) e_max = std::max(e_max, std::abs(e));
    if (e_max > 0.0 && dt * e_max / hbar >= 0.5)
      throw std::invalid_argument(
          "evolve: dt violates the split-step accuracy bound; suggested dt <= " +
          std::to_string(0.4 * hbar / e_max));
  }

  Trajectory traj{.records = {},
                  .stored = {},
                  .store_stride = opts.store_stride,
                  .final_state = initial,
                  .dt = dt};

  const auto shape = lat.shape();
  std::vector<std::complex<double>> psi = initial.amplitudes();

  std::vector<std::complex<double>> kin_phase(kinetic.size());
  for (std::size_t k = 0; k < kinetic.size(); ++k)
    kin_phase[k] = std::polar(1.0, -kinetic[k] * dt / hbar);
  std::vector<std::complex<double>> pot_half;
  if (potential && !exact_phases) {
    pot_half.resize(potential->size());
    for (std::size_t k = 0; k < pot_half.size(); ++k)
      pot_half[k] = std::polar(1.0, -0.5 * (*potential)[k] * dt / hbar);
  }

  const Recorder recorder(lat, initial.frame(), hbar, std::move(kinetic),
                          potential, gradient);

  auto snapshot = [&](std::size_t step) {
    if (opts.record)
      traj.records.push_back(
          recorder.record(psi, static_cast<double>(step) * dt));
    if (opts.store_stride > 0 && step % opts.store_stride == 0)
      traj.stored.push_back(
          initial.with_amplitudes(psi, lattice::Normalize::none));
    if (step == steps)
      traj.final_state =
          initial.with_amplitudes(psi, lattice::Normalize::none);
  };

  snapshot(0);
  for (std::size_t step = 1; step <= steps; ++step) {
    if (!pot_half.empty())
      for (std::size_t k = 0; k < psi.size(); ++k) psi[k] *= pot_half[k];
    fft::transform_all_axes(psi, shape, false);
    for (std::size_t k = 0; k < psi.size(); ++k) psi[k] *= kin_phase[k];
    fft::transform_all_axes(psi, shape, true);
    if (!pot_half.empty())
      for (std::size_t k = 0; k < psi.size(); ++k) psi[k] *= pot_half[k];
    snapshot(step);
  }
  return traj;
}

Trajectory evolve(const LatticeState& initial, const HamiltonianSpec& spec,
                  double dt, std::size_t steps, const EvolveOptions& opts) {
  if (initial.frame() != spec.frame)
    throw std::invalid_argument(
        "evolve: state frame does not match the Hamiltonian frame");
  const auto k_rational = build_kinetic_form(spec);
  std::vector<std::vector<double>> k_form(k_rational.size());
  for (std::size_t a = 0; a < k_rational.size(); ++a)
    for (const auto& v : k_rational[a]) k_form[a].push_back(v.to_double());

  if (spec.kind == HamiltonianKind::two_body_interacting) {
    const auto v_grid = potential_grid(spec, initial.lattice());
    const auto g_grid = potential_gradient_grid(spec, initial.lattice());
    return evolve_quadratic(initial, k_form, &v_grid, &g_grid, dt, steps,
                            opts, false);
  }
  return evolve_quadratic(initial, k_form, nullptr, nullptr, dt, steps, opts,
                          true);
}

// ---------------------------------------------------------------------------
// Ehrenfest tracking

EhrenfestReport ehrenfest_track(const Trajectory& traj,
                                const HamiltonianSpec& spec,
                                const std::vector<std::string>& bodies) {
  if (traj.records.size() < 3)
    throw std::invalid_argument("ehrenfest_track: need at least three records");
  const double dt = traj.dt;
  EhrenfestReport report;

  const HarmonicPotential* harm =
      std::get_if<HarmonicPotential>(&spec.potential);
  const TabulatedPotential* tab =
      std::get_if<TabulatedPotential>(&spec.potential);
  const std::string body_a = harm ? harm->body_a : (tab ? tab->body_a : "");
  const std::string body_b = harm ? harm->body_b : (tab ? tab->body_b : "");

  for (const auto& body : bodies) {
    const std::size_t idx = spec.frame.body_index(body);
    const double mass = spec.frame.mass_of(body).to_double();
    BodyEhrenfest be;
    be.body = body;
    for (std::size_t k = 1; k + 1 < traj.records.size(); ++k) {
      const auto& prev = traj.records[k - 1];
      const auto& mid = traj.records[k];
      const auto& next = traj.records[k + 1];
      const double xdot = (next.x_mean[idx] - prev.x_mean[idx]) / (2.0 * dt);
      const double pdot = (next.p_mean[idx] - prev.p_mean[idx]) / (2.0 * dt);
      be.t.push_back(mid.t);
      be.xdot.push_back(xdot);
      be.pdot.push_back(pdot);
      be.xdot_residual.push_back(xdot - mid.p_mean[idx] / mass);
      be.max_xdot_residual =
          std::max(be.max_xdot_residual, std::abs(be.xdot_residual.back()));
      if (body != body_a && body != body_b)
        be.max_pdot = std::max(be.max_pdot, std::abs(pdot));

      if (body == body_a || body == body_b) {
        report.has_force_check = true;
        const double sign = (body == body_a) ? 1.0 : -1.0;
        // Heisenberg form: d<p_a>/dt = -<dV>, d<p_b>/dt = +<dV>
        const double residual = pdot + sign * mid.grad_v_mean;
        const double scaled = pdot + sign * mid.grad_v_mean / mass;
        report.max_force_residual =
            std::max(report.max_force_residual, std::abs(residual));
        report.max_force_residual_scaled =
            std::max(report.max_force_residual_scaled, std::abs(scaled));
      }
    }
    report.bodies.push_back(std::move(be));
  }
  return report;
}

// ---------------------------------------------------------------------------
// reduced-mass spreading

SpreadingCheck reduced_mass_spreading_check(const Rational& m_i,
                                            const Rational& m_s,
                                            double sigma0, double t_total,
                                            const SpreadingOptions& opts) {
  algebra::FrameSpec frame("s", m_s, {{"i", m_i}});
  Lattice lat({"i"}, opts.n, opts.length);
  const lattice::PhysConstants consts{opts.hbar};
  auto state =
      lattice::gaussian_product_state(lat, frame, {{0.0, sigma0, 0.0}}, consts);

  const double dt = t_total / static_cast<double>(opts.steps);
  auto spec = HamiltonianSpec::single_body_effective(frame);
  Trajectory traj = evolve(state, spec, dt, opts.steps);

  const Rational mu_inv = Rational(1) / m_i + Rational(1) / m_s;
  const double mu = 1.0 / mu_inv.to_double();

  SpreadingCheck out;
  out.reduced_mass = mu;
  for (const auto& rec : traj.records) {
    const double predicted =
        sigma0 * std::sqrt(1.0 + std::pow(opts.hbar * rec.t /
                                              (2.0 * mu * sigma0 * sigma0),
                                          2.0));
    if (5.0 * predicted > 0.5 * opts.length)
      throw std::invalid_argument(
          "reduced_mass_spreading_check: wavepacket reaches the boundary; "
          "shorten t_total or enlarge the lattice");
    out.times.push_back(rec.t);
    out.measured.push_back(rec.x_std[0]);
    out.predicted.push_back(predicted);
    out.max_rel_error =
        std::max(out.max_rel_error,
                 std::abs(rec.x_std[0] - predicted) / predicted);
  }
  return out;
}

}  // namespace relqm::dynamics
