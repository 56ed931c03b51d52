#include "echolab/oracle.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace echolab {

namespace {

// FFTW planning is not thread-safe; execution with separate buffers is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// In-place complex FFT wrapper holding its own buffer and plans.
class Fft {
public:
  explicit Fft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    buf_ = fftw_alloc_complex(n);
    fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  // Normalised inverse.
  void backward() {
    fftw_execute(bwd_);
    Complex* d = data();
    const double s = 1.0 / n_;
    for (int i = 0; i < n_; ++i) d[i] *= s;
  }

private:
  int n_;
  fftw_complex* buf_;
  fftw_plan fwd_, bwd_;
};

double fft_freq(int j, int n) { return (j < n / 2) ? j : j - n; }

}  // namespace

void Grid1D::validate() const {
  if (!(q_max > q_min)) fail(ErrorCode::validation, "Grid1D: q_max must exceed q_min");
  if (n_points < 256 || (n_points & (n_points - 1)) != 0)
    fail(ErrorCode::validation, "Grid1D: n_points must be a power of two >= 256");
  if (!(hbar > 0.0)) fail(ErrorCode::validation, "Grid1D: hbar must be positive");
}

Grid1D auto_grid(const HamiltonianModel& model, const PhaseVector& z, double t_max, double hbar,
                 int n_points) {
  // Follow the classical trajectory to size the box.
  double q_lo = z(0), q_hi = z(0), s_max = 1.0;
  if (t_max > 0.0) {
    const TrajectoryBundle b = evolve(model, z, uniform_times(t_max, 64));
    for (std::size_t k = 0; k < b.points.size(); ++k) {
      q_lo = std::min(q_lo, b.points[k](0));
      q_hi = std::max(q_hi, b.points[k](0));
      s_max = std::max(s_max, largest_stretch(b.stability[k]));
    }
  }
  const double pad = 8.0 * std::sqrt(hbar * s_max);
  Grid1D g;
  g.q_min = q_lo - pad;
  g.q_max = q_hi + pad;
  g.n_points = n_points;
  g.hbar = hbar;
  g.validate();
  return g;
}

double GridWavefunction::norm() const { return std::sqrt(samples.squaredNorm() * grid.dx()); }

double GridWavefunction::boundary_mass() const {
  const int n = grid.n_points;
  const int edge = std::max(1, n / 50);
  double m = 0.0;
  for (int j = 0; j < edge; ++j) m += std::norm(samples(j)) + std::norm(samples(n - 1 - j));
  return m * grid.dx();
}

Complex grid_inner(const GridWavefunction& a, const GridWavefunction& b) {
  if (a.grid.n_points != b.grid.n_points || a.grid.q_min != b.grid.q_min ||
      a.grid.q_max != b.grid.q_max)
    fail(ErrorCode::validation, "grid_inner: incompatible grids");
  return a.samples.dot(b.samples) * a.grid.dx();  // Eigen dot conjugates the first factor
}

GridWavefunction discretize_coherent(const PhaseVector& z, const Grid1D& grid) {
  grid.validate();
  if (z.size() != 2) fail(ErrorCode::invalid_dimension, "discretize_coherent: oracle is 1-D");
  const double hbar = grid.hbar;
  const double width = std::sqrt(hbar);
  if (width < 8.0 * grid.dx())
    fail(ErrorCode::resolution, "discretize_coherent: packet width under-resolved", width / grid.dx());
  const double q = z(0), p = z(1);
  if (q - 4.0 * width < grid.q_min || q + 4.0 * width > grid.q_max)
    fail(ErrorCode::domain_leak, "discretize_coherent: packet not contained in the domain");

  GridWavefunction psi;
  psi.grid = grid;
  psi.samples.resize(grid.n_points);
  const double amp = std::pow(M_PI * hbar, -0.25);
  for (int j = 0; j < grid.n_points; ++j) {
    const double x = grid.q(j);
    const double dq = x - q;
    psi.samples(j) = amp * std::exp(Complex(-dq * dq / (2.0 * hbar), p * (x - 0.5 * q) / hbar));
  }
  psi.samples /= psi.norm();
  if (psi.boundary_mass() > 1e-12)
    fail(ErrorCode::domain_leak, "discretize_coherent: boundary mass above 1e-12",
         psi.boundary_mass());
  return psi;
}

GridWavefunction discretize_gaussian(const GaussianState& g1, const PhaseVector& center,
                                     double gamma_action, const Grid1D& grid) {
  grid.validate();
  if (g1.dim != 1) fail(ErrorCode::invalid_dimension, "discretize_gaussian: oracle is 1-D");
  const double hbar = grid.hbar;
  const double q = center(0), p = center(1);
  const Complex gamma_w = g1.width(0, 0);
  GridWavefunction psi;
  psi.grid = grid;
  psi.samples.resize(grid.n_points);
  // e^{i gamma/hbar} T(z) Lambda_hbar [prefactor exp(i/2 Gamma x^2)]
  const Complex global = std::exp(Complex(0.0, gamma_action / hbar)) * g1.prefactor *
                         std::pow(hbar, -0.25);
  for (int j = 0; j < grid.n_points; ++j) {
    const double x = grid.q(j);
    const double u = x - q;
    psi.samples(j) =
        global * std::exp(Complex(0.0, 1.0) * (0.5 * gamma_w * u * u + p * (x - 0.5 * q)) / hbar);
  }
  return psi;
}

std::pair<double, double> position_momentum_mean(const GridWavefunction& psi) {
  const int n = psi.grid.n_points;
  const double dx = psi.grid.dx();
  double qm = 0.0;
  for (int j = 0; j < n; ++j) qm += psi.grid.q(j) * std::norm(psi.samples(j));
  qm *= dx;
  Fft fft(n);
  Complex* d = fft.data();
  for (int j = 0; j < n; ++j) d[j] = psi.samples(j);
  fft.forward();
  double pm = 0.0, tot = 0.0;
  const double two_pi_over_l = 2.0 * M_PI / psi.grid.length();
  for (int j = 0; j < n; ++j) {
    const double k = two_pi_over_l * fft_freq(j, n);
    pm += psi.grid.hbar * k * std::norm(d[j]);
    tot += std::norm(d[j]);
  }
  return {qm, pm / tot};
}

GridWavefunction split_step_propagate(const HamiltonianModel& model, const GridWavefunction& psi,
                                      double t_final, int n_steps) {
  if (!model.has_kinetic_split || model.dim != 1)
    fail(ErrorCode::unsupported_model, "split_step_propagate: needs H = p^2/2 + V(q), 1-D");
  if (n_steps < 1) fail(ErrorCode::validation, "split_step_propagate: n_steps must be >= 1");
  const Grid1D& g = psi.grid;
  const int n = g.n_points;
  const double dt = t_final / n_steps;
  const double hbar = g.hbar;
  const double norm0 = psi.norm();

  CVec half_v(n), full_v(n), kin(n);
  const double two_pi_over_l = 2.0 * M_PI / g.length();
  for (int j = 0; j < n; ++j) {
    const double v = model.potential(g.q(j));
    half_v(j) = std::exp(Complex(0.0, -0.5 * dt * v / hbar));
    full_v(j) = half_v(j) * half_v(j);
    const double k = two_pi_over_l * fft_freq(j, n);
    kin(j) = std::exp(Complex(0.0, -0.5 * dt * hbar * k * k));
  }

  Fft fft(n);
  Complex* d = fft.data();
  for (int j = 0; j < n; ++j) d[j] = psi.samples(j) * half_v(j);
  for (int s = 0; s < n_steps; ++s) {
    fft.forward();
    for (int j = 0; j < n; ++j) d[j] *= kin(j);
    fft.backward();
    if (s + 1 < n_steps)
      for (int j = 0; j < n; ++j) d[j] *= full_v(j);
  }
  GridWavefunction out;
  out.grid = g;
  out.samples.resize(n);
  for (int j = 0; j < n; ++j) out.samples(j) = d[j] * half_v(j);

  const double drift = std::abs(out.norm() - norm0);
  if (drift > 1e-10)
    fail(ErrorCode::integration_failure, "split_step_propagate: unitarity drift above 1e-10",
         drift);
  if (out.boundary_mass() > 1e-12)
    fail(ErrorCode::domain_leak, "split_step_propagate: density reached the boundary",
         out.boundary_mass());
  return out;
}

int StepPolicy::steps_for(double t) const {
  return std::max(min_steps, static_cast<int>(std::ceil(std::abs(t) / dt)));
}

EchoSeries exact_fidelity(const HamiltonianModel& model0, const HamiltonianModel& model_delta,
                          const PhaseVector& z, const std::vector<double>& times, double hbar,
                          const Grid1D& grid, const StepPolicy& policy) {
  Grid1D g = grid;
  g.hbar = hbar;
  GridWavefunction psi0 = discretize_coherent(z, g);
  GridWavefunction psi_d = psi0;
  EchoSeries s;
  s.times = times;
  s.values.resize(times.size());
  s.prefactors.assign(times.size(), 1.0);
  s.exponents.assign(times.size(), 0.0);
  s.flags.assign(times.size(), flag_none);
  double t_prev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double seg = times[k] - t_prev;
    if (seg != 0.0) {
      const int steps = policy.steps_for(seg);
      psi0 = split_step_propagate(model0, psi0, seg, steps);
      psi_d = split_step_propagate(model_delta, psi_d, seg, steps);
    }
    t_prev = times[k];
    s.values[k] = std::norm(grid_inner(psi0, psi_d));
  }
  return s;
}

std::vector<Complex> return_overlap_series(const HamiltonianModel& model, const PhaseVector& z,
                                           const std::vector<double>& times, double hbar,
                                           const Grid1D& grid, const StepPolicy& policy) {
  Grid1D g = grid;
  g.hbar = hbar;
  const GridWavefunction psi0 = discretize_coherent(z, g);
  GridWavefunction psi = psi0;
  std::vector<Complex> out(times.size());
  double t_prev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double seg = times[k] - t_prev;
    if (seg != 0.0) psi = split_step_propagate(model, psi, seg, policy.steps_for(seg));
    t_prev = times[k];
    out[k] = grid_inner(psi0, psi);
  }
  return out;
}

std::vector<double> eigenvalues_1d(const HamiltonianModel& model, double hbar, const Grid1D& grid,
                                   int k) {
  Grid1D g = grid;
  g.hbar = hbar;
  g.validate();
  if (!model.has_kinetic_split || model.dim != 1)
    fail(ErrorCode::unsupported_model, "eigensolve_1d: needs H = p^2/2 + V(q), 1-D");
  const int n = g.n_points;
  if (k < 1 || k > n / 2)
    fail(ErrorCode::truncation, "eigensolve_1d: requested level count out of range",
         static_cast<double>(k));

  // Kinetic operator is a symmetric circulant: first row by inverse FFT of
  // the spectral multipliers hbar^2 k^2 / 2.
  Fft fft(n);
  Complex* d = fft.data();
  const double two_pi_over_l = 2.0 * M_PI / g.length();
  for (int j = 0; j < n; ++j) {
    const double kk = two_pi_over_l * fft_freq(j, n);
    d[j] = 0.5 * hbar * hbar * kk * kk;
  }
  fft.backward();
  std::vector<double> c(n);
  for (int j = 0; j < n; ++j) c[j] = d[j].real();

  Mat H(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) H(i, j) = c[(i - j + n) % n];
    H(i, i) += model.potential(g.q(i));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
  std::vector<double> evals(k);
  for (int i = 0; i < k; ++i) evals[i] = es.eigenvalues()(i);

  // Boundary-potential sanity: levels must sit well below the wall.
  const double v_wall = std::min(model.potential(g.q_min), model.potential(g.q_max));
  if (evals.back() > v_wall)
    fail(ErrorCode::truncation, "eigensolve_1d: top requested level above the domain wall",
         evals.back() - v_wall);
  return evals;
}

SpectralLadder eigensolve_1d(const HamiltonianModel& model, double hbar, const Grid1D& grid,
                             int k, double ref_energy, int deriv_stencil) {
  return ladder_from_energies(hbar, 0, eigenvalues_1d(model, hbar, grid, k), ref_energy,
                              LadderSource::grid_diagonalization, deriv_stencil);
}

WignerGrid wigner_transform(const GridWavefunction& psi) {
  const Grid1D& g = psi.grid;
  const int n = g.n_points;
  const double dx = g.dx();
  const double hbar = g.hbar;
  WignerGrid w;
  w.q.resize(n);
  w.p.resize(n);
  w.w.resize(n, n);
  for (int j = 0; j < n; ++j) w.q[j] = g.q(j);
  // W(q, p) = (1/pi hbar) int conj(psi(q+y)) psi(q-y) e^{2ipy/hbar} dy,
  // discretised at y = m dx; the FFT gives p_k = pi hbar k / L.
  const double p_unit = M_PI * hbar / g.length();
  for (int j = 0; j < n; ++j) w.p[j] = p_unit * fft_freq(j, n);

  Fft fft(n);
  Complex* d = fft.data();
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      const int ms = (m < n / 2) ? m : m - n;  // signed offset
      const int jp = i + ms, jm = i - ms;
      d[m] = (jp >= 0 && jp < n && jm >= 0 && jm < n)
                 ? std::conj(psi.samples(jp)) * psi.samples(jm)
                 : Complex(0.0, 0.0);
    }
    fft.backward();  // sum_m c_m e^{+2pi i m k / n} / n
    for (int kk = 0; kk < n; ++kk) w.w(i, kk) = (d[kk].real() * n) * dx / (M_PI * hbar);
  }
  return w;
}

double WignerGrid::cell() const {
  const double dq = q[1] - q[0];
  const double dp = p[1] - p[0];  // p[] is in FFT order; spacing is uniform
  return dq * std::abs(dp);
}

Complex weyl_expectation(const std::function<Complex(double, double)>& symbol,
                         const GridWavefunction& psi) {
  if (psi.boundary_mass() > 1e-10)
    fail(ErrorCode::domain_leak, "weyl_expectation: state leaks out of the grid");
  const WignerGrid w = wigner_transform(psi);
  const int n = static_cast<int>(w.q.size());
  Complex acc(0.0, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w.w(i, j) != 0.0) acc += symbol(w.q[i], w.p[j]) * w.w(i, j);
  return acc * w.cell();
}

EchoExpectationFn make_echo_expectation(const Grid1D& grid, const StepPolicy& policy) {
  return [grid, policy](const HamiltonianModel& model0, const HamiltonianModel& model_delta,
                        const PhaseVector& z, double t, double hbar,
                        const Observable& L) -> Complex {
    Grid1D g = grid;
    g.hbar = hbar;
    GridWavefunction psi = discretize_coherent(z, g);
    if (t != 0.0) {
      psi = split_step_propagate(model_delta, psi, t, policy.steps_for(t));
      psi = split_step_propagate(model0, psi, -t, policy.steps_for(t));
    }
    return weyl_expectation(L.symbol, psi);
  };
}

}  // namespace echolab
