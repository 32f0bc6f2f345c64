#include "rosenblatt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "rosenblatt/error.hpp"
#include "rosenblatt/parallel.hpp"

namespace rosenblatt {

namespace {

// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwArray = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwArray<T> fftw_array(std::size_t n) {
  return FftwArray<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  int size = 0;

  explicit PlanPair(int n) : size(n) {
    auto real = fftw_array<double>(static_cast<std::size_t>(n));
    auto spectrum = fftw_array<fftw_complex>(static_cast<std::size_t>(n / 2 + 1));
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(n, real.get(), spectrum.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(n, spectrum.get(), real.get(), FFTW_ESTIMATE);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  ~PlanPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
};

// sqrt(h) times the average of (s - x)_+^{E-1} over a uniform cell, for
// s - x_left = (n + theta) h. Written with log1p/expm1 because the two powers
// nearly cancel far from the diagonal.
double cell_factor(int n, double theta, double e, double h) {
  const double u = n + theta;
  if (u <= 0.0) return 0.0;
  const double scale = std::pow(h, e - 0.5) / e;
  if (u <= 1.0) return scale * std::pow(u, e);
  return scale * std::pow(u, e) * -std::expm1(e * std::log1p(-1.0 / u));
}

}  // namespace

GridSpec resolve_grid(const GammaVector& gamma, GridSpec grid) {
  if (std::isnan(grid.log_left_truncation)) {
    grid.log_left_truncation =
        required_log_left_truncation(gamma, grid.horizon, grid.tail_tolerance);
    return grid;
  }
  const double mass = tail_mass_fraction(gamma, grid.horizon, grid.log_left_truncation);
  if (mass > grid.tail_tolerance) {
    const double needed = required_log_left_truncation(gamma, grid.horizon, grid.tail_tolerance);
    throw Error(ErrorKind::GridTooSmall,
                "tail mass " + std::to_string(mass) + " exceeds tolerance; need ln L >= " +
                    std::to_string(needed));
  }
  return grid;
}

class ChaosSampler::Workspace {
 public:
  Workspace(int fft_size, int range, int q, int tail_cells, int cheb)
      : real(fftw_array<double>(static_cast<std::size_t>(fft_size))),
        squares(fftw_array<double>(static_cast<std::size_t>(fft_size))),
        spectrum(fftw_array<fftw_complex>(static_cast<std::size_t>(fft_size / 2 + 1))),
        square_spectrum(fftw_array<fftw_complex>(static_cast<std::size_t>(fft_size / 2 + 1))),
        product(fftw_array<fftw_complex>(static_cast<std::size_t>(fft_size / 2 + 1))),
        output(fftw_array<double>(static_cast<std::size_t>(fft_size))),
        factors(range, q),
        pairs(range, 3),
        tail_noise(tail_cells),
        tail_squares(tail_cells),
        tail_values(cheb, q),
        tail_pair_values(cheb, 3) {}

  FftwArray<double> real;
  FftwArray<double> squares;
  FftwArray<fftw_complex> spectrum;
  FftwArray<fftw_complex> square_spectrum;
  FftwArray<fftw_complex> product;
  FftwArray<double> output;
  Eigen::MatrixXd factors;
  Eigen::MatrixXd pairs;
  Eigen::VectorXd tail_noise;
  Eigen::VectorXd tail_squares;
  Eigen::MatrixXd tail_values;
  Eigen::MatrixXd tail_pair_values;
};

struct ChaosSampler::Impl {
  KernelSpec kernel;
  GridSpec grid;
  GridGeometry geometry;
  int q;
  double constant;
  double h;
  int uniform;
  int tail;
  int k_lo;
  int k_hi;
  int range;
  GaussRule gauss;
  int cheb;
  Eigen::VectorXd cheb_points;
  std::unique_ptr<PlanPair> plans;
  // spectra of the per-factor cell kernels, index [i * P + p]
  std::vector<std::vector<std::complex<double>>> factor_spectra;
  // q = 3: spectra of products of two factor kernels, index [pair * P + p]
  std::vector<std::vector<std::complex<double>>> pair_spectra;
  std::vector<Eigen::MatrixXd> tail_basis;  // per factor, cheb x tail
  std::vector<Eigen::MatrixXd> interpolation;  // per node p, range x cheb
  Eigen::VectorXd cheb_weights;  // s-quadrature weights pulled back to Chebyshev values
  Eigen::VectorXd diagonal;      // coefficient of prod over all factors at a single cell

  static constexpr int kPairs[3][3] = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}};

  Impl(const KernelSpec& k, const GridSpec& g, double from, double to)
      : kernel(k), grid(resolve_grid(k.gamma(), g)),
        geometry(grid, grid.log_left_truncation), q(k.order()), constant(k.constant()),
        h(grid.mesh()), uniform(geometry.uniform_cells()), tail(geometry.tail_cells()) {
    if (q < 1 || q > kMaxSampledOrder) {
      throw Error(ErrorKind::Size, "sampling supports q in {1, 2, 3}, got " + std::to_string(q));
    }
    if (std::abs(k.horizon() - grid.horizon) > 1e-12 * grid.horizon) {
      throw Error(ErrorKind::InvalidInput, "kernel and grid horizons differ");
    }
    if (std::isnan(to)) to = grid.horizon;
    if (!(from >= 0.0 && from <= to && to <= grid.horizon * (1.0 + 1e-12))) {
      throw Error(ErrorKind::InvalidInput, "need 0 <= s <= t <= horizon");
    }
    k_lo = grid.buffer_cells + static_cast<int>(std::lround(from / h));
    k_hi = grid.buffer_cells + static_cast<int>(std::lround(to / h));
    k_hi = std::min(k_hi, uniform);
    range = k_hi - k_lo;
    gauss = gauss_legendre_unit(grid.nodes_per_cell);
    cheb = grid.chebyshev_nodes;
    cheb_points = chebyshev_points(cheb, 0.0, grid.horizon);

    const int nodes = grid.nodes_per_cell;
    const int fft_size = 2 * uniform;
    plans = std::make_unique<PlanPair>(fft_size);

    auto spectrum_of = [&](const std::vector<double>& values) {
      auto in = fftw_array<double>(static_cast<std::size_t>(fft_size));
      auto out = fftw_array<fftw_complex>(static_cast<std::size_t>(fft_size / 2 + 1));
      std::fill(in.get(), in.get() + fft_size, 0.0);
      std::copy(values.begin(), values.end(), in.get());
      fftw_execute_dft_r2c(plans->forward, in.get(), out.get());
      std::vector<std::complex<double>> result(static_cast<std::size_t>(fft_size / 2 + 1));
      for (std::size_t m = 0; m < result.size(); ++m) result[m] = {out[m][0], out[m][1]};
      return result;
    };

    // cell kernels kappa_{i,p}(n), n = k - j
    std::vector<std::vector<double>> kappa(static_cast<std::size_t>(q * nodes));
    for (int i = 0; i < q; ++i) {
      for (int p = 0; p < nodes; ++p) {
        auto& v = kappa[static_cast<std::size_t>(i * nodes + p)];
        v.resize(static_cast<std::size_t>(uniform));
        for (int n = 0; n < uniform; ++n) v[static_cast<std::size_t>(n)] = cell_factor(n, gauss.nodes(p), kernel.gamma()[i] + 1.0, h);
        factor_spectra.push_back(spectrum_of(v));
      }
    }
    if (q == 3) {
      for (const auto& pr : kPairs) {
        for (int p = 0; p < nodes; ++p) {
          const auto& a = kappa[static_cast<std::size_t>(pr[0] * nodes + p)];
          const auto& b = kappa[static_cast<std::size_t>(pr[1] * nodes + p)];
          std::vector<double> v(a.size());
          for (std::size_t n = 0; n < v.size(); ++n) v[n] = a[n] * b[n];
          pair_spectra.push_back(spectrum_of(v));
        }
      }
    }

    for (int i = 0; i < q; ++i) {
      Eigen::MatrixXd basis(cheb, tail);
      for (int m = 0; m < tail; ++m) {
        for (int c = 0; c < cheb; ++c) {
          basis(c, m) = tail_scaled_average(geometry.tail()[static_cast<std::size_t>(m)],
                                            cheb_points(c), kernel.gamma()[i]);
        }
      }
      tail_basis.push_back(std::move(basis));
    }
    cheb_weights = Eigen::VectorXd::Zero(cheb);
    for (int p = 0; p < nodes; ++p) {
      Eigen::VectorXd targets(range);
      for (int r = 0; r < range; ++r) targets(r) = (k_lo + r - grid.buffer_cells + gauss.nodes(p)) * h;
      interpolation.push_back(chebyshev_interpolation_matrix(cheb_points, targets));
      cheb_weights += h * gauss.weights(p) * interpolation.back().colwise().sum().transpose();
    }

    // single-cell coefficient sum_{k,p} h w_p prod_i kappa_{i,p}(k - j)
    diagonal = Eigen::VectorXd::Zero(uniform + tail);
    std::vector<double> prefix(static_cast<std::size_t>(uniform) + 1, 0.0);
    for (int n = 0; n < uniform; ++n) {
      double c = 0.0;
      for (int p = 0; p < nodes; ++p) {
        double prod = h * gauss.weights(p);
        for (int i = 0; i < q; ++i) prod *= kappa[static_cast<std::size_t>(i * nodes + p)][static_cast<std::size_t>(n)];
        c += prod;
      }
      prefix[static_cast<std::size_t>(n) + 1] = prefix[static_cast<std::size_t>(n)] + c;
    }
    for (int j = 0; j < std::min(uniform, k_hi); ++j) {
      const int first = std::max(j, k_lo) - j;
      const int last = k_hi - j;
      diagonal(j) = prefix[static_cast<std::size_t>(last)] - prefix[static_cast<std::size_t>(first)];
    }
    if (tail > 0) {
      Eigen::MatrixXd prod = tail_basis[0];
      for (int i = 1; i < q; ++i) prod = prod.cwiseProduct(tail_basis[static_cast<std::size_t>(i)]);
      diagonal.tail(tail) = prod.transpose() * cheb_weights;
    }
  }

  // out(k) = sum_j kernel(k - j) x_j for k in [k_lo, k_hi), given the spectrum of x
  void convolve(Workspace& ws, const fftw_complex* x, const std::vector<std::complex<double>>& kernel_spectrum,
                Eigen::Ref<Eigen::VectorXd> out) const {
    const std::size_t bins = kernel_spectrum.size();
    for (std::size_t m = 0; m < bins; ++m) {
      const std::complex<double> v = std::complex<double>(x[m][0], x[m][1]) * kernel_spectrum[m];
      ws.product[m][0] = v.real();
      ws.product[m][1] = v.imag();
    }
    fftw_execute_dft_c2r(plans->backward, ws.product.get(), ws.output.get());
    const double inv = 1.0 / plans->size;
    for (int r = 0; r < range; ++r) out(r) = ws.output[static_cast<std::size_t>(k_lo + r)] * inv;
  }

  double evaluate(std::span<const double> xi, Workspace& ws) const {
    if (range == 0) return 0.0;
    const int nodes = grid.nodes_per_cell;
    const int fft_size = plans->size;
    std::fill(ws.real.get(), ws.real.get() + fft_size, 0.0);
    std::copy(xi.begin(), xi.begin() + uniform, ws.real.get());
    fftw_execute_dft_r2c(plans->forward, ws.real.get(), ws.spectrum.get());
    for (int m = 0; m < tail; ++m) ws.tail_noise(m) = xi[static_cast<std::size_t>(uniform + m)];
    for (int i = 0; i < q; ++i) {
      ws.tail_values.col(i) = tail > 0 ? Eigen::VectorXd(tail_basis[static_cast<std::size_t>(i)] * ws.tail_noise)
                                       : Eigen::VectorXd::Zero(cheb);
    }
    if (q == 3) {
      std::fill(ws.squares.get(), ws.squares.get() + fft_size, 0.0);
      for (int j = 0; j < uniform; ++j) ws.squares[static_cast<std::size_t>(j)] = xi[static_cast<std::size_t>(j)] * xi[static_cast<std::size_t>(j)];
      fftw_execute_dft_r2c(plans->forward, ws.squares.get(), ws.square_spectrum.get());
      ws.tail_squares = ws.tail_noise.array().square();
      for (int pr = 0; pr < 3; ++pr) {
        if (tail > 0) {
          ws.tail_pair_values.col(pr) =
              tail_basis[static_cast<std::size_t>(kPairs[pr][0])]
                  .cwiseProduct(tail_basis[static_cast<std::size_t>(kPairs[pr][1])]) *
              ws.tail_squares;
        } else {
          ws.tail_pair_values.col(pr).setZero();
        }
      }
    }

    double full = 0.0;
    double pairs = 0.0;
    for (int p = 0; p < nodes; ++p) {
      const Eigen::MatrixXd& interp = interpolation[static_cast<std::size_t>(p)];
      for (int i = 0; i < q; ++i) {
        convolve(ws, ws.spectrum.get(), factor_spectra[static_cast<std::size_t>(i * nodes + p)], ws.factors.col(i));
        ws.factors.col(i) += interp * ws.tail_values.col(i);
      }
      const double weight = h * gauss.weights(p);
      full += weight * ws.factors.rowwise().prod().sum();
      if (q == 3) {
        for (int pr = 0; pr < 3; ++pr) {
          convolve(ws, ws.square_spectrum.get(), pair_spectra[static_cast<std::size_t>(pr * nodes + p)], ws.pairs.col(pr));
          ws.pairs.col(pr) += interp * ws.tail_pair_values.col(pr);
          pairs += weight * ws.pairs.col(pr).dot(ws.factors.col(kPairs[pr][2]));
        }
      }
    }

    double value = full;
    if (q == 2) {
      double diag = 0.0;
      for (std::size_t j = 0; j < xi.size(); ++j) diag += diagonal(static_cast<Eigen::Index>(j)) * xi[j] * xi[j];
      value -= diag;
    } else if (q == 3) {
      double triple = 0.0;
      for (std::size_t j = 0; j < xi.size(); ++j) triple += diagonal(static_cast<Eigen::Index>(j)) * xi[j] * xi[j] * xi[j];
      value += -pairs + 2.0 * triple;
    }
    return constant * value;
  }
};

ChaosSampler::ChaosSampler(const KernelSpec& kernel, const GridSpec& grid, double from, double to)
    : impl_(std::make_unique<Impl>(kernel, grid, from, to)) {}
ChaosSampler::~ChaosSampler() = default;
ChaosSampler::ChaosSampler(ChaosSampler&&) noexcept = default;
ChaosSampler& ChaosSampler::operator=(ChaosSampler&&) noexcept = default;

int ChaosSampler::order() const noexcept { return impl_->q; }
const KernelSpec& ChaosSampler::kernel() const noexcept { return impl_->kernel; }
const GridSpec& ChaosSampler::grid() const noexcept { return impl_->grid; }
const GridGeometry& ChaosSampler::geometry() const noexcept { return impl_->geometry; }
std::size_t ChaosSampler::noise_dimension() const noexcept {
  return static_cast<std::size_t>(impl_->geometry.total_cells());
}

std::shared_ptr<ChaosSampler::Workspace> ChaosSampler::make_workspace() const {
  return std::make_shared<Workspace>(impl_->plans->size, impl_->range, impl_->q, impl_->tail, impl_->cheb);
}

void ChaosSampler::draw_noise(std::uint64_t seed, std::uint64_t index, std::span<double> xi) const {
  RealizationStream stream(seed, index);
  for (double& x : xi) x = stream.normal();
}

double ChaosSampler::evaluate(std::span<const double> xi, Workspace& workspace) const {
  if (xi.size() != noise_dimension()) throw Error(ErrorKind::InvalidInput, "noise vector has wrong length");
  return impl_->evaluate(xi, workspace);
}

std::vector<double> ChaosSampler::sample(std::size_t count, std::uint64_t seed, int threads) const {
  std::vector<double> values(count);
  const ChaosSampler* self = this;
  const auto joint = sample_joint(std::span<const ChaosSampler* const>(&self, 1), count, seed, threads);
  for (std::size_t m = 0; m < count; ++m) values[m] = joint(static_cast<Eigen::Index>(m), 0);
  return values;
}

Eigen::VectorXd ChaosSampler::linear_coefficients() const {
  if (impl_->q != 1) throw Error(ErrorKind::InvalidInput, "linear coefficients need q = 1");
  return impl_->constant * impl_->diagonal;
}

double ChaosSampler::exact_variance() const { return linear_coefficients().squaredNorm(); }

double ChaosSampler::exact_second_moment() const {
  const Impl& im = *impl_;
  if (im.q == 1) return exact_variance();
  if (im.q != 2) throw Error(ErrorKind::Size, "exact second moment implemented for q <= 2");
  const int n = im.geometry.total_cells();
  const int nodes = im.grid.nodes_per_cell;
  const int count = im.range * nodes;
  if (static_cast<double>(n) * n * count > 5e10) throw Error(ErrorKind::Size, "grid too large for the dense moment");
  Eigen::MatrixXd a(n, count);
  Eigen::MatrixXd b(n, count);
  for (int r = 0; r < im.range; ++r) {
    for (int p = 0; p < nodes; ++p) {
      const double s = (im.k_lo + r - im.grid.buffer_cells + im.gauss.nodes(p)) * im.h;
      const double w = im.h * im.gauss.weights(p);
      for (int j = 0; j < n; ++j) {
        a(j, r * nodes + p) = w * im.geometry.scaled_average(j, s, im.kernel.gamma()[0]);
        b(j, r * nodes + p) = im.geometry.scaled_average(j, s, im.kernel.gamma()[1]);
      }
    }
  }
  Eigen::MatrixXd f = im.constant * a * b.transpose();
  Eigen::MatrixXd sym = 0.5 * (f + f.transpose());
  sym.diagonal().setZero();
  return 2.0 * sym.squaredNorm();
}

std::vector<double> ChaosSampler::materialize_tensor() const {
  const Impl& im = *impl_;
  const int n = im.geometry.total_cells();
  std::size_t size = 1;
  for (int i = 0; i < im.q; ++i) size *= static_cast<std::size_t>(n);
  if (size > 2'000'000) throw Error(ErrorKind::Size, "tensor too large to materialize");
  std::vector<double> tensor(size, 0.0);
  std::vector<Eigen::VectorXd> factors(static_cast<std::size_t>(im.q), Eigen::VectorXd(n));
  for (int k = im.k_lo; k < im.k_hi; ++k) {
    for (int p = 0; p < im.grid.nodes_per_cell; ++p) {
      const double s = (k - im.grid.buffer_cells + im.gauss.nodes(p)) * im.h;
      const double weight = im.constant * im.h * im.gauss.weights(p);
      for (int i = 0; i < im.q; ++i) {
        for (int j = 0; j < n; ++j) factors[static_cast<std::size_t>(i)](j) = im.geometry.scaled_average(j, s, im.kernel.gamma()[i]);
      }
      for (std::size_t flat = 0; flat < size; ++flat) {
        std::size_t rest = flat;
        double prod = weight;
        for (int i = im.q - 1; i >= 0; --i) {
          prod *= factors[static_cast<std::size_t>(i)](static_cast<Eigen::Index>(rest % static_cast<std::size_t>(n)));
          rest /= static_cast<std::size_t>(n);
        }
        tensor[flat] += prod;
      }
    }
  }
  return tensor;
}

Eigen::MatrixXd sample_joint(std::span<const ChaosSampler* const> samplers, std::size_t count,
                             std::uint64_t seed, int threads) {
  if (samplers.empty()) throw Error(ErrorKind::InvalidInput, "no samplers");
  const ChaosSampler& first = *samplers.front();
  const std::size_t dim = first.noise_dimension();
  for (const auto* s : samplers) {
    if (s->noise_dimension() != dim || s->geometry().mesh() != first.geometry().mesh()) {
      throw Error(ErrorKind::InvalidInput, "joint sampling needs a shared grid");
    }
  }
  const auto& geo = first.geometry();
  const int buffer = geo.buffer_cells();
  const int last = geo.uniform_cells();
  const double root_h = std::sqrt(geo.mesh());

  if (threads <= 0) threads = default_thread_count();
  const std::size_t k = samplers.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(k + 1));
  std::vector<std::vector<std::shared_ptr<ChaosSampler::Workspace>>> spaces(static_cast<std::size_t>(threads));
  std::vector<std::vector<double>> noise(static_cast<std::size_t>(threads), std::vector<double>(dim));
  parallel_for(count, threads, [&](std::size_t m, int worker) {
    auto& ws = spaces[static_cast<std::size_t>(worker)];
    if (ws.empty()) {
      for (const auto* s : samplers) ws.push_back(s->make_workspace());
    }
    auto& xi = noise[static_cast<std::size_t>(worker)];
    first.draw_noise(seed, m, xi);
    for (std::size_t c = 0; c < k; ++c) {
      out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) = samplers[c]->evaluate(xi, *ws[c]);
    }
    double w = 0.0;
    for (int j = buffer; j < last; ++j) w += xi[static_cast<std::size_t>(j)];
    out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = root_h * w;
  });
  return out;
}

namespace {

double normalization_scale(const ChaosSampler& full, const SamplerOptions& options, std::uint64_t seed) {
  switch (options.normalization) {
    case Normalization::Continuum:
      return 1.0;
    case Normalization::Exact:
      return 1.0 / std::sqrt(full.exact_variance());
    case Normalization::Pilot: {
      if (options.pilot_size < 2) throw Error(ErrorKind::InvalidInput, "pilot batch too small");
      const auto pilot = full.sample(options.pilot_size, derive_seed(seed, "pilot"), options.threads);
      double second = 0.0;
      for (double v : pilot) second += v * v;
      return 1.0 / std::sqrt(second / static_cast<double>(pilot.size()));
    }
  }
  return 1.0;
}

void check_order(const KernelSpec& kernel, int q) {
  if (q < 1 || q > kMaxSampledOrder) throw Error(ErrorKind::Size, "sampling supports q in {1, 2, 3}");
  if (kernel.order() != q) throw Error(ErrorKind::InvalidInput, "q does not match the kernel order");
}

}  // namespace

ChaosSampleBatch sample_process_increment(const KernelSpec& kernel, const GridSpec& grid, int q,
                                          double s, double t, std::size_t count,
                                          std::uint64_t seed, const SamplerOptions& options) {
  check_order(kernel, q);
  ChaosSampler sampler(kernel, grid, s, t);
  double scale = 1.0;
  if (options.normalization != Normalization::Continuum) {
    ChaosSampler full(kernel, sampler.grid());
    scale = normalization_scale(full, options, seed);
  }
  ChaosSampleBatch batch{sampler.sample(count, seed, options.threads), seed, sampler.grid(),
                         kernel, options.normalization, scale, s, t};
  for (double& v : batch.values) v *= scale;
  return batch;
}

ChaosSampleBatch sample_chaos(const KernelSpec& kernel, const GridSpec& grid, int q,
                              std::size_t count, std::uint64_t seed, const SamplerOptions& options) {
  return sample_process_increment(kernel, grid, q, 0.0, grid.horizon, count, seed, options);
}

}  // namespace rosenblatt
