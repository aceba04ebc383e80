#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace sbs::num {

using Complex = std::complex<double>;

bool is_power_of_two(std::size_t n);

/// In-place radix-2 FFT. `data.size()` must be a power of two.
void fft(std::vector<Complex>& data, bool inverse);

/// Derivative with respect to the uniform parameter t in [0, 2pi) of a
/// periodic sample sequence, via the Fourier transform. The Nyquist mode is
/// dropped (its derivative is not representable on the grid).
std::vector<Complex> spectral_derivative(const std::vector<Complex>& samples);

/// Simultaneous polynomial root finder (Ehrlich-Aberth) for
/// p(z) = c[0] + c[1] z + ... + c[n] z^n with c[n] != 0.
/// Returns all n roots, unpolished to ~1e-13 relative accuracy.
std::vector<Complex> aberth_roots(const std::vector<Complex>& coeffs, int max_iter = 200);

/// Adaptive Simpson quadrature on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 30);

/// Worker count for batch helpers: min(hardware, SBS_THREADS if set).
unsigned worker_count();

/// Index-parallel loop with deterministic work assignment. Results must be
/// written to per-index slots by `body`; no reduction order is introduced.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace sbs::num
