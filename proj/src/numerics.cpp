#include "sbs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sbs/errors.hpp"

namespace sbs::num {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft(std::vector<Complex>& data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) throw_invalid_input("fft: length must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const Complex wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex u = data[i + k];
                const Complex v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : data) x *= inv;
    }
}

std::vector<Complex> spectral_derivative(const std::vector<Complex>& samples) {
    const std::size_t n = samples.size();
    if (!is_power_of_two(n)) throw_invalid_input("spectral_derivative: length must be a power of two");
    std::vector<Complex> hat = samples;
    fft(hat, false);
    for (std::size_t k = 0; k < n; ++k) {
        double freq;
        if (k < n / 2)
            freq = static_cast<double>(k);
        else if (k == n / 2)
            freq = 0.0; // Nyquist
        else
            freq = static_cast<double>(k) - static_cast<double>(n);
        hat[k] *= Complex(0.0, freq);
    }
    fft(hat, true);
    return hat;
}

std::vector<Complex> aberth_roots(const std::vector<Complex>& coeffs, int max_iter) {
    int deg = static_cast<int>(coeffs.size()) - 1;
    while (deg > 0 && std::abs(coeffs[static_cast<std::size_t>(deg)]) == 0.0) --deg;
    if (deg <= 0) return {};

    const auto eval = [&](Complex z, Complex& p, Complex& dp) {
        p = coeffs[static_cast<std::size_t>(deg)];
        dp = Complex{0.0, 0.0};
        for (int k = deg - 1; k >= 0; --k) {
            dp = dp * z + p;
            p = p * z + coeffs[static_cast<std::size_t>(k)];
        }
    };

    // initial guesses on a circle sized by the Cauchy bound
    const double lead = std::abs(coeffs[static_cast<std::size_t>(deg)]);
    double bound = 0.0;
    for (int k = 0; k < deg; ++k)
        bound = std::max(bound, std::pow(std::abs(coeffs[static_cast<std::size_t>(k)]) / lead,
                                         1.0 / static_cast<double>(deg - k)));
    const double r0 = 1.0 + 2.0 * bound;
    std::vector<Complex> roots(static_cast<std::size_t>(deg));
    for (int i = 0; i < deg; ++i) {
        const double th = 2.0 * M_PI * (static_cast<double>(i) + 0.35) / static_cast<double>(deg) + 0.4;
        roots[static_cast<std::size_t>(i)] = r0 * Complex(std::cos(th), std::sin(th));
    }

    for (int it = 0; it < max_iter; ++it) {
        double worst = 0.0;
        for (int i = 0; i < deg; ++i) {
            Complex p, dp;
            eval(roots[static_cast<std::size_t>(i)], p, dp);
            if (std::abs(p) == 0.0) continue;
            Complex newton = (dp == Complex{0.0, 0.0}) ? Complex{0.0, 0.0} : p / dp;
            Complex sum{0.0, 0.0};
            for (int j = 0; j < deg; ++j)
                if (j != i) sum += 1.0 / (roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)]);
            const Complex den = 1.0 - newton * sum;
            Complex step = (std::abs(den) > 1e-300) ? newton / den : newton;
            if (dp == Complex{0.0, 0.0} && std::abs(p) > 0.0) {
                // flat spot: nudge off it
                step = Complex(1e-3, 1e-3);
            }
            roots[static_cast<std::size_t>(i)] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(roots[static_cast<std::size_t>(i)])));
        }
        if (worst < 1e-14) break;
    }
    return roots;
}

namespace {
double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                   double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SBS_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::size_t i = t; i < n; i += workers) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace sbs::num
