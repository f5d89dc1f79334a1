#include "specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace dissip::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos(double x) {
    x -= 1.0;
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
    double t = x + 7.5;
    return std::sqrt(2 * kPi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

bool half_integer(double nu) {
    double t = 2 * nu;
    return std::abs(t - std::round(t)) < 1e-12 && (long long)std::llround(t) % 2 != 0;
}

long double series_j_or_i(double nu, double x, bool alternate) {
    long double half = 0.5L * x;
    long double term = std::pow(half, (long double)nu) / (long double)gamma(nu + 1.0);
    long double q = half * half;
    long double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / ((long double)k * ((long double)k + nu));
        if (alternate) term = -term;
        sum += term;
        if (k > x && std::abs(term) < 1e-21L * std::abs(sum)) break;
    }
    return sum;
}

// Hankel asymptotic series; returns P and Q for J, or the single sum for I.
void hankel_pq(double nu, double x, double& p, double& q) {
    double mu = 4 * nu * nu;
    double a = 1.0;
    p = 1.0;
    q = 0.0;
    double last = 1e300;
    for (int k = 1; k < 60; ++k) {
        a *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
        double mag = std::abs(a);
        if (mag > last) break;
        last = mag;
        int r = k % 4;
        if (r == 1) q += a;
        else if (r == 2) p -= a;
        else if (r == 3) q -= a;
        else p += a;
        if (mag < 1e-17) break;
    }
}

double asymptotic_i(double nu, double x) {
    double mu = 4 * nu * nu;
    double a = 1.0, s = 1.0, last = 1e300;
    for (int k = 1; k < 60; ++k) {
        a *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
        if (std::abs(a) > last) break;
        last = std::abs(a);
        s += a;
        if (last < 1e-17) break;
    }
    return std::exp(x) / std::sqrt(2 * kPi * x) * s;
}

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, trapezoid rule. The
// integrand is analytic in a strip around the real axis and decays doubly
// exponentially, so the rule converges geometrically in the step.
template <class T>
T k_integral(double nu, T x) {
    // Discretization error ~ exp(-2 pi w / dt), w = pi/2 - |arg x| the half-width
    // of the strip where the integrand stays analytic and decaying; for large
    // |x| the peak at t = 0 has width ~ |x|^{-1/2} and sets the step instead.
    double w = 0.5 * kPi - std::abs(std::arg(std::complex<double>(x)));
    const double dt = std::min({0.25, 2 * kPi * w / 40.0, kPi / std::sqrt(20.0 * std::abs(x))});
    double rex = std::real(x);
    T sum = 0.5;  // t = 0 term, scaled by exp(x)
    for (int i = 1; i < 2000000; ++i) {
        double t = i * dt;
        double c1 = std::cosh(t) - 1.0;
        T v = std::exp(-x * c1) * std::cosh(nu * t);
        sum += v;
        if (rex * c1 - nu * t > 45.0) break;
    }
    return sum * dt * std::exp(-x);
}

}  // namespace

double gamma(double x) {
    if (!(x > 0.0)) throw DomainError("gamma: argument must be positive");
    if (x > 170.0) throw DomainError("gamma: argument exceeds overflow range");
    double scale = 1.0;
    while (x < 1.0) {
        scale /= x;
        x += 1.0;
    }
    while (x > 2.0) {
        x -= 1.0;
        scale *= x;
    }
    return scale * lanczos(x);
}

double bessel(BesselKind kind, double nu, double x) {
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("bessel: order must be >= 0");
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel: argument must be > 0");
    switch (kind) {
        case BesselKind::J: {
            if (x < 17.0) return double(series_j_or_i(nu, x, true));
            double p, q;
            hankel_pq(nu, x, p, q);
            double chi = x - (0.5 * nu + 0.25) * kPi;
            return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
        }
        case BesselKind::I:
            if (x <= 50.0) return double(series_j_or_i(nu, x, false));
            return asymptotic_i(nu, x);
        case BesselKind::K:
            return k_integral<double>(nu, x);
    }
    throw DomainError("bessel: unknown kind");
}

double even_moment(double nu, int m) {
    return gamma(m + 0.5) * gamma(nu + 0.5) / gamma(m + nu + 1.0);
}

PolyNuK make_poly(double nu, int k) {
    if (!(nu >= 0.0)) throw DomainError("p_poly: nu must be >= 0");
    if (k < 0) throw DomainError("p_poly: k must be >= 0");
    PolyNuK p{nu, k, std::vector<double>(k + 1, 0.0)};
    double binom = 1.0;  // C(k, j)
    for (int j = 0; j <= k; ++j) {
        if (j % 2 == 0) p.coefficients[k - j] = binom * std::pow(0.5, j) * even_moment(nu, j / 2);
        binom = binom * (k - j) / (j + 1);
    }
    return p;
}

double PolyNuK::operator()(double rho) const {
    double v = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * rho + *it;
    return v;
}

double p_poly(double nu, int k, double rho) { return make_poly(nu, k)(rho); }

namespace detail {

using cd = std::complex<double>;

cd bessel_i(double nu, cd x) {
    if (std::abs(x) > 25.0) {
        if (std::real(x) <= 0.0) throw DomainError("bessel_i: large argument needs Re x > 0");
        double mu = 4 * nu * nu;
        cd a = 1.0, s = 1.0;
        double last = 1e300;
        for (int k = 1; k < 60; ++k) {
            a *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0) / x;
            if (std::abs(a) > last) break;
            last = std::abs(a);
            s += a;
            if (last < 1e-17) break;
        }
        return std::exp(x) / std::sqrt(2 * kPi * x) * s;
    }
    using cl = std::complex<long double>;
    cl half = cl(x) * 0.5L;
    cl term = std::exp((long double)nu * std::log(half)) / (long double)gamma(nu + 1.0);
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    cl q = half * half, sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / ((long double)k * ((long double)k + nu));
        sum += term;
        if (k > std::abs(x) && std::abs(term) < 1e-21L * std::abs(sum)) break;
    }
    return cd(sum);
}

cd bessel_k(double nu, cd x) {
    if (std::real(x) <= 0.0) throw DomainError("bessel_k: requires Re x > 0");
    if (half_integer(nu)) {
        // K_{1/2} = K_{-1/2} = sqrt(pi/(2x)) e^{-x}; upward recurrence is stable.
        cd km = std::sqrt(kPi / (2.0 * x)) * std::exp(-x);
        cd k = km;
        for (double v = 0.5; v < nu - 1e-9; v += 1.0) {
            cd next = km + (2.0 * v) / x * k;
            km = k;
            k = next;
        }
        return k;
    }
    return k_integral<cd>(nu, x);
}

}  // namespace detail

}  // namespace dissip::specfun
