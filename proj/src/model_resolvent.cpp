#include "model_resolvent.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace dissip::resolvent {

namespace {

constexpr double kPi = std::numbers::pi;

cplx bessel_i(double nu, cplx x) { return specfun::detail::bessel_i(nu, x); }
cplx bessel_k(double nu, cplx x) { return specfun::detail::bessel_k(nu, x); }

// Trapezoid in s of values[i] (already multiplied by the Jacobian r).
cplx trapezoid(const std::vector<cplx>& v, double ds) {
    if (v.size() < 2) return 0.0;
    cplx s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * ds;
}

GridFunction subsample(const GridFunction& f) {
    GridFunction out;
    for (std::size_t i = 0; i < f.size(); i += 2) out.push_back(f[i]);
    return out;
}

cplx moment(const GridFunction& g, const LogGrid& grid, double q) {
    std::vector<cplx> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = std::conj(g[i]) * std::pow(grid.r[i], q + 1.0);
    return trapezoid(v, grid.ds);
}

}  // namespace

cplx branch_log(cplx z) {
    if (std::abs(z.imag()) == 0.0 && z.real() >= 0.0)
        throw DomainError("branch_log: z lies on the cut [0, inf)");
    double arg = std::arg(z);
    if (arg <= 0.0) arg += 2 * kPi;
    return {std::log(std::abs(z)), arg};
}

cplx z_nu(cplx z, double nu1) {
    if (!(nu1 > 0.0 && nu1 <= 1.0)) throw DomainError("z_nu: nu1 must lie in (0, 1]");
    cplx l = branch_log(z);
    if (nu1 == 1.0) return z * l;
    return std::exp(nu1 * l);
}

cplx gamma_nu(double nu) {
    if (!(nu >= 0.0 && nu <= 1.0)) throw DomainError("gamma_nu: nu must lie in [0, 1]");
    if (nu == 0.0) return -0.5;
    if (nu == 1.0) return -0.125;
    cplx phase = std::exp(cplx(0.0, -kPi * nu));
    return -phase * specfun::gamma(1.0 - nu) /
           (nu * std::pow(2.0, 2 * nu + 1) * specfun::gamma(1.0 + nu));
}

cplx sector_branch(const AngularSector& s, cplx z) {
    if (s.integer_nu()) return z_nu(z, 1.0);
    return z_nu(z, s.frac_nu());
}

cplx KernelTerm::operator()(double r, double tau) const {
    if (!(r > 0.0 && tau > 0.0)) throw DomainError("kernel_G: r and tau must be positive");
    double rho = (r * r + tau * tau) / (4.0 * r * tau);
    return prefactor * std::pow(r * tau, power) * poly(rho);
}

KernelTerm kernel_term(const AngularSector& s, int j) {
    KernelTerm t;
    t.sector = s;
    t.j = j;
    double shift = -(s.n - 2) / 2.0;
    if (s.integer_nu()) {
        int l = int(std::lround(s.nu));
        if (j < l) throw DomainError("kernel_G: index below the first singular term");
        double denom = std::sqrt(kPi) * std::pow(2.0, 2 * l + 1) * std::tgamma(j + 1.0) *
                       std::tgamma(j - l + 1.0) * specfun::gamma(l + 0.5);
        double sign = ((j + l + 1) % 2 == 0) ? 1.0 : -1.0;
        t.prefactor = sign / denom;
        t.power = shift + j;
        t.poly = specfun::make_poly(l, j - l);
    } else {
        int fl = s.floor_nu();
        double nup = s.frac_nu();
        if (j < fl) throw DomainError("kernel_G: index below the first singular term");
        double rising = 1.0;
        for (int i = 0; i <= j; ++i) rising *= nup + i;
        double denom = std::pow(2.0, 2 * s.nu + 1) * std::sqrt(kPi) * std::tgamma(j - fl + 1.0) *
                       specfun::gamma(0.5 + s.nu) * rising;
        double sign = ((j + 1 - fl) % 2 == 0) ? 1.0 : -1.0;
        t.prefactor = sign * std::exp(cplx(0.0, -nup * kPi)) * specfun::gamma(1.0 - nup) / denom;
        t.power = shift + nup + j;
        t.poly = specfun::make_poly(s.nu, j - fl);
    }
    return t;
}

cplx kernel_G(const AngularSector& s, int j, double r, double tau) { return kernel_term(s, j)(r, tau); }

LogGrid LogGrid::make(double r_min, double r_max, std::size_t n) {
    if (!(r_min > 0.0 && r_max > r_min) || n < 3) throw PreconditionError("LogGrid: bad range");
    LogGrid g;
    g.ds = std::log(r_max / r_min) / double(n - 1);
    g.r.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.r[i] = r_min * std::exp(g.ds * double(i));
    return g;
}

LogGrid LogGrid::every_other() const {
    LogGrid g;
    g.ds = 2 * ds;
    for (std::size_t i = 0; i < r.size(); i += 2) g.r.push_back(r[i]);
    return g;
}

GridFunction apply_green(const AngularSector& s, cplx z, const GridFunction& f, const LogGrid& grid) {
    const std::size_t n = grid.size();
    if (f.size() != n) throw PreconditionError("apply_green: size mismatch");
    const bool stat = (z == cplx(0.0));
    cplx kappa = std::sqrt(-z);
    if (!stat && !(kappa.real() > 0.0)) throw DomainError("resolvent: z on the spectrum [0, inf)");

    std::vector<cplx> iv(n), kv(n), fa(n), fb(n);
    const double wexp = s.n / 2.0 + 1.0;  // tau^{n/2} and the Jacobian tau
    for (std::size_t i = 0; i < n; ++i) {
        double r = grid.r[i];
        if (stat) {
            iv[i] = std::pow(r, s.nu);
            kv[i] = std::pow(r, -s.nu) / (2 * s.nu);
        } else {
            iv[i] = bessel_i(s.nu, kappa * r);
            kv[i] = bessel_k(s.nu, kappa * r);
        }
        double w = std::pow(r, wexp);
        fa[i] = iv[i] * w * f[i];
        fb[i] = kv[i] * w * f[i];
    }
    // Forward and backward cumulative trapezoid sums, so that each part
    // vanishes exactly where f has no mass on its side.
    std::vector<cplx> a(n, 0.0), b(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) a[i] = a[i - 1] + 0.5 * grid.ds * (fa[i - 1] + fa[i]);
    for (std::size_t i = n - 1; i-- > 0;) b[i] = b[i + 1] + 0.5 * grid.ds * (fb[i] + fb[i + 1]);

    GridFunction u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = std::pow(grid.r[i], -(s.n - 2) / 2.0) * (kv[i] * a[i] + iv[i] * b[i]);
    return u;
}

double oracle_residual(const AngularSector& s, cplx z, const GridFunction& u, const GridFunction& f,
                       const LogGrid& grid) {
    const double c = s.nu * s.nu - (s.n - 2) * (s.n - 2) / 4.0;
    const double ds = grid.ds;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        double r = grid.r[i];
        cplx uss = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (ds * ds);
        cplx us = (u[i + 1] - u[i - 1]) / (2 * ds);
        cplx qu = (-uss - double(s.n - 2) * us + c * u[i]) / (r * r);
        cplx res = qu - z * u[i] - f[i];
        double w = std::pow(r, s.n);
        num += std::norm(res) * w;
        den += std::norm(f[i]) * w;
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

GridFunction resolvent_oracle(const AngularSector& s, cplx z, const GridFunction& f, const LogGrid& grid,
                              double tol) {
    cplx kappa = std::sqrt(-z);
    if (!(kappa.real() > 0.0)) throw DomainError("resolvent_oracle: requires Re sqrt(-z) > 0");
    GridFunction u = apply_green(s, z, f, grid);
    double res = oracle_residual(s, z, u, f, grid);
    if (!(res <= tol))
        throw NumericalError("resolvent_oracle: quadrature failure, residual " + std::to_string(res));
    return u;
}

cplx pairing(const GridFunction& g, const GridFunction& u, const LogGrid& grid, int n) {
    std::vector<cplx> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = std::conj(g[i]) * u[i] * std::pow(grid.r[i], n);
    return trapezoid(v, grid.ds);
}

cplx resolvent_pairing(const AngularSector& s, cplx z, const GridFunction& f, const GridFunction& g,
                       const LogGrid& grid) {
    if (grid.size() % 2 == 0) throw PreconditionError("resolvent_pairing: grid size must be odd");
    cplx fine = pairing(g, apply_green(s, z, f, grid), grid, s.n);
    LogGrid cg = grid.every_other();
    GridFunction fc = subsample(f), gc = subsample(g);
    cplx coarse = pairing(gc, apply_green(s, z, fc, cg), cg, s.n);
    return (4.0 * fine - coarse) / 3.0;
}

cplx kernel_pairing(const AngularSector& s, int j, const GridFunction& f, const GridFunction& g,
                    const LogGrid& grid) {
    KernelTerm t = kernel_term(s, j);
    const double base = s.n - 1 + t.power;
    cplx total = 0.0;
    for (std::size_t i = 0; i < t.poly.coefficients.size(); ++i) {
        double c = t.poly.coefficients[i];
        if (c == 0.0) continue;
        double binom = 1.0;
        cplx acc = 0.0;
        for (std::size_t a = 0; a <= i; ++a) {
            double qr = base + 2.0 * a - double(i);
            double qt = base + 2.0 * double(i - a) - double(i);
            // f enters unconjugated; moment() conjugates its argument.
            acc += binom * moment(g, grid, qr) * std::conj(moment(f, grid, qt));
            binom = binom * double(i - a) / double(a + 1);
        }
        total += c * std::pow(0.25, double(i)) * acc;
    }
    return t.prefactor * total;
}

cplx singular_quotient(const AngularSector& s, cplx z, const GridFunction& f, const GridFunction& g,
                       const LogGrid& grid) {
    cplx p = resolvent_pairing(s, z, f, g, grid);
    cplx p0 = resolvent_pairing(s, 0.0, f, g, grid);
    return (p - p0) / sector_branch(s, z);
}

ExpansionFit fit_expansion(const AngularSector& s, const GridFunction& f, const GridFunction& g,
                           const LogGrid& grid, int order) {
    if (order < 1) throw PreconditionError("fit_expansion: order must be >= 1");
    ExpansionFit fit;
    fit.sector = s;
    fit.order = order;
    fit.f0 = resolvent_pairing(s, 0.0, f, g, grid);
    const int j0 = s.floor_minus();
    const int d = s.delta_nu();
    for (int j = j0; j <= order + 1; ++j) fit.singular.push_back(kernel_pairing(s, j + d, f, g, grid));

    const int nsmooth = order + 2;
    const double tmax = 5e-2;
    std::vector<cplx> zs;
    for (int k = 0; k < 8; ++k) {
        double t = 1e-3 * std::pow(50.0, k / 7.0);
        for (double ang : {0.5 * kPi, 0.75 * kPi, kPi, 1.25 * kPi, 1.5 * kPi}) zs.push_back(std::polar(t, ang));
    }
    Eigen::MatrixXcd a(zs.size(), nsmooth);
    Eigen::VectorXcd rhs(zs.size());
    for (std::size_t m = 0; m < zs.size(); ++m) {
        cplx z = zs[m];
        cplx sing = 0.0;
        for (std::size_t j = 0; j < fit.singular.size(); ++j) sing += std::pow(z, int(j0 + j)) * fit.singular[j];
        rhs(m) = resolvent_pairing(s, z, f, g, grid) - fit.f0 - sector_branch(s, z) * sing;
        for (int c = 0; c < nsmooth; ++c) a(m, c) = std::pow(z / tmax, c + 1);
    }
    Eigen::VectorXcd x = a.colPivHouseholderQr().solve(rhs);
    fit.fit_residual = (a * x - rhs).cwiseAbs().maxCoeff() / std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
    for (int c = 0; c < nsmooth; ++c) fit.smooth.push_back(x(c) / std::pow(tmax, c + 1));
    return fit;
}

double remainder(const ExpansionFit& fit, cplx z, cplx pz, bool include_singular) {
    cplx trunc = fit.f0;
    for (int j = 1; j <= fit.order; ++j) trunc += std::pow(z, j) * fit.smooth[j - 1];
    if (include_singular) {
        const int j0 = fit.sector.floor_minus();
        cplx sing = 0.0;
        for (int j = j0; j <= fit.order - 1; ++j) sing += std::pow(z, j) * fit.singular[j - j0];
        trunc += sector_branch(fit.sector, z) * sing;
    }
    return std::abs(pz - trunc);
}

double expansion_remainder(const AngularSector& s, cplx z, const GridFunction& f, const GridFunction& g,
                           const LogGrid& grid, int order, bool include_singular) {
    ExpansionFit fit = fit_expansion(s, f, g, grid, order);
    return remainder(fit, z, resolvent_pairing(s, z, f, g, grid), include_singular);
}

double remainder_slope(const ExpansionFit& fit, const GridFunction& f, const GridFunction& g,
                       const LogGrid& grid, double t_min, double t_max, double angle, bool include_singular,
                       int samples) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < samples; ++k) {
        double t = t_min * std::pow(t_max / t_min, double(k) / (samples - 1));
        cplx z = std::polar(t, angle);
        double rem = remainder(fit, z, resolvent_pairing(fit.sector, z, f, g, grid), include_singular);
        double x = std::log(t), y = std::log(rem);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
}

}  // namespace dissip::resolvent
