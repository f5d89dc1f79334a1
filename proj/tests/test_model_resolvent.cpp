#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "model_resolvent.hpp"

using namespace dissip;
using namespace dissip::resolvent;

namespace {

const double pi = std::numbers::pi;

struct Pair {
    LogGrid grid;
    GridFunction f, g;
};

Pair bumps(std::size_t n = 8001) {
    Pair p{LogGrid::make(1e-3, 20.0, n), {}, {}};
    for (double r : p.grid.r) {
        p.f.push_back(std::exp(-(r - 1.0) * (r - 1.0) / 0.1));
        p.g.push_back(r * std::exp(-(r - 1.5) * (r - 1.5) / 0.2));
    }
    return p;
}

// Independent solve of -w'' - z w = r f(r), w(0) = w(L) = 0, for n = 3, l = 0
// (psi = w / r), by second-order differences with Richardson over h and h/2.
std::vector<double> fd_solution(double z, double length, std::size_t cells, auto&& f) {
    auto solve = [&](std::size_t m) {
        double h = length / double(m);
        std::size_t n = m - 1;
        std::vector<double> a(n), b(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            double r = double(i + 1) * h;
            a[i] = 2.0 / (h * h) - z;
            b[i] = r * f(r);
        }
        double off = -1.0 / (h * h);
        for (std::size_t i = 1; i < n; ++i) {
            double m1 = off / a[i - 1];
            a[i] -= m1 * off;
            b[i] -= m1 * b[i - 1];
        }
        w[n - 1] = b[n - 1] / a[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) w[i] = (b[i] - off * w[i + 1]) / a[i];
        std::vector<double> out(m + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) out[i + 1] = w[i];
        return out;
    };
    auto coarse = solve(cells), fine = solve(2 * cells);
    std::vector<double> out(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) out[i] = (4.0 * fine[2 * i] - coarse[i]) / 3.0;
    return out;
}

}  // namespace

TEST_SUITE("model_resolvent") {
    TEST_CASE("branch_log uses arg in (0, 2 pi)") {
        CHECK(std::abs(branch_log(-1.0) - cplx(0, pi)) < 1e-15);
        CHECK(std::abs(branch_log(cplx(0, -1)) - cplx(0, 1.5 * pi)) < 1e-15);
        CHECK(std::abs(branch_log(cplx(1.0, 1e-12))) < 1e-11);
        CHECK(branch_log(cplx(1.0, -1e-12)).imag() == doctest::Approx(2 * pi));
        CHECK_THROWS_AS(branch_log(0.0), DomainError);
        CHECK_THROWS_AS(branch_log(2.5), DomainError);
    }

    TEST_CASE("z_nu examples") {
        CHECK(std::abs(z_nu(-1.0, 0.5) - cplx(0, 1)) < 1e-15);
        CHECK(std::abs(z_nu(-1.0, 1.0) - cplx(0, -pi)) < 1e-15);
        cplx z(0.3, -0.2);
        CHECK(std::abs(z_nu(z, 1.0) - z * branch_log(z)) < 1e-16);
        CHECK_THROWS_AS(z_nu(z, 0.0), DomainError);
        CHECK_THROWS_AS(z_nu(z, 1.2), DomainError);
    }

    TEST_CASE("z_nu satisfies Cauchy-Riemann in the lower half-plane") {
        const double e = 1e-6;
        for (double nu1 : {0.25, 0.5, 0.75, 1.0})
            for (double t = 0.05; t < pi; t += 0.2) {
                cplx z = 0.7 * std::exp(cplx(0, -t));
                cplx dx = (z_nu(z + e, nu1) - z_nu(z - e, nu1)) / (2 * e);
                cplx dy = (z_nu(z + cplx(0, e), nu1) - z_nu(z - cplx(0, e), nu1)) / (2 * e);
                CHECK(std::abs(dy - cplx(0, 1) * dx) <= 1e-6 * std::max(1.0, std::abs(dx)));
            }
    }

    TEST_CASE("gamma_nu closed forms") {
        CHECK(gamma_nu(0.0) == cplx(-0.5, 0.0));
        CHECK(gamma_nu(1.0) == cplx(-0.125, 0.0));
        CHECK(std::abs(gamma_nu(0.5) - cplx(0, 1)) < 1e-15);
        CHECK_THROWS_AS(gamma_nu(1.5), DomainError);
    }

    TEST_CASE("kernel terms") {
        AngularSector s3 = AngularSector::make(3, 0);
        for (double r : {0.1, 1.0, 3.7})
            for (double t : {0.2, 2.0}) {
                CHECK(std::abs(kernel_G(s3, 0, r, t) - cplx(0, 1)) < 1e-14);
                CHECK(kernel_G(s3, 1, r, t) == kernel_G(s3, 1, t, r));
            }
        AngularSector s4 = AngularSector::make(4, 0);
        CHECK(std::abs(kernel_G(s4, 1, 0.4, 1.3) + 0.125) < 1e-14);
        for (auto [n, ell] : {std::pair{3, 1}, std::pair{4, 1}, std::pair{3, 2}}) {
            AngularSector s = AngularSector::make(n, ell);
            int j0 = s.integer_nu() ? int(std::lround(s.nu)) : s.floor_nu();
            KernelTerm t = kernel_term(s, j0 + 1);
            double expect = -(n - 2) / 2.0 + (s.integer_nu() ? 0.0 : s.frac_nu()) + j0 + 1;
            CHECK(t.power == doctest::Approx(expect));
            CHECK(t(0.3, 2.1) == t(2.1, 0.3));
            CHECK_THROWS_AS(kernel_term(s, j0 - 1), DomainError);
        }
    }

    TEST_CASE("Green-function oracle agrees with a direct boundary-value solve") {
        AngularSector s = AngularSector::make(3, 0);
        auto bump = [](double r) { return std::exp(-(r - 1.0) * (r - 1.0) / 0.1); };
        LogGrid grid = LogGrid::make(1e-3, 30.0, 8001);
        GridFunction f;
        for (double r : grid.r) f.push_back(bump(r));
        GridFunction u = resolvent_oracle(s, -1.0, f, grid);
        CHECK(oracle_residual(s, -1.0, u, f, grid) <= 1e-6);

        const double length = 30.0, h = 1e-3;
        auto w = fd_solution(-1.0, length, std::size_t(length / h), bump);
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < grid.size(); i += 40) {
            double r = grid.r[i];
            if (r < 0.05 || r > 10.0) continue;
            // cubic Lagrange interpolation of w / r at r
            std::size_t k = std::min(std::size_t(r / h), w.size() - 3);
            k = std::max<std::size_t>(k, 1) - 1;
            double val = 0.0;
            for (std::size_t a = k; a < k + 4; ++a) {
                double l = 1.0;
                for (std::size_t b = k; b < k + 4; ++b)
                    if (a != b) l *= (r - double(b) * h) / (double(a) * h - double(b) * h);
                val += l * w[a];
            }
            val /= r;
            worst = std::max(worst, std::abs(u[i] - val));
            scale = std::max(scale, std::abs(val));
        }
        CHECK(worst <= 1e-6 * scale);
    }

    TEST_CASE("oracle output decays at rate Re kappa") {
        AngularSector s = AngularSector::make(3, 0);
        LogGrid grid = LogGrid::make(1e-3, 30.0, 8001);
        for (cplx z : {cplx(-1.0, 0.0), cplx(-0.25, -0.4)}) {
            GridFunction f;
            for (double r : grid.r) f.push_back(std::exp(-(r - 1.0) * (r - 1.0) / 0.1));
            GridFunction u = apply_green(s, z, f, grid);
            // fit log(r |u|) against r on [8, 20]; K_{1/2}(kappa r) ~ e^{-kappa r} / sqrt(r)
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int m = 0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                double r = grid.r[i];
                if (r < 8.0 || r > 20.0) continue;
                double y = std::log(r * std::abs(u[i]));
                sx += r, sy += y, sxx += r * r, sxy += r * y, ++m;
            }
            double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            double rate = std::sqrt(-z).real();
            CHECK(std::abs(-slope - rate) <= 0.02 * rate);
        }
    }

    TEST_CASE("extracted singular coefficient matches the closed-form kernel") {
        Pair p = bumps();
        AngularSector s = AngularSector::make(3, 0);
        cplx k = kernel_pairing(s, 0, p.f, p.g, p.grid);
        for (double t : {1e-6, 1e-8}) {
            cplx q = singular_quotient(s, std::polar(t, 1.25 * pi), p.f, p.g, p.grid);
            MESSAGE("quotient " << q << " kernel " << k);
            CHECK(std::abs(q - k) <= 0.05 * std::abs(k));
        }
        // <g, G f> = gamma_{1/2} <g,1><1,f> for the constant kernel
        cplx gm = 0.0, fm = 0.0;
        GridFunction one(p.grid.size(), 1.0);
        gm = pairing(p.g, one, p.grid, 3);
        fm = pairing(one, p.f, p.grid, 3);
        CHECK(std::abs(k - cplx(0, 1) * std::conj(gm) * fm) <= 1e-10 * std::abs(k));
    }

    TEST_CASE("pairing is conjugate-linear in the first slot") {
        Pair p = bumps(2001);
        cplx a = pairing(p.g, p.f, p.grid, 3);
        GridFunction ig = p.g;
        for (auto& x : ig) x *= cplx(0, 1);
        CHECK(std::abs(pairing(ig, p.f, p.grid, 3) - cplx(0, -1) * a) < 1e-14 * std::abs(a));
        CHECK(pairing(p.f, p.f, p.grid, 3).real() > 0.0);
    }

    TEST_CASE("remainder order of the low-energy expansion") {
        Pair p = bumps();
        const double angle = 1.25 * pi;
        AngularSector s = AngularSector::make(3, 0);
        ExpansionFit fit = fit_expansion(s, p.f, p.g, p.grid, 1);
        double with = remainder_slope(fit, p.f, p.g, p.grid, 1e-4, 1e-2, angle, true);
        double without = remainder_slope(fit, p.f, p.g, p.grid, 1e-4, 1e-2, angle, false);
        MESSAGE("slopes " << with << " " << without);
        CHECK(with >= 1.2);
        CHECK(without < 0.7);
        CHECK(without == doctest::Approx(0.5).epsilon(0.1));
        // the truncation is exact at the base point
        cplx z = std::polar(1e-9, angle);
        CHECK(expansion_remainder(s, z, p.f, p.g, p.grid, 1) <= 1e-6 * std::abs(fit.f0));
    }
}
