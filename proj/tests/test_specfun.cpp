#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "errors.hpp"
#include "specfun.hpp"

using namespace dissip;
using specfun::BesselKind;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// P_{nu,k}(rho) = int_{-1}^{1} (rho + t/2)^k (1 - t^2)^{nu - 1/2} dt, with t = sin(phi).
double p_quadrature(double nu, int k, double rho) {
    boost::math::quadrature::tanh_sinh<double> q;
    auto f = [&](double phi) { return std::pow(rho + 0.5 * std::sin(phi), k) * std::pow(std::cos(phi), 2.0 * nu); };
    return q.integrate(f, -std::numbers::pi / 2, std::numbers::pi / 2, 1e-14);
}

}  // namespace

TEST_SUITE("specfun") {
    TEST_CASE("gamma matches tgamma and its recurrence") {
        for (double x = 0.1; x <= 20.0; x += 0.0737) {
            CHECK(rel(specfun::gamma(x), std::tgamma(x)) < 1e-13);
            CHECK(rel(specfun::gamma(x + 1.0), x * specfun::gamma(x)) < 1e-13);
        }
        CHECK(rel(specfun::gamma(0.5), std::sqrt(std::numbers::pi)) < 1e-15);
        CHECK(specfun::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-15));
        CHECK_THROWS_AS(specfun::gamma(0.0), DomainError);
        CHECK_THROWS_AS(specfun::gamma(-1.5), DomainError);
    }

    TEST_CASE("Bessel J, I, K against the standard library") {
        for (double nu : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.75, 3.0})
            for (double x = 0.1; x <= 20.0; x *= 1.21) {
                double j = specfun::bessel(BesselKind::J, nu, x), jr = std::cyl_bessel_j(nu, x);
                CHECK(std::abs(j - jr) <= 1e-11 * std::max(1e-3, std::abs(jr)));
                CHECK(rel(specfun::bessel(BesselKind::I, nu, x), std::cyl_bessel_i(nu, x)) < 1e-12);
                CHECK(rel(specfun::bessel(BesselKind::K, nu, x), std::cyl_bessel_k(nu, x)) < 1e-11);
            }
    }

    TEST_CASE("half-integer closed forms and the I/K Wronskian") {
        const double pi = std::numbers::pi;
        for (double x = 0.1; x <= 20.0; x += 0.31) {
            double c = std::sqrt(2.0 / (pi * x));
            CHECK(std::abs(specfun::bessel(BesselKind::J, 0.5, x) - c * std::sin(x)) <= 1e-12 * c);
            CHECK(rel(specfun::bessel(BesselKind::I, 0.5, x), c * std::sinh(x)) < 1e-12);
            CHECK(rel(specfun::bessel(BesselKind::K, 0.5, x), std::sqrt(pi / (2 * x)) * std::exp(-x)) < 1e-12);
            for (double nu : {0.3, 1.0, 1.7}) {
                double w = specfun::bessel(BesselKind::I, nu, x) * specfun::bessel(BesselKind::K, nu + 1, x) +
                           specfun::bessel(BesselKind::I, nu + 1, x) * specfun::bessel(BesselKind::K, nu, x);
                CHECK(rel(w, 1.0 / x) < 1e-11);
            }
        }
    }

    TEST_CASE("complex-argument I and K against arbitrary-precision values") {
        struct Row {
            double nu;
            std::complex<double> z, k, i;
        };
        // mpmath besselk / besseli at 30 digits
        const Row rows[] = {
            {0.5, {0.3, -0.7}, {0.30203552303498487, 1.0201615647984446}, {0.51671679696112592, -0.39679050559037483}},
            {1.0, {0.01, -0.1}, {0.9021324819728286, 10.039116999195003}, {0.0049813252570686429, -0.049939398446216304}},
            {1.5, {2.0, 3.0}, {-0.089763518122305886, 0.054689228848541642}, {-1.2996056685182903, 0.50563041079705694}},
            {0.75, {15.0, -20.0}, {-3.7067031704319013e-9, 7.6879487343079612e-8}, {200101.35249407261, -165797.11248835913}},
            {0.0, {0.5, 0.5}, {0.55297231092557471, -0.59964194785659463}, {0.99609417384789317, 0.12494574864703526}},
        };
        for (const Row& r : rows) {
            CAPTURE(r.nu);
            CHECK(std::abs(specfun::detail::bessel_k(r.nu, r.z) - r.k) <= 1e-11 * std::abs(r.k));
            CHECK(std::abs(specfun::detail::bessel_i(r.nu, r.z) - r.i) <= 1e-11 * std::abs(r.i));
        }
    }

    TEST_CASE("P polynomials: closed forms") {
        const double pi = std::numbers::pi;
        CHECK(specfun::p_poly(0.5, 0, 7.3) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(specfun::p_poly(0.0, 2, 0.0) == doctest::Approx(pi / 8).epsilon(1e-14));
        for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0}) {
            double p0 = std::sqrt(pi) * std::tgamma(nu + 0.5) / std::tgamma(nu + 1.0);
            CHECK(rel(specfun::p_poly(nu, 0, 3.1), p0) < 1e-14);
            for (int k = 0; k <= 6; ++k) {
                auto p = specfun::make_poly(nu, k);
                REQUIRE(p.coefficients.size() == std::size_t(k + 1));
                CHECK(p.coefficients[k] > 0.0);
                for (int i = k - 1; i >= 0; i -= 2) CHECK(p.coefficients[i] == 0.0);
            }
        }
        CHECK_THROWS_AS(specfun::p_poly(-0.1, 1, 1.0), DomainError);
    }

    TEST_CASE("P polynomials: identities and quadrature on random draws") {
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> unu(0.0, 2.0), urho(0.0, 10.0);
        std::uniform_int_distribution<int> uk(0, 8);
        for (int draw = 0; draw < 200; ++draw) {
            double nu = unu(rng), rho = urho(rng);
            int k = uk(rng);
            CAPTURE(nu);
            CAPTURE(rho);
            CAPTURE(k);
            CHECK(rel(specfun::p_poly(nu, 1, rho), rho * specfun::p_poly(nu, 0, rho)) < 1e-12);
            CHECK(rel(specfun::p_poly(nu, k, rho), p_quadrature(nu, k, rho)) < 1e-9);
        }
    }
}
