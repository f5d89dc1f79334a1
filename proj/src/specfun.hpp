#pragma once

#include <complex>
#include <vector>

namespace dissip::specfun {

double gamma(double x);

enum class BesselKind { J, I, K };

// Real order nu >= 0, real argument x > 0.
double bessel(BesselKind kind, double nu, double x);

// Polynomial P_{nu,k}(rho) = int_{-1}^{1} (rho + theta/2)^k (1-theta^2)^{nu-1/2} dtheta.
// coefficients[i] multiplies rho^i.
struct PolyNuK {
    double nu = 0.0;
    int k = 0;
    std::vector<double> coefficients;
    double operator()(double rho) const;
};

PolyNuK make_poly(double nu, int k);
double p_poly(double nu, int k, double rho);

// int_{-1}^{1} theta^{2m} (1-theta^2)^{nu-1/2} dtheta
double even_moment(double nu, int m);

namespace detail {
// Principal-branch modified Bessel functions at complex argument, used only by
// the closed-form resolvent kernel. K requires Re x > 0.
std::complex<double> bessel_i(double nu, std::complex<double> x);
std::complex<double> bessel_k(double nu, std::complex<double> x);
}  // namespace detail

}  // namespace dissip::specfun
