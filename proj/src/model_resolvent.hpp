#pragma once

#include <cstddef>
#include <vector>

#include "sector.hpp"
#include "specfun.hpp"

namespace dissip::resolvent {

// log z with arg z in (0, 2 pi); the cut is [0, inf).
cplx branch_log(cplx z);

// e^{nu1 ln z} for nu1 in (0,1), z ln z for nu1 = 1.
cplx z_nu(cplx z, double nu1);

// Leading singular coefficient gamma_nu, nu in [0,1].
cplx gamma_nu(double nu);

// Singular branch attached to a sector: z_{nu'} for non-integer nu (nu' the
// fractional part), z ln z for integer nu.
cplx sector_branch(const AngularSector& s, cplx z);

// Closed-form kernel G_{nu,j}(r,tau) = prefactor (r tau)^power P(rho),
// rho = (r^2 + tau^2) / (4 r tau).
struct KernelTerm {
    AngularSector sector;
    int j = 0;
    cplx prefactor;
    double power = 0.0;
    specfun::PolyNuK poly;

    cplx operator()(double r, double tau) const;
};

KernelTerm kernel_term(const AngularSector& s, int j);
cplx kernel_G(const AngularSector& s, int j, double r, double tau);

// Logarithmically spaced radial nodes r_i = r_min e^{i ds}.
struct LogGrid {
    std::vector<double> r;
    double ds = 0.0;

    static LogGrid make(double r_min, double r_max, std::size_t n);
    std::size_t size() const { return r.size(); }
    LogGrid every_other() const;
};

using GridFunction = std::vector<cplx>;

// (Q_nu - z)^{-1} f from the modified-Bessel Green function,
// (r tau)^{-(n-2)/2} I_nu(kappa r_<) K_nu(kappa r_>), kappa = sqrt(-z).
// Verifies the finite-difference residual and throws NumericalError above tol.
GridFunction resolvent_oracle(const AngularSector& s, cplx z, const GridFunction& f,
                              const LogGrid& grid, double tol = 1e-6);

// Same kernel without the residual check; z = 0 uses the static kernel
// (r tau)^{-(n-2)/2} r_<^nu r_>^{-nu} / (2 nu).
GridFunction apply_green(const AngularSector& s, cplx z, const GridFunction& f, const LogGrid& grid);

// ||(Q_nu - z) u - f|| / ||f|| with central differences in s = ln r.
double oracle_residual(const AngularSector& s, cplx z, const GridFunction& u,
                       const GridFunction& f, const LogGrid& grid);

// int conj(g) u r^{n-1} dr
cplx pairing(const GridFunction& g, const GridFunction& u, const LogGrid& grid, int n);

// <g, R(z) f>, Richardson-extrapolated over the grid and its every-other subgrid.
// grid.size() must be odd.
cplx resolvent_pairing(const AngularSector& s, cplx z, const GridFunction& f,
                       const GridFunction& g, const LogGrid& grid);

// <g, G_{nu,j} f> evaluated from radial moments of f and g.
cplx kernel_pairing(const AngularSector& s, int j, const GridFunction& f,
                    const GridFunction& g, const LogGrid& grid);

// (<g,R(z)f> - <g,R(0)f>) / z_nu(z), which tends to <g, G_{nu,[nu]_-+delta} f> when [nu]_- = 0.
cplx singular_quotient(const AngularSector& s, cplx z, const GridFunction& f,
                       const GridFunction& g, const LogGrid& grid);

// Low-energy model of <g, R(z) f>: F_0 + sum_j z^j F_j + z_nu sum_j z^j <g,G f>.
struct ExpansionFit {
    AngularSector sector;
    int order = 1;
    cplx f0;
    std::vector<cplx> smooth;    // F_1, F_2, ...
    std::vector<cplx> singular;  // <g, G_{nu, j+delta} f> for j = [nu]_-, [nu]_- + 1, ...
    double fit_residual = 0.0;
};

ExpansionFit fit_expansion(const AngularSector& s, const GridFunction& f, const GridFunction& g,
                           const LogGrid& grid, int order);

// |<g,R(z)f> - truncation through order N| given the exact pairing value pz.
double remainder(const ExpansionFit& fit, cplx z, cplx pz, bool include_singular = true);

double expansion_remainder(const AngularSector& s, cplx z, const GridFunction& f,
                           const GridFunction& g, const LogGrid& grid, int order,
                           bool include_singular = true);

// Least-squares slope of log remainder against log|z| along a ray.
double remainder_slope(const ExpansionFit& fit, const GridFunction& f, const GridFunction& g,
                       const LogGrid& grid, double t_min, double t_max, double angle,
                       bool include_singular, int samples = 9);

}  // namespace dissip::resolvent
