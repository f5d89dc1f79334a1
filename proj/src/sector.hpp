#pragma once

#include <cmath>
#include <complex>

#include "errors.hpp"

namespace dissip {

using cplx = std::complex<double>;

// Angular channel of -Delta on R^n with no angular potential. Eigenvalue
// l(l+n-2) of the sphere Laplacian, nu = sqrt(l(l+n-2) + (n-2)^2/4).
struct AngularSector {
    int n = 3;
    int ell = 0;
    double nu = 0.5;

    static AngularSector make(int n, int ell) {
        if (n < 3) throw PreconditionError("dimension must be >= 3");
        if (ell < 0) throw PreconditionError("angular momentum must be >= 0");
        AngularSector s;
        s.n = n;
        s.ell = ell;
        s.nu = ell + 0.5 * (n - 2);
        return s;
    }

    double lambda_nu() const { return double(ell) * (ell + n - 2); }
    bool integer_nu() const { return std::abs(nu - std::round(nu)) < 1e-12; }
    // [nu]: largest integer <= nu; [nu]_-: largest integer strictly below nu.
    int floor_nu() const { return int(std::floor(nu + 1e-12)); }
    int floor_minus() const { return integer_nu() ? int(std::round(nu)) - 1 : floor_nu(); }
    double frac_nu() const { return nu - floor_nu(); }
    int delta_nu() const { return integer_nu() ? 1 : 0; }
    // (nu^2 - 1/4)/r^2 is the centrifugal term of the reduced equation for u = r^{(n-1)/2} psi.
    double centrifugal() const { return nu * nu - 0.25; }
};

}  // namespace dissip
