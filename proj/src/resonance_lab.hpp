#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radial_operator.hpp"

namespace dissip::resonance {

struct CriticalScan {
    double beta_max = 100.0;
    int steps = 400;
    double tol = 1e-14;  // relative bracket width
};

// Smallest beta > 0 at which beta*v1 acquires a zero-energy state in sector s,
// located on the grid by bisection on the growth coefficient.
double critical_coupling(const Profile& v1, const AngularSector& s, const radial::UniformGrid& grid,
                         const CriticalScan& scan = {});

struct CriticalEstimate {
    double h = 0.0;
    double beta_h = 0.0;
    double beta_h2 = 0.0;
    double beta = 0.0;  // (4 beta(h/2) - beta(h)) / 3
};
CriticalEstimate critical_coupling_extrapolated(const Profile& v1, const AngularSector& s,
                                                const radial::UniformGrid& grid, const CriticalScan& scan = {});

// Potential family whose coupling is re-tuned to criticality on every grid step h,
// shooting over [0, shoot_radius].
radial::PotentialFamily critical_family(RadialPotential base, AngularSector tune, double shoot_radius,
                                        CriticalScan scan = {});

enum class ThresholdKind { Regular, Resonance, Eigenvalue };

// Zero-energy structure of H1 in one sector, with the normalized threshold state
// (<phi, -V1 phi> = 1) and its coupling constants when it exists.
struct ResonanceProfile {
    ThresholdKind kind = ThresholdKind::Regular;
    AngularSector sector;
    double beta = 0.0;
    double growth_ratio = 1.0;
    std::vector<double> r, u, psi;  // u = r^{(n-1)/2} psi
    cplx c1, c1p;
    double v11 = 0.0;
    double norm2 = 0.0;  // int |psi|^2 r^{n-1} dr on the grid (finite for eigenvalues)
    int k = 0, k0 = 0;
    std::vector<std::string> warnings;

    int m() const { return k + k0; }
    double nu1() const { return sector.nu; }
};

ResonanceProfile threshold_analysis(const RadialPotential& pot, const AngularSector& s,
                                    const radial::UniformGrid& grid, double zero_tol = 1e-6);

struct EmergentRoot {
    cplx z0;
    double r = 0.0;
    double phi = 0.0;
    double residual = 0.0;  // |i lambda v11 + c0 z_nu(z0) X| / (lambda v11)
    std::optional<double> tau, sigma;
};

// Leading-order eigenvalue emerging from a threshold resonance, nu1 in [1/2, 1].
EmergentRoot predict_eigenvalue(const ResonanceProfile& prof, double lambda, double lambda0 = 0.25);

// Leading-order position of an eigenvalue leaving a zero eigenvalue: -i lambda v11 / <phi,phi>.
cplx migrated_eigenvalue(const ResonanceProfile& prof, double lambda);

// Residual of the leading-order equation at z relative to lambda v11.
double leading_residual(const ResonanceProfile& prof, double lambda, cplx z);

struct P2Solution {
    double tau = 0.0, sigma = 0.0;
    cplx z0;
    int iterations = 0;
    double residual_modulus = 0.0;  // |tau e^{-tau cos sigma} - r| / r
    double residual_phase = 0.0;    // |-sigma + tau sin sigma - phi - pi|
};

// tau e^{-tau cos sigma} = r, -sigma + tau sin sigma = phi + pi;
// z0 = rho e^{i theta}, rho = e^{-tau cos sigma}, theta = pi + phi + sigma solves z ln z = r e^{i phi}.
P2Solution solve_p2(double r, double phi);

struct TrajectoryPoint {
    double lambda = 0.0;
    cplx z_num, z_pred;
    double rel_err = 0.0;
    double residual_p = 0.0;
    radial::SpectrumEntry entry;
};

std::vector<TrajectoryPoint> track_trajectory(const radial::PotentialFamily& family,
                                              const ResonanceProfile& prof,
                                              const std::vector<double>& lambdas,
                                              const radial::ConfirmOptions& opt, double delta = 0.5,
                                              double lambda0 = 0.25);

}  // namespace dissip::resonance
