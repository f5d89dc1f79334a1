#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "potential.hpp"
#include "sector.hpp"

namespace dissip::radial {

// Interior nodes r_i = i h, i = 1..n, with Dirichlet conditions at 0 and r_max = (n+1) h.
struct UniformGrid {
    double r_max = 40.0;
    std::size_t n = 3999;

    double h() const { return r_max / double(n + 1); }
    double r(std::size_t i) const { return double(i + 1) * h(); }  // 0-based node index
    UniformGrid refined() const { return {r_max, 2 * (n + 1) - 1}; }
    UniformGrid extended() const { return {2 * r_max, 2 * (n + 1) - 1}; }
    static UniformGrid with_step(double h, double r_max);
};

// Complex symmetric tridiagonal matrix of -d^2/dr^2 + (nu^2-1/4)/r^2 + V1 - i lambda V2.
struct DiscreteOperator {
    AngularSector sector;
    UniformGrid grid;
    double lambda = 0.0;
    std::vector<cplx> diag;
    double offdiag = 0.0;  // -1/h^2

    std::size_t size() const { return diag.size(); }
    Eigen::MatrixXcd dense() const;
    std::vector<cplx> apply(const std::vector<cplx>& x) const;
};

// Throws PreconditionError when step h cannot resolve the potential.
void check_resolution(const RadialPotential& pot, double h);

DiscreteOperator discretize(const RadialPotential& pot, const AngularSector& s, double lambda,
                            const UniformGrid& grid);

// All eigenvalues, sorted by real then imaginary part.
std::vector<cplx> complex_spectrum(const DiscreteOperator& op);
std::vector<cplx> complex_spectrum(const Eigen::MatrixXcd& a);

struct Cluster {
    cplx z;
    int multiplicity = 1;
};
std::vector<Cluster> cluster_eigenvalues(const std::vector<cplx>& values, double radius);

// LU factors of (T - shift) without pivoting, for symmetric tridiagonal T with
// constant off-diagonal. last_shift is added to the last diagonal entry.
class ShiftedTridiagonal {
public:
    ShiftedTridiagonal(const std::vector<cplx>& diag, double off, cplx shift, cplx last_shift = 0.0);
    void solve(std::vector<cplx>& b) const;
    bool guarded() const { return guarded_; }

private:
    std::vector<cplx> inv_pivot_;
    double off_;
    bool guarded_ = false;
};

// Decaying root xi of xi + 1/xi = s (|xi| <= 1).
cplx decaying_root(cplx s);

// Discrete Jost function: regular solution u (u_0 = 0, u_1 = 1) continued to
// node n+1 and matched to the decaying exterior solution xi^k of the free
// recurrence. Zeros are the eigenvalues of the half-line lattice operator.
// Values are rescaled by positive z-dependent factors; f/df is exact.
struct JostValue {
    cplx f;
    cplx df;
};
JostValue jost(const DiscreteOperator& op, cplx z);

struct NewtonResult {
    cplx z;
    bool converged = false;
    int iterations = 0;
    std::string trace;
};
NewtonResult jost_newton(const DiscreteOperator& op, cplx seed, double max_abs = 50.0);

// Winding number of the Jost function around a circle.
int jost_winding(const DiscreteOperator& op, cplx center, double radius);

struct Eigenpair {
    cplx z;
    std::vector<cplx> vec;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};
// Inverse iteration at a fixed shift, then complex-symmetric Rayleigh quotient iteration.
Eigenpair dirichlet_eigenpair(const DiscreteOperator& op, cplx shift);

// Fraction of sum |x_i|^2 carried by nodes with r > (1 - outer) r_max.
double outer_mass(const std::vector<cplx>& x, double outer);

struct ZeroEnergySolution {
    std::vector<double> u;  // regular zero-energy solution on the interior nodes
    double growth = 0.0;    // A: coefficient of r^{1/2+nu}
    double decay = 0.0;     // B: coefficient of r^{1/2-nu}
    double growth_ratio = 1.0;  // |A| R^{1/2+nu} / (|A| R^{1/2+nu} + |B| R^{1/2-nu})
};
ZeroEnergySolution zero_energy_solution(const RadialPotential& pot, const AngularSector& s,
                                        const UniformGrid& grid);

using PotentialFamily = std::function<RadialPotential(const UniformGrid&)>;
PotentialFamily fixed_potential(RadialPotential pot);

struct ConfirmOptions {
    UniformGrid grid;
    int refine = 2;  // 0: none, 1: h/2, 2: h/2 and 2R
    double stability_rel = 1e-4;
    double outer_fraction = 0.2;
    double outer_mass_max = 0.01;
    double decay_lengths = 7.0;
    double max_abs = 50.0;
    std::size_t max_nodes = 16'000'000;
};

struct SpectrumEntry {
    cplx seed;
    cplx z;
    int multiplicity = 0;
    bool converged = false;
    bool stable = false;
    bool localized = false;
    bool confirmed = false;
    double drift_h = 0.0;
    double drift_r = 0.0;
    double outer = 1.0;
    double r_box = 0.0;
    std::string note;
};

struct SpectrumReport {
    int ell = 0;
    double lambda = 0.0;
    std::vector<SpectrumEntry> entries;  // distinct roots, confirmed or not
    std::vector<std::string> warnings;

    std::vector<SpectrumEntry> confirmed() const;
    bool ambiguous() const;
};

SpectrumReport confirm_point_spectrum(const PotentialFamily& family, const AngularSector& s, double lambda,
                                      const std::vector<cplx>& candidates, const ConfirmOptions& opt);

// ||lambda V2^{1/2} (H1 - z)^{-1} V2^{1/2}|| on the lattice with the transparent exterior.
double birman_schwinger_norm(const RadialPotential& pot, const AngularSector& s, double lambda, cplx z,
                             const UniformGrid& grid);

}  // namespace dissip::radial
