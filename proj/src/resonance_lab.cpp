#include "resonance_lab.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "model_resolvent.hpp"

namespace dissip::resonance {

using radial::UniformGrid;

namespace {

constexpr double kPi = std::numbers::pi;

void require_attractive(const Profile& v1) {
    bool ok = true;
    switch (v1.kind) {
        case ProfileKind::Zero:
            ok = false;
            break;
        case ProfileKind::SquareWell:
        case ProfileKind::Exponential:
            ok = v1.depth > 0.0;
            break;
        case ProfileKind::Tabulated: {
            bool any = false;
            for (double v : v1.tab_v) {
                if (v > 0.0) ok = false;
                if (v < 0.0) any = true;
            }
            ok = ok && any;
            break;
        }
    }
    if (!ok) throw PreconditionError("critical_coupling: v1 must be nonpositive and not identically zero");
}

}  // namespace

double critical_coupling(const Profile& v1, const AngularSector& s, const UniformGrid& grid,
                         const CriticalScan& scan) {
    require_attractive(v1);
    auto growth = [&](double beta) {
        RadialPotential p;
        p.v1 = v1;
        p.beta = beta;
        return radial::zero_energy_solution(p, s, grid).growth;
    };
    const double step = scan.beta_max / scan.steps;
    double lo = 0.0, glo = growth(0.0);
    double hi = -1.0;
    for (int k = 1; k <= scan.steps; ++k) {
        double b = k * step;
        double g = growth(b);
        if ((g > 0.0) != (glo > 0.0)) {
            hi = b;
            break;
        }
        lo = b;
    }
    if (hi < 0.0) throw NumericalError("critical_coupling: bracket failure, no sign change on the scan interval");
    const double sign_lo = glo > 0.0 ? 1.0 : -1.0;
    while (hi - lo > scan.tol * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        if (growth(mid) * sign_lo > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

CriticalEstimate critical_coupling_extrapolated(const Profile& v1, const AngularSector& s, const UniformGrid& grid,
                                                const CriticalScan& scan) {
    CriticalEstimate e;
    e.h = grid.h();
    e.beta_h = critical_coupling(v1, s, grid, scan);
    e.beta_h2 = critical_coupling(v1, s, grid.refined(), scan);
    e.beta = (4.0 * e.beta_h2 - e.beta_h) / 3.0;
    return e;
}

radial::PotentialFamily critical_family(RadialPotential base, AngularSector tune, double shoot_radius,
                                        CriticalScan scan) {
    auto cache = std::make_shared<std::map<long long, double>>();
    return [=](const UniformGrid& g) {
        const double h = g.h();
        const long long key = std::llround(h * 1e13);
        auto it = cache->find(key);
        double beta;
        if (it != cache->end()) {
            beta = it->second;
        } else {
            beta = critical_coupling(base.v1, tune, UniformGrid::with_step(h, shoot_radius), scan);
            (*cache)[key] = beta;
        }
        RadialPotential p = base;
        p.beta = beta;
        return p;
    };
}

ResonanceProfile threshold_analysis(const RadialPotential& pot, const AngularSector& s, const UniformGrid& grid,
                                    double zero_tol) {
    ResonanceProfile prof;
    prof.sector = s;
    prof.beta = pot.beta;
    radial::ZeroEnergySolution zs = radial::zero_energy_solution(pot, s, grid);
    prof.growth_ratio = zs.growth_ratio;
    if (zs.growth_ratio > zero_tol) return prof;

    prof.kind = s.nu <= 1.0 + 1e-12 ? ThresholdKind::Resonance : ThresholdKind::Eigenvalue;
    (prof.kind == ThresholdKind::Resonance ? prof.k : prof.k0) = 1;

    const double h = grid.h();
    const std::size_t n = grid.n;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += -pot.V1(grid.r(i), h) * zs.u[i] * zs.u[i];
    norm *= h;
    if (!(norm > 0.0)) throw NumericalError("threshold_analysis: <phi, -V1 phi> is not positive");
    const double scale = 1.0 / std::sqrt(norm);

    prof.r.resize(n);
    prof.u.resize(n);
    prof.psi.resize(n);
    const double half = 0.5 * (s.n - 1);
    double c1 = 0, c1p = 0, v11 = 0, nrm = 0;
    double c1_tail = 0, c1p_tail = 0, v11_tail = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = grid.r(i), u = zs.u[i] * scale;
        prof.r[i] = r;
        prof.u[i] = u;
        prof.psi[i] = u / std::pow(r, half);
        double w = std::pow(r, half);
        double a = pot.V1(r, h) * u * w, b = pot.V2(r, h) * u * w, c = pot.V2(r, h) * u * u;
        c1 += a;
        c1p += b;
        v11 += c;
        nrm += u * u;
        if (r > 0.9 * grid.r_max) {
            c1_tail += a;
            c1p_tail += b;
            v11_tail += c;
        }
    }
    prof.c1 = c1 * h;
    prof.c1p = c1p * h;
    prof.v11 = v11 * h;
    prof.norm2 = nrm * h;
    auto tail_check = [&](double tail, double total, const char* name) {
        if (std::abs(tail) > 1e-6 * std::abs(total))
            prof.warnings.push_back(std::string("quadrature tail of ") + name + " exceeds 1e-6 relative");
    };
    tail_check(c1_tail, c1, "c1");
    tail_check(c1p_tail, c1p, "c1'");
    tail_check(v11_tail, v11, "v11");
    return prof;
}

EmergentRoot predict_eigenvalue(const ResonanceProfile& prof, double lambda, double lambda0) {
    if (prof.kind != ThresholdKind::Resonance)
        throw PreconditionError("predict_eigenvalue: zero is not a resonance of H1");
    const double nu1 = prof.nu1();
    if (!(nu1 >= 0.5 && nu1 <= 1.0)) throw PreconditionError("predict_eigenvalue: nu1 must lie in [1/2, 1]");
    if (!(lambda > 0.0)) throw PreconditionError("predict_eigenvalue: lambda must be positive");
    if (lambda > lambda0) throw PreconditionError("predict_eigenvalue: lambda exceeds lambda0");
    const cplx p = std::conj(prof.c1) * prof.c1p;
    if (std::abs(p.imag()) > 1e-8 * std::abs(prof.c1) * std::abs(prof.c1p))
        throw AssumptionError("predict_eigenvalue: conj(c1) c1' is not real");
    if (!(p.real() < 0.0)) throw AssumptionError("predict_eigenvalue: conj(c1) c1' must be negative");
    if (!(prof.v11 > 0.0)) throw AssumptionError("predict_eigenvalue: v11 must be positive");

    const cplx c0 = resolvent::gamma_nu(nu1);
    const double c1sq = std::norm(prof.c1);
    const cplx x = c1sq - cplx(0.0, lambda) * p;
    EmergentRoot root;
    root.r = lambda * prof.v11 / (std::abs(c0) * std::abs(x));
    root.phi = std::arg(-lambda * p + cplx(0.0, c1sq));
    if (nu1 < 1.0) {
        root.z0 = std::polar(std::pow(root.r, 1.0 / nu1), kPi + root.phi / nu1);
    } else {
        P2Solution s = solve_p2(root.r, root.phi);
        root.z0 = s.z0;
        root.tau = s.tau;
        root.sigma = s.sigma;
    }
    root.residual = leading_residual(prof, lambda, root.z0);
    if (!(root.residual <= 1e-12)) {
        std::ostringstream m;
        m << "predict_eigenvalue: leading-order residual " << root.residual << " exceeds 1e-12";
        throw NumericalError(m.str());
    }
    return root;
}

cplx migrated_eigenvalue(const ResonanceProfile& prof, double lambda) {
    if (prof.kind != ThresholdKind::Eigenvalue)
        throw PreconditionError("migrated_eigenvalue: zero is not an eigenvalue of H1");
    return cplx(0.0, -lambda * prof.v11 / prof.norm2);
}

double leading_residual(const ResonanceProfile& prof, double lambda, cplx z) {
    const cplx iv = cplx(0.0, lambda * prof.v11);
    if (prof.kind == ThresholdKind::Eigenvalue) return std::abs(iv + z * prof.norm2) / (lambda * prof.v11);
    const cplx p = std::conj(prof.c1) * prof.c1p;
    const cplx x = std::norm(prof.c1) - cplx(0.0, lambda) * p;
    const double nu1 = prof.nu1();
    return std::abs(iv + resolvent::gamma_nu(nu1) * resolvent::z_nu(z, nu1) * x) / (lambda * prof.v11);
}

P2Solution solve_p2(double r, double phi) {
    if (!(r > 0.0 && r < 1.0)) throw PreconditionError("solve_p2: r must lie in (0, 1)");
    if (!(phi > 0.0 && phi < kPi)) throw PreconditionError("solve_p2: phi must lie in (0, pi)");
    const double lr = std::log(r);
    auto residual = [&](double t, double s, double& f1, double& f2) {
        f1 = std::log(t) - t * std::cos(s) - lr;
        f2 = t * std::sin(s) - s - phi - kPi;
        return std::hypot(f1, f2);
    };
    double tau = std::log(1.0 / r) + std::log(std::log(1.0 / r));
    if (!(tau > 0.5)) tau = 0.5;
    double sigma = (phi + kPi) / tau;
    if (sigma >= 0.5 * kPi) sigma = 0.25 * kPi;
    std::ostringstream trace;
    P2Solution sol;
    double f1, f2;
    double fn = residual(tau, sigma, f1, f2);
    bool done = false;
    for (int it = 1; it <= 100; ++it) {
        sol.iterations = it;
        const double j11 = 1.0 / tau - std::cos(sigma), j12 = tau * std::sin(sigma);
        const double j21 = std::sin(sigma), j22 = tau * std::cos(sigma) - 1.0;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det)) break;
        const double dt = -(f1 * j22 - j12 * f2) / det;
        const double dsig = -(j11 * f2 - j21 * f1) / det;
        double alpha = 1.0, nt = tau, ns = sigma, g1 = f1, g2 = f2, gn = fn;
        for (int b = 0; b < 40; ++b) {
            nt = tau + alpha * dt;
            ns = sigma + alpha * dsig;
            if (nt > 0.0 && ns > 0.0 && ns < kPi) {
                gn = residual(nt, ns, g1, g2);
                if (gn < fn * (1.0 - 1e-4 * alpha) || gn < 1e-15) break;
            }
            alpha *= 0.5;
        }
        trace << "it " << it << ": tau=" << nt << " sigma=" << ns << " |F|=" << gn << "\n";
        const double move = std::hypot(nt - tau, ns - sigma);
        tau = nt;
        sigma = ns;
        f1 = g1;
        f2 = g2;
        fn = gn;
        if (move <= 1e-15 * std::max(1.0, tau) || fn < 1e-15) {
            done = true;
            break;
        }
    }
    sol.tau = tau;
    sol.sigma = sigma;
    sol.residual_modulus = std::abs(tau * std::exp(-tau * std::cos(sigma)) - r) / r;
    sol.residual_phase = std::abs(-sigma + tau * std::sin(sigma) - phi - kPi);
    if (!done || sol.residual_modulus > 1e-12 || sol.residual_phase > 1e-12)
        throw NumericalError("solve_p2: no convergence\n" + trace.str());
    sol.z0 = std::polar(std::exp(-tau * std::cos(sigma)), kPi + phi + sigma);
    return sol;
}

namespace {

// Follows a Jost root from (lambda_a, z_a) to lambda_b on the configuration grid,
// halving the continuation step until every Newton solve converges.
std::optional<cplx> continue_root(const radial::PotentialFamily& family, const AngularSector& s,
                                  const UniformGrid& grid, double lambda_a, cplx z_a, double lambda_b,
                                  double max_abs) {
    const RadialPotential pot = family(grid);
    for (int m = 1; m <= 64; m *= 2) {
        cplx z = z_a;
        bool ok = true;
        for (int k = 1; k <= m && ok; ++k) {
            double la = lambda_a + (lambda_b - lambda_a) * (k - 1) / m;
            double lb = lambda_a + (lambda_b - lambda_a) * k / m;
            cplx seed = la > 0.0 ? z * (lb / la) : z;
            radial::NewtonResult nr = radial::jost_newton(radial::discretize(pot, s, lb, grid), seed, max_abs);
            ok = nr.converged;
            z = nr.z;
        }
        if (ok) return z;
    }
    return std::nullopt;
}

}  // namespace

std::vector<TrajectoryPoint> track_trajectory(const radial::PotentialFamily& family, const ResonanceProfile& prof,
                                              const std::vector<double>& lambdas, const radial::ConfirmOptions& opt,
                                              double delta, double lambda0) {
    std::vector<TrajectoryPoint> out;
    if (prof.kind == ThresholdKind::Regular) return out;
    std::optional<std::pair<double, cplx>> last;
    for (double lambda : lambdas) {
        TrajectoryPoint tp;
        tp.lambda = lambda;
        tp.z_pred = prof.kind == ThresholdKind::Resonance ? predict_eigenvalue(prof, lambda, lambda0).z0
                                                          : migrated_eigenvalue(prof, lambda);
        radial::SpectrumReport rep = radial::confirm_point_spectrum(family, prof.sector, lambda, {tp.z_pred}, opt);
        if (rep.entries.empty() && last) {
            std::optional<cplx> seed = continue_root(family, prof.sector, opt.grid, last->first, last->second,
                                                     lambda, opt.max_abs);
            if (seed) rep = radial::confirm_point_spectrum(family, prof.sector, lambda, {*seed}, opt);
        }
        if (rep.entries.empty()) {
            std::ostringstream m;
            m << "track_trajectory: lost trajectory at lambda = " << lambda << ", no root near " << tp.z_pred;
            throw NumericalError(m.str());
        }
        tp.entry = rep.entries.front();
        tp.z_num = tp.entry.z;
        if (std::abs(tp.z_num) >= delta || tp.z_num.imag() >= 0.0) {
            std::ostringstream m;
            m << "track_trajectory: lost trajectory at lambda = " << lambda << ", root " << tp.z_num
              << " left the lower half-disk of radius " << delta;
            throw NumericalError(m.str());
        }
        tp.rel_err = std::abs(tp.z_num - tp.z_pred) / std::abs(tp.z_num);
        tp.residual_p = leading_residual(prof, lambda, tp.z_num);
        last = {lambda, tp.z_num};
        out.push_back(tp);
    }
    return out;
}

}  // namespace dissip::resonance
