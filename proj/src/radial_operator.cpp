#include "radial_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "errors.hpp"

namespace dissip::radial {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double norm2(const std::vector<cplx>& x) {
    double s = 0.0;
    for (const cplx& v : x) s += std::norm(v);
    return std::sqrt(s);
}

cplx bilinear(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

void scale(std::vector<cplx>& x, cplx a) {
    for (cplx& v : x) v *= a;
}

}  // namespace

UniformGrid UniformGrid::with_step(double h, double r_max) {
    if (!(h > 0.0) || !(r_max > h)) throw PreconditionError("grid: need 0 < h < r_max");
    std::size_t n = std::size_t(std::llround(r_max / h)) - 1;
    return {double(n + 1) * h, n};
}

Eigen::MatrixXcd DiscreteOperator::dense() const {
    const Eigen::Index n = Eigen::Index(size());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = diag[std::size_t(i)];
        if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = offdiag;
    }
    return a;
}

std::vector<cplx> DiscreteOperator::apply(const std::vector<cplx>& x) const {
    const std::size_t n = size();
    std::vector<cplx> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx v = diag[i] * x[i];
        if (i > 0) v += offdiag * x[i - 1];
        if (i + 1 < n) v += offdiag * x[i + 1];
        y[i] = v;
    }
    return y;
}

void check_resolution(const RadialPotential& pot, double h) {
    double vmax = std::max(std::abs(pot.beta) * pot.v1.max_abs(), pot.v2_mirror ? 0.0 : pot.v2.max_abs());
    if (h * h * vmax > 1.0) throw PreconditionError("grid too coarse for the potential depth");
    for (const Profile* p : {&pot.v1, &pot.v2}) {
        if (p->kind == ProfileKind::SquareWell && p->depth != 0.0 && h > 0.25 * p->radius)
            throw PreconditionError("grid too coarse for the well radius");
        if (p->kind == ProfileKind::Exponential && p->depth != 0.0 && h * p->rate > 0.5)
            throw PreconditionError("grid too coarse for the decay rate");
    }
}

DiscreteOperator discretize(const RadialPotential& pot, const AngularSector& s, double lambda,
                            const UniformGrid& grid) {
    if (!(lambda >= 0.0)) throw PreconditionError("discretize: lambda must be >= 0");
    if (grid.n < 200) throw PreconditionError("discretize: need at least 200 interior nodes");
    const double h = grid.h();
    check_resolution(pot, h);
    DiscreteOperator op;
    op.sector = s;
    op.grid = grid;
    op.lambda = lambda;
    op.offdiag = -1.0 / (h * h);
    op.diag.resize(grid.n);
    const double c = s.centrifugal();
    for (std::size_t i = 0; i < grid.n; ++i) {
        double r = grid.r(i);
        op.diag[i] = cplx(2.0 / (h * h) + c / (r * r) + pot.V1(r, h), -lambda * pot.V2(r, h));
    }
    return op;
}

static void sort_spectrum(std::vector<cplx>& w) {
    std::sort(w.begin(), w.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

std::vector<cplx> complex_spectrum(const DiscreteOperator& op) {
    const lapack_int n = lapack_int(op.size());
    if (n > 4000) throw PreconditionError("complex_spectrum: dense solve limited to 4000 nodes");
    std::vector<cplx> h(std::size_t(n) * n, 0.0), w(n);
    for (lapack_int i = 0; i < n; ++i) {
        h[std::size_t(i) * n + i] = op.diag[std::size_t(i)];
        if (i + 1 < n) {
            h[std::size_t(i) * n + i + 1] = op.offdiag;
            h[std::size_t(i + 1) * n + i] = op.offdiag;
        }
    }
    cplx dummy = 0.0;
    lapack_int info = LAPACKE_zhseqr(LAPACK_COL_MAJOR, 'E', 'N', n, 1, n, h.data(), n, w.data(), &dummy, 1);
    if (info != 0) throw NumericalError("complex_spectrum: QR iteration failed to converge");
    sort_spectrum(w);
    return w;
}

std::vector<cplx> complex_spectrum(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw PreconditionError("complex_spectrum: matrix must be square");
    const lapack_int n = lapack_int(a.rows());
    Eigen::MatrixXcd work = a;
    std::vector<cplx> w(n);
    cplx dummy = 0.0;
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(), &dummy, 1,
                                    &dummy, 1);
    if (info != 0) throw NumericalError("complex_spectrum: QR iteration failed to converge");
    sort_spectrum(w);
    return w;
}

std::vector<Cluster> cluster_eigenvalues(const std::vector<cplx>& values, double radius) {
    std::vector<Cluster> out;
    std::vector<bool> used(values.size(), false);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (used[i]) continue;
        Cluster c{values[i], 1};
        cplx sum = values[i];
        used[i] = true;
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            if (!used[j] && std::abs(values[j] - values[i]) <= radius) {
                used[j] = true;
                sum += values[j];
                ++c.multiplicity;
            }
        }
        c.z = sum / double(c.multiplicity);
        out.push_back(c);
    }
    return out;
}

ShiftedTridiagonal::ShiftedTridiagonal(const std::vector<cplx>& diag, double off, cplx shift, cplx last_shift)
    : inv_pivot_(diag.size()), off_(off) {
    const double floor = 1e-13 * std::abs(off);
    cplx m = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        cplx d = diag[i] - shift;
        if (i + 1 == diag.size()) d += last_shift;
        m = (i == 0) ? d : d - off * off / m;
        if (std::abs(m) < floor) {
            m = floor;
            guarded_ = true;
        }
        inv_pivot_[i] = 1.0 / m;
    }
}

void ShiftedTridiagonal::solve(std::vector<cplx>& b) const {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) b[i] -= off_ * inv_pivot_[i - 1] * b[i - 1];
    b[n - 1] *= inv_pivot_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - off_ * b[i + 1]) * inv_pivot_[i];
}

cplx decaying_root(cplx s) {
    cplx half = 0.5 * s;
    cplx root = std::sqrt(half * half - 1.0);
    cplx big = (std::abs(half + root) >= std::abs(half - root)) ? half + root : half - root;
    return 1.0 / big;
}

JostValue jost(const DiscreteOperator& op, cplx z) {
    const double h = op.grid.h(), h2 = h * h;
    // Real arithmetic: this loop dominates root finding.
    double upr = 0, upi = 0, ur = 1, ui = 0, vpr = 0, vpi = 0, vr = 0, vi = 0;
    const double zr = z.real(), zi = z.imag();
    const cplx* d = op.diag.data();
    for (std::size_t i = 0; i < op.size(); ++i) {
        const double ar = h2 * (d[i].real() - zr), ai = h2 * (d[i].imag() - zi);
        const double unr = ar * ur - ai * ui - upr, uni = ar * ui + ai * ur - upi;
        const double vnr = ar * vr - ai * vi - vpr - h2 * ur, vni = ar * vi + ai * vr - vpi - h2 * ui;
        upr = ur;
        upi = ui;
        ur = unr;
        ui = uni;
        vpr = vr;
        vpi = vi;
        vr = vnr;
        vi = vni;
        const double mag = std::fabs(ur) + std::fabs(ui) + std::fabs(vr) + std::fabs(vi);
        if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
            const double f = mag > 1e100 ? 1e-100 : 1e100;
            upr *= f, upi *= f, ur *= f, ui *= f, vpr *= f, vpi *= f, vr *= f, vi *= f;
        }
    }
    const cplx up(upr, upi), u(ur, ui), vp(vpr, vpi), v(vr, vi);
    const double rext = op.grid.r_max;
    cplx s = 2.0 + h2 * (op.sector.centrifugal() / (rext * rext) - z);
    cplx xi = decaying_root(s);
    cplx dxi = -h2 * xi * xi / (xi * xi - 1.0);
    return {u - xi * up, v - xi * vp - dxi * up};
}

NewtonResult jost_newton(const DiscreteOperator& op, cplx seed, double max_abs) {
    NewtonResult res;
    res.z = seed;
    std::ostringstream trace;
    cplx z = seed;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= 80; ++it) {
        JostValue j = jost(op, z);
        res.iterations = it;
        if (!finite(j.f) || !finite(j.df) || j.df == cplx(0.0)) {
            trace << "it " << it << ": non-finite Jost value at " << z << "\n";
            break;
        }
        cplx step = j.f / j.df;
        double cap = 0.3 * std::max(std::abs(z), 0.05);
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
        trace << "it " << it << ": z = " << z << " |step| = " << std::abs(step) << "\n";
        if (!finite(z) || std::abs(z) > max_abs) break;
        const double a = std::abs(step);
        // Quadratic convergence ends at the rounding floor of the recurrence.
        if (a <= 1e-13 * std::abs(z) + 1e-16 || (a <= 1e-7 * std::abs(z) && a > 0.25 * prev)) {
            res.converged = true;
            break;
        }
        prev = a;
    }
    res.z = z;
    res.trace = trace.str();
    return res;
}

int jost_winding(const DiscreteOperator& op, cplx center, double radius) {
    for (int m = 64; m <= 4096; m *= 2) {
        std::vector<cplx> f(m);
        for (int k = 0; k < m; ++k)
            f[k] = jost(op, center + std::polar(radius, 2 * std::numbers::pi * k / m)).f;
        double total = 0.0, worst = 0.0;
        for (int k = 0; k < m; ++k) {
            double d = std::arg(f[(k + 1) % m] / f[k]);
            total += d;
            worst = std::max(worst, std::abs(d));
        }
        if (worst < 1.0 || m == 4096) return int(std::lround(total / (2 * std::numbers::pi)));
    }
    return 0;
}

Eigenpair dirichlet_eigenpair(const DiscreteOperator& op, cplx shift) {
    const std::size_t n = op.size();
    Eigenpair ep;
    std::vector<cplx> x(n, 1.0);
    for (int k = 0; k < 2; ++k) {
        ShiftedTridiagonal lu(op.diag, op.offdiag, shift);
        lu.solve(x);
        scale(x, 1.0 / norm2(x));
    }
    auto rayleigh = [&](const std::vector<cplx>& v) { return bilinear(v, op.apply(v)) / bilinear(v, v); };
    cplx theta = rayleigh(x);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= 16; ++it) {
        ShiftedTridiagonal lu(op.diag, op.offdiag, theta);
        lu.solve(x);
        double nx = norm2(x);
        if (!std::isfinite(nx) || nx == 0.0) break;
        scale(x, 1.0 / nx);
        cplx next = rayleigh(x);
        ep.iterations = it;
        const double d = std::abs(next - theta);
        bool done = d <= 1e-14 * std::abs(next) + 1e-300 || (d <= 1e-9 * std::abs(next) && d > 0.25 * prev);
        prev = d;
        theta = next;
        if (done) {
            ep.converged = true;
            break;
        }
    }
    std::vector<cplx> tx = op.apply(x);
    for (std::size_t i = 0; i < n; ++i) tx[i] -= theta * x[i];
    ep.residual = norm2(tx);
    ep.z = theta;
    ep.vec = std::move(x);
    return ep;
}

double outer_mass(const std::vector<cplx>& x, double outer) {
    const double cut = (1.0 - outer) * double(x.size() + 1);
    double tot = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double w = std::norm(x[i]);
        tot += w;
        if (double(i + 1) > cut) tail += w;
    }
    return tot > 0.0 ? tail / tot : 1.0;
}

ZeroEnergySolution zero_energy_solution(const RadialPotential& pot, const AngularSector& s,
                                        const UniformGrid& grid) {
    const std::size_t n = grid.n;
    const double h = grid.h(), h2 = h * h, c = s.centrifugal();
    const std::size_t m = std::max<std::size_t>(1, n / 10);
    const std::size_t ia = n - 1, ib = n - 1 - m;
    if (grid.r(ib) <= pot.v1.support_radius())
        throw PreconditionError("zero_energy_solution: grid does not reach the potential-free region");
    ZeroEnergySolution z;
    z.u.resize(n);
    double up = 0.0, u = 1.0;
    z.u[0] = u;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double r = grid.r(i);
        double a = 2.0 + h2 * (c / (r * r) + pot.V1(r, h));
        double un = a * u - up;
        up = u;
        u = un;
        z.u[i + 1] = u;
    }
    const double p = 0.5 + s.nu, q = 0.5 - s.nu;
    const double ra = grid.r(ia), rb = grid.r(ib);
    // Scale the basis by its value at ra to keep the 2x2 system well conditioned.
    const double a11 = 1.0, a12 = 1.0, a21 = std::pow(rb / ra, p), a22 = std::pow(rb / ra, q);
    const double det = a11 * a22 - a12 * a21;
    const double ua = z.u[ia], ub = z.u[ib];
    const double ga = (ua * a22 - a12 * ub) / det;  // A ra^p
    const double gb = (a11 * ub - a21 * ua) / det;  // B ra^q
    z.growth = ga / std::pow(ra, p);
    z.decay = gb / std::pow(ra, q);
    z.growth_ratio = std::abs(ga) / (std::abs(ga) + std::abs(gb));
    return z;
}

PotentialFamily fixed_potential(RadialPotential pot) {
    return [pot](const UniformGrid&) { return pot; };
}

std::vector<SpectrumEntry> SpectrumReport::confirmed() const {
    std::vector<SpectrumEntry> out;
    for (const auto& e : entries)
        if (e.confirmed) out.push_back(e);
    return out;
}

bool SpectrumReport::ambiguous() const {
    for (const auto& e : entries)
        if (e.converged && e.stable != e.localized) return true;
    return false;
}

namespace {

UniformGrid box_for(const UniformGrid& base, double r_needed) {
    const double h = base.h();
    double r = std::max(base.r_max, r_needed);
    std::size_t n = std::size_t(std::ceil(r / h - 1e-9)) - 1;
    return {double(n + 1) * h, n};
}

}  // namespace

SpectrumReport confirm_point_spectrum(const PotentialFamily& family, const AngularSector& s, double lambda,
                                      const std::vector<cplx>& candidates, const ConfirmOptions& opt) {
    SpectrumReport rep;
    rep.ell = s.ell;
    rep.lambda = lambda;
    const DiscreteOperator op0 = discretize(family(opt.grid), s, lambda, opt.grid);
    std::vector<cplx> roots;

    for (cplx seed : candidates) {
        SpectrumEntry e;
        e.seed = seed;
        NewtonResult nr = jost_newton(op0, seed, opt.max_abs);
        if (!nr.converged) {
            e.z = nr.z;
            e.note = "no matched root";
            continue;
        }
        cplx zj = nr.z;
        bool dup = false;
        for (cplx r : roots)
            if (std::abs(r - zj) <= 1e-8 * std::max(std::abs(zj), 1e-12)) dup = true;
        if (dup) continue;
        roots.push_back(zj);
        e.z = zj;
        e.converged = true;
        if (zj.imag() > 1e-10 * std::max(1.0, std::abs(zj))) {
            e.note = "root in the upper half-plane";
            rep.entries.push_back(e);
            continue;
        }
        const double rek = std::sqrt(-zj).real();
        if (!(rek > 0.0)) {
            e.note = "root on the continuum";
            rep.entries.push_back(e);
            continue;
        }
        UniformGrid g1 = box_for(opt.grid, opt.decay_lengths / rek);
        if (2 * g1.n > opt.max_nodes) {
            e.note = "grid budget exceeded";
            rep.entries.push_back(e);
            continue;
        }
        e.r_box = g1.r_max;
        DiscreteOperator op1 = discretize(family(g1), s, lambda, g1);
        Eigenpair p1 = dirichlet_eigenpair(op1, zj);
        e.z = p1.z;
        e.outer = outer_mass(p1.vec, opt.outer_fraction);
        e.localized = e.outer < opt.outer_mass_max;
        p1.vec = {};
        op1 = {};
        bool stable = p1.converged;
        if (opt.refine >= 1) {
            UniformGrid gh = opt.grid.refined();
            NewtonResult nh = jost_newton(discretize(family(gh), s, lambda, gh), p1.z, opt.max_abs);
            UniformGrid g1h = g1.refined();
            Eigenpair ph = dirichlet_eigenpair(discretize(family(g1h), s, lambda, g1h), nh.converged ? nh.z : p1.z);
            e.drift_h = std::abs(ph.z - p1.z) / std::abs(p1.z);
            stable = stable && nh.converged && ph.converged && e.drift_h <= opt.stability_rel;
        }
        if (opt.refine >= 2) {
            UniformGrid g2 = g1.extended();
            Eigenpair pr = dirichlet_eigenpair(discretize(family(g2), s, lambda, g2), p1.z);
            e.drift_r = std::abs(pr.z - p1.z) / std::abs(p1.z);
            stable = stable && pr.converged && e.drift_r <= opt.stability_rel;
        }
        e.stable = stable;
        e.confirmed = e.stable && e.localized;
        if (e.stable != e.localized) {
            std::ostringstream w;
            w << "ambiguous candidate z = " << e.z << " (stable=" << e.stable << ", localized=" << e.localized
              << ", outer mass " << e.outer << ")";
            rep.warnings.push_back(w.str());
        }
        if (e.confirmed) {
            double drift = std::max({e.drift_h, e.drift_r, 1e-9}) * std::abs(e.z);
            double radius = 10.0 * drift;
            if (zj.real() > 0.0) radius = std::min(radius, 0.5 * std::abs(zj.imag()));
            if (radius > 0.0) e.multiplicity = jost_winding(op0, zj, radius);
            if (e.multiplicity > 1) {
                std::ostringstream w;
                w << "cluster of " << e.multiplicity << " roots near z = " << e.z;
                rep.warnings.push_back(w.str());
            }
            if (e.multiplicity < 1) e.multiplicity = 1;
        }
        rep.entries.push_back(e);
    }
    return rep;
}

double birman_schwinger_norm(const RadialPotential& pot, const AngularSector& s, double lambda, cplx z,
                             const UniformGrid& grid) {
    if (!(lambda >= 0.0)) throw PreconditionError("birman_schwinger_norm: lambda must be >= 0");
    if (z.imag() == 0.0 && z.real() >= 0.0) throw DomainError("birman_schwinger_norm: z on [0, inf)");
    if (lambda == 0.0) return 0.0;
    DiscreteOperator op = discretize(pot, s, 0.0, grid);
    const double h = grid.h();
    cplx sext = 2.0 + h * h * (s.centrifugal() / (grid.r_max * grid.r_max) - z);
    cplx last = -decaying_root(sext) / (h * h);
    ShiftedTridiagonal lu(op.diag, op.offdiag, z, last);
    if (lu.guarded()) throw NumericalError("birman_schwinger_norm: resolvent near singular");

    std::vector<std::size_t> sup;
    std::vector<double> w;
    double vmax = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) vmax = std::max(vmax, std::abs(pot.V2(grid.r(i), h)));
    for (std::size_t i = 0; i < grid.n; ++i) {
        double v = pot.V2(grid.r(i), h);
        if (v < -1e-14 * vmax) throw PreconditionError("birman_schwinger_norm: V2 must be nonnegative");
        if (v > 1e-14 * vmax) {
            sup.push_back(i);
            w.push_back(std::sqrt(v));
        }
    }
    if (sup.empty()) return 0.0;
    const std::size_t m = sup.size();
    const double blow = 1e10;

    auto apply = [&](const std::vector<cplx>& v, bool adjoint) {
        std::vector<cplx> b(grid.n, 0.0);
        for (std::size_t k = 0; k < m; ++k) b[sup[k]] = adjoint ? std::conj(w[k] * v[k]) : w[k] * v[k];
        double nb = norm2(b);
        lu.solve(b);
        if (norm2(b) > blow * nb) throw NumericalError("birman_schwinger_norm: resolvent near singular");
        std::vector<cplx> out(m);
        for (std::size_t k = 0; k < m; ++k) out[k] = lambda * w[k] * (adjoint ? std::conj(b[sup[k]]) : b[sup[k]]);
        return out;
    };

    if (m <= 250) {
        Eigen::MatrixXcd bmat(m, m);
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<cplx> e(m, 0.0);
            e[j] = 1.0;
            std::vector<cplx> col = apply(e, false);
            for (std::size_t i = 0; i < m; ++i) bmat(Eigen::Index(i), Eigen::Index(j)) = col[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(bmat.adjoint() * bmat, Eigen::EigenvaluesOnly);
        return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    }
    std::vector<cplx> v(m, 1.0);
    scale(v, 1.0 / norm2(v));
    double sigma = 0.0;
    for (int it = 0; it < 2000; ++it) {
        std::vector<cplx> y = apply(v, false);
        double next = norm2(y);
        std::vector<cplx> x = apply(y, true);
        double nx = norm2(x);
        if (nx == 0.0) return 0.0;
        scale(x, 1.0 / nx);
        v = std::move(x);
        if (it > 5 && std::abs(next - sigma) <= 1e-12 * next) {
            sigma = next;
            break;
        }
        sigma = next;
    }
    return sigma;
}

}  // namespace dissip::radial
