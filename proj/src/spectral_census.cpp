#include "spectral_census.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace dissip::census {

using radial::UniformGrid;

bool Region::contains(cplx z) const {
    for (const Disk& d : disks)
        if (d.contains(z)) return true;
    if (!scan || std::abs(z) > scan_radius) return false;
    double dist = z.real() >= 0.0 ? std::abs(z.imag()) : std::abs(z);
    return dist > exclusion;
}

double Region::outer_radius() const {
    double r = scan ? scan_radius : 0.0;
    for (const Disk& d : disks) r = std::max(r, std::abs(d.center) + d.radius);
    return r;
}

std::string Region::describe() const {
    std::ostringstream o;
    if (scan) o << "|z| <= " << scan_radius << " minus " << exclusion << "-neighbourhood of [0,inf)";
    for (const Disk& d : disks) {
        if (o.tellp() > 0) o << " + ";
        o << "D-(" << d.center.real() << (d.center.imag() < 0 ? "" : "+") << d.center.imag() << "i, " << d.radius
          << ")";
    }
    return o.str();
}

CountResult count_eigenvalues(const radial::PotentialFamily& family, int n, double lambda, const Region& region,
                              const CountOptions& opt, const std::vector<std::vector<cplx>>& extra_seeds) {
    if (!(lambda >= 0.0)) throw PreconditionError("count_eigenvalues: lambda must be >= 0");
    for (const Disk& d : region.disks)
        if (!(d.radius > 0.0)) throw PreconditionError("count_eigenvalues: disk radius must be positive");
    if (region.scan && region.exclusion < 1e-3)
        throw PreconditionError("count_eigenvalues: region must avoid a 1e-3 neighbourhood of [0, inf)");
    const double reach = 1.2 * region.outer_radius();
    CountResult out;
    for (int ell = 0; ell <= opt.max_ell; ++ell) {
        AngularSector s = AngularSector::make(n, ell);
        std::vector<cplx> seeds;
        const auto key = std::make_tuple(ell, lambda, opt.seed_grid.r_max, opt.seed_grid.n);
        std::vector<cplx> dense;
        if (opt.cache && opt.cache->count(key)) {
            dense = opt.cache->at(key);
        } else {
            dense = radial::complex_spectrum(radial::discretize(family(opt.seed_grid), s, lambda, opt.seed_grid));
            if (opt.cache) (*opt.cache)[key] = dense;
        }
        for (cplx z : dense)
            if (std::abs(z) <= reach) seeds.push_back(z);
        if (std::size_t(ell) < extra_seeds.size())
            seeds.insert(seeds.end(), extra_seeds[ell].begin(), extra_seeds[ell].end());
        SectorResult sr;
        sr.ell = ell;
        sr.report = radial::confirm_point_spectrum(family, s, lambda, seeds, opt.confirm);
        for (const auto& e : sr.report.entries) {
            if (!e.converged || !region.contains(e.z)) continue;
            if (e.confirmed) {
                sr.inside.push_back(e);
                sr.count += e.multiplicity;
            } else if (e.stable != e.localized) {
                std::ostringstream w;
                w << "l=" << ell << " lambda=" << lambda << ": ambiguous candidate " << e.z << " (stable=" << e.stable
                  << ", localized=" << e.localized << ", drift_h=" << e.drift_h << ", drift_r=" << e.drift_r
                  << ", outer=" << e.outer << ")";
                out.ambiguities.push_back(w.str());
            }
        }
        out.count += sr.count;
        out.sectors.push_back(std::move(sr));
    }
    return out;
}

radial::PotentialFamily Scenario::family() const {
    if (tune_ell) return resonance::critical_family(pot, AngularSector::make(n, *tune_ell), shoot_radius);
    return radial::fixed_potential(pot);
}

std::vector<Scenario> builtin_scenarios() {
    std::vector<Scenario> out;
    auto well = [](double depth) {
        RadialPotential p;
        p.v1 = Profile::square_well(depth, 1.0);
        p.v2_mirror = true;
        return p;
    };
    Scenario sub;
    sub.name = "subcritical";
    sub.law = "N = N1";
    sub.pot = well(1.0);
    sub.expected = Expected{0, 0, 0};
    out.push_back(sub);

    Scenario super = sub;
    super.name = "supercritical";
    super.pot = well(4.0);
    super.expected = Expected{1, 0, 0};
    out.push_back(super);

    Scenario crit = sub;
    crit.name = "critical-resonance";
    crit.law = "N = N1 + k";
    crit.tune_ell = 0;
    crit.expected = Expected{0, 1, 0};
    out.push_back(crit);

    Scenario zero = sub;
    zero.name = "l1-zero-eigenvalue";
    zero.tune_ell = 1;
    zero.expected = Expected{1, 0, 1};
    zero.region.scan = false;
    zero.region.disks = {Disk{0.0, 1.5}};
    out.push_back(zero);
    return out;
}

std::optional<Scenario> builtin_scenario(const std::string& name) {
    for (auto& s : builtin_scenarios())
        if (s.name == name) return s;
    return std::nullopt;
}

ThresholdSummary threshold_summary(const Scenario& sc) {
    ThresholdSummary ts;
    const RadialPotential pot = sc.family()(sc.grid);
    for (int ell = 0; ell <= sc.max_ell; ++ell) {
        auto prof = resonance::threshold_analysis(pot, AngularSector::make(sc.n, ell), sc.grid);
        ts.k += prof.k;
        ts.k0 += prof.k0;
        ts.profiles.push_back(std::move(prof));
    }
    return ts;
}

std::vector<Hypothesis> hypothesis_checklist(const Scenario& sc, const ThresholdSummary& ts) {
    std::vector<Hypothesis> out;
    const RadialPotential pot = sc.family()(sc.grid);
    const double r_max = sc.grid.r_max;

    DecayCheck d1 = check_decay(pot.v1, pot.beta, pot.rho1, r_max);
    DecayCheck d2 = pot.v2_mirror ? check_decay(pot.v1, pot.beta, pot.rho2, r_max) : check_decay(pot.v2, 1.0, pot.rho2, r_max);
    std::ostringstream dd;
    dd << "tail ratios " << d1.ratio << ", " << d2.ratio;
    out.push_back({"short_range_decay", d1.ok && d2.ok && pot.rho1 > 2.0 && pot.rho2 > 2.0, dd.str()});

    std::ostringstream cd;
    cd << "rho1' = " << pot.rho1p << ", rho2 = " << pot.rho2;
    out.push_back({"counting_decay", pot.rho1p > 3.0 && pot.rho2 > 3.0, cd.str()});

    const double h = sc.grid.h();
    bool nonneg = true, nonzero = false;
    for (std::size_t i = 0; i < sc.grid.n; ++i) {
        double v = pot.V2(sc.grid.r(i), h);
        if (v < 0.0) nonneg = false;
        if (v > 0.0) nonzero = true;
    }
    out.push_back({"dissipative", nonneg && nonzero, nonneg ? (nonzero ? "V2 >= 0, V2 != 0" : "V2 == 0") : "V2 < 0 somewhere"});

    bool positive = true;
    for (int ell = 0; ell <= sc.max_ell; ++ell) positive = positive && AngularSector::make(sc.n, ell).nu > 0.0;
    out.push_back({"positive_sectors", positive, "nu > 0 in every scanned sector"});

    int resonant = 0;
    for (const auto& p : ts.profiles) resonant += p.k;
    bool simple = resonant <= 1 && !(ts.k > 0 && ts.k0 > 0);
    std::ostringstream sd;
    sd << "k = " << ts.k << ", k0 = " << ts.k0;
    out.push_back({"simple_threshold", simple, sd.str()});

    bool sign_ok = true;
    std::string sign_detail = "no threshold resonance";
    for (const auto& p : ts.profiles) {
        if (p.kind != resonance::ThresholdKind::Resonance) continue;
        cplx prod = std::conj(p.c1) * p.c1p;
        bool real = std::abs(prod.imag()) <= 1e-8 * std::abs(p.c1) * std::abs(p.c1p);
        sign_ok = real && prod.real() < 0.0 && p.nu1() >= 0.5 && p.nu1() <= 1.0;
        std::ostringstream o;
        o << "conj(c1) c1' = " << prod << ", nu1 = " << p.nu1();
        sign_detail = o.str();
    }
    out.push_back({"resonance_sign_condition", sign_ok, sign_detail});
    return out;
}

const char* status_name(Status s) {
    switch (s) {
        case Status::Pass: return "PASS";
        case Status::Fail: return "FAIL";
        case Status::Skipped: return "SKIPPED";
    }
    return "?";
}

namespace {

CountOptions count_options(const Scenario& sc, const UniformGrid& grid, int refine,
                           std::shared_ptr<SeedCache> cache = nullptr) {
    CountOptions co;
    co.cache = std::move(cache);
    co.confirm.grid = grid;
    co.confirm.refine = refine;
    co.seed_grid = sc.seed_grid;
    co.max_ell = sc.max_ell;
    return co;
}

std::vector<std::vector<cplx>> threshold_seeds(const Scenario& sc, const ThresholdSummary& ts, double lambda) {
    std::vector<std::vector<cplx>> seeds(ts.profiles.size());
    if (lambda <= 0.0) return seeds;
    for (std::size_t l = 0; l < ts.profiles.size(); ++l) {
        const auto& p = ts.profiles[l];
        if (p.kind == resonance::ThresholdKind::Resonance && lambda <= sc.lambda0)
            seeds[l].push_back(resonance::predict_eigenvalue(p, lambda, sc.lambda0).z0);
        else if (p.kind == resonance::ThresholdKind::Eigenvalue)
            seeds[l].push_back(resonance::migrated_eigenvalue(p, lambda));
    }
    return seeds;
}

std::string describe_count(const CountResult& c) {
    std::ostringstream o;
    o << "N = " << c.count << " [";
    bool first = true;
    for (const auto& s : c.sectors)
        for (const auto& e : s.inside) {
            o << (first ? "" : ", ") << "l=" << s.ell << ": " << e.z << " x" << e.multiplicity;
            first = false;
        }
    o << "]";
    return o.str();
}

}  // namespace

CensusReport verify_counting_law(const Scenario& sc, const CensusOptions& opt) {
    CensusReport rep;
    rep.scenario = sc.name;
    ThresholdSummary ts = threshold_summary(sc);
    rep.checklist = hypothesis_checklist(sc, ts);
    rep.k = ts.k;
    rep.k0 = ts.k0;
    for (const auto& h : rep.checklist)
        if (!h.ok) {
            rep.status = Status::Skipped;
            rep.diagnostics.push_back("hypothesis " + h.name + " fails: " + h.detail);
        }
    if (!rep.diagnostics.empty()) return rep;

    const radial::PotentialFamily family = sc.family();
    std::vector<UniformGrid> grids{sc.grid};
    if (opt.grid_doubling) {
        grids.push_back(sc.grid.refined());
        grids.push_back(UniformGrid::with_step(sc.grid.h(), 2.0 * sc.grid.r_max));
    }
    bool ok = true;
    auto cache = std::make_shared<SeedCache>();

    std::vector<int> n1s;
    for (const UniformGrid& g : grids) {
        CountResult c0 = count_eigenvalues(family, sc.n, 0.0, sc.region, count_options(sc, g, opt.refine, cache));
        n1s.push_back(c0.count + ts.k0);
        for (const auto& a : c0.ambiguities) {
            rep.diagnostics.push_back(a);
            ok = false;
        }
    }
    rep.N1 = n1s.front();
    for (int v : n1s)
        if (v != rep.N1) {
            ok = false;
            rep.diagnostics.push_back("N1 changes under grid doubling");
        }

    const int target = rep.N1 + (sc.law == "N = N1 + k" ? rep.k : 0);
    if (sc.law != "N = N1 + k" && rep.k != 0) {
        ok = false;
        rep.diagnostics.push_back("law N = N1 declared but zero is a resonance");
    }
    for (double lambda : sc.lambdas) {
        LambdaCount lc;
        lc.lambda = lambda;
        lc.expected = target;
        auto seeds = threshold_seeds(sc, ts, lambda);
        for (std::size_t gi = 0; gi < grids.size(); ++gi) {
            CountResult c = count_eigenvalues(family, sc.n, lambda, sc.region, count_options(sc, grids[gi], opt.refine, cache),
                                              seeds);
            for (const auto& a : c.ambiguities) {
                rep.diagnostics.push_back(a);
                ok = false;
            }
            if (gi == 0) {
                lc.count = c.count;
                for (const auto& s : c.sectors)
                    for (const auto& e : s.inside) lc.spectrum.push_back({s.ell, e});
            }
            if (c.count != target || c.count != lc.count) {
                ok = false;
                std::ostringstream o;
                o << "lambda = " << lambda << ", grid h = " << grids[gi].h() << ", R = " << grids[gi].r_max
                  << ": " << describe_count(c) << ", expected " << target;
                rep.diagnostics.push_back(o.str());
            }
        }
        rep.counts.push_back(std::move(lc));
    }

    if (opt.cross_check) {
        CountOptions co = count_options(sc, sc.grid, opt.refine);
        co.seed_grid = sc.cross_grid;
        CountResult c = count_eigenvalues(family, sc.n, sc.cross_lambda, sc.region, co);
        rep.cross_count = c.count;
        auto it = std::find_if(rep.counts.begin(), rep.counts.end(),
                               [&](const LambdaCount& l) { return l.lambda == sc.cross_lambda; });
        int reference = it != rep.counts.end() ? it->count : target;
        if (c.count != reference) {
            ok = false;
            std::ostringstream o;
            o << "dense-seed cross-check at lambda = " << sc.cross_lambda << ": " << describe_count(c) << " vs "
              << reference;
            rep.diagnostics.push_back(o.str());
        }
    }

    if (sc.expected) {
        const Expected& e = *sc.expected;
        if (e.N1 != rep.N1 || e.k != rep.k || e.k0 != rep.k0) {
            ok = false;
            std::ostringstream o;
            o << "expected N1 = " << e.N1 << ", k = " << e.k << ", k0 = " << e.k0 << "; found N1 = " << rep.N1
              << ", k = " << rep.k << ", k0 = " << rep.k0;
            rep.diagnostics.push_back(o.str());
        }
    }
    rep.status = ok ? Status::Pass : Status::Fail;
    return rep;
}

AccumulationScan no_accumulation_scan(const Scenario& sc, double lambda, double E0, double delta, int refine) {
    if (!(delta > 0.0) || !(E0 >= 4.0 * delta))
        throw PreconditionError("no_accumulation_scan: need delta > 0 and E0 >= 4 delta");
    AccumulationScan out;
    Region disk;
    disk.scan = false;
    disk.disks = {Disk{E0, delta}};
    const radial::PotentialFamily family = sc.family();
    for (int level = 0; level < 2; ++level) {
        CountOptions co = count_options(sc, level == 0 ? sc.grid : sc.grid.refined(), refine);
        if (level == 1) co.seed_grid = sc.seed_grid.refined();
        CountResult c = count_eigenvalues(family, sc.n, lambda, disk, co);
        out.found += c.count;
        for (const auto& s : c.sectors)
            for (const auto& e : s.inside) {
                std::ostringstream o;
                o << "level " << level << ", l=" << s.ell << ": confirmed eigenvalue " << e.z;
                out.diagnostics.push_back(o.str());
            }
        for (const auto& a : c.ambiguities) out.diagnostics.push_back("level " + std::to_string(level) + ", " + a);
    }
    out.clear = out.found == 0;
    return out;
}

}  // namespace dissip::census
