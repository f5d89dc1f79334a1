#include "runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "model_resolvent.hpp"
#include "specfun.hpp"

namespace dissip::runner {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Typed access to one JSON object; rejects keys outside the allowed set.
class Fields {
public:
    Fields(const json& j, std::string ptr, std::set<std::string> allowed) : j_(j), ptr_(std::move(ptr)) {
        if (!j.is_object()) throw ConfigError(ptr_.empty() ? "/" : ptr_, "expected an object");
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!allowed.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
    }

    std::string at(const std::string& key) const { return ptr_ + "/" + key; }
    bool has(const std::string& key) const { return j_.contains(key); }
    const json& raw(const std::string& key) const { return j_.at(key); }

    double number(const std::string& key, double def, const std::function<bool(double)>& ok = nullptr,
                  const char* what = "out of range") const {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        double x = v.get<double>();
        if (!std::isfinite(x) || (ok && !ok(x))) throw ConfigError(at(key), what);
        return x;
    }

    long integer(const std::string& key, long def, const std::function<bool(long)>& ok = nullptr,
                 const char* what = "out of range") const {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
        long x = v.get<long>();
        if (ok && !ok(x)) throw ConfigError(at(key), what);
        return x;
    }

    bool boolean(const std::string& key, bool def) const {
        if (!has(key)) return def;
        if (!j_.at(key).is_boolean()) throw ConfigError(at(key), "expected a boolean");
        return j_.at(key).get<bool>();
    }

    std::string string(const std::string& key, const std::string& def) const {
        if (!has(key)) return def;
        if (!j_.at(key).is_string()) throw ConfigError(at(key), "expected a string");
        return j_.at(key).get<std::string>();
    }

private:
    const json& j_;
    std::string ptr_;
};

Profile parse_profile(const json& j, const std::string& ptr) {
    Fields f(j, ptr, {"kind", "depth", "radius", "rate", "r", "v"});
    const std::string kind = f.string("kind", "square_well");
    auto positive = [](double x) { return x > 0.0; };
    if (kind == "zero") return Profile::zero();
    if (kind == "square_well")
        return Profile::square_well(f.number("depth", 1.0), f.number("radius", 1.0, positive, "must be positive"));
    if (kind == "exponential")
        return Profile::exponential(f.number("depth", 1.0), f.number("rate", 1.0, positive, "must be positive"));
    if (kind == "tabulated") {
        if (!f.has("r") || !f.has("v")) throw ConfigError(ptr, "tabulated profile needs r and v");
        std::vector<double> r, v;
        for (const char* key : {"r", "v"}) {
            const json& a = f.raw(key);
            if (!a.is_array() || a.size() < 2) throw ConfigError(f.at(key), "expected an array of at least 2 numbers");
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (!a[i].is_number()) throw ConfigError(f.at(key) + "/" + std::to_string(i), "expected a number");
                (key[0] == 'r' ? r : v).push_back(a[i].get<double>());
            }
        }
        if (r.size() != v.size()) throw ConfigError(f.at("v"), "length differs from r");
        for (std::size_t i = 1; i < r.size(); ++i)
            if (!(r[i] > r[i - 1])) throw ConfigError(f.at("r") + "/" + std::to_string(i), "abscissae must increase");
        if (!(r[0] >= 0.0)) throw ConfigError(f.at("r") + "/0", "must be >= 0");
        return Profile::tabulated(r, v);
    }
    throw ConfigError(f.at("kind"), "expected zero, square_well, exponential or tabulated");
}

json profile_json(const Profile& p) {
    switch (p.kind) {
        case ProfileKind::Zero: return {{"kind", "zero"}};
        case ProfileKind::SquareWell: return {{"kind", "square_well"}, {"depth", p.depth}, {"radius", p.radius}};
        case ProfileKind::Exponential: return {{"kind", "exponential"}, {"depth", p.depth}, {"rate", p.rate}};
        case ProfileKind::Tabulated: return {{"kind", "tabulated"}, {"r", p.tab_r}, {"v", p.tab_v}};
    }
    return nullptr;
}

radial::UniformGrid parse_grid(const Fields& parent, const std::string& key, radial::UniformGrid def) {
    if (!parent.has(key)) return def;
    Fields f(parent.raw(key), parent.at(key), {"r_max", "n_points"});
    double r_max = f.number("r_max", def.r_max, [](double x) { return x > 0.0; }, "must be positive");
    long n = f.integer("n_points", long(def.n), [](long x) { return x >= 200 && x <= 50'000'000; },
                       "must lie in [200, 5e7]");
    return {r_max, std::size_t(n)};
}

void parse_tolerances(const json& j, const std::string& ptr, Tolerances& t) {
    Fields f(j, ptr, {"stability_rel", "outer_fraction", "outer_mass_max", "decay_lengths", "zero_tol", "critical_tol",
                      "lambda0", "delta", "kernel_rel"});
    auto pos = [](double x) { return x > 0.0; };
    auto frac = [](double x) { return x > 0.0 && x < 1.0; };
    t.stability_rel = f.number("stability_rel", t.stability_rel, pos, "must be positive");
    t.outer_fraction = f.number("outer_fraction", t.outer_fraction, frac, "must lie in (0, 1)");
    t.outer_mass_max = f.number("outer_mass_max", t.outer_mass_max, frac, "must lie in (0, 1)");
    t.decay_lengths = f.number("decay_lengths", t.decay_lengths, pos, "must be positive");
    t.zero_tol = f.number("zero_tol", t.zero_tol, frac, "must lie in (0, 1)");
    t.critical_tol = f.number("critical_tol", t.critical_tol, pos, "must be positive");
    t.lambda0 = f.number("lambda0", t.lambda0, pos, "must be positive");
    t.delta = f.number("delta", t.delta, pos, "must be positive");
    t.kernel_rel = f.number("kernel_rel", t.kernel_rel, pos, "must be positive");
}

json tolerances_json(const Tolerances& t) {
    return {{"stability_rel", t.stability_rel}, {"outer_fraction", t.outer_fraction},
            {"outer_mass_max", t.outer_mass_max}, {"decay_lengths", t.decay_lengths},
            {"zero_tol", t.zero_tol}, {"critical_tol", t.critical_tol}, {"lambda0", t.lambda0},
            {"delta", t.delta}, {"kernel_rel", t.kernel_rel}};
}

census::Scenario inline_scenario(const json& j, const std::string& ptr, const RunConfig& cfg) {
    Fields f(j, ptr, {"name", "law", "expected", "region", "max_ell"});
    census::Scenario sc;
    sc.name = f.string("name", "custom");
    if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos)
        throw ConfigError(f.at("name"), "must be a nonempty file-name-safe string");
    sc.law = f.string("law", "N = N1");
    if (sc.law != "N = N1" && sc.law != "N = N1 + k") throw ConfigError(f.at("law"), "expected \"N = N1\" or \"N = N1 + k\"");
    sc.max_ell = int(f.integer("max_ell", 4, [](long x) { return x >= 0 && x <= 20; }, "must lie in [0, 20]"));
    if (f.has("expected")) {
        Fields e(f.raw("expected"), f.at("expected"), {"N1", "k", "k0"});
        auto nonneg = [](long x) { return x >= 0; };
        sc.expected = census::Expected{int(e.integer("N1", 0, nonneg, "must be >= 0")),
                                       int(e.integer("k", 0, nonneg, "must be >= 0")),
                                       int(e.integer("k0", 0, nonneg, "must be >= 0"))};
    }
    if (f.has("region")) {
        Fields r(f.raw("region"), f.at("region"), {"scan", "scan_radius", "exclusion", "disks"});
        sc.region.scan = r.boolean("scan", true);
        sc.region.scan_radius = r.number("scan_radius", 10.0, [](double x) { return x > 0.0; }, "must be positive");
        sc.region.exclusion = r.number("exclusion", 1e-3, [](double x) { return x >= 1e-3; }, "must be >= 1e-3");
        if (r.has("disks")) {
            const json& d = r.raw("disks");
            if (!d.is_array()) throw ConfigError(r.at("disks"), "expected an array");
            sc.region.disks.clear();
            for (std::size_t i = 0; i < d.size(); ++i) {
                Fields di(d[i], r.at("disks") + "/" + std::to_string(i), {"re", "im", "radius"});
                sc.region.disks.push_back(census::Disk{
                    cplx(di.number("re", 0.0), di.number("im", 0.0)),
                    di.number("radius", cfg.tol.delta, [](double x) { return x > 0.0; }, "must be positive")});
            }
        } else {
            sc.region.disks = {census::Disk{0.0, cfg.tol.delta}};
        }
    } else {
        sc.region.disks = {census::Disk{0.0, cfg.tol.delta}};
    }
    return sc;
}

void apply_run_settings(census::Scenario& sc, const RunConfig& cfg) {
    sc.n = cfg.dimension;
    sc.grid = cfg.grid;
    sc.seed_grid = cfg.seed_grid;
    sc.lambdas = cfg.lambdas;
    sc.lambda0 = cfg.tol.lambda0;
    sc.shoot_radius = cfg.shoot_radius;
    sc.cross_lambda = cfg.lambdas.back();
}

}  // namespace

RunConfig parse_config(const json& config, const json& seed_tolerances) {
    RunConfig cfg;
    Fields top(config, "", {"dimension", "ell", "potential", "critical", "grid", "seed_grid", "lambda", "scenario",
                            "output_dir", "tolerances", "refine", "census"});
    cfg.dimension = int(top.integer("dimension", 3, [](long x) { return x == 3 || x == 4; }, "must be 3 or 4"));
    cfg.ell = int(top.integer("ell", 0, [](long x) { return x >= 0 && x <= 20; }, "must lie in [0, 20]"));
    cfg.refine = int(top.integer("refine", 2, [](long x) { return x >= 0 && x <= 2; }, "must be 0, 1 or 2"));
    cfg.output_dir = top.string("output_dir", "out");
    if (cfg.output_dir.empty()) throw ConfigError("/output_dir", "must not be empty");

    if (!seed_tolerances.is_null()) parse_tolerances(seed_tolerances, "", cfg.tol);
    if (top.has("tolerances")) parse_tolerances(top.raw("tolerances"), "/tolerances", cfg.tol);

    cfg.potential.v1 = Profile::square_well(1.0, 1.0);
    cfg.potential.v2_mirror = true;
    if (top.has("potential")) {
        Fields p(top.raw("potential"), "/potential", {"v1", "v2", "beta", "rho1", "rho2", "rho1p"});
        if (p.has("v1")) cfg.potential.v1 = parse_profile(p.raw("v1"), "/potential/v1");
        if (p.has("v2")) {
            const json& v2 = p.raw("v2");
            if (v2.is_string()) {
                if (v2.get<std::string>() != "mirror") throw ConfigError("/potential/v2", "expected \"mirror\" or a profile");
            } else {
                cfg.potential.v2 = parse_profile(v2, "/potential/v2");
                cfg.potential.v2_mirror = false;
            }
        }
        auto pos = [](double x) { return x > 0.0; };
        cfg.potential.beta = p.number("beta", 1.0);
        cfg.potential.rho1 = p.number("rho1", 10.0, pos, "must be positive");
        cfg.potential.rho2 = p.number("rho2", 10.0, pos, "must be positive");
        cfg.potential.rho1p = p.number("rho1p", 10.0, pos, "must be positive");
    }
    if (top.has("critical")) {
        Fields c(top.raw("critical"), "/critical", {"tune_ell", "beta_max", "steps", "shoot_radius"});
        if (c.has("tune_ell") && !c.raw("tune_ell").is_null())
            cfg.tune_ell = int(c.integer("tune_ell", 0, [](long x) { return x >= 0 && x <= 20; }, "must lie in [0, 20]"));
        cfg.scan.beta_max = c.number("beta_max", 100.0, [](double x) { return x > 0.0; }, "must be positive");
        cfg.scan.steps = int(c.integer("steps", 400, [](long x) { return x >= 1 && x <= 1'000'000; }, "must lie in [1, 1e6]"));
        cfg.shoot_radius = c.number("shoot_radius", 40.0, [](double x) { return x > 0.0; }, "must be positive");
    }
    cfg.scan.tol = cfg.tol.critical_tol;
    cfg.grid = parse_grid(top, "grid", cfg.grid);
    cfg.seed_grid = parse_grid(top, "seed_grid", cfg.seed_grid);
    if (cfg.seed_grid.n > 4000) throw ConfigError("/seed_grid/n_points", "dense seed spectra are limited to 4000 nodes");

    if (top.has("lambda")) {
        Fields l(top.raw("lambda"), "/lambda", {"min", "max", "steps", "spacing", "values"});
        if (l.has("values")) {
            for (const char* k : {"min", "max", "steps", "spacing"})
                if (l.has(k)) throw ConfigError(l.at(k), "not allowed together with values");
            const json& v = l.raw("values");
            if (!v.is_array() || v.empty()) throw ConfigError(l.at("values"), "expected a nonempty array");
            cfg.lambdas.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number() || !(v[i].get<double>() >= 0.0))
                    throw ConfigError(l.at("values") + "/" + std::to_string(i), "expected a number >= 0");
                cfg.lambdas.push_back(v[i].get<double>());
            }
        } else {
            double lo = l.number("min", 0.02, [](double x) { return x >= 0.0; }, "must be >= 0");
            double hi = l.number("max", 0.2, [lo](double x) { return x >= lo; }, "must be >= min");
            long steps = l.integer("steps", 4, [](long x) { return x >= 1 && x <= 10000; }, "must lie in [1, 10000]");
            std::string spacing = l.string("spacing", "linear");
            if (spacing != "linear" && spacing != "log") throw ConfigError(l.at("spacing"), "expected linear or log");
            if (spacing == "log" && !(lo > 0.0)) throw ConfigError(l.at("min"), "must be positive for log spacing");
            cfg.lambdas.clear();
            for (long k = 0; k < steps; ++k) {
                double t = steps == 1 ? 0.0 : double(k) / double(steps - 1);
                cfg.lambdas.push_back(spacing == "log" ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
            }
        }
    }

    if (top.has("census")) {
        Fields c(top.raw("census"), "/census",
                 {"cross_check", "grid_doubling", "accumulation_E0", "accumulation_delta", "accumulation_lambda"});
        cfg.census.cross_check = c.boolean("cross_check", true);
        cfg.census.grid_doubling = c.boolean("grid_doubling", false);
        cfg.census.accumulation_delta =
            c.number("accumulation_delta", 0.2, [](double x) { return x > 0.0; }, "must be positive");
        const double d = cfg.census.accumulation_delta;
        cfg.census.accumulation_E0 =
            c.number("accumulation_E0", 1.0, [d](double x) { return x >= 4.0 * d; }, "must be >= 4 accumulation_delta");
        cfg.census.accumulation_lambda =
            c.number("accumulation_lambda", 0.2, [](double x) { return x >= 0.0; }, "must be >= 0");
    }

    json scen = "all";
    if (top.has("scenario")) {
        scen = top.raw("scenario");
        if (scen.is_string()) {
            std::string name = scen.get<std::string>();
            if (name != "all" && !census::builtin_scenario(name))
                throw ConfigError("/scenario", "unknown builtin scenario");
        } else if (scen.is_object()) {
            census::Scenario sc = inline_scenario(scen, "/scenario", cfg);
            sc.pot = cfg.potential;
            sc.tune_ell = cfg.tune_ell;
            cfg.scenarios.push_back(sc);
        } else {
            throw ConfigError("/scenario", "expected a builtin name or an object");
        }
    }
    if (scen.is_string()) {
        cfg.scenario_spec = scen.get<std::string>();
        for (auto& sc : census::builtin_scenarios())
            if (cfg.scenario_spec == "all" || sc.name == cfg.scenario_spec) cfg.scenarios.push_back(sc);
    } else {
        cfg.scenario_spec = cfg.scenarios.front().name;
    }
    for (auto& sc : cfg.scenarios) {
        apply_run_settings(sc, cfg);
        if (sc.tune_ell && *sc.tune_ell > sc.max_ell) throw ConfigError("/critical/tune_ell", "exceeds the scanned sectors");
    }

    json pot = {{"v1", profile_json(cfg.potential.v1)},
                {"v2", cfg.potential.v2_mirror ? json("mirror") : profile_json(cfg.potential.v2)},
                {"beta", cfg.potential.beta},
                {"rho1", cfg.potential.rho1},
                {"rho2", cfg.potential.rho2},
                {"rho1p", cfg.potential.rho1p}};
    cfg.resolved = {
        {"dimension", cfg.dimension},
        {"ell", cfg.ell},
        {"potential", pot},
        {"critical",
         {{"tune_ell", cfg.tune_ell ? json(*cfg.tune_ell) : json(nullptr)},
          {"beta_max", cfg.scan.beta_max},
          {"steps", cfg.scan.steps},
          {"shoot_radius", cfg.shoot_radius}}},
        {"grid", {{"r_max", cfg.grid.r_max}, {"n_points", cfg.grid.n}}},
        {"seed_grid", {{"r_max", cfg.seed_grid.r_max}, {"n_points", cfg.seed_grid.n}}},
        {"lambda", {{"values", cfg.lambdas}}},
        {"scenario", scen},
        {"output_dir", cfg.output_dir},
        {"refine", cfg.refine},
        {"tolerances", tolerances_json(cfg.tol)},
        {"census",
         {{"cross_check", cfg.census.cross_check},
          {"grid_doubling", cfg.census.grid_doubling},
          {"accumulation_E0", cfg.census.accumulation_E0},
          {"accumulation_delta", cfg.census.accumulation_delta},
          {"accumulation_lambda", cfg.census.accumulation_lambda}}}};
    return cfg;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"spectrum", "critical", "resonance", "trajectory", "census",
                                                "verify-kernels"};
    return names;
}

namespace {

std::string hex64(std::uint64_t v) {
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << v;
    return o.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Output files assembled in memory and published only after the run completes.
class Outputs {
public:
    Outputs(const RunConfig& cfg) : cfg_(cfg) {
        hash_ = hex64(fnv1a(cfg.resolved.dump()));
        tol_ = tolerances_json(cfg.tol).dump();
    }

    const std::string& hash() const { return hash_; }

    std::ostringstream& csv(const std::string& name, const std::string& header) {
        auto& o = files_[name];
        o << std::setprecision(17);
        o << "# config_hash=" << hash_ << " tolerances=" << tol_ << "\n" << header << "\n";
        return o;
    }

    std::ostringstream& text(const std::string& name) { return files_[name]; }

    std::vector<std::string> publish(const fs::path& dir) {
        std::vector<std::string> written;
        fs::create_directories(dir);
        json rc = cfg_.resolved;
        rc["config_hash"] = hash_;
        files_["run_config.json"].str(rc.dump(2) + "\n");
        for (auto& [name, body] : files_) {
            fs::path target = dir / name, tmp = dir / (name + ".tmp");
            {
                std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
                f << body.str();
                f.flush();
                if (!f) throw std::runtime_error("cannot write " + tmp.string());
            }
            fs::rename(tmp, target);
            written.push_back(target.string());
        }
        return written;
    }

private:
    const RunConfig& cfg_;
    std::string hash_, tol_;
    std::map<std::string, std::ostringstream> files_;
};

radial::ConfirmOptions confirm_options(const RunConfig& cfg) {
    radial::ConfirmOptions o;
    o.grid = cfg.grid;
    o.refine = cfg.refine;
    o.stability_rel = cfg.tol.stability_rel;
    o.outer_fraction = cfg.tol.outer_fraction;
    o.outer_mass_max = cfg.tol.outer_mass_max;
    o.decay_lengths = cfg.tol.decay_lengths;
    return o;
}

radial::PotentialFamily family_of(const RunConfig& cfg) {
    if (cfg.tune_ell)
        return resonance::critical_family(cfg.potential, AngularSector::make(cfg.dimension, *cfg.tune_ell),
                                          cfg.shoot_radius, cfg.scan);
    return radial::fixed_potential(cfg.potential);
}

const char* kind_name(resonance::ThresholdKind k) {
    switch (k) {
        case resonance::ThresholdKind::Regular: return "regular";
        case resonance::ThresholdKind::Resonance: return "resonance";
        case resonance::ThresholdKind::Eigenvalue: return "eigenvalue";
    }
    return "?";
}

int run_spectrum(const RunConfig& cfg, Outputs& out, std::ostream& log) {
    if (cfg.grid.n > 4000) throw ConfigError("/grid/n_points", "spectrum needs a dense solve, at most 4000 nodes");
    const AngularSector s = AngularSector::make(cfg.dimension, cfg.ell);
    const auto family = family_of(cfg);
    const auto opt = confirm_options(cfg);
    auto& dense = out.csv("dense_spectrum.csv", "lambda,re_z,im_z");
    auto& rows = out.csv("spectrum.csv",
                         "lambda,ell,re_z,im_z,multiplicity,confirmed,stable,localized,drift_h,drift_r,outer_mass,r_box,note");
    census::Region region;
    for (double lambda : cfg.lambdas) {
        auto w = radial::complex_spectrum(radial::discretize(family(cfg.grid), s, lambda, cfg.grid));
        std::vector<cplx> seeds;
        for (cplx z : w) {
            dense << lambda << "," << z.real() << "," << z.imag() << "\n";
            if (std::abs(z) <= region.scan_radius) seeds.push_back(z);
        }
        auto rep = radial::confirm_point_spectrum(family, s, lambda, seeds, opt);
        int n = 0;
        for (const auto& e : rep.entries) {
            rows << lambda << "," << s.ell << "," << e.z.real() << "," << e.z.imag() << "," << e.multiplicity << ","
                 << e.confirmed << "," << e.stable << "," << e.localized << "," << e.drift_h << "," << e.drift_r << ","
                 << e.outer << "," << e.r_box << "," << e.note << "\n";
            if (e.confirmed) n += e.multiplicity;
        }
        log << "lambda = " << lambda << ": " << w.size() << " dense eigenvalues, " << n << " confirmed\n";
        for (const auto& wmsg : rep.warnings) log << "  warning: " << wmsg << "\n";
    }
    return 0;
}

int run_critical(const RunConfig& cfg, Outputs& out, std::ostream& log) {
    const AngularSector s = AngularSector::make(cfg.dimension, cfg.tune_ell.value_or(cfg.ell));
    auto e = resonance::critical_coupling_extrapolated(cfg.potential.v1, s, cfg.grid, cfg.scan);
    out.csv("critical.csv", "ell,h,beta_h,beta_h2,beta0") << s.ell << "," << e.h << "," << e.beta_h << ","
                                                          << e.beta_h2 << "," << e.beta << "\n";
    log << std::setprecision(15) << "beta0 = " << e.beta << " (h = " << e.h << ": " << e.beta_h << ", h/2: " << e.beta_h2
        << ")\n";
    return 0;
}

int run_resonance(const RunConfig& cfg, Outputs& out, std::ostream& log) {
    const AngularSector s = AngularSector::make(cfg.dimension, cfg.ell);
    const RadialPotential pot = family_of(cfg)(cfg.grid);
    auto prof = resonance::threshold_analysis(pot, s, cfg.grid, cfg.tol.zero_tol);
    auto c = [](cplx z) { return json::array({z.real(), z.imag()}); };
    json j = {{"config_hash", out.hash()},
              {"kind", kind_name(prof.kind)},
              {"ell", s.ell},
              {"nu", s.nu},
              {"beta", prof.beta},
              {"growth_ratio", prof.growth_ratio},
              {"k", prof.k},
              {"k0", prof.k0},
              {"warnings", prof.warnings}};
    if (prof.kind != resonance::ThresholdKind::Regular) {
        j["c1"] = c(prof.c1);
        j["c1p"] = c(prof.c1p);
        j["v11"] = prof.v11;
        j["norm2"] = prof.norm2;
        auto& csv = out.csv("resonance_profile.csv", "r,u,psi");
        for (std::size_t i = 0; i < prof.r.size(); ++i)
            csv << prof.r[i] << "," << prof.u[i] << "," << prof.psi[i] << "\n";
    }
    out.text("resonance.json") << j.dump(2) << "\n";
    log << "zero is " << kind_name(prof.kind) << " in sector l = " << s.ell << " (beta = " << std::setprecision(12)
        << prof.beta << ")\n";
    return 0;
}

int run_trajectory(const RunConfig& cfg, Outputs& out, std::ostream& log) {
    const AngularSector s = AngularSector::make(cfg.dimension, cfg.ell);
    const auto family = family_of(cfg);
    auto prof = resonance::threshold_analysis(family(cfg.grid), s, cfg.grid, cfg.tol.zero_tol);
    if (prof.kind == resonance::ThresholdKind::Regular)
        throw PreconditionError("trajectory: zero is a regular point in this sector, nothing emerges");
    auto rows = resonance::track_trajectory(family, prof, cfg.lambdas, confirm_options(cfg), cfg.tol.delta,
                                            cfg.tol.lambda0);
    auto& csv = out.csv("trajectory.csv", "lambda,re_z_num,im_z_num,re_z_pred,im_z_pred,rel_err,residual_p");
    bool all_confirmed = true;
    for (const auto& r : rows) {
        csv << r.lambda << "," << r.z_num.real() << "," << r.z_num.imag() << "," << r.z_pred.real() << ","
            << r.z_pred.imag() << "," << r.rel_err << "," << r.residual_p << "\n";
        all_confirmed = all_confirmed && r.entry.confirmed;
        log << "lambda = " << r.lambda << ": z = " << r.z_num << ", predicted " << r.z_pred << ", rel err " << r.rel_err
            << (r.entry.confirmed ? "" : " (unconfirmed)") << "\n";
    }
    return all_confirmed ? 0 : 1;
}

int run_census(const RunConfig& cfg, Outputs& out, std::ostream& log) {
    json summary = json::array();
    bool failed = false;
    census::CensusOptions opt;
    opt.refine = cfg.refine;
    opt.cross_check = cfg.census.cross_check;
    opt.grid_doubling = cfg.census.grid_doubling;
    for (const auto& sc : cfg.scenarios) {
        auto rep = census::verify_counting_law(sc, opt);
        bool clear = true;
        json acc = nullptr;
        if (rep.status != census::Status::Skipped) {
            auto a = census::no_accumulation_scan(sc, cfg.census.accumulation_lambda, cfg.census.accumulation_E0,
                                                  cfg.census.accumulation_delta, cfg.refine);
            clear = a.clear;
            acc = {{"clear", a.clear}, {"found", a.found}, {"diagnostics", a.diagnostics}};
        }
        census::Status status = rep.status == census::Status::Pass && !clear ? census::Status::Fail : rep.status;
        failed = failed || status == census::Status::Fail;

        auto& csv = out.csv("census_" + sc.name + ".csv", "lambda,count,expected,ell,re_z,im_z,multiplicity");
        json counts = json::object();
        for (const auto& lc : rep.counts) {
            std::ostringstream key;
            key << lc.lambda;
            counts[key.str()] = lc.count;
            if (lc.spectrum.empty()) csv << lc.lambda << "," << lc.count << "," << lc.expected << ",,,,\n";
            for (const auto& [ell, e] : lc.spectrum)
                csv << lc.lambda << "," << lc.count << "," << lc.expected << "," << ell << "," << e.z.real() << ","
                    << e.z.imag() << "," << e.multiplicity << "\n";
        }
        json checklist = json::object();
        for (const auto& h : rep.checklist) checklist[h.name] = h.ok;
        summary.push_back({{"scenario", sc.name},
                           {"status", census::status_name(status)},
                           {"law", sc.law},
                           {"N1", rep.N1},
                           {"k", rep.k},
                           {"k0", rep.k0},
                           {"counts", counts},
                           {"cross_count", rep.cross_count ? json(*rep.cross_count) : json(nullptr)},
                           {"no_accumulation", acc},
                           {"hypotheses", checklist},
                           {"diagnostics", rep.diagnostics}});
        log << sc.name << ": " << census::status_name(status) << " (N1 = " << rep.N1 << ", k = " << rep.k
            << ", k0 = " << rep.k0 << ")\n";
        for (const auto& d : rep.diagnostics) log << "  " << d << "\n";
    }
    out.text("summary.json") << json{{"config_hash", out.hash()}, {"scenarios", summary}}.dump(2) << "\n";
    return failed ? 1 : 0;
}

int run_verify_kernels(const RunConfig& cfg, Outputs& out, std::ostream& log) {
    using namespace resolvent;
    const double pi = std::numbers::pi;
    auto& csv = out.csv("kernels.csv", "check,n,ell,value,reference,metric,pass");
    bool ok = true;
    auto row = [&](const std::string& name, int n, int ell, double value, double ref, double metric, bool pass) {
        csv << name << "," << n << "," << ell << "," << value << "," << ref << "," << metric << "," << pass << "\n";
        log << (pass ? "PASS " : "FAIL ") << name << " (n = " << n << ", l = " << ell << "): " << value << " vs " << ref
            << "\n";
        ok = ok && pass;
    };
    const double eps = 1e-14;
    row("gamma_0", 3, 0, gamma_nu(0.0).real(), -0.5, std::abs(gamma_nu(0.0) + 0.5), std::abs(gamma_nu(0.0) + 0.5) < eps);
    row("gamma_1", 4, 0, gamma_nu(1.0).real(), -0.125, std::abs(gamma_nu(1.0) + 0.125),
        std::abs(gamma_nu(1.0) + 0.125) < eps);
    row("gamma_half", 3, 0, gamma_nu(0.5).imag(), 1.0, std::abs(gamma_nu(0.5) - cplx(0, 1)),
        std::abs(gamma_nu(0.5) - cplx(0, 1)) < eps);

    LogGrid grid = LogGrid::make(1e-3, 20.0, 8001);
    GridFunction f(grid.size()), g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double r = grid.r[i];
        f[i] = std::exp(-(r - 1.0) * (r - 1.0) / 0.1);
        g[i] = r * std::exp(-(r - 1.5) * (r - 1.5) / 0.2);
    }
    const double angle = 1.25 * pi;
    {
        AngularSector s = AngularSector::make(3, 0);
        cplx q = singular_quotient(s, std::polar(1e-8, angle), f, g, grid);
        cplx k = kernel_pairing(s, 0, f, g, grid);
        double rel = std::abs(q - k) / std::abs(k);
        row("singular_coefficient", 3, 0, std::abs(q), std::abs(k), rel, rel <= cfg.tol.kernel_rel);
    }
    for (auto [n, ell] : {std::pair{3, 0}, std::pair{3, 1}, std::pair{4, 0}}) {
        AngularSector s = AngularSector::make(n, ell);
        ExpansionFit fit = fit_expansion(s, f, g, grid, 1);
        double with = remainder_slope(fit, f, g, grid, 1e-4, 1e-2, angle, true);
        row("remainder_slope", n, ell, with, 1.2, with, with >= 1.2);
        if (!s.integer_nu() && s.floor_minus() == 0) {
            double without = remainder_slope(fit, f, g, grid, 1e-4, 1e-2, angle, false);
            row("remainder_slope_without_singular", n, ell, without, 0.7, without, without < 0.7);
        }
    }
    return ok ? 0 : 1;
}

}  // namespace

RunOutcome run(const RunRequest& req) {
    RunOutcome res;
    std::ostringstream log;
    try {
        json seed = nullptr;
        if (!req.seed_tolerances_text.empty()) {
            try {
                seed = json::parse(req.seed_tolerances_text);
            } catch (const json::parse_error& e) {
                throw ConfigError("", std::string("seed tolerances are not valid JSON: ") + e.what());
            }
        }
        json j;
        try {
            j = req.config_text.empty() ? json::object() : json::parse(req.config_text);
        } catch (const json::parse_error& e) {
            throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
        }
        if (req.refine != -1) {
            if (req.refine < 0 || req.refine > 2) throw ConfigError("/refine", "must be 0, 1 or 2");
            if (j.is_object()) j["refine"] = req.refine;
        }
        RunConfig cfg = parse_config(j, seed);
        if (!req.output_dir.empty()) {
            cfg.output_dir = req.output_dir;
            cfg.resolved["output_dir"] = req.output_dir;
        }
        const auto& names = subcommands();
        if (std::find(names.begin(), names.end(), req.subcommand) == names.end())
            throw ConfigError("", "unknown subcommand '" + req.subcommand + "'");

        for (const auto& [key, g] : {std::pair{"/grid", cfg.grid}, std::pair{"/seed_grid", cfg.seed_grid}}) {
            try {
                radial::check_resolution(cfg.potential, g.h());
            } catch (const PreconditionError& e) {
                throw ConfigError(key, e.what());
            }
        }

        Outputs out(cfg);
        int code = 0;
        if (req.subcommand == "spectrum") code = run_spectrum(cfg, out, log);
        else if (req.subcommand == "critical") code = run_critical(cfg, out, log);
        else if (req.subcommand == "resonance") code = run_resonance(cfg, out, log);
        else if (req.subcommand == "trajectory") code = run_trajectory(cfg, out, log);
        else if (req.subcommand == "census") code = run_census(cfg, out, log);
        else code = run_verify_kernels(cfg, out, log);
        res.files = out.publish(cfg.output_dir);
        res.exit_code = code;
    } catch (const ConfigError& e) {
        res.exit_code = 2;
        res.error = e.what();
        res.error_pointer = e.pointer;
    } catch (const std::exception& e) {
        res.exit_code = 1;
        res.error = e.what();
    }
    res.summary = log.str();
    return res;
}

}  // namespace dissip::runner
