#include "dissip/dissip.h"

#include <string>

#include "errors.hpp"
#include "model_resolvent.hpp"
#include "resonance_lab.hpp"
#include "runner.hpp"
#include "specfun.hpp"

struct dissip_context {
    std::string error;
    std::string pointer;
    std::string tolerances;
    std::string log;
};

struct dissip_spectrum {
    std::vector<dissip::radial::SpectrumEntry> entries;
};

namespace {

using dissip::cplx;

template <class F>
dissip_status guarded(dissip_context* ctx, F&& f) {
    if (!ctx) return DISSIP_INVALID_ARGUMENT;
    ctx->error.clear();
    ctx->pointer.clear();
    try {
        f();
        return DISSIP_OK;
    } catch (const dissip::ConfigError& e) {
        // what() is "<pointer>: <message>"; the pointer is reported separately
        ctx->error = std::string(e.what()).substr(e.pointer.size() + 2);
        ctx->pointer = e.pointer;
        return DISSIP_CONFIG_ERROR;
    } catch (const dissip::DomainError& e) {
        ctx->error = e.what();
        return DISSIP_DOMAIN_ERROR;
    } catch (const dissip::PreconditionError& e) {
        ctx->error = e.what();
        return DISSIP_PRECONDITION;
    } catch (const std::invalid_argument& e) {
        ctx->error = e.what();
        return DISSIP_INVALID_ARGUMENT;
    } catch (const dissip::AssumptionError& e) {
        ctx->error = e.what();
        return DISSIP_ASSUMPTION;
    } catch (const dissip::NumericalError& e) {
        ctx->error = e.what();
        return DISSIP_NUMERICAL;
    } catch (const std::exception& e) {
        ctx->error = e.what();
        return DISSIP_INTERNAL;
    } catch (...) {
        ctx->error = "unknown error";
        return DISSIP_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

extern "C" {

dissip_context* dissip_context_create(void) {
    try {
        return new dissip_context();
    } catch (...) {
        return nullptr;
    }
}

void dissip_context_destroy(dissip_context* ctx) { delete ctx; }

const char* dissip_last_error(const dissip_context* ctx) { return ctx ? ctx->error.c_str() : "null context"; }

const char* dissip_last_error_pointer(const dissip_context* ctx) { return ctx ? ctx->pointer.c_str() : ""; }

const char* dissip_run_log(const dissip_context* ctx) { return ctx ? ctx->log.c_str() : ""; }

dissip_status dissip_set_tolerances(dissip_context* ctx, const char* json) {
    return guarded(ctx, [&] {
        std::string text = json ? json : "";
        if (!text.empty()) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(text);
            } catch (const nlohmann::json::parse_error& e) {
                throw dissip::ConfigError("", e.what());
            }
            dissip::runner::parse_config(nlohmann::json::object(), j);
        }
        ctx->tolerances = text;
    });
}

dissip_status dissip_run(dissip_context* ctx, const char* subcommand, const char* config_json, const char* out_dir,
                         int refine) {
    if (!ctx) return DISSIP_INVALID_ARGUMENT;
    if (!subcommand) {
        ctx->error = "null subcommand";
        return DISSIP_INVALID_ARGUMENT;
    }
    dissip::runner::RunRequest req;
    req.subcommand = subcommand;
    req.config_text = config_json ? config_json : "";
    req.seed_tolerances_text = ctx->tolerances;
    req.output_dir = out_dir ? out_dir : "";
    req.refine = refine;
    dissip::runner::RunOutcome res;
    try {
        res = dissip::runner::run(req);
    } catch (const std::exception& e) {
        ctx->error = e.what();
        return DISSIP_INTERNAL;
    }
    ctx->log = res.summary;
    ctx->error = res.error;
    ctx->pointer = res.error_pointer;
    if (!ctx->pointer.empty() && ctx->error.rfind(ctx->pointer + ": ", 0) == 0)
        ctx->error.erase(0, ctx->pointer.size() + 2);
    switch (res.exit_code) {
        case 0: return DISSIP_OK;
        case 2: return DISSIP_CONFIG_ERROR;
        default: return DISSIP_FAIL;
    }
}

dissip_status dissip_gamma(dissip_context* ctx, double x, double* out) {
    return guarded(ctx, [&] {
        require(out, "null output");
        *out = dissip::specfun::gamma(x);
    });
}

dissip_status dissip_bessel(dissip_context* ctx, dissip_bessel_kind kind, double nu, double x, double* out) {
    return guarded(ctx, [&] {
        require(out, "null output");
        require(kind >= DISSIP_BESSEL_J && kind <= DISSIP_BESSEL_K, "bad Bessel kind");
        *out = dissip::specfun::bessel(static_cast<dissip::specfun::BesselKind>(kind), nu, x);
    });
}

dissip_status dissip_p_poly(dissip_context* ctx, double nu, int k, double rho, double* out) {
    return guarded(ctx, [&] {
        require(out, "null output");
        *out = dissip::specfun::p_poly(nu, k, rho);
    });
}

dissip_status dissip_gamma_nu(dissip_context* ctx, double nu, double* re, double* im) {
    return guarded(ctx, [&] {
        require(re && im, "null output");
        cplx g = dissip::resolvent::gamma_nu(nu);
        *re = g.real();
        *im = g.imag();
    });
}

dissip_status dissip_solve_p2(dissip_context* ctx, double r, double phi, double* tau, double* sigma, double* z_re,
                              double* z_im) {
    return guarded(ctx, [&] {
        require(tau && sigma && z_re && z_im, "null output");
        auto s = dissip::resonance::solve_p2(r, phi);
        *tau = s.tau;
        *sigma = s.sigma;
        *z_re = s.z0.real();
        *z_im = s.z0.imag();
    });
}

dissip_status dissip_predict_eigenvalue(dissip_context* ctx, double nu1, double c1_re, double c1_im, double c1p_re,
                                        double c1p_im, double v11, double lambda, double lambda0, double* z_re,
                                        double* z_im) {
    return guarded(ctx, [&] {
        require(z_re && z_im, "null output");
        dissip::resonance::ResonanceProfile p;
        p.kind = dissip::resonance::ThresholdKind::Resonance;
        p.sector = dissip::AngularSector{3, 0, nu1};
        p.c1 = cplx(c1_re, c1_im);
        p.c1p = cplx(c1p_re, c1p_im);
        p.v11 = v11;
        p.k = 1;
        cplx z = dissip::resonance::predict_eigenvalue(p, lambda, lambda0).z0;
        *z_re = z.real();
        *z_im = z.imag();
    });
}

dissip_status dissip_critical_coupling(dissip_context* ctx, int n, int ell, const char* profile_json, double r_max,
                                       size_t n_points, int extrapolate, double* beta0) {
    return guarded(ctx, [&] {
        require(beta0 && profile_json, "null argument");
        nlohmann::json cfg = {{"dimension", n},
                              {"ell", ell},
                              {"grid", {{"r_max", r_max}, {"n_points", n_points}}}};
        try {
            cfg["potential"] = {{"v1", nlohmann::json::parse(profile_json)}};
        } catch (const nlohmann::json::parse_error& e) {
            throw dissip::ConfigError("/potential/v1", e.what());
        }
        auto rc = dissip::runner::parse_config(cfg);
        auto s = dissip::AngularSector::make(rc.dimension, rc.ell);
        *beta0 = extrapolate ? dissip::resonance::critical_coupling_extrapolated(rc.potential.v1, s, rc.grid, rc.scan).beta
                             : dissip::resonance::critical_coupling(rc.potential.v1, s, rc.grid, rc.scan);
    });
}

dissip_status dissip_spectrum_compute(dissip_context* ctx, const char* config_json, double lambda,
                                      dissip_spectrum** out) {
    return guarded(ctx, [&] {
        require(out, "null output");
        *out = nullptr;
        nlohmann::json j;
        try {
            j = config_json ? nlohmann::json::parse(config_json) : nlohmann::json::object();
        } catch (const nlohmann::json::parse_error& e) {
            throw dissip::ConfigError("", e.what());
        }
        auto rc = dissip::runner::parse_config(j);
        if (rc.grid.n > 4000) throw dissip::ConfigError("/grid/n_points", "dense solve limited to 4000 nodes");
        auto s = dissip::AngularSector::make(rc.dimension, rc.ell);
        dissip::radial::PotentialFamily family =
            rc.tune_ell ? dissip::resonance::critical_family(rc.potential, dissip::AngularSector::make(rc.dimension, *rc.tune_ell),
                                                             rc.shoot_radius, rc.scan)
                        : dissip::radial::fixed_potential(rc.potential);
        auto w = dissip::radial::complex_spectrum(dissip::radial::discretize(family(rc.grid), s, lambda, rc.grid));
        std::vector<cplx> seeds;
        for (cplx z : w)
            if (std::abs(z) <= 10.0) seeds.push_back(z);
        dissip::radial::ConfirmOptions opt;
        opt.grid = rc.grid;
        opt.refine = rc.refine;
        opt.stability_rel = rc.tol.stability_rel;
        opt.outer_fraction = rc.tol.outer_fraction;
        opt.outer_mass_max = rc.tol.outer_mass_max;
        opt.decay_lengths = rc.tol.decay_lengths;
        auto rep = dissip::radial::confirm_point_spectrum(family, s, lambda, seeds, opt);
        auto* sp = new dissip_spectrum();
        sp->entries = std::move(rep.entries);
        *out = sp;
    });
}

size_t dissip_spectrum_size(const dissip_spectrum* sp) { return sp ? sp->entries.size() : 0; }

dissip_status dissip_spectrum_get(const dissip_spectrum* sp, size_t i, double* re, double* im, int* multiplicity,
                                  int* confirmed) {
    if (!sp || i >= sp->entries.size()) return DISSIP_INVALID_ARGUMENT;
    const auto& e = sp->entries[i];
    if (re) *re = e.z.real();
    if (im) *im = e.z.imag();
    if (multiplicity) *multiplicity = e.multiplicity;
    if (confirmed) *confirmed = e.confirmed ? 1 : 0;
    return DISSIP_OK;
}

void dissip_spectrum_destroy(dissip_spectrum* sp) { delete sp; }

}  // extern "C"
