#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <dissip/dissip.h>

extern "C" int capi_c_gamma_half(double* out);

namespace fs = std::filesystem;

namespace {

struct Ctx {
    dissip_context* p = dissip_context_create();
    ~Ctx() { dissip_context_destroy(p); }
};

fs::path out_root() {
    const char* env = std::getenv("DISSIP_TEST_TMP");
    fs::path p = env ? fs::path(env) : fs::temp_directory_path() / "dissip_capi";
    return p;
}

}  // namespace

TEST_CASE("usable from C") {
    double g = 0.0;
    CHECK(capi_c_gamma_half(&g) == DISSIP_OK);
    CHECK(g == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
}

TEST_CASE("special functions and status codes") {
    Ctx c;
    double v = 0.0;
    CHECK(dissip_gamma(c.p, 1.5, &v) == DISSIP_OK);
    CHECK(v == doctest::Approx(0.88622692545276).epsilon(1e-13));
    CHECK(std::string(dissip_last_error(c.p)).empty());
    CHECK(dissip_gamma(c.p, -1.0, &v) == DISSIP_DOMAIN_ERROR);
    CHECK_FALSE(std::string(dissip_last_error(c.p)).empty());
    CHECK(dissip_gamma(c.p, 2.0, nullptr) == DISSIP_INVALID_ARGUMENT);
    CHECK(dissip_gamma(nullptr, 2.0, &v) == DISSIP_INVALID_ARGUMENT);

    CHECK(dissip_bessel(c.p, DISSIP_BESSEL_J, 0.5, M_PI / 2, &v) == DISSIP_OK);
    CHECK(v == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
    CHECK(dissip_bessel(c.p, DISSIP_BESSEL_I, 0.5, 1.0, &v) == DISSIP_OK);
    CHECK(v == doctest::Approx(std::sqrt(2.0 / M_PI) * std::sinh(1.0)).epsilon(1e-12));
    CHECK(dissip_bessel(c.p, DISSIP_BESSEL_K, 0.5, 1.0, &v) == DISSIP_OK);
    CHECK(v == doctest::Approx(std::sqrt(M_PI / 2) * std::exp(-1.0)).epsilon(1e-12));
    CHECK(dissip_bessel(c.p, DISSIP_BESSEL_J, 1.0, 1.0, &v) == DISSIP_OK);
    CHECK(v == doctest::Approx(0.4400505857).epsilon(1e-10));
    CHECK(dissip_bessel(c.p, static_cast<dissip_bessel_kind>(9), 1.0, 1.0, &v) == DISSIP_INVALID_ARGUMENT);
    CHECK(dissip_bessel(c.p, DISSIP_BESSEL_K, 1.0, 0.0, &v) == DISSIP_DOMAIN_ERROR);

    CHECK(dissip_p_poly(c.p, 0.0, 2, 0.0, &v) == DISSIP_OK);
    CHECK(v == doctest::Approx(M_PI / 8).epsilon(1e-14));

    double re = 0, im = 0;
    CHECK(dissip_gamma_nu(c.p, 0.5, &re, &im) == DISSIP_OK);
    CHECK(std::abs(re) < 1e-15);
    CHECK(im == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("emergent root helpers") {
    Ctx c;
    double tau, sigma, zr, zi;
    CHECK(dissip_solve_p2(c.p, 1e-2, 1.5, &tau, &sigma, &zr, &zi) == DISSIP_OK);
    CHECK(tau > 2.0);
    CHECK(zi < 0.0);
    CHECK(dissip_solve_p2(c.p, 2.0, 1.5, &tau, &sigma, &zr, &zi) == DISSIP_PRECONDITION);

    CHECK(dissip_predict_eigenvalue(c.p, 0.5, -0.9, 0, 0.9, 0, 1.0, 0.1, 0.25, &zr, &zi) == DISSIP_OK);
    CHECK(zi < 0.0);
    CHECK(zr > 0.0);
    CHECK(dissip_predict_eigenvalue(c.p, 0.5, -0.9, 0, -0.9, 0, 1.0, 0.1, 0.25, &zr, &zi) == DISSIP_ASSUMPTION);
    CHECK(dissip_predict_eigenvalue(c.p, 0.5, -0.9, 0, 0.9, 0, 1.0, 0.3, 0.25, &zr, &zi) == DISSIP_PRECONDITION);
}

TEST_CASE("critical coupling through the C interface") {
    Ctx c;
    double b = 0.0;
    CHECK(dissip_critical_coupling(c.p, 3, 0, R"({"kind": "square_well", "depth": 1, "radius": 1})", 40.0, 3999, 1, &b) ==
          DISSIP_OK);
    CHECK(std::abs(b - M_PI * M_PI / 4) <= 1e-8);
    CHECK(dissip_critical_coupling(c.p, 3, 0, R"({"kind": "spiral"})", 40.0, 3999, 1, &b) == DISSIP_CONFIG_ERROR);
    CHECK(std::string(dissip_last_error_pointer(c.p)) == "/potential/v1/kind");
}

TEST_CASE("confirmed spectrum handle") {
    Ctx c;
    dissip_spectrum* sp = nullptr;
    const char* cfg = R"({"potential": {"v1": {"depth": 4}}, "grid": {"r_max": 20, "n_points": 1999}})";
    REQUIRE(dissip_spectrum_compute(c.p, cfg, 0.1, &sp) == DISSIP_OK);
    int confirmed = 0;
    for (size_t i = 0; i < dissip_spectrum_size(sp); ++i) {
        double re, im;
        int mult, conf;
        REQUIRE(dissip_spectrum_get(sp, i, &re, &im, &mult, &conf) == DISSIP_OK);
        if (conf) {
            confirmed += mult;
            CHECK(re < 0.0);
            CHECK(im < 0.0);
        }
    }
    CHECK(confirmed == 1);
    double re, im;
    int mult, conf;
    CHECK(dissip_spectrum_get(sp, dissip_spectrum_size(sp), &re, &im, &mult, &conf) == DISSIP_INVALID_ARGUMENT);
    dissip_spectrum_destroy(sp);
    dissip_spectrum_destroy(nullptr);
}

TEST_CASE("runs and tolerance defaults") {
    Ctx c;
    fs::path dir = out_root() / "critical";
    fs::remove_all(dir);
    CHECK(dissip_set_tolerances(c.p, R"({"stability_rel": 2e-4})") == DISSIP_OK);
    CHECK(dissip_set_tolerances(c.p, R"({"stability": 2e-4})") == DISSIP_CONFIG_ERROR);
    CHECK(dissip_run(c.p, "critical", "{}", dir.string().c_str(), -1) == DISSIP_OK);
    CHECK(std::string(dissip_run_log(c.p)).find("beta0 = ") != std::string::npos);
    CHECK(fs::exists(dir / "critical.csv"));

    fs::path bad = out_root() / "bad";
    fs::remove_all(bad);
    CHECK(dissip_run(c.p, "critical", R"({"lambda": {"min": -1}})", bad.string().c_str(), -1) == DISSIP_CONFIG_ERROR);
    CHECK(std::string(dissip_last_error_pointer(c.p)) == "/lambda/min");
    CHECK_FALSE(fs::exists(bad));
    CHECK(dissip_run(c.p, nullptr, "{}", nullptr, -1) == DISSIP_INVALID_ARGUMENT);
}
