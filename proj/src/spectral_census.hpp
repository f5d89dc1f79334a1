#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "radial_operator.hpp"
#include "resonance_lab.hpp"

namespace dissip::census {

// Open lower half-disk D-(center, radius).
struct Disk {
    cplx center;
    double radius = 0.5;
    bool contains(cplx z) const { return z.imag() < 0.0 && std::abs(z - center) < radius; }
};

// Optional annulus |z| <= scan_radius away from an exclusion neighbourhood of
// [0, inf), united with the listed lower half-disks.
struct Region {
    bool scan = true;
    double scan_radius = 10.0;
    double exclusion = 1e-3;
    std::vector<Disk> disks{Disk{0.0, 0.5}};

    bool contains(cplx z) const;
    double outer_radius() const;
    std::string describe() const;
};

struct SectorResult {
    int ell = 0;
    radial::SpectrumReport report;
    std::vector<radial::SpectrumEntry> inside;  // confirmed entries inside the region
    int count = 0;
};

struct CountResult {
    int count = 0;
    std::vector<SectorResult> sectors;
    std::vector<std::string> ambiguities;  // ambiguous candidates inside the region
};

// Dense seed spectra keyed by (l, lambda, seed grid), reused across recounts.
// The key does not identify the potential: share a cache only within one family.
using SeedCache = std::map<std::tuple<int, double, double, std::size_t>, std::vector<cplx>>;

struct CountOptions {
    radial::ConfirmOptions confirm;
    radial::UniformGrid seed_grid{40.0, 399};
    int max_ell = 4;
    std::shared_ptr<SeedCache> cache;
};

// Confirmed eigenvalues of H(lambda) in the region, summed over sectors l <= max_ell
// with their multiplicities. extra_seeds[l] are appended to the dense seeds of sector l.
CountResult count_eigenvalues(const radial::PotentialFamily& family, int n, double lambda, const Region& region,
                              const CountOptions& opt, const std::vector<std::vector<cplx>>& extra_seeds = {});

struct Hypothesis {
    std::string name;
    bool ok = true;
    std::string detail;
};

struct Expected {
    int N1 = 0, k = 0, k0 = 0;
};

struct Scenario {
    std::string name;
    std::string law;  // "N = N1" or "N = N1 + k"
    int n = 3;
    RadialPotential pot;
    std::optional<int> tune_ell;  // coupling re-tuned to criticality in this sector on every grid
    double shoot_radius = 40.0;
    std::vector<double> lambdas{0.02, 0.05, 0.1, 0.2};
    std::optional<Expected> expected;
    Region region;
    double lambda0 = 0.25;
    int max_ell = 4;
    radial::UniformGrid grid{40.0, 3999};
    radial::UniformGrid seed_grid{40.0, 399};
    radial::UniformGrid cross_grid{100.0, 499};
    double cross_lambda = 0.2;

    radial::PotentialFamily family() const;
};

std::vector<Scenario> builtin_scenarios();
std::optional<Scenario> builtin_scenario(const std::string& name);

struct ThresholdSummary {
    std::vector<resonance::ResonanceProfile> profiles;  // one per sector l <= max_ell
    int k = 0, k0 = 0;
};
ThresholdSummary threshold_summary(const Scenario& sc);

std::vector<Hypothesis> hypothesis_checklist(const Scenario& sc, const ThresholdSummary& ts);

enum class Status { Pass, Fail, Skipped };
const char* status_name(Status s);

struct LambdaCount {
    double lambda = 0.0;
    int count = 0;
    int expected = 0;
    std::vector<std::pair<int, radial::SpectrumEntry>> spectrum;  // (l, entry) confirmed in the region
};

struct CensusReport {
    std::string scenario;
    Status status = Status::Skipped;
    std::vector<Hypothesis> checklist;
    int N1 = 0, k = 0, k0 = 0;
    std::vector<LambdaCount> counts;
    std::optional<int> cross_count;  // dense-only seeds on the cross-check grid at cross_lambda
    std::vector<std::string> diagnostics;
};

struct CensusOptions {
    int refine = 2;
    bool cross_check = true;
    // Repeat every count with the configuration grid at h/2 and at 2 R_max.
    bool grid_doubling = false;
};

CensusReport verify_counting_law(const Scenario& sc, const CensusOptions& opt = {});

struct AccumulationScan {
    bool clear = true;
    int found = 0;
    std::vector<std::string> diagnostics;
};

// No confirmed eigenvalue in D-(E0, delta) in any sector, at the configuration
// grid and at its h/2 refinement.
AccumulationScan no_accumulation_scan(const Scenario& sc, double lambda, double E0, double delta, int refine = 2);

}  // namespace dissip::census
