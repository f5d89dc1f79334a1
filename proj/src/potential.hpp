#pragma once

#include <vector>

namespace dissip {

enum class ProfileKind { Zero, SquareWell, Exponential, Tabulated };

// Radial profile. square_well: -depth on [0, radius); exponential: -depth e^{-rate r};
// tabulated: linear interpolation of (r, v), zero beyond the last abscissa.
struct Profile {
    ProfileKind kind = ProfileKind::Zero;
    double depth = 0.0;
    double radius = 1.0;
    double rate = 1.0;
    std::vector<double> tab_r, tab_v;

    static Profile zero() { return {}; }
    static Profile square_well(double depth, double radius);
    static Profile exponential(double depth, double rate);
    static Profile tabulated(std::vector<double> r, std::vector<double> v);

    double value(double r) const;
    // Value seen by a grid node of spacing h: the cell average for a square
    // well (half depth on the edge node), the point value otherwise.
    double node_value(double r, double h) const;
    // Radius beyond which |V| < 1e-16 max|V|.
    double support_radius() const;
    double max_abs() const;
};

// V1 = beta * v1, V2 = v2, or V2 = -V1 when v2_mirror is set.
struct RadialPotential {
    Profile v1;
    Profile v2;
    bool v2_mirror = false;
    double beta = 1.0;
    // Declared decay exponents of V1, V2 and of the inverse-square remainder.
    double rho1 = 10.0, rho2 = 10.0, rho1p = 10.0;

    double V1(double r, double h) const { return beta * v1.node_value(r, h); }
    double V2(double r, double h) const { return v2_mirror ? -V1(r, h) : v2.node_value(r, h); }
    double support_radius() const;
};

struct DecayCheck {
    bool ok = true;
    double ratio = 0.0;  // tail envelope over mid-range envelope
};

// |V(r)| (1+r)^rho on the outer quarter of [0, r_max] must not exceed its
// maximum on [r_max/2, 3 r_max/4].
DecayCheck check_decay(const Profile& p, double scale, double rho, double r_max);

}  // namespace dissip
