#include "potential.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace dissip {

Profile Profile::square_well(double depth, double radius) {
    if (!(radius > 0.0)) throw PreconditionError("square_well: radius must be positive");
    Profile p;
    p.kind = ProfileKind::SquareWell;
    p.depth = depth;
    p.radius = radius;
    return p;
}

Profile Profile::exponential(double depth, double rate) {
    if (!(rate > 0.0)) throw PreconditionError("exponential: rate must be positive");
    Profile p;
    p.kind = ProfileKind::Exponential;
    p.depth = depth;
    p.rate = rate;
    return p;
}

Profile Profile::tabulated(std::vector<double> r, std::vector<double> v) {
    if (r.size() != v.size() || r.size() < 2) throw PreconditionError("tabulated: need >= 2 matching points");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw PreconditionError("tabulated: abscissae must increase");
    if (!(r.front() >= 0.0)) throw PreconditionError("tabulated: abscissae must be >= 0");
    Profile p;
    p.kind = ProfileKind::Tabulated;
    p.tab_r = std::move(r);
    p.tab_v = std::move(v);
    return p;
}

double Profile::value(double r) const {
    switch (kind) {
        case ProfileKind::Zero:
            return 0.0;
        case ProfileKind::SquareWell:
            return r < radius ? -depth : 0.0;
        case ProfileKind::Exponential:
            return -depth * std::exp(-rate * r);
        case ProfileKind::Tabulated: {
            if (r <= tab_r.front()) return tab_v.front();
            if (r > tab_r.back()) return 0.0;
            auto it = std::upper_bound(tab_r.begin(), tab_r.end(), r);
            std::size_t i = std::size_t(it - tab_r.begin());
            if (i >= tab_r.size()) return tab_v.back();
            double t = (r - tab_r[i - 1]) / (tab_r[i] - tab_r[i - 1]);
            return (1 - t) * tab_v[i - 1] + t * tab_v[i];
        }
    }
    return 0.0;
}

double Profile::node_value(double r, double h) const {
    if (kind != ProfileKind::SquareWell) return value(r);
    double lo = r - 0.5 * h;
    double inside = std::clamp(radius - lo, 0.0, h);
    return -depth * inside / h;
}

double Profile::support_radius() const {
    switch (kind) {
        case ProfileKind::Zero:
            return 0.0;
        case ProfileKind::SquareWell:
            return radius;
        case ProfileKind::Exponential:
            return std::log(1e16) / rate;
        case ProfileKind::Tabulated:
            for (std::size_t i = tab_v.size(); i-- > 0;)
                if (tab_v[i] != 0.0) return i + 1 < tab_r.size() ? tab_r[i + 1] : tab_r[i];
            return 0.0;
    }
    return 0.0;
}

double Profile::max_abs() const {
    switch (kind) {
        case ProfileKind::Zero:
            return 0.0;
        case ProfileKind::SquareWell:
        case ProfileKind::Exponential:
            return std::abs(depth);
        case ProfileKind::Tabulated: {
            double m = 0.0;
            for (double v : tab_v) m = std::max(m, std::abs(v));
            return m;
        }
    }
    return 0.0;
}

double RadialPotential::support_radius() const {
    double s = v1.support_radius();
    if (!v2_mirror) s = std::max(s, v2.support_radius());
    return s;
}

DecayCheck check_decay(const Profile& p, double scale, double rho, double r_max) {
    auto envelope = [&](double a, double b) {
        double m = 0.0;
        for (int k = 0; k <= 200; ++k) {
            double r = a + (b - a) * k / 200.0;
            m = std::max(m, std::abs(scale * p.value(r)) * std::pow(1.0 + r, rho));
        }
        return m;
    };
    double mid = envelope(0.5 * r_max, 0.75 * r_max);
    double tail = envelope(0.75 * r_max, r_max);
    DecayCheck d;
    d.ratio = mid > 0.0 ? tail / mid : (tail > 0.0 ? INFINITY : 0.0);
    d.ok = tail <= mid * (1.0 + 1e-9) + 1e-300;
    return d;
}

}  // namespace dissip
