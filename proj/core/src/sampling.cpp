#include "conecanon/sampling.hpp"

#include <cmath>

#include "conecanon/random.hpp"

namespace conecanon {

Vec random_direction(std::mt19937_64& eng, int n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec d(n);
    do {
        for (int i = 0; i < n; ++i) d(i) = nd(eng);
    } while (d.norm() < 1e-8);
    return d / d.norm();
}

double exit_distance(const MarginFn& margin, const Vec& x, const Vec& d, double cap) {
    if (margin(x + cap * d) > 0) return cap;
    double lo = 0, hi = cap;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (margin(x + mid * d) > 0)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::vector<Vec> sample_interior(const MarginFn& margin, const Vec& base, const SampleOptions& opt) {
    const int n = static_cast<int>(base.size());
    const double cap = 8 * std::max(1.0, base.norm());
    std::vector<Vec> out;
    out.reserve(opt.count);
    for (int i = 0; i < opt.count; ++i) {
        auto eng = sample_engine(opt.seed, static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::normal_distribution<double> N(0.0, 1.0);

        const Vec d1 = random_direction(eng, n);
        const double t1 = exit_distance(margin, base, d1, cap);
        const Vec y = base + 0.9 * U(eng) * t1 * d1;

        const Vec d2 = random_direction(eng, n);
        const double t2 = exit_distance(margin, y, d2, cap);
        const double k = opt.decades * U(eng);
        const double frac = (t2 < cap) ? 1 - std::pow(10.0, -k) : U(eng);
        Vec x = y + frac * t2 * d2;
        if (!(margin(x) > 1e-12 * x.norm())) x = y;
        if (opt.conic) x *= std::exp(N(eng));
        out.push_back(x);
    }
    return out;
}

std::vector<Vec> sample_cone(const ConeSpec& spec, const SampleOptions& opt) {
    Vec base = interior_point(spec);
    base /= base.norm();
    return sample_interior([&](const Vec& x) { return contains(spec, x); }, base, opt);
}

} // namespace conecanon
