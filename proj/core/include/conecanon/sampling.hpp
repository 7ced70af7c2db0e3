#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "conecanon/cone.hpp"

namespace conecanon {

struct SampleOptions {
    int count = 1000;
    std::uint64_t seed = 1;
    double decades = 6;  // boundary margins reach down to 10^-decades of the base margin
    bool conic = true;   // rescale each point by a log-normal factor
};

using MarginFn = std::function<double(const Vec&)>;

Vec random_direction(std::mt19937_64& eng, int n);

// Walk from an interior base point: a random chord step, then a second chord
// stopped at relative distance 10^-k from the boundary, k uniform in [0, decades].
std::vector<Vec> sample_interior(const MarginFn& margin, const Vec& base, const SampleOptions& opt);
std::vector<Vec> sample_cone(const ConeSpec& spec, const SampleOptions& opt);

// Distance from x along d to the boundary, capped at cap.
double exit_distance(const MarginFn& margin, const Vec& x, const Vec& d, double cap);

} // namespace conecanon
