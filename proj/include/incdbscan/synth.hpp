#pragma once

// Seeded synthetic point generators for tests and benchmarks.

#include "incdbscan/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace incdbscan::synth {

inline std::vector<Point> uniform_points(std::size_t n, std::size_t dim, double lo, double hi, std::uint64_t seed,
                                         PointId first_id = 1)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point p{first_id + i, std::vector<double>(dim)};
        for (auto& c : p.coords)
            c = u(rng);
        out.push_back(std::move(p));
    }
    return out;
}

/// `per_blob` isotropic Gaussian samples around each center.
inline std::vector<Point> gaussian_blobs(const std::vector<std::vector<double>>& centers, std::size_t per_blob,
                                         double sigma, std::uint64_t seed, PointId first_id = 1)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<Point> out;
    out.reserve(centers.size() * per_blob);
    PointId id = first_id;
    for (const auto& center : centers) {
        for (std::size_t i = 0; i < per_blob; ++i) {
            Point p{id++, center};
            for (auto& c : p.coords)
                c += g(rng);
            out.push_back(std::move(p));
        }
    }
    return out;
}

/// A random offset whose norm under `metric` is at most `radius`.
inline std::vector<double> offset_within(std::size_t dim, double radius, Metric metric, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> dir(dim);
    double norm = 0.0;
    do {
        for (auto& c : dir)
            c = g(rng);
        const std::vector<double> zero(dim, 0.0);
        norm = distance(std::span<const double>(dir), std::span<const double>(zero), metric);
    } while (norm == 0.0);
    const double r = radius * u(rng);
    for (auto& c : dir)
        c = c / norm * r;
    return dir;
}

} // namespace incdbscan::synth
