#pragma once

#include <cstdint>
#include <random>

#include "sdnf/types.hpp"

namespace sdnf {

/// Seed streams derived from one master seed by splitmix64 mixing of
/// (master, run, tag).  Distinct (run, tag) pairs give statistically
/// independent generators, so Monte Carlo runs can execute in any order
/// or in parallel and still reproduce bit-for-bit.
namespace seed {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t master, std::uint64_t run, std::uint64_t tag) {
    return splitmix64(splitmix64(splitmix64(master) ^ run) ^ (tag * 0xd6e8feb86659fd93ULL));
}

// stream tags
inline constexpr std::uint64_t kTruth = 1;
inline constexpr std::uint64_t kMeasurementNoise = 2;

} // namespace seed

class RngStream {
public:
    explicit RngStream(std::uint64_t s) : gen_(s) {}
    RngStream(std::uint64_t master, std::uint64_t run, std::uint64_t tag)
        : gen_(seed::derive(master, run, tag)) {}

    double normal() { return normal_(gen_); }

    Vector normal_vector(Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = normal_(gen_);
        return v;
    }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace sdnf
