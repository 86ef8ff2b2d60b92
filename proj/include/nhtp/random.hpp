#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace nhtp {

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Doubles and bounded integers are derived here rather than through
/// std::uniform_*_distribution, whose algorithms vary between standard
/// libraries:
///   uniform()  = (next() >> 11) * 2^-53, in [0, 1)
///   below(k)   = rejection sampling on the top bits, in [0, k)
///   permutation(n) = Fisher-Yates from the back, swapping i with below(i + 1)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();
    std::uint64_t below(std::uint64_t bound);
    std::vector<int> permutation(int n);

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of an independent stream (e.g. one benchmark trial) under a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace nhtp
