#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "rephase/phase.hpp"

namespace rephase {

/// Seeded random stream. Draws are implemented on top of the raw 64-bit
/// engine output so sequences are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01();

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t below(std::size_t n);

    Phase phase() { return phase_at(below(3)); }

  private:
    std::mt19937_64 engine_;
};

/// Mixes a base seed with a path of indices into an independent stream seed.
/// Used to split per-task streams so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

}  // namespace rephase
