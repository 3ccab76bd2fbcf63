#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rephase {

/// Phase conductor a single-phase device is connected to. Ordered a < b < c.
enum class Phase : std::uint8_t { a = 0, b = 1, c = 2 };

inline constexpr std::array<Phase, 3> kPhases{Phase::a, Phase::b, Phase::c};

constexpr std::size_t index_of(Phase p) { return static_cast<std::size_t>(p); }

constexpr Phase phase_at(std::size_t i) { return static_cast<Phase>(i % 3); }

/// Cyclic relabelling a -> b -> c -> a.
constexpr Phase rotate(Phase p) { return phase_at(index_of(p) + 1); }

char to_char(Phase p);
std::optional<Phase> parse_phase(std::string_view text);

/// Phase assignment of every PV unit, entry m is the phase of PV m+1.
struct PVConfigVector {
    std::vector<Phase> phases;

    PVConfigVector() = default;
    explicit PVConfigVector(std::vector<Phase> p) : phases(std::move(p)) {}
    PVConfigVector(std::size_t n, Phase p) : phases(n, p) {}

    std::size_t size() const { return phases.size(); }
    Phase operator[](std::size_t i) const { return phases[i]; }
    Phase& operator[](std::size_t i) { return phases[i]; }

    /// Compact form, e.g. "abca".
    std::string to_string() const;
    static std::optional<PVConfigVector> from_string(std::string_view text);

    friend bool operator==(const PVConfigVector&, const PVConfigVector&) = default;
    friend auto operator<=>(const PVConfigVector&, const PVConfigVector&) = default;
};

}  // namespace rephase
