#include "rephase/phase.hpp"

namespace rephase {

char to_char(Phase p) {
    switch (p) {
        case Phase::a: return 'a';
        case Phase::b: return 'b';
        case Phase::c: return 'c';
    }
    return '?';
}

std::optional<Phase> parse_phase(std::string_view text) {
    if (text.size() != 1) return std::nullopt;
    switch (text[0]) {
        case 'a': case 'A': return Phase::a;
        case 'b': case 'B': return Phase::b;
        case 'c': case 'C': return Phase::c;
        default: return std::nullopt;
    }
}

std::string PVConfigVector::to_string() const {
    std::string out;
    out.reserve(phases.size());
    for (Phase p : phases) out.push_back(to_char(p));
    return out;
}

std::optional<PVConfigVector> PVConfigVector::from_string(std::string_view text) {
    PVConfigVector v;
    v.phases.reserve(text.size());
    for (char ch : text) {
        auto p = parse_phase(std::string_view(&ch, 1));
        if (!p) return std::nullopt;
        v.phases.push_back(*p);
    }
    return v;
}

}  // namespace rephase
