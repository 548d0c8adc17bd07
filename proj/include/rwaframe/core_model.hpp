#pragma once

// Level-system data model: levels with parity and bare frequency, the
// laser-driven transitions between them, and the dipole selection rule.
//
// Conventions
//   * Level indices are 1-based everywhere in the public surface.
//   * A transition is stored on the ordered pair (a, b) with a < b and
//     contributes H[a][b] = (rabi / 2) * exp(-i * laser * t); H[b][a] is the
//     conjugate. Energy ordering of indices is not assumed, so an inverted
//     drive is expressed through the sign of `laser`.
//   * hbar = 1; all frequencies are angular.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rwaframe {

using LevelIndex = std::size_t;

enum class Parity { even, odd };

constexpr Parity operator!(Parity p) { return p == Parity::even ? Parity::odd : Parity::even; }

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }
inline char short_name(Parity p) { return p == Parity::even ? 'e' : 'o'; }

inline std::optional<Parity> parse_parity(const std::string& s) {
    if (s == "even" || s == "e") return Parity::even;
    if (s == "odd" || s == "o") return Parity::odd;
    return std::nullopt;
}

struct Level {
    LevelIndex index = 0;
    double omega = 0.0;
    Parity parity = Parity::even;

    bool operator==(const Level&) const = default;
};

struct Transition {
    LevelIndex a = 0;
    LevelIndex b = 0;
    std::complex<double> rabi{1.0, 0.0};
    double laser = 0.0;

    bool operator==(const Transition&) const = default;
};

/// Label used in reports, e.g. "1-3".
inline std::string edge_label(const Transition& t) {
    return std::to_string(t.a) + "-" + std::to_string(t.b);
}

/// Swaps a transition onto a < b. Reversing the pair conjugates the
/// amplitude and negates the laser frequency so the Hamiltonian is unchanged.
inline Transition canonical(Transition t) {
    if (t.a > t.b) {
        std::swap(t.a, t.b);
        t.rabi = std::conj(t.rabi);
        t.laser = -t.laser;
    }
    return t;
}

struct LevelSystem {
    std::vector<Level> levels;
    std::vector<Transition> transitions;

    std::size_t size() const { return levels.size(); }

    /// Position (0-based) of a level index; valid systems use indices 1..N.
    static std::size_t position(LevelIndex index) { return index - 1; }

    const Level& level(LevelIndex index) const { return levels.at(position(index)); }

    bool operator==(const LevelSystem&) const = default;
};

enum class ViolationKind {
    duplicate_level,
    index_out_of_sequence,
    dangling_index,
    self_coupling,
    duplicate_pair,
    same_parity_coupling,
    non_finite_value,
};

inline const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::duplicate_level: return "duplicate level";
        case ViolationKind::index_out_of_sequence: return "index out of sequence";
        case ViolationKind::dangling_index: return "dangling index";
        case ViolationKind::self_coupling: return "self coupling";
        case ViolationKind::duplicate_pair: return "duplicate pair";
        case ViolationKind::same_parity_coupling: return "same-parity coupling";
        case ViolationKind::non_finite_value: return "non-finite value";
    }
    return "unknown";
}

struct Violation {
    ViolationKind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool degenerate = false;  // no levels at all

    bool ok() const { return violations.empty(); }

    bool has(ViolationKind k) const {
        return std::any_of(violations.begin(), violations.end(),
                           [k](const Violation& v) { return v.kind == k; });
    }

    std::string summary() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < violations.size(); ++i) {
            if (i) os << "; ";
            os << to_string(violations[i].kind) << ": " << violations[i].message;
        }
        return os.str();
    }
};

/// Thrown by operations that require a well-formed system.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(ValidationReport report)
        : std::runtime_error("invalid level system: " + report.summary()), report_(std::move(report)) {}

    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

inline ValidationReport validate(const LevelSystem& system) {
    ValidationReport report;
    report.degenerate = system.levels.empty();
    auto add = [&](ViolationKind k, std::string msg) { report.violations.push_back({k, std::move(msg)}); };

    std::map<LevelIndex, Parity> parity_of;
    for (std::size_t i = 0; i < system.levels.size(); ++i) {
        const Level& l = system.levels[i];
        if (!std::isfinite(l.omega)) add(ViolationKind::non_finite_value, "level " + std::to_string(l.index) + " omega");
        if (!parity_of.emplace(l.index, l.parity).second)
            add(ViolationKind::duplicate_level, "level " + std::to_string(l.index) + " listed twice");
        else if (l.index != i + 1)
            add(ViolationKind::index_out_of_sequence,
                "level at position " + std::to_string(i + 1) + " has index " + std::to_string(l.index));
    }

    std::map<std::pair<LevelIndex, LevelIndex>, int> seen;
    for (const Transition& t : system.transitions) {
        const std::string label = "transition " + edge_label(t);
        if (!std::isfinite(t.laser) || !std::isfinite(t.rabi.real()) || !std::isfinite(t.rabi.imag()))
            add(ViolationKind::non_finite_value, label);
        if (t.a == t.b) {
            add(ViolationKind::self_coupling, label);
            continue;
        }
        auto pa = parity_of.find(t.a);
        auto pb = parity_of.find(t.b);
        if (pa == parity_of.end() || pb == parity_of.end()) {
            add(ViolationKind::dangling_index, label + " references a missing level");
            continue;
        }
        auto key = std::minmax(t.a, t.b);
        if (seen[{key.first, key.second}]++ > 0) add(ViolationKind::duplicate_pair, label);
        if (pa->second == pb->second)
            add(ViolationKind::same_parity_coupling,
                label + " couples two " + std::string(to_string(pa->second)) + " levels");
    }
    return report;
}

inline void require_valid(const LevelSystem& system) {
    auto report = validate(system);
    if (!report.ok()) throw ValidationError(std::move(report));
}

/// True if the transition set is exactly every opposite-parity pair.
inline bool is_fully_coupled(const LevelSystem& system) {
    std::size_t even = 0;
    for (const auto& l : system.levels) even += l.parity == Parity::even;
    const std::size_t odd = system.size() - even;
    return validate(system).ok() && system.transitions.size() == even * odd;
}

/// Builds the system whose transitions are all opposite-parity pairs, with
/// unit Rabi amplitudes and resonant lasers. Under the H[a][b] ~ exp(-i w t)
/// convention the resonant laser for pair (a, b) is omega_a - omega_b.
inline LevelSystem full_coupling(const std::vector<Parity>& parities, const std::vector<double>& omegas) {
    if (parities.size() != omegas.size())
        throw std::invalid_argument("full_coupling: parities and omegas differ in length");
    if (parities.empty()) throw std::invalid_argument("full_coupling: need at least one level");
    LevelSystem s;
    for (std::size_t i = 0; i < parities.size(); ++i) s.levels.push_back({i + 1, omegas[i], parities[i]});
    for (std::size_t i = 0; i < parities.size(); ++i)
        for (std::size_t j = i + 1; j < parities.size(); ++j)
            if (parities[i] != parities[j]) s.transitions.push_back({i + 1, j + 1, {1.0, 0.0}, omegas[i] - omegas[j]});
    return s;
}

/// Same as above with omega_n = n - 1.
inline LevelSystem full_coupling(const std::vector<Parity>& parities) {
    std::vector<double> omegas(parities.size());
    std::iota(omegas.begin(), omegas.end(), 0.0);
    return full_coupling(parities, omegas);
}

/// Connected components over the transition edges, each sorted ascending,
/// ordered by their smallest member.
inline std::vector<std::vector<LevelIndex>> connected_components(const LevelSystem& system) {
    const std::size_t n = system.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& t : system.transitions) {
        std::size_t ra = find(LevelSystem::position(t.a)), rb = find(LevelSystem::position(t.b));
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::map<std::size_t, std::vector<LevelIndex>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i + 1);
    std::vector<std::vector<LevelIndex>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

/// Drops transitions whose Rabi amplitude is exactly zero.
inline LevelSystem prune_zero_amplitude(LevelSystem system) {
    std::erase_if(system.transitions, [](const Transition& t) { return t.rabi == std::complex<double>{}; });
    return system;
}

}  // namespace rwaframe
