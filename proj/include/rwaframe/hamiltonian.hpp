#pragma once

// Structured RWA Hamiltonian: a constant real diagonal plus one oscillatory
// upper-triangle term per driven transition. The lower triangle is implied
// by Hermiticity and never stored.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "core_model.hpp"
#include "matrix.hpp"

namespace rwaframe {

/// amplitude * exp(-i * frequency * t) at (row, col), row < col, 1-based.
struct OscillatoryTerm {
    LevelIndex row = 0;
    LevelIndex col = 0;
    Complex amplitude{};
    double frequency = 0.0;

    bool operator==(const OscillatoryTerm&) const = default;
};

struct TimeDependentHamiltonian {
    std::vector<double> diagonal;
    std::vector<OscillatoryTerm> terms;

    std::size_t dimension() const { return diagonal.size(); }
};

inline TimeDependentHamiltonian build_rwa_hamiltonian(const LevelSystem& system) {
    require_valid(system);
    TimeDependentHamiltonian h;
    h.diagonal.reserve(system.size());
    for (const auto& l : system.levels) h.diagonal.push_back(l.omega);
    for (const auto& t0 : system.transitions) {
        const Transition t = canonical(t0);
        h.terms.push_back({t.a, t.b, t.rabi / 2.0, t.laser});
    }
    return h;
}

/// Dense H(t). Hermitian exactly: the mirrored entry is the conjugate of the
/// computed one.
inline ComplexMatrix evaluate(const TimeDependentHamiltonian& h, double t) {
    const std::size_t n = h.dimension();
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = h.diagonal[i];
    for (const auto& term : h.terms) {
        const Complex v = term.amplitude * std::polar(1.0, -term.frequency * t);
        const std::size_t r = term.row - 1, c = term.col - 1;
        m(r, c) += v;
        m(c, r) += std::conj(v);
    }
    return m;
}

/// Largest oscillation frequency present in the terms.
inline double max_term_frequency(const TimeDependentHamiltonian& h) {
    double m = 0.0;
    for (const auto& term : h.terms) m = std::max(m, std::abs(term.frequency));
    return m;
}

/// Gershgorin bound on the spectral radius of H(t), valid for every t.
inline double spectral_bound(const TimeDependentHamiltonian& h) {
    std::vector<double> row(h.dimension(), 0.0);
    for (std::size_t i = 0; i < h.dimension(); ++i) row[i] = std::abs(h.diagonal[i]);
    for (const auto& term : h.terms) {
        row[term.row - 1] += std::abs(term.amplitude);
        row[term.col - 1] += std::abs(term.amplitude);
    }
    double m = 0.0;
    for (double r : row) m = std::max(m, r);
    return m;
}

}  // namespace rwaframe
