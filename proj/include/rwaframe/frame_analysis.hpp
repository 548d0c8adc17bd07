#pragma once

// Rotating-frame analysis of a coupling graph.
//
// A diagonal frame U(t) = sum_n exp(-i wbar_n t) |n><n| maps the term
// (rabi/2) exp(-i laser t) on edge (a, b) to (rabi/2) exp(-i (laser - wbar_a + wbar_b) t),
// so that edge becomes static iff wbar_a - wbar_b = laser. One such row per
// transition gives an incidence-matrix system. A spanning forest fixes wbar
// up to one constant per component; every chord of the forest closes one
// cycle whose signed laser sum (the detuning) must vanish for the chord to
// be static as well.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core_model.hpp"
#include "hamiltonian.hpp"
#include "matrix.hpp"

namespace rwaframe {

struct AnalysisOptions {
    /// A detuning counts as zero when |value| <= relative_tolerance * max|laser|.
    double relative_tolerance = 1e-9;
    /// Zero-amplitude transitions impose no physical constraint and are
    /// dropped unless this is set.
    bool keep_zero_amplitude = false;
};

/// Sum of doubles accurate to a few ulps of the exact result, via
/// error-free partial sums. Detunings are small differences of large laser
/// frequencies, so naive summation loses most of their relative precision.
inline double exact_sum(const std::vector<double>& values) {
    std::vector<double> partials;
    for (double x : values) {
        std::size_t i = 0;
        for (double y : partials) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials[i++] = lo;
            x = hi;
        }
        partials.resize(i);
        partials.push_back(x);
    }
    double total = 0.0;
    for (double p : partials) total += p;  // ascending magnitude, non-overlapping
    return total;
}

inline LevelSystem analysed_system(const LevelSystem& system, const AnalysisOptions& options) {
    require_valid(system);
    LevelSystem s = system;
    for (auto& t : s.transitions) t = canonical(t);
    return options.keep_zero_amplitude ? s : prune_zero_amplitude(std::move(s));
}

inline double max_abs_laser(const LevelSystem& system) {
    double m = 0.0;
    for (const auto& t : system.transitions) m = std::max(m, std::abs(t.laser));
    return m;
}

inline double detuning_tolerance(const LevelSystem& system, const AnalysisOptions& options) {
    return options.relative_tolerance * max_abs_laser(system);
}

// ---------------------------------------------------------------------------
// Constraint system

struct FrameConstraintSystem {
    std::size_t levels = 0;
    /// One row per transition, one column per level; +1 at a, -1 at b.
    std::vector<std::vector<int>> matrix;
    /// Laser frequency per row.
    std::vector<double> rhs;

    std::size_t rows() const { return matrix.size(); }

    /// Rank over the rationals by fraction-free integer elimination.
    std::size_t rank() const {
        std::vector<std::vector<long long>> m;
        for (const auto& r : matrix) m.emplace_back(r.begin(), r.end());
        std::size_t rank = 0;
        for (std::size_t col = 0; col < levels && rank < m.size(); ++col) {
            std::size_t pivot = rank;
            while (pivot < m.size() && m[pivot][col] == 0) ++pivot;
            if (pivot == m.size()) continue;
            std::swap(m[rank], m[pivot]);
            for (std::size_t r = rank + 1; r < m.size(); ++r) {
                if (m[r][col] == 0) continue;
                const long long p = m[rank][col], q = m[r][col];
                long long g = 0;
                for (std::size_t c = 0; c < levels; ++c) {
                    m[r][c] = p * m[r][c] - q * m[rank][c];
                    g = std::gcd(g, m[r][c]);
                }
                if (g > 1)
                    for (auto& x : m[r]) x /= g;
            }
            ++rank;
        }
        return rank;
    }
};

inline FrameConstraintSystem build_constraints(const LevelSystem& system) {
    require_valid(system);
    FrameConstraintSystem cs;
    cs.levels = system.size();
    for (const auto& t0 : system.transitions) {
        const Transition t = canonical(t0);
        std::vector<int> row(system.size(), 0);
        row[t.a - 1] = 1;
        row[t.b - 1] = -1;
        cs.matrix.push_back(std::move(row));
        cs.rhs.push_back(t.laser);
    }
    return cs;
}

// ---------------------------------------------------------------------------
// Spanning forest

struct SpanningForest {
    std::vector<std::size_t> tree_edges;  // indices into transitions, in insertion order
    std::vector<std::size_t> chords;      // ascending transition index
    std::size_t components = 0;

    bool is_forest_graph() const { return chords.empty(); }
};

/// Deterministic forest: grow from the lowest-index unvisited level, always
/// adding the crossing edge with the lexicographically smallest (a, b).
inline SpanningForest build_spanning_forest(const LevelSystem& system) {
    const std::size_t n = system.size();
    std::vector<std::size_t> order(system.transitions.size());
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](std::size_t e) {
        const Transition t = canonical(system.transitions[e]);
        return std::pair{t.a, t.b};
    };
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key(x) < key(y); });

    SpanningForest f;
    std::vector<bool> in_tree(n, false), used(system.transitions.size(), false);
    for (std::size_t start = 0; start < n; ++start) {
        if (in_tree[start]) continue;
        ++f.components;
        in_tree[start] = true;
        for (;;) {
            std::optional<std::size_t> best;
            for (std::size_t e : order) {
                const auto [a, b] = key(e);
                if (in_tree[a - 1] != in_tree[b - 1]) {
                    best = e;
                    break;
                }
            }
            if (!best) break;
            const auto [a, b] = key(*best);
            in_tree[a - 1] = in_tree[b - 1] = true;
            used[*best] = true;
            f.tree_edges.push_back(*best);
        }
    }
    for (std::size_t e = 0; e < used.size(); ++e)
        if (!used[e]) f.chords.push_back(e);
    return f;
}

/// Random forest: Kruskal over a seeded shuffle of the edges.
inline SpanningForest build_random_spanning_forest(const LevelSystem& system, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(system.transitions.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::size_t> parent(system.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    SpanningForest f;
    std::vector<bool> used(system.transitions.size(), false);
    for (std::size_t e : order) {
        const auto& t = system.transitions[e];
        std::size_t ra = find(t.a - 1), rb = find(t.b - 1);
        if (ra == rb) continue;
        parent[ra] = rb;
        used[e] = true;
        f.tree_edges.push_back(e);
    }
    for (std::size_t e = 0; e < used.size(); ++e)
        if (!used[e]) f.chords.push_back(e);
    f.components = system.size() - f.tree_edges.size();
    return f;
}

namespace detail {

struct TreeStep {
    std::size_t edge;
    int sign;  // +1 when walked from a to b
};

inline std::vector<std::vector<std::pair<LevelIndex, std::size_t>>> tree_adjacency(const LevelSystem& system,
                                                                                   const SpanningForest& forest) {
    std::vector<std::vector<std::pair<LevelIndex, std::size_t>>> adj(system.size() + 1);
    for (std::size_t e : forest.tree_edges) {
        const auto& t = system.transitions[e];
        adj[t.a].push_back({t.b, e});
        adj[t.b].push_back({t.a, e});
    }
    return adj;
}

/// Tree path from `from` to `to`, as signed edge steps.
inline std::vector<TreeStep> tree_path(const LevelSystem& system, const SpanningForest& forest, LevelIndex from,
                                       LevelIndex to) {
    const auto adj = tree_adjacency(system, forest);
    std::vector<std::optional<std::pair<LevelIndex, std::size_t>>> came_from(system.size() + 1);
    std::vector<bool> seen(system.size() + 1, false);
    std::queue<LevelIndex> q;
    q.push(from);
    seen[from] = true;
    while (!q.empty()) {
        LevelIndex u = q.front();
        q.pop();
        if (u == to) break;
        for (auto [v, e] : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                came_from[v] = {u, e};
                q.push(v);
            }
    }
    if (!seen[to]) throw std::logic_error("tree_path: endpoints not connected by the forest");
    std::vector<TreeStep> steps;
    for (LevelIndex v = to; v != from;) {
        auto [u, e] = *came_from[v];
        steps.push_back({e, system.transitions[e].a == u ? +1 : -1});
        v = u;
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Frame solution

struct FrameSolution {
    std::vector<double> omega_bar;
    /// One pinned level per connected component (omega_bar = 0 there).
    std::vector<LevelIndex> gauge;
};

/// Lowest-index level of each component.
inline std::vector<LevelIndex> default_gauge(const LevelSystem& system) {
    std::vector<LevelIndex> g;
    for (const auto& comp : connected_components(system)) g.push_back(comp.front());
    return g;
}

/// Solves the forest constraints exactly, propagating from each gauge pin.
inline FrameSolution solve_frame(const LevelSystem& system, const SpanningForest& forest,
                                 const std::vector<LevelIndex>& gauge) {
    require_valid(system);
    const auto comps = connected_components(system);
    std::vector<std::size_t> comp_of(system.size() + 1, 0);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (LevelIndex l : comps[c]) comp_of[l] = c;
    std::vector<int> pins(comps.size(), 0);
    for (LevelIndex g : gauge) {
        if (g < 1 || g > system.size())
            throw std::invalid_argument("solve_frame: gauge level " + std::to_string(g) + " does not exist");
        ++pins[comp_of[g]];
    }
    for (std::size_t c = 0; c < comps.size(); ++c)
        if (pins[c] != 1)
            throw std::invalid_argument("solve_frame: component containing level " + std::to_string(comps[c].front()) +
                                        " has " + std::to_string(pins[c]) + " gauge pins, expected 1");

    const auto adj = detail::tree_adjacency(system, forest);
    FrameSolution sol;
    sol.gauge = gauge;
    sol.omega_bar.assign(system.size(), 0.0);
    std::vector<bool> seen(system.size() + 1, false);
    for (LevelIndex g : gauge) {
        std::queue<LevelIndex> q;
        q.push(g);
        seen[g] = true;
        while (!q.empty()) {
            LevelIndex u = q.front();
            q.pop();
            for (auto [v, e] : adj[u]) {
                if (seen[v]) continue;
                seen[v] = true;
                const auto& t = system.transitions[e];
                // wbar_a - wbar_b = laser
                sol.omega_bar[v - 1] =
                    (t.a == u) ? sol.omega_bar[u - 1] - t.laser : sol.omega_bar[u - 1] + t.laser;
                q.push(v);
            }
        }
    }
    return sol;
}

inline FrameSolution solve_frame(const LevelSystem& system, const std::vector<LevelIndex>& gauge) {
    return solve_frame(system, build_spanning_forest(system), gauge);
}

inline FrameSolution solve_frame(const LevelSystem& system) { return solve_frame(system, default_gauge(system)); }

// ---------------------------------------------------------------------------
// Detuning expressions

struct SignedEdge {
    LevelIndex a = 0;
    LevelIndex b = 0;
    int sign = 0;

    bool operator==(const SignedEdge&) const = default;
};

struct DetuningExpression {
    /// Exact integer coefficient per transition of the analysed system.
    std::vector<int> coefficients;
    double value = 0.0;
    /// Edges in traversal order around the cycle, each with its coefficient.
    std::vector<SignedEdge> cycle_edges;

    /// Human-readable form, positive terms first, e.g. "w14 - w12 - w23 - w34".
    std::string text() const {
        std::vector<SignedEdge> pos, neg;
        for (const auto& e : cycle_edges) (e.sign > 0 ? pos : neg).push_back(e);
        auto by_pair = [](const SignedEdge& x, const SignedEdge& y) { return std::pair{x.a, x.b} < std::pair{y.a, y.b}; };
        std::sort(pos.begin(), pos.end(), by_pair);
        std::sort(neg.begin(), neg.end(), by_pair);
        auto name = [](const SignedEdge& e) {
            if (e.a < 10 && e.b < 10) return "w" + std::to_string(e.a) + std::to_string(e.b);
            return "w(" + std::to_string(e.a) + "," + std::to_string(e.b) + ")";
        };
        std::string out;
        for (const auto& e : pos) out += (out.empty() ? "" : " + ") + name(e);
        for (const auto& e : neg) out += (out.empty() ? "-" : " - ") + name(e);
        return out;
    }
};

/// Orients a cycle so that its narrowest transition (smallest b - a, then
/// lowest pair) enters with coefficient -1. This reproduces the customary
/// signs of the 2+2 four-level detunings.
inline void orient_canonically(DetuningExpression& d) {
    const SignedEdge* narrow = nullptr;
    for (const auto& e : d.cycle_edges)
        if (!narrow || std::pair{e.b - e.a, e.a} < std::pair{narrow->b - narrow->a, narrow->a}) narrow = &e;
    if (narrow && narrow->sign > 0) {
        d.value = -d.value;
        for (auto& c : d.coefficients) c = -c;
        for (auto& e : d.cycle_edges) e.sign = -e.sign;
        std::reverse(d.cycle_edges.begin(), d.cycle_edges.end());
    }
}

/// Fundamental cycle of one chord: chord + tree path back.
/// Requires canonical (a < b) transitions, as produced by analysed_system.
inline DetuningExpression chord_detuning(const LevelSystem& system, const SpanningForest& forest, std::size_t chord) {
    for (const auto& t : system.transitions)
        if (t.a > t.b) throw std::invalid_argument("chord_detuning: transition " + edge_label(t) + " is not canonical");
    const auto& c = system.transitions[chord];
    DetuningExpression d;
    d.coefficients.assign(system.transitions.size(), 0);
    d.coefficients[chord] = 1;
    d.cycle_edges.push_back({c.a, c.b, 1});
    // laser(chord) - (wbar_a - wbar_b) where the tree gives
    // wbar_a - wbar_b = sum over the a->b path of sign * laser.
    std::vector<double> terms{c.laser};
    for (const auto& step : detail::tree_path(system, forest, c.b, c.a)) {
        // walking b -> a means the a -> b path has the opposite sign
        const int coeff = step.sign;
        const auto& t = system.transitions[step.edge];
        d.coefficients[step.edge] = coeff;
        terms.push_back(coeff * t.laser);
        d.cycle_edges.push_back({t.a, t.b, coeff});
    }
    d.value = exact_sum(terms);
    orient_canonically(d);
    return d;
}

inline std::vector<DetuningExpression> detuning_expressions(const LevelSystem& system, const SpanningForest& forest) {
    std::vector<DetuningExpression> out;
    for (std::size_t chord : forest.chords) out.push_back(chord_detuning(system, forest, chord));
    return out;
}

/// One expression per chord of the deterministic forest of the analysed
/// (canonicalised, pruned) system.
inline std::vector<DetuningExpression> detuning_expressions(const LevelSystem& system,
                                                            const AnalysisOptions& options = {}) {
    const LevelSystem s = analysed_system(system, options);
    return detuning_expressions(s, build_spanning_forest(s));
}

/// Recomputes the value of an integer cycle vector from the lasers.
inline double cycle_value(const LevelSystem& system, const std::vector<int>& coefficients) {
    std::vector<double> terms;
    for (std::size_t e = 0; e < coefficients.size(); ++e)
        if (coefficients[e] != 0) terms.push_back(coefficients[e] * system.transitions[e].laser);
    return exact_sum(terms);
}

/// Sum of coefficient-weighted constraint rows; zero for every cycle.
inline std::vector<long long> apply_to_constraints(const FrameConstraintSystem& cs, const std::vector<int>& coefficients) {
    std::vector<long long> out(cs.levels, 0);
    for (std::size_t r = 0; r < cs.rows(); ++r)
        for (std::size_t c = 0; c < cs.levels; ++c) out[c] += static_cast<long long>(coefficients[r]) * cs.matrix[r][c];
    return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class Verdict {
    unconditionally_time_independent,
    conditionally_time_independent,
    disconnected_per_component,
};

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::unconditionally_time_independent: return "UnconditionallyTimeIndependent";
        case Verdict::conditionally_time_independent: return "ConditionallyTimeIndependent";
        case Verdict::disconnected_per_component: return "Disconnected-but-classifiable-per-component";
    }
    return "unknown";
}

struct ComponentVerdict {
    std::vector<LevelIndex> levels;
    Verdict verdict;
    std::size_t detuning_count = 0;
};

struct Classification {
    Verdict verdict = Verdict::unconditionally_time_independent;
    std::vector<DetuningExpression> detunings;
    FrameSolution frame;
    /// The system the coefficient vectors refer to (canonical pairs, pruned).
    LevelSystem analysed;
    std::vector<ComponentVerdict> components;
    std::size_t cyclomatic_number = 0;
    /// Detunings whose magnitude exceeds the tolerance.
    std::size_t residual_count = 0;
    double tolerance = 0.0;
};

inline std::size_t count_nonzero(const std::vector<DetuningExpression>& ds, double tolerance) {
    return static_cast<std::size_t>(
        std::count_if(ds.begin(), ds.end(), [&](const DetuningExpression& d) { return std::abs(d.value) > tolerance; }));
}

inline Classification classify(const LevelSystem& system, const AnalysisOptions& options = {},
                               std::optional<std::vector<LevelIndex>> gauge = std::nullopt) {
    Classification c;
    c.analysed = analysed_system(system, options);
    const LevelSystem& s = c.analysed;
    const SpanningForest forest = build_spanning_forest(s);
    c.detunings = detuning_expressions(s, forest);
    c.frame = solve_frame(s, forest, gauge ? *gauge : default_gauge(s));
    c.cyclomatic_number = forest.chords.size();
    c.tolerance = detuning_tolerance(s, options);
    c.residual_count = count_nonzero(c.detunings, c.tolerance);

    const auto comps = connected_components(s);
    for (const auto& comp : comps) {
        std::size_t edges = 0;
        for (const auto& t : s.transitions)
            if (std::binary_search(comp.begin(), comp.end(), t.a)) ++edges;
        const std::size_t cycles = edges + 1 - comp.size();
        c.components.push_back({comp,
                                cycles == 0 ? Verdict::unconditionally_time_independent
                                            : Verdict::conditionally_time_independent,
                                cycles});
    }
    if (forest.is_forest_graph())
        c.verdict = Verdict::unconditionally_time_independent;
    else if (comps.size() == 1)
        c.verdict = Verdict::conditionally_time_independent;
    else
        c.verdict = Verdict::disconnected_per_component;
    return c;
}

/// Minimal number of residual oscillatory term pairs over all diagonal
/// frames, counted on the cycle basis of the deterministic forest.
inline std::size_t residual_count(const LevelSystem& system, const AnalysisOptions& options = {}) {
    const LevelSystem s = analysed_system(system, options);
    return count_nonzero(detuning_expressions(s, build_spanning_forest(s)), detuning_tolerance(s, options));
}

/// Retunes one laser per chord so that every fundamental detuning vanishes.
inline LevelSystem tune_to_zero_detuning(const LevelSystem& system) {
    require_valid(system);
    LevelSystem s = system;
    for (auto& t : s.transitions) t = canonical(t);
    const SpanningForest forest = build_spanning_forest(s);
    for (std::size_t chord : forest.chords) {
        const auto d = chord_detuning(s, forest, chord);
        // The chord's coefficient is +-1 and it appears in no other fundamental cycle.
        s.transitions[chord].laser -= d.coefficients[chord] * d.value;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Transformed Hamiltonian

struct TransformedHamiltonian {
    /// Static part: diagonal omega_n - wbar_n plus couplings made static.
    ComplexMatrix constant;
    /// Couplings still oscillating, with their shifted frequencies.
    std::vector<OscillatoryTerm> residual;

    bool time_independent() const { return residual.empty(); }
};

inline ComplexMatrix evaluate(const TransformedHamiltonian& h, double t) {
    ComplexMatrix m = h.constant;
    for (const auto& term : h.residual) {
        const Complex v = term.amplitude * std::polar(1.0, -term.frequency * t);
        m(term.row - 1, term.col - 1) += v;
        m(term.col - 1, term.row - 1) += std::conj(v);
    }
    return m;
}

/// H' = U^dag H U - i U^dag dU/dt for U = diag(exp(-i wbar_n t)). The second
/// term is -diag(wbar_n). Terms with |shifted frequency| <= tolerance are
/// folded into the constant part.
inline TransformedHamiltonian transform(const TimeDependentHamiltonian& h, const FrameSolution& frame,
                                        std::optional<double> tolerance = std::nullopt) {
    const std::size_t n = h.dimension();
    if (frame.omega_bar.size() != n) throw std::invalid_argument("transform: frame dimension does not match");
    const double tol = tolerance ? *tolerance : AnalysisOptions{}.relative_tolerance * max_term_frequency(h);
    TransformedHamiltonian out;
    out.constant = ComplexMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) out.constant(i, i) = h.diagonal[i] - frame.omega_bar[i];
    for (const auto& term : h.terms) {
        const double shifted = term.frequency - (frame.omega_bar[term.row - 1] - frame.omega_bar[term.col - 1]);
        if (std::abs(shifted) <= tol) {
            out.constant(term.row - 1, term.col - 1) += term.amplitude;
            out.constant(term.col - 1, term.row - 1) += std::conj(term.amplitude);
        } else {
            out.residual.push_back({term.row, term.col, term.amplitude, shifted});
        }
    }
    return out;
}

/// U(t) = diag(exp(-i wbar_n t)).
inline ComplexMatrix frame_unitary(const FrameSolution& frame, double t) {
    ComplexVector d;
    for (double w : frame.omega_bar) d.push_back(std::polar(1.0, -w * t));
    return ComplexMatrix::diagonal(d);
}

}  // namespace rwaframe
