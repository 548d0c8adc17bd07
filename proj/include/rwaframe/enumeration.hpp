#pragma once

// Parity patterns for N-level systems and the census of their fully coupled
// topologies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <atomic>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "core_model.hpp"
#include "frame_analysis.hpp"

namespace rwaframe {

constexpr std::size_t max_enumerated_levels = 12;

struct ParityPattern {
    std::vector<Parity> pattern;

    /// First entry even: the representative of {pattern, global flip}.
    bool canonical() const { return pattern.empty() || pattern.front() == Parity::even; }

    std::size_t size() const { return pattern.size(); }

    std::size_t even_count() const {
        return static_cast<std::size_t>(std::count(pattern.begin(), pattern.end(), Parity::even));
    }

    ParityPattern flipped() const {
        ParityPattern p = *this;
        for (auto& x : p.pattern) x = !x;
        return p;
    }

    ParityPattern canonicalized() const { return canonical() ? *this : flipped(); }

    /// e.g. "eooe"
    std::string str() const {
        std::string s;
        for (Parity p : pattern) s += short_name(p);
        return s;
    }

    static ParityPattern parse(const std::string& s) {
        ParityPattern p;
        for (char c : s) {
            if (c == 'e' || c == 'E') p.pattern.push_back(Parity::even);
            else if (c == 'o' || c == 'O') p.pattern.push_back(Parity::odd);
            else throw std::invalid_argument("parity pattern: unexpected character '" + std::string(1, c) + "'");
        }
        return p;
    }

    bool operator==(const ParityPattern&) const = default;
};

/// All 2^(N-1) canonical patterns. Order: binary counting over levels 2..N
/// with even = 0, level N least significant.
inline std::vector<ParityPattern> enumerate_patterns(std::size_t n) {
    if (n < 1 || n > max_enumerated_levels)
        throw std::out_of_range("enumerate_patterns: N must be in [1, " + std::to_string(max_enumerated_levels) + "]");
    std::vector<ParityPattern> out;
    const std::size_t count = std::size_t{1} << (n - 1);
    for (std::size_t bits = 0; bits < count; ++bits) {
        ParityPattern p;
        p.pattern.push_back(Parity::even);
        for (std::size_t k = n - 1; k-- > 0;) p.pattern.push_back(((bits >> k) & 1U) ? Parity::odd : Parity::even);
        out.push_back(std::move(p));
    }
    return out;
}

/// Names of the four-level diagrams. 3+1 systems are named by the position
/// of the lone minority-parity level: 1 -> W, 2 -> Y, 3 -> lambda, 4 -> M.
inline std::optional<std::string> name_topology(const ParityPattern& pattern) {
    if (pattern.size() != 4) return std::nullopt;
    const ParityPattern p = pattern.canonicalized();
    const std::size_t even = p.even_count();
    if (even == 1 || even == 3) {
        const Parity minority = even == 1 ? Parity::even : Parity::odd;
        const auto hub = std::find(p.pattern.begin(), p.pattern.end(), minority) - p.pattern.begin();
        static const char* names[] = {"W", "Y", "lambda", "M"};
        return names[hub];
    }
    const std::string s = p.str();
    if (s == "eooe") return "diamond";
    if (s == "eoeo") return "trapezium";
    if (s == "eeoo") return "hourglass";
    return std::nullopt;
}

/// Fully coupled system with omega_n = n - 1 and resonant lasers offset by
/// 1e-3 * sqrt(p_k) (p_k the k-th prime). Square roots of distinct primes are
/// linearly independent over the rationals, so no integer cycle combination of
/// the offsets cancels and every detuning is nonzero.
inline LevelSystem generic_fully_coupled(const ParityPattern& pattern) {
    LevelSystem s = full_coupling(pattern.pattern);
    double max_gap = 0.0;
    for (const auto& t : s.transitions) max_gap = std::max(max_gap, std::abs(t.laser));
    std::size_t candidate = 2;
    for (auto& t : s.transitions) {
        for (;; ++candidate) {
            bool prime = true;
            for (std::size_t d = 2; d * d <= candidate; ++d)
                if (candidate % d == 0) {
                    prime = false;
                    break;
                }
            if (prime) break;
        }
        t.laser += 1e-3 * max_gap * std::sqrt(static_cast<double>(candidate));
        ++candidate;
    }
    return s;
}

struct TopologyRecord {
    ParityPattern pattern;
    std::optional<std::string> name;
    Verdict verdict = Verdict::unconditionally_time_independent;
    std::size_t transition_count = 0;
    std::size_t detuning_count = 0;
    std::vector<std::string> detunings;
};

inline TopologyRecord census_record(const ParityPattern& pattern) {
    TopologyRecord r;
    r.pattern = pattern.canonicalized();
    r.name = name_topology(r.pattern);
    const Classification c = classify(generic_fully_coupled(r.pattern));
    r.verdict = c.verdict;
    r.transition_count = c.analysed.transitions.size();
    r.detuning_count = c.detunings.size();
    for (const auto& d : c.detunings) r.detunings.push_back(d.text());
    return r;
}

/// One record per canonical pattern, in enumeration order. Patterns are
/// classified on a small worker pool; results land in their own slots.
inline std::vector<TopologyRecord> census(std::size_t n) {
    const auto patterns = enumerate_patterns(n);
    std::vector<TopologyRecord> out(patterns.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < patterns.size();) out[i] = census_record(patterns[i]);
    };
    const std::size_t threads =
        std::min<std::size_t>(patterns.size(), std::max(1U, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace rwaframe
