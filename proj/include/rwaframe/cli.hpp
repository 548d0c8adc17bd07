#pragma once

// Command dispatch for the rwaframe tool. Kept in the library so the
// commands can be exercised without spawning a process.
//
// Exit status: 0 ok, 1 invalid level system, 2 unreadable/malformed input or
// bad request, 3 verification failure.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "core_model.hpp"
#include "dynamics.hpp"
#include "enumeration.hpp"
#include "frame_analysis.hpp"
#include "hamiltonian.hpp"
#include "report.hpp"
#include "system_io.hpp"

namespace rwaframe::cli {

enum ExitStatus : int { ok = 0, validation_failure = 1, input_error = 2, verification_failure = 3 };

enum class Command { analyze, transform, census, simulate, verify };

inline std::optional<Command> parse_command(const std::string& s) {
    if (s == "analyze") return Command::analyze;
    if (s == "transform") return Command::transform;
    if (s == "census") return Command::census;
    if (s == "simulate") return Command::simulate;
    if (s == "verify") return Command::verify;
    return std::nullopt;
}

struct CommandRequest {
    Command command = Command::analyze;
    std::optional<std::string> input_path;
    std::optional<std::size_t> levels;
    std::optional<LevelIndex> gauge;
    std::optional<double> step;
    std::optional<double> horizon;
    double tolerance = 1e-9;           // relative detuning tolerance
    double verify_tolerance = 1e-6;    // population deviation allowed by verify
    OutputFormat format = OutputFormat::human;
    std::optional<std::uint64_t> seed;  // random initial state for simulate/verify
    bool tune = false;                  // retune chord lasers to zero detuning first
    bool keep_zero_amplitude = false;
    std::size_t max_samples = 2000;     // cap on recorded trace rows
};

namespace detail {

inline AnalysisOptions analysis_options(const CommandRequest& r) {
    return {.relative_tolerance = r.tolerance, .keep_zero_amplitude = r.keep_zero_amplitude};
}

/// Gauge vector with the requested level pinned in its component and the
/// lowest level pinned elsewhere.
inline std::vector<LevelIndex> gauge_for(const LevelSystem& s, std::optional<LevelIndex> pin) {
    if (!pin) return default_gauge(s);
    if (*pin < 1 || *pin > s.size())
        throw std::invalid_argument("--gauge " + std::to_string(*pin) + " is not a level of this system");
    std::vector<LevelIndex> g;
    for (const auto& comp : connected_components(s))
        g.push_back(std::find(comp.begin(), comp.end(), *pin) != comp.end() ? *pin : comp.front());
    return g;
}

inline StateVector initial_state(std::size_t n, std::optional<std::uint64_t> seed) {
    if (!seed) return StateVector::basis(n, 1);
    std::mt19937_64 rng(*seed);
    std::normal_distribution<double> gauss;
    StateVector s{ComplexVector(n)};
    for (auto& a : s.amplitudes) a = {gauss(rng), gauss(rng)};
    const double nrm = s.norm();
    for (auto& a : s.amplitudes) a /= nrm;
    return s;
}

struct Plan {
    LevelSystem system;
    TimeDependentHamiltonian h;
    double horizon;
    double step;
    std::size_t record_every;
};

inline Plan plan(const CommandRequest& r, const LevelSystem& loaded) {
    Plan p{analysed_system(loaded, analysis_options(r)), {}, 0, 0, 1};
    if (r.tune) p.system = tune_to_zero_detuning(p.system);
    p.h = build_rwa_hamiltonian(p.system);
    p.horizon = r.horizon ? *r.horizon : default_horizon(p.h);
    p.step = r.step ? *r.step : default_step(p.h);
    const auto steps = static_cast<std::size_t>(std::ceil(p.horizon / p.step));
    p.record_every = std::max<std::size_t>(1, steps / std::max<std::size_t>(1, r.max_samples));
    return p;
}

inline int verify(const CommandRequest& r, const LevelSystem& loaded, std::ostream& out) {
    const Plan p = plan(r, loaded);
    const auto c = classify(p.system, analysis_options(r), gauge_for(p.system, r.gauge));
    const auto psi0 = initial_state(p.system.size(), r.seed);
    const auto lab = propagate_lab(p.h, psi0, p.horizon, p.step, p.record_every);

    double deviation = std::numeric_limits<double>::infinity();
    std::string failure;
    try {
        const auto frame = propagate_frame(p.h, c.frame, psi0, lab.times, c.tolerance);
        deviation = compare_populations(lab, frame);
    } catch (const FrameNotStaticError& e) {
        failure = e.what();
    }
    const bool pass = failure.empty() && deviation <= r.verify_tolerance;
    if (r.format == OutputFormat::machine) {
        nlohmann::ordered_json j;
        j["verdict"] = to_string(c.verdict);
        j["horizon"] = p.horizon;
        j["step"] = p.step;
        j["max_population_deviation"] = failure.empty() ? nlohmann::ordered_json(deviation) : nlohmann::ordered_json(nullptr);
        j["norm_drift"] = lab.norm_drift;
        j["tolerance"] = r.verify_tolerance;
        j["pass"] = pass;
        if (!failure.empty()) j["reason"] = failure;
        out << j.dump(2) << "\n";
    } else {
        out << "verdict: " << to_string(c.verdict) << "\n"
            << "horizon: " << p.horizon << ", RK4 step: " << p.step << "\n";
        if (failure.empty())
            out << "max population deviation (lab RK4 vs frame exponential): " << deviation << "\n";
        else
            out << "frame propagation refused: " << failure << "\n";
        out << "lab norm drift: " << lab.norm_drift << "\n"
            << (pass ? "PASS" : "FAIL") << " (tolerance " << r.verify_tolerance << ")\n";
    }
    return pass ? ok : verification_failure;
}

}  // namespace detail

/// Runs one command. Reports go to `out`, diagnostics to `err`.
inline int run(const CommandRequest& r, std::ostream& out, std::ostream& err) {
    try {
        if (r.command == Command::census) {
            if (!r.levels) throw std::invalid_argument("census requires --levels N");
            out << render_census(census(*r.levels), r.format);
            return ok;
        }
        if (!r.input_path) throw std::invalid_argument("this command requires --input PATH");
        const LevelSystem loaded = read_system_file(*r.input_path);
        require_valid(loaded);
        switch (r.command) {
            case Command::analyze: {
                const auto s = analysed_system(loaded, detail::analysis_options(r));
                out << render_classification(classify(s, detail::analysis_options(r), detail::gauge_for(s, r.gauge)),
                                             r.format);
                return ok;
            }
            case Command::transform: {
                const auto s = analysed_system(loaded, detail::analysis_options(r));
                const auto frame = solve_frame(s, detail::gauge_for(s, r.gauge));
                out << render_transformed(transform(build_rwa_hamiltonian(s), frame,
                                                    detuning_tolerance(s, detail::analysis_options(r))),
                                          r.format);
                return ok;
            }
            case Command::simulate: {
                const auto p = detail::plan(r, loaded);
                out << render_trace(propagate_lab(p.h, detail::initial_state(p.system.size(), r.seed), p.horizon,
                                                  p.step, p.record_every));
                return ok;
            }
            case Command::verify: return detail::verify(r, loaded, out);
            case Command::census: break;
        }
        return ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return validation_failure;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return input_error;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return verification_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return input_error;
    }
}

}  // namespace rwaframe::cli
