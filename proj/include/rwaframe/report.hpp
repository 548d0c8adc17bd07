#pragma once

// Text renderings of analysis results. Human mode is for reading; machine
// mode is JSON with stable key order and no timestamps, so identical input
// yields byte-identical output.

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "enumeration.hpp"
#include "frame_analysis.hpp"
#include "hamiltonian.hpp"

namespace rwaframe {

enum class OutputFormat { human, machine };

namespace detail {

inline std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

inline std::string complex_str(Complex z) {
    std::ostringstream os;
    os << std::setprecision(9) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

inline nlohmann::ordered_json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline nlohmann::ordered_json detuning_json(const DetuningExpression& d, const LevelSystem& analysed) {
    nlohmann::ordered_json j;
    j["expression"] = d.text();
    j["value"] = d.value;
    j["coefficients"] = nlohmann::ordered_json::array();
    for (std::size_t e = 0; e < d.coefficients.size(); ++e)
        if (d.coefficients[e] != 0)
            j["coefficients"].push_back(
                {{"a", analysed.transitions[e].a}, {"b", analysed.transitions[e].b}, {"coefficient", d.coefficients[e]}});
    j["cycle"] = nlohmann::ordered_json::array();
    for (const auto& e : d.cycle_edges) j["cycle"].push_back({{"a", e.a}, {"b", e.b}, {"sign", e.sign}});
    return j;
}

inline nlohmann::ordered_json residual_json(const std::vector<OscillatoryTerm>& terms) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& t : terms)
        out.push_back({{"row", t.row}, {"col", t.col}, {"amplitude", complex_json(t.amplitude)}, {"frequency", t.frequency}});
    return out;
}

inline std::string coefficient_list(const DetuningExpression& d, const LevelSystem& analysed) {
    std::string s = "[";
    bool first = true;
    for (std::size_t e = 0; e < d.coefficients.size(); ++e) {
        if (d.coefficients[e] == 0) continue;
        s += (first ? "" : ", ") + edge_label(analysed.transitions[e]) + ":" + (d.coefficients[e] > 0 ? "+1" : "-1");
        first = false;
    }
    return s + "]";
}

}  // namespace detail

/// Sentence surfaced whenever more than one independent residual phase remains.
inline std::string multi_phase_note(std::size_t residual) {
    return std::to_string(residual) +
           " independent detuning-dependent phases remain; no diagonal frame reduces this system to a single "
           "residual phase unless the detunings are commensurate";
}

inline std::string render_classification(const Classification& c, OutputFormat format) {
    const auto h = build_rwa_hamiltonian(c.analysed);
    const auto residual = transform(h, c.frame, c.tolerance).residual;
    const auto components = connected_components(c.analysed);
    if (format == OutputFormat::machine) {
        nlohmann::ordered_json j;
        j["verdict"] = to_string(c.verdict);
        j["levels"] = c.analysed.size();
        j["transitions"] = c.analysed.transitions.size();
        j["components"] = components;
        j["cyclomatic_number"] = c.cyclomatic_number;
        j["gauge"] = c.frame.gauge;
        j["omega_bar"] = c.frame.omega_bar;
        j["detunings"] = nlohmann::ordered_json::array();
        for (const auto& d : c.detunings) j["detunings"].push_back(detail::detuning_json(d, c.analysed));
        j["tolerance"] = c.tolerance;
        j["residual_count"] = c.residual_count;
        j["residual_terms"] = detail::residual_json(residual);
        if (c.residual_count > 1) j["note"] = multi_phase_note(c.residual_count);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "system: " << c.analysed.size() << " levels, " << c.analysed.transitions.size() << " transitions, "
       << components.size() << " component(s)\n";
    os << "verdict: " << to_string(c.verdict) << "\n";
    if (c.verdict == Verdict::disconnected_per_component)
        for (const auto& comp : c.components) {
            os << "  component {";
            for (std::size_t i = 0; i < comp.levels.size(); ++i) os << (i ? "," : "") << comp.levels[i];
            os << "}: " << to_string(comp.verdict) << ", " << comp.detuning_count << " detuning(s)\n";
        }
    os << "gauge:";
    for (LevelIndex g : c.frame.gauge) os << " wbar" << g << " = 0";
    os << "\nframe frequencies:\n";
    for (std::size_t i = 0; i < c.frame.omega_bar.size(); ++i) {
        const LevelIndex level = i + 1;
        if (std::find(c.frame.gauge.begin(), c.frame.gauge.end(), level) != c.frame.gauge.end()) continue;
        os << "  wbar" << level << " = " << detail::num(c.frame.omega_bar[i]) << "\n";
    }
    if (c.detunings.empty()) {
        os << "detunings: none\n";
    } else {
        os << "detunings (" << c.detunings.size() << "):\n";
        for (std::size_t k = 0; k < c.detunings.size(); ++k) {
            const auto& d = c.detunings[k];
            os << "  D" << k + 1 << " = " << d.text() << " = " << detail::num(d.value) << "  "
               << detail::coefficient_list(d, c.analysed) << "\n";
        }
    }
    os << "residual phases: " << c.residual_count << " (tolerance " << detail::num(c.tolerance) << ")\n";
    for (const auto& t : residual)
        os << "  " << t.row << "-" << t.col << " oscillates at " << detail::num(t.frequency) << "\n";
    if (c.residual_count > 1) os << "note: " << multi_phase_note(c.residual_count) << "\n";
    return os.str();
}

/// Matrix dump: dimension header plus row-major {re, im} entries, then the
/// residual oscillatory terms.
inline std::string render_transformed(const TransformedHamiltonian& h, OutputFormat format) {
    const std::size_t n = h.constant.rows();
    if (format == OutputFormat::machine) {
        nlohmann::ordered_json j;
        j["dimension"] = n;
        j["entries"] = nlohmann::ordered_json::array();
        for (const auto& z : h.constant.data()) j["entries"].push_back(detail::complex_json(z));
        j["residual"] = detail::residual_json(h.residual);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "dimension: " << n << "\n";
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) os << "  " << std::setw(26) << detail::complex_str(h.constant(r, c));
        os << "\n";
    }
    if (h.residual.empty()) {
        os << "residual: none (time-independent)\n";
    } else {
        os << "residual:\n";
        for (const auto& t : h.residual)
            os << "  (" << t.row << "," << t.col << ") " << detail::complex_str(t.amplitude) << " * exp(-i * "
               << detail::num(t.frequency) << " * t)\n";
    }
    return os.str();
}

inline std::string render_census(const std::vector<TopologyRecord>& records, OutputFormat format) {
    if (format == OutputFormat::machine) {
        auto j = nlohmann::ordered_json::array();
        for (const auto& r : records) {
            nlohmann::ordered_json row;
            row["pattern"] = r.pattern.str();
            row["name"] = r.name ? nlohmann::ordered_json(*r.name) : nlohmann::ordered_json(nullptr);
            row["verdict"] = to_string(r.verdict);
            row["transitions"] = r.transition_count;
            row["detuning_count"] = r.detuning_count;
            row["detunings"] = r.detunings;
            j.push_back(row);
        }
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << std::left << std::setw(14) << "pattern" << std::setw(11) << "name" << std::setw(32) << "verdict"
       << std::setw(12) << "transitions" << std::setw(10) << "detunings" << "expressions\n";
    for (const auto& r : records) {
        std::string exprs;
        for (const auto& d : r.detunings) exprs += (exprs.empty() ? "" : "; ") + d;
        if (r.transition_count == 0) exprs = "no-transitions";
        os << std::left << std::setw(14) << r.pattern.str() << std::setw(11) << r.name.value_or("-") << std::setw(32)
           << to_string(r.verdict) << std::setw(12) << r.transition_count << std::setw(10) << r.detuning_count << exprs
           << "\n";
    }
    return os.str();
}

/// Population traces, one row per recorded time, one column per level.
inline std::string render_trace(const PropagationResult& r) {
    std::ostringstream os;
    os << "t";
    const std::size_t n = r.states.empty() ? 0 : r.states.front().size();
    for (std::size_t i = 1; i <= n; ++i) os << " p" << i;
    os << "\n" << std::setprecision(10);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        os << r.times[k];
        for (double p : r.states[k].populations()) os << " " << p;
        os << "\n";
    }
    return os.str();
}

}  // namespace rwaframe
