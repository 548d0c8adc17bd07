#pragma once

// System-description files:
//
//   { "levels": [{"index": 1, "omega": 0.0, "parity": "even"}, ...],
//     "transitions": [{"a": 1, "b": 3, "rabi": {"re": 1.0, "im": 0.0}, "laser": 10.0}, ...] }
//
// Levels may appear in any order and are sorted by index. A transition listed
// with a > b is stored canonically (conjugated amplitude, negated laser).

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "core_model.hpp"

namespace rwaframe {

/// Unreadable file or malformed document.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
T field(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw FormatError(where + ": \"" + key + "\" has the wrong type");
    }
}

inline LevelIndex index_field(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto& v = obj.contains(key) ? obj.at(key) : nlohmann::json{};
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw FormatError(where + ": \"" + key + "\" must be a positive integer");
    return v.get<LevelIndex>();
}

}  // namespace detail

inline LevelSystem system_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw FormatError("system file: top level must be an object");
    if (!doc.contains("levels") || !doc.at("levels").is_array()) throw FormatError("system file: missing \"levels\" array");
    LevelSystem s;
    for (std::size_t i = 0; i < doc.at("levels").size(); ++i) {
        const auto& l = doc.at("levels")[i];
        const std::string where = "levels[" + std::to_string(i) + "]";
        Level level;
        level.index = detail::index_field(l, "index", where);
        level.omega = detail::field<double>(l, "omega", where);
        const auto parity = parse_parity(detail::field<std::string>(l, "parity", where));
        if (!parity) throw FormatError(where + ": parity must be \"even\" or \"odd\"");
        level.parity = *parity;
        s.levels.push_back(level);
    }
    std::stable_sort(s.levels.begin(), s.levels.end(), [](const Level& x, const Level& y) { return x.index < y.index; });

    if (doc.contains("transitions")) {
        if (!doc.at("transitions").is_array()) throw FormatError("system file: \"transitions\" must be an array");
        for (std::size_t i = 0; i < doc.at("transitions").size(); ++i) {
            const auto& t = doc.at("transitions")[i];
            const std::string where = "transitions[" + std::to_string(i) + "]";
            Transition tr;
            tr.a = detail::index_field(t, "a", where);
            tr.b = detail::index_field(t, "b", where);
            tr.laser = detail::field<double>(t, "laser", where);
            if (!t.contains("rabi")) throw FormatError(where + ": missing \"rabi\"");
            const auto& rabi = t.at("rabi");
            if (rabi.is_number()) {
                tr.rabi = {rabi.get<double>(), 0.0};
            } else {
                tr.rabi = {detail::field<double>(rabi, "re", where + ".rabi"),
                           rabi.contains("im") ? detail::field<double>(rabi, "im", where + ".rabi") : 0.0};
            }
            s.transitions.push_back(canonical(tr));
        }
    }
    return s;
}

inline nlohmann::json system_to_json(const LevelSystem& s) {
    nlohmann::json doc;
    doc["levels"] = nlohmann::json::array();
    for (const auto& l : s.levels)
        doc["levels"].push_back({{"index", l.index}, {"omega", l.omega}, {"parity", to_string(l.parity)}});
    doc["transitions"] = nlohmann::json::array();
    for (const auto& t : s.transitions)
        doc["transitions"].push_back(
            {{"a", t.a}, {"b", t.b}, {"rabi", {{"re", t.rabi.real()}, {"im", t.rabi.imag()}}}, {"laser", t.laser}});
    return doc;
}

inline LevelSystem parse_system(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("system file: ") + e.what());
    }
    return system_from_json(doc);
}

inline LevelSystem read_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open system file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system(buf.str());
}

inline std::string format_system(const LevelSystem& s) { return system_to_json(s).dump(2) + "\n"; }

inline void write_system_file(const LevelSystem& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write system file '" + path + "'");
    out << format_system(s);
}

}  // namespace rwaframe
