#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dualmem/equivalence.hpp"
#include "dualmem/errors.hpp"
#include "dualmem/gridsim.hpp"
#include "dualmem/memory.hpp"
#include "dualmem/rational.hpp"

namespace dualmem {

/**
 * Run configuration, four sections of key = value lines. Every key has a
 * default, unknown sections or keys are rejected, and serialize() emits a
 * canonical form that parses back to the same value byte for byte.
 */
struct RunConfig {
    // [grid]
    int rows = 3;
    int cols = 3;
    double arrival_rate = 0.3;
    int discharge = 2;
    std::vector<std::int64_t> bins{1, 3};
    std::vector<std::vector<int>> phases{{kNorth}, {kEast}, {kSouth}, {kWest}};
    std::int64_t steps = 5000;
    std::uint64_t seed = 0;

    // [agent]
    double epsilon = 0.1;
    double alpha = 0.1;
    double gamma = 0.95;
    std::string symmetry = "dihedral";  // dihedral | identity

    // [memory]
    Rational kappa = Rational(1);
    std::int64_t t_stage = 4;

    // [analysis]
    std::int64_t n_max = 50;

    bool operator==(const RunConfig&) const = default;

    ActionSpace action_space() const {
        ActionSpace space;
        for (const auto& serves : phases) {
            Phase p;
            p.serves = serves;
            for (std::size_t i = 0; i < serves.size(); ++i) {
                if (i) p.name += '+';
                p.name += "NESW"[serves[i] & 3];
            }
            space.phases.push_back(std::move(p));
        }
        return space;
    }

    SymmetryGroup symmetry_group() const {
        if (symmetry == "identity") return SymmetryGroup::identity(static_cast<int>(phases.size()));
        if (symmetry == "dihedral") return SymmetryGroup::dihedral(action_space().approach_sets());
        throw SchemaError("unknown symmetry '" + symmetry + "' (expected dihedral or identity)");
    }

    HyperParams hyper_params() const {
        HyperParams hp;
        hp.action_count = static_cast<int>(phases.size());
        hp.kappa = kappa;
        hp.t_stage = t_stage;
        hp.alpha = alpha;
        hp.gamma = gamma;
        hp.epsilon = epsilon;
        return hp;
    }

    GridNetwork network() const {
        return make_network(rows, cols, arrival_rate, discharge, bins, action_space());
    }
};

namespace detail {

inline std::string format_config_double(double v) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw SchemaError("unrepresentable numeric value");
    return std::string(buf.data(), end);
}

inline std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(part);
            part.clear();
        } else {
            part.push_back(ch);
        }
    }
    parts.push_back(part);
    return parts;
}

inline std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
    while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t')) --end;
    return std::string(text.substr(begin, end - begin));
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw SchemaError("bad value for " + key + ": '" + value + "'");
    return out;
}

inline std::vector<std::vector<int>> parse_phases(const std::string& value) {
    std::vector<std::vector<int>> phases;
    for (const std::string& phase_text : split(value, ',')) {
        std::vector<int> serves;
        for (const std::string& letter : split(phase_text, '+')) {
            const std::string t = trim(letter);
            if (t == "N") serves.push_back(kNorth);
            else if (t == "E") serves.push_back(kEast);
            else if (t == "S") serves.push_back(kSouth);
            else if (t == "W") serves.push_back(kWest);
            else throw SchemaError("bad approach '" + t + "' in phases (use N, E, S, W)");
        }
        phases.push_back(std::move(serves));
    }
    return phases;
}

inline std::string format_phases(const std::vector<std::vector<int>>& phases) {
    std::string out;
    for (std::size_t p = 0; p < phases.size(); ++p) {
        if (p) out += ',';
        for (std::size_t i = 0; i < phases[p].size(); ++i) {
            if (i) out += '+';
            out += "NESW"[phases[p][i] & 3];
        }
    }
    return out;
}

}  // namespace detail

inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[grid]\n";
    out << "rows = " << cfg.rows << "\n";
    out << "cols = " << cfg.cols << "\n";
    out << "arrival_rate = " << detail::format_config_double(cfg.arrival_rate) << "\n";
    out << "discharge = " << cfg.discharge << "\n";
    out << "bins = ";
    for (std::size_t i = 0; i < cfg.bins.size(); ++i) {
        if (i) out << ',';
        out << cfg.bins[i];
    }
    out << "\n";
    out << "phases = " << detail::format_phases(cfg.phases) << "\n";
    out << "steps = " << cfg.steps << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "\n[agent]\n";
    out << "epsilon = " << detail::format_config_double(cfg.epsilon) << "\n";
    out << "alpha = " << detail::format_config_double(cfg.alpha) << "\n";
    out << "gamma = " << detail::format_config_double(cfg.gamma) << "\n";
    out << "symmetry = " << cfg.symmetry << "\n";
    out << "\n[memory]\n";
    out << "kappa = " << format_rational(cfg.kappa) << "\n";
    out << "t_stage = " << cfg.t_stage << "\n";
    out << "\n[analysis]\n";
    out << "n_max = " << cfg.n_max << "\n";
    return out.str();
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::map<std::string, int> seen;
    int line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;

        if (trimmed.front() == '[') {
            if (trimmed.back() != ']')
                throw SchemaError("line " + std::to_string(line_no) + ": unterminated section");
            section = trimmed.substr(1, trimmed.size() - 2);
            if (section != "grid" && section != "agent" && section != "memory" &&
                section != "analysis")
                throw SchemaError("line " + std::to_string(line_no) + ": unknown section [" +
                                  section + "]");
            continue;
        }

        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw SchemaError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(trimmed.substr(0, eq));
        const std::string value = detail::trim(trimmed.substr(eq + 1));
        if (section.empty())
            throw SchemaError("line " + std::to_string(line_no) + ": key outside any section");
        const std::string qualified = section + "." + key;
        if (++seen[qualified] > 1)
            throw SchemaError("line " + std::to_string(line_no) + ": duplicate key " + qualified);

        try {
            if (qualified == "grid.rows") cfg.rows = detail::parse_number<int>(value, qualified);
            else if (qualified == "grid.cols") cfg.cols = detail::parse_number<int>(value, qualified);
            else if (qualified == "grid.arrival_rate")
                cfg.arrival_rate = detail::parse_number<double>(value, qualified);
            else if (qualified == "grid.discharge")
                cfg.discharge = detail::parse_number<int>(value, qualified);
            else if (qualified == "grid.bins") {
                cfg.bins.clear();
                for (const auto& part : detail::split(value, ','))
                    cfg.bins.push_back(
                        detail::parse_number<std::int64_t>(detail::trim(part), qualified));
            } else if (qualified == "grid.phases") {
                cfg.phases = detail::parse_phases(value);
            } else if (qualified == "grid.steps")
                cfg.steps = detail::parse_number<std::int64_t>(value, qualified);
            else if (qualified == "grid.seed")
                cfg.seed = detail::parse_number<std::uint64_t>(value, qualified);
            else if (qualified == "agent.epsilon")
                cfg.epsilon = detail::parse_number<double>(value, qualified);
            else if (qualified == "agent.alpha")
                cfg.alpha = detail::parse_number<double>(value, qualified);
            else if (qualified == "agent.gamma")
                cfg.gamma = detail::parse_number<double>(value, qualified);
            else if (qualified == "agent.symmetry") {
                if (value != "dihedral" && value != "identity")
                    throw SchemaError("bad value for agent.symmetry: '" + value + "'");
                cfg.symmetry = value;
            } else if (qualified == "memory.kappa")
                cfg.kappa = parse_rational(value);
            else if (qualified == "memory.t_stage")
                cfg.t_stage = detail::parse_number<std::int64_t>(value, qualified);
            else if (qualified == "analysis.n_max")
                cfg.n_max = detail::parse_number<std::int64_t>(value, qualified);
            else
                throw SchemaError("unknown key " + qualified);
        } catch (const std::invalid_argument& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

}  // namespace dualmem
