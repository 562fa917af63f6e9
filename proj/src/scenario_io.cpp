// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/scenario_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "fbmcmimo/dft.hpp"
#include "fbmcmimo/errors.hpp"

namespace fbmcmimo {

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
    bool consumed = false;
};

using SectionMap = std::map<std::string, std::map<std::string, RawEntry>>;

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& where, const std::string& what, int line = 0) {
    std::string msg = where.empty() ? what : where + ": " + what;
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    throw ParseError(msg);
}

SectionMap tokenize(const std::string& text) {
    static const std::vector<std::string> kSections = {"fbmc",          "channel", "array",
                                                       "contamination", "blind",   "run"};
    SectionMap sections;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail("", "malformed section header '" + t + "'", lineno);
            current = trim(t.substr(1, t.size() - 2));
            bool known = false;
            for (const std::string& s : kSections) known = known || s == current;
            if (!known) fail("", "unknown section [" + current + "]", lineno);
            sections[current];  // present even if empty
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) fail("", "expected key = value, got '" + t + "'", lineno);
        if (current.empty()) fail("", "key before any section header", lineno);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) fail("", "empty key", lineno);
        auto [it, inserted] = sections[current].emplace(key, RawEntry{value, lineno, false});
        if (!inserted) fail(current + "." + key, "duplicate key", lineno);
    }
    return sections;
}

class SectionReader {
public:
    SectionReader(SectionMap& sections, std::string name)
        : name_(std::move(name)), entries_(nullptr) {
        auto it = sections.find(name_);
        if (it != sections.end()) entries_ = &it->second;
    }

    std::optional<RawEntry*> find(const std::string& key) const {
        if (!entries_) return std::nullopt;
        auto it = entries_->find(key);
        if (it == entries_->end()) return std::nullopt;
        it->second.consumed = true;
        return &it->second;
    }

    std::string where(const std::string& key) const { return name_ + "." + key; }

    long long integer(const std::string& key, long long fallback) const {
        auto e = find(key);
        if (!e) return fallback;
        const std::string& v = (*e)->value;
        try {
            std::size_t pos = 0;
            const long long r = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return r;
        } catch (...) {
            fail(where(key), "expected an integer, got '" + v + "'", (*e)->line);
        }
    }

    double real(const std::string& key, double fallback) const {
        auto e = find(key);
        if (!e) return fallback;
        const std::string& v = (*e)->value;
        try {
            std::size_t pos = 0;
            const double r = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return r;
        } catch (...) {
            fail(where(key), "expected a number, got '" + v + "'", (*e)->line);
        }
    }

    bool boolean(const std::string& key, bool fallback) const {
        auto e = find(key);
        if (!e) return fallback;
        const std::string& v = (*e)->value;
        if (v == "true") return true;
        if (v == "false") return false;
        fail(where(key), "expected true or false, got '" + v + "'", (*e)->line);
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        auto e = find(key);
        if (!e) return fallback;
        return (*e)->value;
    }

    template <typename T, typename Fn>
    std::optional<std::vector<T>> list(const std::string& key, Fn parse_one) const {
        auto e = find(key);
        if (!e) return std::nullopt;
        std::vector<T> out;
        std::stringstream ss((*e)->value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string v = trim(item);
            try {
                out.push_back(parse_one(v));
            } catch (...) {
                fail(where(key), "bad list element '" + v + "'", (*e)->line);
            }
        }
        if (out.empty()) fail(where(key), "empty list", (*e)->line);
        return out;
    }

    bool has(const std::string& key) const {
        return entries_ && entries_->count(key) > 0;
    }

private:
    std::string name_;
    std::map<std::string, RawEntry>* entries_;
};

void reject_unconsumed(const SectionMap& sections) {
    for (const auto& [section, entries] : sections) {
        for (const auto& [key, entry] : entries) {
            if (!entry.consumed) {
                fail(section + "." + key, "unknown key", entry.line);
            }
        }
    }
}

int parse_int_strict(const std::string& v) {
    std::size_t pos = 0;
    const int r = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
}

double parse_double_strict(const std::string& v) {
    std::size_t pos = 0;
    const double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
    SectionMap sections = tokenize(text);
    Scenario s;

    {
        SectionReader fbmc(sections, "fbmc");
        s.fbmc.num_subcarriers = static_cast<int>(fbmc.integer("L", 64));
        s.fbmc.overlap_factor = static_cast<int>(fbmc.integer("overlap", 4));
        s.fbmc.num_symbols = static_cast<int>(fbmc.integer("symbols", 64));
        s.fbmc.pam_order = static_cast<int>(fbmc.integer("pam_order", 2));
        if (!is_power_of_two(s.fbmc.num_subcarriers)) {
            fail(fbmc.where("L"), "L must be a power of two");
        }
        if (s.fbmc.overlap_factor != 3 && s.fbmc.overlap_factor != 4 &&
            s.fbmc.overlap_factor != 6) {
            fail(fbmc.where("overlap"), "overlap must be one of {3, 4, 6}");
        }
        if (s.fbmc.num_symbols < 2 * s.fbmc.overlap_factor) {
            fail(fbmc.where("symbols"), "symbols must be >= 2*overlap");
        }
        if (s.fbmc.pam_order != 2 && s.fbmc.pam_order != 4) {
            fail(fbmc.where("pam_order"), "pam_order must be 2 or 4");
        }
    }
    {
        SectionReader channel(sections, "channel");
        const std::string kind = channel.text("pdp", "exponential");
        if (kind == "exponential") {
            const int taps = static_cast<int>(channel.integer("taps", 8));
            const double decay = channel.real("decay", 4.0);
            if (taps < 1) fail(channel.where("taps"), "taps must be >= 1");
            if (!(decay > 0.0)) fail(channel.where("decay"), "decay must be positive");
            s.pdp = PowerDelayProfile::exponential(taps, decay);
            if (channel.has("delays") || channel.has("powers")) {
                fail("channel.delays", "delays/powers are only valid with pdp = custom");
            }
        } else if (kind == "flat") {
            s.pdp = PowerDelayProfile::flat();
            if (channel.has("taps") || channel.has("decay") || channel.has("delays") ||
                channel.has("powers")) {
                fail("channel.pdp", "flat pdp takes no extra keys");
            }
        } else if (kind == "custom") {
            auto delays = channel.list<int>("delays", parse_int_strict);
            auto powers = channel.list<double>("powers", parse_double_strict);
            if (!delays || !powers) {
                fail("channel.pdp", "custom pdp requires both delays and powers");
            }
            s.pdp.tap_delays = *delays;
            s.pdp.tap_powers = *powers;
            try {
                s.pdp.validate();
            } catch (const std::exception& e) {
                fail("channel.delays/powers", e.what());
            }
        } else {
            fail(channel.where("pdp"), "pdp must be exponential, flat or custom, got '" + kind + "'");
        }
    }
    {
        SectionReader array(sections, "array");
        s.num_antennas = static_cast<int>(array.integer("M", 128));
        s.num_users = static_cast<int>(array.integer("K", 6));
        if (s.num_antennas < 1) fail(array.where("M"), "M must be >= 1");
        if (s.num_users < 1) fail(array.where("K"), "K must be >= 1");
    }
    {
        SectionReader run(sections, "run");
        const std::string kind = run.text("experiment", "self_equalization");
        if (kind == "self_equalization") {
            s.experiment = ExperimentKind::self_equalization;
        } else if (kind == "blind_tracking") {
            s.experiment = ExperimentKind::blind_tracking;
        } else {
            fail(run.where("experiment"),
                 "experiment must be self_equalization or blind_tracking, got '" + kind + "'");
        }
        s.snr_in_db = run.real("snr_in_db", 0.0);
        s.trials = static_cast<int>(run.integer("trials", 100));
        const long long seed = run.integer("seed", 1);
        if (s.trials < 1) fail(run.where("trials"), "trials must be >= 1");
        if (seed < 0) fail(run.where("seed"), "seed must be nonnegative");
        s.seed = static_cast<std::uint64_t>(seed);
    }
    if (sections.count("contamination")) {
        SectionReader cont(sections, "contamination");
        ContaminationConfig c;
        c.num_cells = static_cast<int>(cont.integer("cells", 7));
        if (c.num_cells < 1) fail(cont.where("cells"), "cells must be >= 1");
        c.shared_pilots = cont.boolean("shared_pilots", true);
        auto gains = cont.list<double>("cross_gains", parse_double_strict);
        const double scalar = cont.real("cross_gain", 0.3);
        if (gains && cont.has("cross_gain")) {
            fail("contamination.cross_gain", "give either cross_gain or cross_gains, not both");
        }
        if (gains) {
            c.cross_gains = *gains;
        } else {
            c.cross_gains.assign(static_cast<std::size_t>(c.num_cells - 1), scalar);
        }
        try {
            c.validate();
        } catch (const std::exception& e) {
            fail("contamination", e.what());
        }
        s.contamination = c;
    }
    if (sections.count("blind")) {
        SectionReader blind(sections, "blind");
        BlindConfig b;
        b.step_size = blind.real("mu", 1e-3);
        b.iterations = static_cast<int>(blind.integer("iterations", 100));
        b.block_size = static_cast<int>(blind.integer("block_size", 32));
        b.dispersion_constant = blind.real("dispersion", 0.0);
        try {
            b.validate();
        } catch (const std::exception& e) {
            fail("blind", e.what());
        }
        s.blind = b;
    }

    reject_unconsumed(sections);

    try {
        s.validate();
    } catch (const std::exception& e) {
        throw ParseError(std::string("scenario is inconsistent: ") + e.what());
    }
    return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open scenario file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string canonical_scenario_text(const Scenario& s) {
    std::ostringstream out;
    out << "[fbmc]\n";
    out << "L = " << s.fbmc.num_subcarriers << "\n";
    out << "overlap = " << s.fbmc.overlap_factor << "\n";
    out << "symbols = " << s.fbmc.num_symbols << "\n";
    out << "pam_order = " << s.fbmc.pam_order << "\n";
    out << "\n[channel]\n";
    out << "pdp = custom\n";
    out << "delays = ";
    for (std::size_t i = 0; i < s.pdp.tap_delays.size(); ++i) {
        if (i) out << ",";
        out << s.pdp.tap_delays[i];
    }
    out << "\npowers = ";
    for (std::size_t i = 0; i < s.pdp.tap_powers.size(); ++i) {
        if (i) out << ",";
        out << fmt_double(s.pdp.tap_powers[i]);
    }
    out << "\n";
    out << "\n[array]\n";
    out << "M = " << s.num_antennas << "\n";
    out << "K = " << s.num_users << "\n";
    if (s.contamination) {
        out << "\n[contamination]\n";
        out << "cells = " << s.contamination->num_cells << "\n";
        out << "cross_gains = ";
        for (std::size_t i = 0; i < s.contamination->cross_gains.size(); ++i) {
            if (i) out << ",";
            out << fmt_double(s.contamination->cross_gains[i]);
        }
        out << "\n";
        out << "shared_pilots = " << (s.contamination->shared_pilots ? "true" : "false") << "\n";
    }
    if (s.blind) {
        out << "\n[blind]\n";
        out << "mu = " << fmt_double(s.blind->step_size) << "\n";
        out << "iterations = " << s.blind->iterations << "\n";
        out << "block_size = " << s.blind->block_size << "\n";
        out << "dispersion = " << fmt_double(s.blind->dispersion_constant) << "\n";
    }
    out << "\n[run]\n";
    out << "experiment = "
        << (s.experiment == ExperimentKind::self_equalization ? "self_equalization"
                                                              : "blind_tracking")
        << "\n";
    out << "snr_in_db = " << fmt_double(s.snr_in_db) << "\n";
    out << "trials = " << s.trials << "\n";
    out << "seed = " << s.seed << "\n";
    return out.str();
}

}  // namespace fbmcmimo
