#include "fpme/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace fpme {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError("key '" + key + "': expected a real number, got '" + text + "'");
    }
    return value;
}

int parse_int(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    int value = 0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
    }
    return value;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    return parts;
}

}  // namespace

std::vector<double> InitialData::sample(const Grid& grid) const {
    std::vector<double> f(static_cast<std::size_t>(grid.I()) + 1);
    if (profile) {
        for (int i = 0; i <= grid.I(); ++i) f[i] = profile(grid.x(i));
    } else {
        if (samples.size() != f.size()) {
            throw ConfigError("initial data '" + name + "' has " + std::to_string(samples.size()) +
                              " samples but the mesh has " + std::to_string(f.size()) + " trace nodes");
        }
        f = samples;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]) || f[i] < 0.0) {
            throw DomainError("initial data must be finite and nonnegative (node i = " + std::to_string(i) + ")");
        }
    }
    return f;
}

InitialData InitialData::gaussian(double amplitude, double width) {
    if (!(amplitude >= 0.0) || !(width > 0.0)) throw ConfigError("gaussian needs amplitude >= 0 and width > 0");
    InitialData d;
    d.name = "gaussian";
    d.profile = [=](double x) { return amplitude * std::exp(-(x / width) * (x / width)); };
    d.fourier = [=](double xi) {
        const double s = width * xi;
        return amplitude * width * std::sqrt(std::numbers::pi) * std::exp(-0.25 * s * s);
    };
    return d;
}

InitialData InitialData::bump(double amplitude, double center, double width) {
    if (!(amplitude >= 0.0) || !(width > 0.0)) throw ConfigError("bump needs amplitude >= 0 and width > 0");
    InitialData d;
    d.name = "bump";
    d.profile = [=](double x) {
        const double z = (x - center) / width;
        const double s = 1.0 - z * z;
        return s > 0.0 ? amplitude * s * s : 0.0;
    };
    return d;
}

InitialData InitialData::constant(double value) {
    if (!(value >= 0.0)) throw ConfigError("constant initial data must be >= 0");
    InitialData d;
    d.name = "constant";
    d.profile = [=](double) { return value; };
    return d;
}

InitialData InitialData::zero() {
    InitialData d;
    d.name = "zero";
    d.profile = [](double) { return 0.0; };
    d.fourier = [](double) { return 0.0; };
    return d;
}

InitialData InitialData::from_samples(std::vector<double> values) {
    InitialData d;
    d.name = "samples";
    d.samples = std::move(values);
    return d;
}

InitialData InitialData::parse(const std::string& spec) {
    const std::string s = trim(spec);
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : s.substr(colon + 1);
    const auto args = [&](char sep) {
        std::vector<double> v;
        if (rest.empty()) return v;
        for (const auto& p : split(rest, sep)) v.push_back(parse_double(p, "initial_data"));
        return v;
    };

    if (kind == "zero" && rest.empty()) return zero();
    if (kind == "gaussian") {
        const auto a = args(':');
        if (a.empty()) return gaussian();
        if (a.size() == 2) return gaussian(a[0], a[1]);
    } else if (kind == "bump") {
        const auto a = args(':');
        if (a.empty()) return bump();
        if (a.size() == 3) return bump(a[0], a[1], a[2]);
    } else if (kind == "constant") {
        const auto a = args(':');
        if (a.size() == 1) return constant(a[0]);
    } else if (kind == "samples") {
        auto a = args(',');
        if (!a.empty()) return from_samples(std::move(a));
    }
    throw ConfigError("unrecognized initial_data '" + spec + "'");
}

RunConfig parse_config(std::istream& in) {
    static const std::set<std::string> known = {"sigma", "m", "X", "Y", "T", "I", "K", "J",
                                                "c", "d", "cfl_safety", "initial_data"};
    static const std::set<std::string> required = {"sigma", "m", "X", "Y", "T", "I", "K", "J", "initial_data"};

    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (!entries.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    for (const auto& key : required) {
        if (!entries.count(key)) throw ConfigError("missing required key '" + key + "'");
    }

    RunConfig run;
    SolverConfig& c = run.solver;
    c.sigma = parse_double(entries["sigma"], "sigma");
    c.m = parse_double(entries["m"], "m");
    c.half_width = parse_double(entries["X"], "X");
    c.height = parse_double(entries["Y"], "Y");
    c.horizon = parse_double(entries["T"], "T");
    c.I = parse_int(entries["I"], "I");
    c.K = parse_int(entries["K"], "K");
    c.J = parse_int(entries["J"], "J");
    if (entries.count("c")) c.c = parse_int(entries["c"], "c");
    if (entries.count("d")) c.d = parse_int(entries["d"], "d");
    if (entries.count("cfl_safety")) c.cfl_safety = parse_double(entries["cfl_safety"], "cfl_safety");
    c.validate();
    run.data = InitialData::parse(entries["initial_data"]);
    return run;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    return parse_config(in);
}

}  // namespace fpme
