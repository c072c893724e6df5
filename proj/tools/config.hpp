#pragma once

// YAML run configuration with line-numbered diagnostics and coefficient/profile builders.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spps/grid.hpp"

namespace cli {

using spps::cplx;
using spps::Grid;
using spps::SampledFunction;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A YAML mapping whose keys are checked against what the command actually reads.
class Section {
  public:
    Section(YAML::Node node, std::string file) : node_(std::move(node)), file_(std::move(file)) {
        if (!node_.IsMap()) fail(node_, "expected a mapping of keys");
    }

    bool has(const std::string& key) const { return node_[key].IsDefined() && !node_[key].IsNull(); }
    YAML::Node raw(const std::string& key) const {
        used_.insert(key);
        return node_[key];
    }

    template <class T>
    T get(const std::string& key, const T& fallback) const {
        used_.insert(key);
        if (!has(key)) return fallback;
        return as<T>(node_[key], key);
    }

    template <class T>
    T require(const std::string& key) const {
        used_.insert(key);
        if (!has(key)) fail(node_, "missing required key '" + key + "'");
        return as<T>(node_[key], key);
    }

    std::vector<double> numbers(const std::string& key) const {
        used_.insert(key);
        auto n = node_[key];
        if (!n.IsSequence()) fail(n, "'" + key + "' must be a list of numbers");
        std::vector<double> out;
        for (const auto& v : n) out.push_back(as<double>(v, key));
        return out;
    }

    // Rejects keys nobody asked for, which usually are typos.
    void finish() const {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!used_.count(key)) fail(kv.first, "unknown key '" + key + "'");
        }
    }

    [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
        const int line = at.Mark().line;
        if (file_.empty()) throw ConfigError(msg);
        throw ConfigError(file_ + (line >= 0 ? ":" + std::to_string(line + 1) : std::string()) + ": " + msg);
    }

    const std::string& file() const { return file_; }
    const YAML::Node& node() const { return node_; }

  private:
    template <class T>
    T as(const YAML::Node& n, const std::string& key) const {
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, "'" + key + "' has the wrong type");
        }
    }

    YAML::Node node_;
    std::string file_;
    mutable std::set<std::string> used_;
};

inline Section load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    try {
        return Section(YAML::Load(in), path);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
}

// Two-column numeric file (x, value); commas or whitespace, '#' comments.
struct Samples {
    std::vector<double> x, y;
};

inline Samples read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open sample file");
    Samples s;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ss(line);
        double a, b;
        if (!(ss >> a)) {
            if (line.find_first_not_of(' ') == std::string::npos || s.x.empty()) continue; // blank or header
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two numbers");
        }
        if (!(ss >> b)) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two numbers");
        if (!s.x.empty() && !(a > s.x.back())) throw ConfigError(path + ":" + std::to_string(lineno) + ": x must increase");
        s.x.push_back(a);
        s.y.push_back(b);
    }
    if (s.x.size() < 2) throw ConfigError(path + ": need at least two samples");
    return s;
}

// Piecewise-linear resampling; points outside the sampled range take the end values.
inline std::function<double(double)> interpolant(Samples s) {
    return [s = std::move(s)](double x) {
        if (x <= s.x.front()) return s.y.front();
        if (x >= s.x.back()) return s.y.back();
        auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
        const size_t i = static_cast<size_t>(it - s.x.begin());
        const double t = (x - s.x[i - 1]) / (s.x[i] - s.x[i - 1]);
        return (1 - t) * s.y[i - 1] + t * s.y[i];
    };
}

// Sample-file paths are taken relative to the config file.
inline std::string resolve(const Section& sec, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute() || sec.file().empty()) return p.string();
    return (std::filesystem::path(sec.file()).parent_path() / p).string();
}

inline bool is_file_spec(const std::string& s) { return s.rfind("file:", 0) == 0; }

// A coefficient given as a number, a polynomial coefficient list [c0, c1, ...] in x, or "file:path".
inline std::function<double(double)> coefficient(const Section& sec, const std::string& key, double fallback) {
    if (!sec.has(key)) {
        sec.raw(key);
        return [fallback](double) { return fallback; };
    }
    auto n = sec.raw(key);
    if (n.IsSequence()) {
        auto c = sec.numbers(key);
        return [c](double x) {
            double s = 0;
            for (size_t k = c.size(); k-- > 0;) s = s * x + c[k];
            return s;
        };
    }
    if (n.IsScalar()) {
        const auto text = n.as<std::string>();
        if (is_file_spec(text)) return interpolant(read_samples(resolve(sec, text.substr(5))));
        double v = sec.get<double>(key, 0.0);
        return [v](double) { return v; };
    }
    sec.fail(n, "'" + key + "' must be a number, a coefficient list or file:PATH");
}

// Inclusive "start:stop:step" in degrees, or a list.
inline std::vector<double> angle_list(const Section& sec, const std::string& key) {
    auto n = sec.raw(key);
    if (!n.IsDefined() || n.IsNull()) return {0.0};
    if (n.IsSequence()) return sec.numbers(key);
    const auto text = n.as<std::string>();
    double a, b, s;
    char c1, c2;
    std::istringstream ss(text);
    if (!(ss >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || !(s > 0) || b < a)
        sec.fail(n, "'" + key + "' must look like start:stop:step with step > 0");
    std::vector<double> out;
    const long count = std::lround(std::floor((b - a) / s + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(a + i * s);
    return out;
}

inline void check_knobs(const Section& sec, int m, int N) {
    auto at = [&](const char* key) { return sec.has(key) ? sec.raw(key) : sec.node(); };
    if (m < 8) sec.fail(at("m"), "m must be at least 8");
    if (N < 1 || N > 400) sec.fail(at("N"), "N must lie in [1, 400]");
}

} // namespace cli
