// Flat key=value experiment configuration: UTF-8 text, '#' comments, one
// key per line, arrays comma-separated.  Typed accessors validate and throw
// invalid_argument_error so the CLI can map malformed input to exit code 2.
#pragma once

#include "common.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace szk {

struct ConfigKeyDoc {
    const char* key;
    const char* doc;
};

// the full key set understood by the experiment drivers; unknown keys are
// rejected so typos fail loudly
inline const std::vector<ConfigKeyDoc>& config_key_docs() {
    static const std::vector<ConfigKeyDoc> docs = {
        {"model", "shorthand preset: s3 | s5 | w12 | w123 (sets n/weights/metric)"},
        {"manifold", "manifold family; only 'weighted_sphere' is available"},
        {"n", "CR dimension n (1..3); the sphere sits in C^{n+1}"},
        {"weights", "comma-separated positive integer weights, length n+1, gcd 1"},
        {"metric", "metric preset: levi | ambient-round"},
        {"points", "point set: stratum | grid:LO:HI:COUNT | random:COUNT | "
                   "explicit:RE IM RE IM[;...] (one ambient point per ';' group)"},
        {"m_range", "Fourier index range LO:STEP:HI (inclusive)"},
        {"N", "number of expansion terms kept (1..3)"},
        {"delta", "angular window half-width for the uniform stratum gap"},
        {"seed", "RNG seed for random point sets"},
        {"csv", "output CSV path ('-' = stdout)"},
        {"svg", "output SVG plot path (optional)"},
        {"p", "circle-average demo: integer weight of the action"},
        {"z", "circle-average demo: point, RE:IM pairs comma-separated"},
        {"quad_order", "trapezoid sample count override (0 = automatic)"},
        {"tol", "pass/fail tolerance override for the driver (0 = default)"},
    };
    return docs;
}

class Config {
  public:
    Config() = default;

    static Config from_text(const std::string& text) {
        Config c;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            s = trim(s);
            if (s.empty())
                continue;
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw invalid_argument_error("config line " + std::to_string(lineno) +
                                             ": expected key=value, got '" + s + "'");
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty())
                throw invalid_argument_error("config line " + std::to_string(lineno) +
                                             ": empty key");
            c.set(key, val);
        }
        return c;
    }

    static Config from_file(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw invalid_argument_error("cannot read config file: " + path);
        std::ostringstream buf;
        buf << f.rdbuf();
        return from_text(buf.str());
    }

    void set(const std::string& key, const std::string& value) {
        if (!known_keys().count(key))
            throw invalid_argument_error("unknown config key: " + key);
        kv_[key] = value;
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? dflt : it->second;
    }

    long long get_int(const std::string& key, long long dflt) const {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return dflt;
        return parse_int(it->second, key);
    }

    double get_double(const std::string& key, double dflt) const {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return dflt;
        return parse_double(it->second, key);
    }

    std::vector<long long> get_int_list(const std::string& key,
                                        const std::vector<long long>& dflt) const {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return dflt;
        std::vector<long long> out;
        for (const auto& piece : split(it->second, ','))
            out.push_back(parse_int(trim(piece), key));
        return out;
    }

    // "LO:STEP:HI" -> inclusive arithmetic progression; "V" -> {V}
    std::vector<long long> get_range(const std::string& key,
                                     const std::vector<long long>& dflt) const {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return dflt;
        auto parts = split(it->second, ':');
        if (parts.size() == 1)
            return {parse_int(trim(parts[0]), key)};
        if (parts.size() != 3)
            throw invalid_argument_error("config key '" + key + "': expected LO:STEP:HI, got '" +
                                         it->second + "'");
        long long lo = parse_int(trim(parts[0]), key);
        long long step = parse_int(trim(parts[1]), key);
        long long hi = parse_int(trim(parts[2]), key);
        if (step <= 0)
            throw invalid_argument_error("config key '" + key + "': step must be positive");
        std::vector<long long> out;
        for (long long m = lo; m <= hi; m += step)
            out.push_back(m);
        if (out.empty())
            throw invalid_argument_error("config key '" + key + "': empty range");
        return out;
    }

    // "RE:IM,RE:IM,..." -> complex vector (":IM" optional, defaults to 0)
    std::vector<cplx> get_cplx_list(const std::string& key, const std::vector<cplx>& dflt) const {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return dflt;
        std::vector<cplx> out;
        for (const auto& piece : split(it->second, ',')) {
            auto parts = split(piece, ':');
            if (parts.empty() || parts.size() > 2)
                throw invalid_argument_error("config key '" + key + "': expected RE:IM pairs");
            double re = parse_double(trim(parts[0]), key);
            double im = parts.size() == 2 ? parse_double(trim(parts[1]), key) : 0.0;
            out.emplace_back(re, im);
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return kv_; }

    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos)
            return "";
        std::size_t b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == sep) {
                out.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        out.push_back(cur);
        return out;
    }

  private:
    static std::string strip_comment(const std::string& s) {
        auto h = s.find('#');
        return h == std::string::npos ? s : s.substr(0, h);
    }

    static const std::set<std::string>& known_keys() {
        static const std::set<std::string> keys = [] {
            std::set<std::string> k;
            for (const auto& d : config_key_docs())
                k.insert(d.key);
            return k;
        }();
        return keys;
    }

    static long long parse_int(const std::string& s, const std::string& key) {
        try {
            std::size_t pos = 0;
            long long v = std::stoll(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw invalid_argument_error("config key '" + key + "': expected integer, got '" + s +
                                         "'");
        }
    }

    static double parse_double(const std::string& s, const std::string& key) {
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw invalid_argument_error("config key '" + key + "': expected number, got '" + s +
                                         "'");
        }
    }

    std::map<std::string, std::string> kv_;
};

} // namespace szk
