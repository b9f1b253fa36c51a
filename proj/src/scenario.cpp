#include "solmz/scenario.hpp"

#include "solmz/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace solmz {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool to_double(const std::string& s, double& v) {
    const std::string t = trim(s);
    if (t.empty()) {
        return false;
    }
    const char* first = t.data() + (t.front() == '+' ? 1 : 0);
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(v);
}

} // namespace

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    std::vector<double> out;
    if (t.empty()) {
        return out;
    }
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::istringstream in(t);
        std::string p;
        while (std::getline(in, p, ':')) {
            parts.push_back(p);
        }
        double lo = 0, hi = 0, step = 0;
        if (parts.size() != 3 || !to_double(parts[0], lo) || !to_double(parts[1], hi) ||
            !to_double(parts[2], step)) {
            throw ConfigError(what + ": range must be lo:hi:step, got '" + t + "'");
        }
        if (!(step > 0.0) || hi < lo) {
            throw ConfigError(what + ": range needs step > 0 and hi >= lo");
        }
        const auto count = static_cast<long>(std::floor((hi - lo) / step + 0.5));
        if (count > 10000000) {
            throw ConfigError(what + ": range has too many points");
        }
        for (long i = 0; i <= count; ++i) {
            out.push_back(lo + step * static_cast<double>(i));
        }
        return out;
    }
    std::istringstream in(t);
    std::string item;
    while (std::getline(in, item, ',')) {
        double v = 0.0;
        if (!to_double(item, v)) {
            throw ConfigError(what + ": not a finite number: '" + trim(item) + "'");
        }
        out.push_back(v);
    }
    return out;
}

Scenario::Scenario(std::vector<KeySpec> schema) : schema_(std::move(schema)) {
    values_.reserve(schema_.size());
    for (const auto& k : schema_) {
        values_.push_back(k.default_value);
    }
}

std::size_t Scenario::index_of(const std::string& key) const {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].key == key) {
            return i;
        }
    }
    return schema_.size();
}

void Scenario::load_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::set<std::string> seen;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find_first_of("#;");
        std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        if (body.front() == '[') {
            if (body.back() != ']' || body.size() < 3) {
                throw ParseError("malformed section header '" + body + "'", number);
            }
            section = trim(body.substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected key = value, got '" + body + "'", number);
        }
        const std::string name = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (name.empty()) {
            throw ParseError("empty key", number);
        }
        const std::string key = section.empty() ? name : section + "." + name;
        const std::size_t i = index_of(key);
        if (i == schema_.size()) {
            throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            throw ParseError("duplicate key '" + key + "'", number);
        }
        values_[i] = value;
    }
}

void Scenario::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open scenario file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    load_text(ss.str());
}

void Scenario::set(const std::string& key, const std::string& value) {
    const std::size_t i = index_of(key);
    if (i == schema_.size()) {
        throw ConfigError("unknown key '" + key + "'");
    }
    values_[i] = trim(value);
}

bool Scenario::has(const std::string& key) const { return !get(key).empty(); }

const std::string& Scenario::get(const std::string& key) const {
    const std::size_t i = index_of(key);
    if (i == schema_.size()) {
        throw ConfigError("unknown key '" + key + "'");
    }
    return values_[i];
}

double Scenario::number(const std::string& key) const {
    double v = 0.0;
    if (!to_double(get(key), v)) {
        throw ConfigError(key + ": expected a finite number, got '" + get(key) + "'");
    }
    return v;
}

long Scenario::integer(const std::string& key) const {
    const std::string t = trim(get(key));
    long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key + ": expected an integer, got '" + t + "'");
    }
    return v;
}

bool Scenario::flag(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<double> Scenario::list(const std::string& key) const {
    return parse_number_list(get(key), key);
}

std::string Scenario::dump() const {
    std::string out;
    std::string section = "\x01";
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        const auto& key = schema_[i].key;
        const auto dot = key.find('.');
        const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (sec != section) {
            if (!out.empty()) {
                out += '\n';
            }
            if (!sec.empty()) {
                out += "[" + sec + "]\n";
            }
            section = sec;
        }
        out += name + " = " + values_[i] + '\n';
    }
    return out;
}

} // namespace solmz
