#include "solmz/constants.hpp"

#include "solmz/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace solmz {

const Constants& constants() {
    static const Constants c{};
    return c;
}

double Species::g_factor(int F) const {
    auto it = g_F.find(F);
    if (it == g_F.end()) {
        throw DomainError("no g_F for " + label + " F=" + std::to_string(F));
    }
    return it->second;
}

const Species& rb85() {
    static const Species s{"85Rb", 84.9118 * 1.66054e-27, {{2, -1.0 / 3.0}, {3, 1.0 / 3.0}}};
    return s;
}

const Species& rb87() {
    static const Species s{"87Rb", 86.9092 * 1.66054e-27, {{1, -0.5}, {2, 0.5}}};
    return s;
}

TrapGeometry make_trap(double omega_r, double omega_z_sq) {
    if (!(omega_r > 0.0) || !std::isfinite(omega_r)) {
        throw DomainError("omega_r must be positive");
    }
    if (!std::isfinite(omega_z_sq)) {
        throw DomainError("omega_z_sq must be finite");
    }
    return {omega_r, omega_z_sq};
}

double harmonic_length(double mass, double omega) {
    if (!(mass > 0.0) || !(omega > 0.0)) {
        throw DomainError("harmonic_length needs mass > 0 and omega > 0");
    }
    return std::sqrt(constants().hbar / (mass * omega));
}

double interaction_parameter(double atom_number, double scattering_length, double mass,
                             double omega_r) {
    if (!(atom_number > 0.0)) {
        throw DomainError("atom number must be positive");
    }
    return atom_number * scattering_length / harmonic_length(mass, omega_r);
}

namespace {

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex(const std::string& s) {
    double v = 0.0;
    // from_chars in hex mode does not accept the 0x prefix
    std::string body = s;
    bool neg = false;
    if (!body.empty() && body[0] == '-') {
        neg = true;
        body.erase(0, 1);
    }
    if (body.rfind("0x", 0) == 0) {
        body.erase(0, 2);
    }
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v,
                                     std::chars_format::hex);
    if (ec != std::errc{} || ptr != body.data() + body.size()) {
        throw ParseError("bad hex float '" + s + "'", 0);
    }
    return neg ? -v : v;
}

std::map<std::string, std::string> kv_lines(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected key=value", n);
        }
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        throw ParseError("missing key " + key, 0);
    }
    return it->second;
}

} // namespace

std::string serialize(const Constants& c) {
    return "hbar=" + hex(c.hbar) + "\nmu_B=" + hex(c.mu_B) + "\na0=" + hex(c.a0) +
           "\nh=" + hex(c.h) + "\namu=" + hex(c.amu) + "\n";
}

Constants deserialize_constants(const std::string& text) {
    auto kv = kv_lines(text);
    Constants c;
    c.hbar = parse_hex(need(kv, "hbar"));
    c.mu_B = parse_hex(need(kv, "mu_B"));
    c.a0 = parse_hex(need(kv, "a0"));
    c.h = parse_hex(need(kv, "h"));
    c.amu = parse_hex(need(kv, "amu"));
    return c;
}

std::string serialize(const Species& s) {
    std::string out = "label=" + s.label + "\nmass=" + hex(s.mass) + "\n";
    for (const auto& [F, g] : s.g_F) {
        out += "gF." + std::to_string(F) + "=" + hex(g) + "\n";
    }
    return out;
}

Species deserialize_species(const std::string& text) {
    auto kv = kv_lines(text);
    Species s;
    s.label = need(kv, "label");
    s.mass = parse_hex(need(kv, "mass"));
    for (const auto& [k, v] : kv) {
        if (k.rfind("gF.", 0) == 0) {
            s.g_F[std::stoi(k.substr(3))] = parse_hex(v);
        }
    }
    return s;
}

} // namespace solmz
