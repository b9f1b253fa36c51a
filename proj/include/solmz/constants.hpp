#pragma once

// Physical constants, species data and the two scale helpers every other
// module builds on. Everything is SI: lengths in m, masses in kg, angular
// frequencies in rad/s, magnetic moments in J/T.

#include <map>
#include <string>

namespace solmz {

inline constexpr double pi = 3.14159265358979323846;

// Compiled-in CODATA values rounded to 6 significant figures.
struct Constants {
    double hbar = 1.05457e-34;   // J s
    double mu_B = 9.27401e-24;   // J/T
    double a0 = 5.29177e-11;     // m
    double h = 6.62607e-34;      // J s
    double amu = 1.66054e-27;    // kg

    bool operator==(const Constants&) const = default;
};

// Process-wide default set. Immutable.
const Constants& constants();

inline constexpr double gauss = 1e-4;      // T per G
inline constexpr double micron = 1e-6;     // m per um
inline constexpr double millisecond = 1e-3;

// Signed Landé factor keyed by hyperfine F.
struct Species {
    std::string label;
    double mass = 0.0;
    std::map<int, double> g_F;

    double g_factor(int F) const;
    bool operator==(const Species&) const = default;
};

// gF(85Rb, F=2) = -1/3 and gF(87Rb, F=1) = -1/2 follow the usual sign
// convention g_F ~ g_J [F(F+1) - I(I+1) + J(J+1)] / 2F(F+1) with g_J > 0.
const Species& rb85();
const Species& rb87();

struct TrapGeometry {
    double omega_r = 0.0;     // radial, > 0
    double omega_z_sq = 0.0;  // axial, signed; < 0 is expulsive

    bool expulsive() const { return omega_z_sq < 0.0; }
};

TrapGeometry make_trap(double omega_r, double omega_z_sq);

// sqrt(hbar / (m omega)).
double harmonic_length(double mass, double omega);

// N a sqrt(m omega_r / hbar); sign follows a.
double interaction_parameter(double atom_number, double scattering_length, double mass,
                             double omega_r);

// key = value lines; doubles are written in hexadecimal floating point so a
// read-back is bit-exact.
std::string serialize(const Constants& c);
Constants deserialize_constants(const std::string& text);
std::string serialize(const Species& s);
Species deserialize_species(const std::string& text);

} // namespace solmz
