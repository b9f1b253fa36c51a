#pragma once

// Flat sectioned key = value scenario files:
//
//   [guide]
//   omega_z_sq_hz2 = -9     # units live in the key name
//
// Every key must be declared in the command's schema; values not given
// fall back to the schema default.

#include <string>
#include <vector>

namespace solmz {

struct KeySpec {
    std::string key;            // "section.name"
    std::string default_value;  // empty means unset
    std::string help;
};

class Scenario {
public:
    explicit Scenario(std::vector<KeySpec> schema);

    void load_text(const std::string& text);
    void load_file(const std::string& path);
    // Override from the command line; unknown keys are rejected.
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;  // non-empty value
    const std::string& get(const std::string& key) const;
    double number(const std::string& key) const;
    long integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    // "1, 2, 3" or "lo:hi:step" (inclusive of hi within half a step)
    std::vector<double> list(const std::string& key) const;

    // All keys with resolved values, in schema order.
    std::string dump() const;

    const std::vector<KeySpec>& schema() const { return schema_; }

private:
    std::size_t index_of(const std::string& key) const;

    std::vector<KeySpec> schema_;
    std::vector<std::string> values_;
};

// Numeric list parser shared with CLI flags.
std::vector<double> parse_number_list(const std::string& text, const std::string& what);

} // namespace solmz
