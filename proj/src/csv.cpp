#include "solmz/csv.hpp"

#include "solmz/error.hpp"

#include <charconv>
#include <cmath>
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

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        out.push_back(trim(field));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) {
        return false;
    }
    const char* first = s.data();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

std::string format_number(double v) {
    char buf[32];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        if (parse_double(buf, back) && back == v) {
            return buf;
        }
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& kind,
                     const std::vector<std::string>& header)
    : path_(path), columns_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw DomainError("cannot open " + path + " for writing");
    }
    out_ << "# solmz-csv v1 " << kind << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) {
        throw DomainError("CSV row has " + std::to_string(values.size()) + " fields, expected " +
                          std::to_string(columns_));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        out_ << (i ? "," : "") << format_number(values[i]);
    }
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (!out_) {
        throw DomainError("failed writing " + path_);
    }
}

std::vector<double> CsvTable::column(std::size_t i) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(r.at(i));
    }
    return out;
}

CsvTable parse_csv(const std::string& text, std::size_t expected_columns) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++number;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        auto fields = split_fields(body);
        if (!have_header) {
            double probe = 0.0;
            if (parse_double(fields.front(), probe)) {
                throw ParseError("missing header row", number);
            }
            if (expected_columns != 0 && fields.size() != expected_columns) {
                throw ParseError("expected " + std::to_string(expected_columns) +
                                     " columns, header has " + std::to_string(fields.size()),
                                 number);
            }
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw ParseError("expected " + std::to_string(t.header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             number);
        }
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!parse_double(fields[i], row[i]) || !std::isfinite(row[i])) {
                throw ParseError("not a finite number: '" + fields[i] + "'", number);
            }
        }
        t.rows.push_back(std::move(row));
        t.lines.push_back(number);
    }
    if (!have_header) {
        throw ParseError("empty CSV: header row missing", 0);
    }
    return t;
}

CsvTable read_csv(const std::string& path, std::size_t expected_columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path, 0);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), expected_columns);
}

} // namespace solmz
