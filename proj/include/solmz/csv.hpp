#pragma once

// CSV in and out. Every written file starts with "# solmz-csv v1 <kind>"
// followed by a mandatory header row. Readers skip '#' lines.

#include <fstream>
#include <string>
#include <vector>

namespace solmz {

// Shortest-form round-trippable decimal, '.' separator.
std::string format_number(double v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& kind,
              const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void close();
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::size_t columns_;
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<int> lines;  // source line of each row

    std::vector<double> column(std::size_t i) const;
};

// Numeric table with a header row. expected_columns = 0 accepts any width
// as long as every row matches the header. Errors carry the line number.
CsvTable parse_csv(const std::string& text, std::size_t expected_columns = 0);
CsvTable read_csv(const std::string& path, std::size_t expected_columns = 0);

} // namespace solmz
