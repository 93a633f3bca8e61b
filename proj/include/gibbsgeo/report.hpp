#pragma once

// Residual records and deterministic CSV output.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gibbsgeo {

struct ResidualReport {
    std::string check;
    double location = 0.0;  // T or tau
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// pass is |value| <= tolerance; NaN never passes.
ResidualReport make_report(std::string check, double location, double value, double tolerance);

/// Boolean check recorded as a residual of 0 (holds) or 1 (fails) against tolerance 0.
ResidualReport make_flag(std::string check, double location, bool holds);

bool all_pass(std::span<const ResidualReport> reports);

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_real(double x);

class CsvWriter {
public:
    /// Opens (truncating) the file and writes the header row.
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    CsvWriter& cell(std::string_view text);
    void end_row();

private:
    std::ofstream out_;
    bool first_ = true;
};

void write_residuals(const std::filesystem::path& path, std::span<const ResidualReport> reports);

}  // namespace gibbsgeo
