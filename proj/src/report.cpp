#include "gibbsgeo/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace gibbsgeo {

ResidualReport make_report(std::string check, double location, double value, double tolerance) {
    return {std::move(check), location, value, tolerance, std::abs(value) <= tolerance};
}

ResidualReport make_flag(std::string check, double location, bool holds) {
    return make_report(std::move(check), location, holds ? 0.0 : 1.0, 0.0);
}

bool all_pass(std::span<const ResidualReport> reports) {
    return std::all_of(reports.begin(), reports.end(), [](const ResidualReport& r) { return r.pass; });
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x + 0.0);  // no negative zero
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    }
    for (std::string_view h : header) cell(h);
    end_row();
}

CsvWriter& CsvWriter::cell(double x) { return cell(std::string_view(format_real(x))); }

CsvWriter& CsvWriter::cell(long long x) { return cell(std::string_view(fmt::format("{}", x))); }

CsvWriter& CsvWriter::cell(std::string_view text) {
    if (!first_) out_ << ',';
    out_ << text;
    first_ = false;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    first_ = true;
}

void write_residuals(const std::filesystem::path& path, std::span<const ResidualReport> reports) {
    CsvWriter csv(path, {"check", "location", "value", "tolerance", "pass"});
    for (const ResidualReport& r : reports) {
        csv.cell(r.check).cell(r.location).cell(r.value).cell(r.tolerance).cell(r.pass ? "true" : "false");
        csv.end_row();
    }
}

}  // namespace gibbsgeo
