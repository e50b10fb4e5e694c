#include "ridge/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ridge/error.hpp"

namespace ridge {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& raw, std::size_t line_no, std::size_t col) {
    const std::string field = trim(raw);
    const std::string where = "line " + std::to_string(line_no) + ", column " + std::to_string(col + 1);
    if (field.empty()) throw Error("empty field at " + where + " (missing values are not supported)");
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (*first == '+') ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
    if (ec == std::errc::result_out_of_range) throw Error("value '" + field + "' overflows a double at " + where);
    if (ec != std::errc() || ptr != last) throw Error("cannot parse '" + field + "' as a real number at " + where);
    if (!std::isfinite(value)) throw Error("non-finite value '" + field + "' at " + where);
    return value;
}

}  // namespace

CsvTable read_csv_table(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CSV file '" + path.string() + "'");

    CsvTable table;
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    std::string line;
    bool header_pending = has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (header_pending) {
            if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) fields[0].erase(0, 3);
            for (auto& f : fields) table.header.push_back(trim(f));
            width = fields.size();
            header_pending = false;
            continue;
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width) {
            throw Error("ragged row at line " + std::to_string(line_no) + ": " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(width));
        }
        for (std::size_t c = 0; c < width; ++c) values.push_back(parse_real(fields[c], line_no, c));
        ++rows;
    }
    if (width == 0) throw Error("CSV file '" + path.string() + "' is empty");
    if (table.header.empty()) {
        for (std::size_t c = 0; c < width; ++c) table.header.push_back("x" + std::to_string(c + 1));
    }
    table.values = Matrix(rows, width, std::move(values));
    return table;
}

namespace {

std::size_t resolve_column(const CsvTable& table, const ColumnRef& ref) {
    if (const auto* idx = std::get_if<std::size_t>(&ref)) {
        if (*idx >= table.header.size()) {
            throw Error("response column index " + std::to_string(*idx) + " out of range (file has " +
                        std::to_string(table.header.size()) + " columns)");
        }
        return *idx;
    }
    const auto& name = std::get<std::string>(ref);
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (table.header[c] == name) return c;
    std::string available;
    for (const auto& h : table.header) available += (available.empty() ? "" : ", ") + h;
    throw Error("response column '" + name + "' not found; available columns: " + available);
}

void check_shape(std::size_t n, std::size_t p) {
    if (n < 2) throw Error("dataset needs at least 2 observations, found " + std::to_string(n));
    if (p < 1) throw Error("dataset needs at least 1 predictor column");
}

}  // namespace

Dataset read_csv(const std::filesystem::path& path, bool has_header, const ColumnRef& response_column) {
    const CsvTable table = read_csv_table(path, has_header);
    const std::size_t target = resolve_column(table, response_column);
    const std::size_t n = table.values.rows();
    const std::size_t p = table.values.cols() - 1;
    check_shape(n, p);

    Dataset data{Matrix(n, p), Vector(n), {}};
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (c != target) data.feature_names.push_back(table.header[c]);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (std::size_t c = 0; c < table.values.cols(); ++c) {
            if (c == target)
                data.y[i] = table.values(i, c);
            else
                data.x(i, k++) = table.values(i, c);
        }
    }
    return data;
}

Dataset read_design_csv(const std::filesystem::path& path, bool has_header) {
    CsvTable table = read_csv_table(path, has_header);
    check_shape(table.values.rows(), table.values.cols());
    const std::size_t n = table.values.rows();
    return Dataset{std::move(table.values), Vector(n), std::move(table.header)};
}

std::pair<Dataset, Standardizer> standardize(const Dataset& data, bool center, bool scale) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    Standardizer s{Vector(p, 0.0), Vector(p, 1.0), 0.0, center, scale};
    Dataset out = data;

    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += data.x(i, j);
        mean /= static_cast<double>(n);
        if (scale) {
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dev = data.x(i, j) - mean;
                ss += dev * dev;
            }
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            if (!(sd > 0.0)) throw Error("column '" + data.feature_names[j] + "' is constant and cannot be scaled");
            s.x_scales[j] = sd;
        }
        if (center) s.x_means[j] = mean;
        for (std::size_t i = 0; i < n; ++i) out.x(i, j) = (data.x(i, j) - s.x_means[j]) / s.x_scales[j];
    }
    if (center) {
        double ym = 0.0;
        for (std::size_t i = 0; i < n; ++i) ym += data.y[i];
        s.y_mean = ym / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) out.y[i] = data.y[i] - s.y_mean;
    }
    return {std::move(out), std::move(s)};
}

OriginalScaleCoefficients destandardize_coefficients(const Vector& beta_std, const Standardizer& s) {
    if (beta_std.size() != s.x_scales.size()) {
        throw Error("destandardize_coefficients: beta has length " + std::to_string(beta_std.size()) +
                    " but the standardizer has " + std::to_string(s.x_scales.size()) + " columns");
    }
    OriginalScaleCoefficients out{Vector(beta_std.size()), s.y_mean};
    for (std::size_t j = 0; j < beta_std.size(); ++j) {
        out.beta[j] = beta_std[j] / s.x_scales[j];
        out.intercept -= s.x_means[j] * out.beta[j];
    }
    return out;
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& rows) {
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        for (std::size_t c = 0; c < rows.cols(); ++c) out << (c ? "," : "") << format_full(rows(i, c));
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const Matrix& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_csv(out, header, rows);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace ridge
