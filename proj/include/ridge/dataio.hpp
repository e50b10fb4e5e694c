#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ridge/linalg.hpp"

namespace ridge {

struct Dataset {
    Matrix x;  // n x p, original units
    Vector y;  // length n
    std::vector<std::string> feature_names;

    std::size_t n() const noexcept { return x.rows(); }
    std::size_t p() const noexcept { return x.cols(); }
};

struct Standardizer {
    Vector x_means;
    Vector x_scales;
    double y_mean = 0.0;
    bool centered = false;
    bool scaled = false;
};

// Column selector: header name or zero-based index.
using ColumnRef = std::variant<std::string, std::size_t>;

struct CsvTable {
    std::vector<std::string> header;  // synthesized as x1..xk when the file has none
    Matrix values;
};

CsvTable read_csv_table(const std::filesystem::path& path, bool has_header);

// Splits the response column off; the remaining columns form x in file order.
Dataset read_csv(const std::filesystem::path& path, bool has_header, const ColumnRef& response_column);

// Every column is a predictor; y is zero-filled. Used where only the design matters.
Dataset read_design_csv(const std::filesystem::path& path, bool has_header);

std::pair<Dataset, Standardizer> standardize(const Dataset& data, bool center, bool scale);

struct OriginalScaleCoefficients {
    Vector beta;
    double intercept = 0.0;
};

OriginalScaleCoefficients destandardize_coefficients(const Vector& beta_std, const Standardizer& s);

// 17 significant digits, enough to round-trip any double.
std::string format_full(double v);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& rows);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const Matrix& rows);

}  // namespace ridge
