#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eventstudy/cross_section.hpp"

namespace eventstudy {

enum class OutputFormat { Csv, Json, Markdown };

OutputFormat parse_output_format(std::string_view text);
std::string_view to_string(OutputFormat format) noexcept;
std::string_view file_extension(OutputFormat format) noexcept;

/// Machine formats use '-', markdown uses U+2212.
enum class MinusStyle { Ascii, Typographic };

/// Up to six significant digits, trailing zeros dropped ("%.6g").
std::string format_estimate(double value, MinusStyle minus = MinusStyle::Ascii);
/// Four decimals; anything below 0.0001 prints as "0.0000".
std::string format_p_value(double p);

/// Estimate, stars, then the p-value in parentheses: "-0.18336* (0.0991)".
std::string render_coefficient_cell(double estimate, double p, MinusStyle minus = MinusStyle::Ascii);

struct TableColumn {
    std::string label;
    RegressionResult result;
};

/// Regressors (plus an adjusted R-squared row) down, columns across.
struct CoefficientTable {
    std::string title;
    std::vector<TableColumn> columns;
};

inline constexpr std::string_view kAdjustedR2Row = "Adjusted R2";

/// Throws if the columns do not share the same regressor rows. All three
/// backends print the same rounded numbers.
std::string render_table(const CoefficientTable& table, OutputFormat format);

/// Quotes a CSV field when it holds a delimiter, quote, or newline.
std::string csv_field(std::string_view text);

}  // namespace eventstudy
