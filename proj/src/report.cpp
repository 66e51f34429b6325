#include "eventstudy/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eventstudy/error.hpp"

namespace eventstudy {

OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    if (text == "markdown" || text == "md") return OutputFormat::Markdown;
    throw Error(ErrorKind::InvalidArgument,
                "unknown output format '" + std::string(text) + "' (expected csv|json|markdown)");
}

std::string_view to_string(OutputFormat format) noexcept {
    switch (format) {
        case OutputFormat::Csv: return "csv";
        case OutputFormat::Json: return "json";
        case OutputFormat::Markdown: return "markdown";
    }
    return "json";
}

std::string_view file_extension(OutputFormat format) noexcept {
    switch (format) {
        case OutputFormat::Csv: return ".csv";
        case OutputFormat::Json: return ".json";
        case OutputFormat::Markdown: return ".md";
    }
    return ".json";
}

std::string format_estimate(double value, MinusStyle minus) {
    if (value == 0.0) value = 0.0;  // drop the sign of negative zero
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    std::string out = buf;
    if (minus == MinusStyle::Typographic && !out.empty() && out.front() == '-') {
        out.replace(0, 1, "−");
    }
    return out;
}

std::string format_p_value(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "p-value " + std::to_string(p) + " is outside [0, 1]");
    }
    if (p < 0.0001) return "0.0000";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.4f", p);
    return buf;
}

std::string render_coefficient_cell(double estimate, double p, MinusStyle minus) {
    return format_estimate(estimate, minus) + significance_stars(p) + " (" + format_p_value(p) + ")";
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::vector<std::string> regressor_rows(const CoefficientTable& table) {
    if (table.columns.empty()) throw Error(ErrorKind::InvalidArgument, "table has no columns");
    std::vector<std::string> rows;
    for (const auto& e : table.columns.front().result.estimates) rows.push_back(e.name);
    for (const auto& col : table.columns) {
        const auto& est = col.result.estimates;
        bool same = est.size() == rows.size();
        for (std::size_t i = 0; same && i < rows.size(); ++i) same = est[i].name == rows[i];
        if (!same) {
            throw Error(ErrorKind::InvalidArgument,
                        "ragged table: column '" + col.label + "' has different regressors", table.title);
        }
    }
    return rows;
}

// Numbers in JSON carry exactly the printed precision.
double printed(const std::string& text) { return std::stod(text); }

std::string render_markdown(const CoefficientTable& table, const std::vector<std::string>& rows) {
    std::ostringstream os;
    if (!table.title.empty()) os << "### " << table.title << "\n\n";
    os << "|  |";
    for (const auto& c : table.columns) os << ' ' << c.label << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << "---:|";
    os << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << "| *" << rows[r] << "* |";
        for (const auto& c : table.columns) {
            const auto& e = c.result.estimates[r];
            os << ' ' << render_coefficient_cell(e.estimate, e.p_value, MinusStyle::Typographic) << " |";
        }
        os << '\n';
    }
    os << "| Adjusted R² |";
    for (const auto& c : table.columns) os << ' ' << format_estimate(c.result.adjusted_r2, MinusStyle::Typographic) << " |";
    os << '\n';
    return os.str();
}

std::string render_csv(const CoefficientTable& table, const std::vector<std::string>& rows) {
    std::ostringstream os;
    os << "table,row,column,estimate,stars,p_value\n";
    const std::string title = csv_field(table.title);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& c : table.columns) {
            const auto& e = c.result.estimates[r];
            os << title << ',' << csv_field(rows[r]) << ',' << csv_field(c.label) << ','
               << format_estimate(e.estimate) << ',' << significance_stars(e.p_value) << ','
               << format_p_value(e.p_value) << '\n';
        }
    }
    for (const auto& c : table.columns) {
        os << title << ',' << kAdjustedR2Row << ',' << csv_field(c.label) << ','
           << format_estimate(c.result.adjusted_r2) << ",,\n";
    }
    return os.str();
}

std::string render_json(const CoefficientTable& table, const std::vector<std::string>& rows) {
    nlohmann::json j;
    j["title"] = table.title;
    nlohmann::json columns = nlohmann::json::array();
    for (const auto& c : table.columns) columns.push_back(c.label);
    j["columns"] = columns;
    nlohmann::json body = nlohmann::json::array();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : table.columns) {
            const auto& e = c.result.estimates[r];
            cells.push_back({{"estimate", printed(format_estimate(e.estimate))},
                             {"stars", significance_stars(e.p_value)},
                             {"p_value", printed(format_p_value(e.p_value))}});
        }
        body.push_back({{"row", rows[r]}, {"cells", cells}});
    }
    nlohmann::json r2 = nlohmann::json::array();
    for (const auto& c : table.columns) r2.push_back({{"estimate", printed(format_estimate(c.result.adjusted_r2))}});
    body.push_back({{"row", kAdjustedR2Row}, {"cells", r2}});
    j["rows"] = body;
    return j.dump(2) + "\n";
}

}  // namespace

std::string render_table(const CoefficientTable& table, OutputFormat format) {
    const auto rows = regressor_rows(table);
    switch (format) {
        case OutputFormat::Markdown: return render_markdown(table, rows);
        case OutputFormat::Csv: return render_csv(table, rows);
        case OutputFormat::Json: return render_json(table, rows);
    }
    return {};
}

}  // namespace eventstudy
