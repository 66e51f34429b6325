#include "eventstudy/error.hpp"

#include <sstream>

namespace eventstudy {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid_argument";
        case ErrorKind::Data: return "data";
        case ErrorKind::MissingData: return "missing_data";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string source)
    : std::runtime_error(message), kind_(kind), source_(std::move(source)) {}

namespace {

std::string summarize(const std::string& source, const std::vector<DataIssue>& issues) {
    std::ostringstream os;
    os << source << ": " << issues.size() << (issues.size() == 1 ? " problem" : " problems");
    for (const auto& issue : issues) {
        os << "\n  ";
        if (issue.row > 0) os << "row " << issue.row << ": ";
        os << issue.message;
    }
    return os.str();
}

std::string join_columns(const std::vector<std::string>& columns) {
    std::string out = "design matrix is rank deficient; dependent column(s):";
    for (const auto& c : columns) out += " " + c;
    return out;
}

}  // namespace

DataError::DataError(std::string source, std::vector<DataIssue> issues)
    : Error(ErrorKind::Data, summarize(source, issues), source), issues_(std::move(issues)) {}

RankDeficientError::RankDeficientError(std::vector<std::string> dependent_columns)
    : Error(ErrorKind::Numerical, join_columns(dependent_columns)), columns_(std::move(dependent_columns)) {}

}  // namespace eventstudy
