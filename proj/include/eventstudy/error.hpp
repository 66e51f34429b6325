#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eventstudy {

enum class ErrorKind {
    InvalidArgument,
    Data,
    MissingData,
    Numerical,
    Config,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Base exception for the library. `source()` names where the problem came
// from (a file and row, a firm and relative day, a config key) when known.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message, std::string source = {});

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& source() const noexcept { return source_; }

  private:
    ErrorKind kind_;
    std::string source_;
};

struct DataIssue {
    std::size_t row = 0;  // 1-based line number, 0 when not row-specific
    std::string message;
};

// Raised by the ingestion routines; carries every problem found, not just the first.
class DataError : public Error {
  public:
    DataError(std::string source, std::vector<DataIssue> issues);

    const std::vector<DataIssue>& issues() const noexcept { return issues_; }

  private:
    std::vector<DataIssue> issues_;
};

class RankDeficientError : public Error {
  public:
    explicit RankDeficientError(std::vector<std::string> dependent_columns);

    const std::vector<std::string>& dependent_columns() const noexcept { return columns_; }

  private:
    std::vector<std::string> columns_;
};

}  // namespace eventstudy
