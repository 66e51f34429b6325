#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace eventstudy {

// Calendar date with ISO-8601 (YYYY-MM-DD) text form.
class Date {
  public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}

    static Date from_ymd(int year, unsigned month, unsigned day);
    static Date parse(std::string_view iso);
    static std::optional<Date> try_parse(std::string_view iso) noexcept;

    std::string iso() const;
    constexpr std::chrono::sys_days days() const { return days_; }
    std::chrono::weekday weekday() const { return std::chrono::weekday{days_}; }
    bool is_weekend() const;

    Date add_days(int n) const { return Date{days_ + std::chrono::days{n}}; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

  private:
    std::chrono::sys_days days_{};
};

}  // namespace eventstudy
