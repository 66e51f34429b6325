#include "eventstudy/date.hpp"

#include <charconv>
#include <cstdio>

#include "eventstudy/error.hpp"

namespace eventstudy {

namespace {

template <typename T>
bool parse_digits(std::string_view text, T& out) {
    if (text.empty()) return false;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "invalid calendar date %04d-%02u-%02u", year, month, day);
        throw Error(ErrorKind::InvalidArgument, buf);
    }
    return Date{std::chrono::sys_days{ymd}};
}

std::optional<Date> Date::try_parse(std::string_view iso) noexcept {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int year = 0;
    unsigned month = 0;
    unsigned day = 0;
    if (!parse_digits(iso.substr(0, 4), year) || !parse_digits(iso.substr(5, 2), month) ||
        !parse_digits(iso.substr(8, 2), day)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) return std::nullopt;
    return Date{std::chrono::sys_days{ymd}};
}

Date Date::parse(std::string_view iso) {
    if (auto d = try_parse(iso)) return *d;
    throw Error(ErrorKind::InvalidArgument, "unparseable ISO date '" + std::string(iso) + "'");
}

std::string Date::iso() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

bool Date::is_weekend() const {
    const auto wd = weekday();
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

}  // namespace eventstudy
