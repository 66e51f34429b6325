#pragma once

#include <map>
#include <string>
#include <vector>

#include "eventstudy/date.hpp"
#include "eventstudy/market_data.hpp"

namespace testing_support {

// Weekday dates with `event` at position -span.min_offset.
inline std::vector<eventstudy::Date> weekdays_around(eventstudy::Date event, eventstudy::Span span) {
    std::vector<eventstudy::Date> out(span.size());
    const auto zero = static_cast<std::size_t>(-span.min_offset);
    out[zero] = event;
    for (std::size_t i = zero; i-- > 0;) {
        auto d = out[i + 1].add_days(-1);
        while (d.is_weekend()) d = d.add_days(-1);
        out[i] = d;
    }
    for (std::size_t i = zero + 1; i < out.size(); ++i) {
        auto d = out[i - 1].add_days(1);
        while (d.is_weekend()) d = d.add_days(1);
        out[i] = d;
    }
    return out;
}

// Frame around 2016-11-08 from full return vectors indexed by span position.
inline eventstudy::EventFrame make_frame(const std::map<std::string, std::vector<double>>& returns,
                                         eventstudy::Span span = {}) {
    const auto event = eventstudy::Date::from_ymd(2016, 11, 8);
    std::map<std::string, eventstudy::AlignedSeries> series;
    for (const auto& [t, v] : returns) series[t] = eventstudy::AlignedSeries(v.begin(), v.end());
    return eventstudy::EventFrame(event, span, weekdays_around(event, span), std::move(series));
}

}  // namespace testing_support
