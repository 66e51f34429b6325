#include <gtest/gtest.h>

#include "eventstudy/date.hpp"
#include "eventstudy/error.hpp"

using eventstudy::Date;

TEST(Date, ParsesIsoDates) {
    const Date d = Date::parse("2016-11-08");
    EXPECT_EQ(d.iso(), "2016-11-08");
    EXPECT_FALSE(d.is_weekend());
    EXPECT_TRUE(Date::parse("2016-11-12").is_weekend());
    EXPECT_EQ(d.add_days(30).iso(), "2016-12-08");
}

TEST(Date, RejectsMalformedOrImpossibleDates) {
    for (const char* bad : {"2016-02-30", "2016-13-01", "2016-1-08", "20161108", "2016-11-08x", ""}) {
        EXPECT_FALSE(Date::try_parse(bad)) << bad;
        EXPECT_THROW(Date::parse(bad), eventstudy::Error) << bad;
    }
    EXPECT_TRUE(Date::try_parse("2016-02-29"));
}

TEST(Date, Orders) {
    EXPECT_LT(Date::parse("2016-11-07"), Date::parse("2016-11-08"));
    EXPECT_EQ(Date::from_ymd(2016, 11, 8), Date::parse("2016-11-08"));
}
