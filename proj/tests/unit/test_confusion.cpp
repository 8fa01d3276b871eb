#include <gtest/gtest.h>

#include "svx/confusion.hpp"

using namespace svx;

TEST(Confusion, RoundingAndRates) {
    EXPECT_DOUBLE_EQ(round_to(0.125, 2), 0.13);
    EXPECT_DOUBLE_EQ(round_to(-0.125, 2), -0.13);
    EXPECT_DOUBLE_EQ(round_to(70.375, 1), 70.4);
    EXPECT_DOUBLE_EQ(round_to(2.5, 0), 3.0);
    ConfusionMatrix m({"a", "b"}, {"x", "y", "z"});
    m.add(0, 0, 3);
    m.add(0, 2, 1);
    EXPECT_EQ(m.row_total(0), 4u);
    EXPECT_EQ(m.total(), 4u);
    const auto rates = m.rates();
    EXPECT_DOUBLE_EQ(rates[0][0], 0.75);
    EXPECT_DOUBLE_EQ(rates[1][1], 0.0);
}
