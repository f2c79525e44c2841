#include <gtest/gtest.h>

#include "biot/permeability.hpp"

#include <limits>
#include <random>

using namespace biot;

TEST(Permeability, CarmanKozenyValues) {
    const auto ck = PermeabilityModel::carman_kozeny(1.0, 1e-3, 1e3);
    EXPECT_DOUBLE_EQ(ck(0.5), 0.5);
    EXPECT_DOUBLE_EQ(ck(0.99), 1e3);  // raw 9702.99 clamped
    EXPECT_DOUBLE_EQ(ck(1.0), 1e3);   // singular point
    EXPECT_DOUBLE_EQ(ck(-0.4), 1e-3);  // negative raw value
    EXPECT_DOUBLE_EQ(ck(0.0), 1e-3);
    EXPECT_DOUBLE_EQ(ck(2.0), 8.0);
}

TEST(Permeability, ConstantAndQuadratic) {
    const auto c = PermeabilityModel::constant(2.5, 1e-3, 1e3);
    EXPECT_DOUBLE_EQ(c(-7.0), 2.5);
    EXPECT_DOUBLE_EQ(c(0.3), 2.5);
    EXPECT_DOUBLE_EQ(PermeabilityModel::constant(1e4, 1e-3, 1e3)(0.0), 1e3);

    const auto q = PermeabilityModel::quadratic(1.0, 2.0, 3.0, 0.5, 10.0);
    EXPECT_DOUBLE_EQ(q(0.5), 1.0 + 1.0 + 0.75);
    EXPECT_DOUBLE_EQ(q(-0.5), 0.75);
    EXPECT_DOUBLE_EQ(PermeabilityModel::quadratic(1.0, -4.0, 0.0, 0.5, 10.0)(0.5), 0.5);
    EXPECT_DOUBLE_EQ(q(5.0), 10.0);
}

TEST(Permeability, AlwaysInsideBounds) {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> y(-5.0, 5.0);
    const std::array<PermeabilityModel, 3> models = {PermeabilityModel::constant(3.0, 0.1, 2.0),
                                                     PermeabilityModel::carman_kozeny(4.0, 0.01, 50.0),
                                                     PermeabilityModel::quadratic(1.0, -3.0, 2.0, 0.2, 6.0)};
    for (const auto& m : models) {
        for (int i = 0; i < 2000; ++i) {
            const double k = m(y(gen));
            EXPECT_GE(k, m.k1);
            EXPECT_LE(k, m.k2);
        }
    }
}

TEST(Permeability, RejectsBadParameters) {
    EXPECT_THROW(PermeabilityModel::constant(1.0, 0.0, 1.0), ConfigError);
    EXPECT_THROW(PermeabilityModel::constant(1.0, 2.0, 1.0), ConfigError);
    EXPECT_THROW(PermeabilityModel::carman_kozeny(-1.0, 1e-3, 1e3), ConfigError);
    EXPECT_THROW(PermeabilityModel::constant(1.0, 1e-3, std::numeric_limits<double>::infinity()), ConfigError);
    const auto ck = PermeabilityModel::carman_kozeny(1.0, 1e-3, 1e3);
    EXPECT_THROW(ck(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}
