#include <doctest.h>

#include <cmath>
#include <set>

#include "modopo/philox.hpp"
#include "modopo/stats.hpp"

using modopo::GaussianStream;
using modopo::Philox4x32;

TEST_CASE("Philox4x32-10 known-answer vectors")
{
    const auto zero = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto ones = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                           {0xffffffffu, 0xffffffffu});
    CHECK(ones == Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const auto pi = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                         {0xa4093822u, 0x299f31d0u});
    CHECK(pi == Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct")
{
    GaussianStream a(42, 7);
    GaussianStream b(42, 7);
    GaussianStream c(42, 8);
    GaussianStream d(43, 7);
    bool differs_c = false;
    bool differs_d = false;
    for (int i = 0; i < 64; ++i) {
        const double x = a();
        CHECK(x == b());
        differs_c |= x != c();
        differs_d |= x != d();
    }
    CHECK(differs_c);
    CHECK(differs_d);
    CHECK(a.blocks_used() == 32);
}

TEST_CASE("normal moments")
{
    GaussianStream g(2024, 0);
    modopo::RunningStat m1, m2, m4;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        const double x = g();
        m1.add(x);
        m2.add(x * x);
        m4.add(x * x * x * x);
    }
    CHECK(std::abs(m1.mean()) < 4.0 * m1.std_error());
    CHECK(std::abs(m2.mean() - 1.0) < 4.0 * m2.std_error());
    CHECK(std::abs(m4.mean() - 3.0) < 4.0 * m4.std_error());
}

TEST_CASE("RunningStat merge matches a single pass")
{
    modopo::RunningStat all, left, right;
    for (int i = 0; i < 1000; ++i) {
        const double x = std::sin(0.37 * i) * (1.0 + 0.01 * i);
        all.add(x);
        (i < 313 ? left : right).add(x);
    }
    left.merge(right);
    CHECK(left.count() == all.count());
    CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-13));
    CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}
