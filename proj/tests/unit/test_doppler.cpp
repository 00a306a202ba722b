#include <gtest/gtest.h>

#include <numbers>

#include "sarsub/doppler.hpp"
#include "sarsub/error.hpp"
#include "sarsub/fft.hpp"
#include "oracles.hpp"

using namespace sarsub;

TEST(Doppler, CenteredIndexRoundTrip) {
    for (int n : {1, 2, 7, 8, 512, 513})
        for (int k = 0; k < n; ++k) {
            EXPECT_EQ(fft_from_centered(centered_from_fft(k, n), n), k);
        }
    EXPECT_EQ(centered_from_fft(0, 8), 4);
    EXPECT_EQ(centered_from_fft(7, 8), 3);  // bin -1
}

TEST(Doppler, ProcessedBandIsCenteredOnZeroDoppler) {
    RadarParams p;
    p.platform_velocity = 4500.0;
    p.antenna_length = 10.0;
    p.azimuth_prf = 1024.0;  // B_D = 900 Hz
    const auto b = processed_band(1024, p);
    EXPECT_EQ(b.count, 900);
    EXPECT_EQ(b.begin, 512 - 450);
    EXPECT_LE(b.begin, 512);
    EXPECT_GT(b.end(), 512);
}

TEST(Doppler, HammingWindowShape) {
    WindowSpec w{WindowType::hamming, 0.75};
    const int m = 100;
    EXPECT_NEAR(w.at(0, m), 0.75 - 0.25 * std::cos(2 * std::numbers::pi * 0.005), 1e-15);
    double maxv = 0;
    int arg = -1;
    for (int i = 0; i < m; ++i)
        if (w.at(i, m) > maxv) maxv = w.at(i, m), arg = i;
    EXPECT_TRUE(arg == 49 || arg == 50);
    EXPECT_NEAR(w.at(m / 2, m), 1.0, 1e-3);
    for (int i = 0; i < m; ++i) EXPECT_NEAR(w.at(i, m), w.at(m - 1 - i, m), 1e-14);
    EXPECT_EQ((WindowSpec{WindowType::none, 0.75}.at(3, m)), 1.0);
    EXPECT_EQ((WindowSpec{WindowType::hamming, 1.0}.at(3, m)), 1.0);
}

TEST(Fft, MatchesDirectDft) {
    for (int n : {1, 5, 16, 30, 97}) {
        oracle::Lcg rng{std::uint64_t(n)};
        std::vector<cdouble> x(static_cast<std::size_t>(n));
        for (auto& v : x) v = {rng.normal(), rng.normal()};
        Fft1d fft(n);
        std::vector<cdouble> y(x.size()), z(x.size());
        fft.forward(x, y);
        const auto ref = oracle::dft(x);
        for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(y[std::size_t(i)] - ref[std::size_t(i)]), 1e-9 * n);
        fft.inverse(y, z);
        for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(z[std::size_t(i)] - x[std::size_t(i)]), 1e-12 * n);
    }
}

TEST(RadarParams, Validation) {
    RadarParams p;
    EXPECT_NO_THROW(p.validate());
    p.azimuth_prf = 0.9 * p.doppler_bandwidth();
    EXPECT_THROW(p.validate(), Error);
    p = RadarParams{};
    p.hamming_coefficient = 0.5;
    EXPECT_THROW(p.validate(), Error);
    p.hamming_coefficient = 1.0;
    EXPECT_NO_THROW(p.validate());
    p.transmitted_bandwidth = 0.0;
    EXPECT_THROW(p.validate(), Error);
}
