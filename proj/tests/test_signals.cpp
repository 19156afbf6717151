// SPDX-License-Identifier: Apache-2.0
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include "hbss/signals.hpp"

#include <bit>
#include <cmath>
#include <set>

using namespace hbss;

namespace {

constexpr Modulation kSchemes[] = {Modulation::QPSK, Modulation::QAM16, Modulation::QAM64};

}  // namespace

TEST_CASE("constellation tables have unit mean power and distinct points")
{
    for (Modulation m : kSchemes)
    {
        const auto& table = constellation(m);
        REQUIRE(table.size() == (std::size_t{1} << bits_per_symbol(m)));

        double power = 0;
        std::set<std::pair<double, double>> distinct;
        for (const Complex& p : table)
        {
            power += std::norm(p);
            distinct.insert({p.real(), p.imag()});
        }
        CHECK(std::abs(power / table.size() - 1.0) < 1e-12);
        CHECK(distinct.size() == table.size());
    }
}

TEST_CASE("bits per symbol matches scheme")
{
    CHECK(bits_per_symbol(Modulation::QPSK) == 2);
    CHECK(bits_per_symbol(Modulation::QAM16) == 4);
    CHECK(bits_per_symbol(Modulation::QAM64) == 6);
}

TEST_CASE("modulate - QPSK zero bits map to the positive quadrant")
{
    const BitStream bits = {0, 0};
    const auto y = modulate(bits, Modulation::QPSK);
    REQUIRE(y.size() == 1);
    CHECK(std::abs(y[0].real() - 0.70710678118654752) < 1e-12);
    CHECK(std::abs(y[0].imag() - 0.70710678118654752) < 1e-12);
}

TEST_CASE("modulate - empty input gives empty output")
{
    CHECK(modulate(BitStream{}, Modulation::QPSK).size() == 0);
}

TEST_CASE("modulate - all 64QAM groups enumerate the full grid")
{
    BitStream bits;
    for (int v = 0; v < 64; ++v)
        for (int b = 5; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
    const auto y = modulate(bits, Modulation::QAM64);
    REQUIRE(y.size() == 64);

    // brute-force oracle: sum of squares over the 8x8 odd-integer grid is 64 * 42
    double grid_energy = 0;
    for (int i = -7; i <= 7; i += 2)
        for (int q = -7; q <= 7; q += 2) grid_energy += i * i + q * q;
    CHECK(grid_energy == 64 * 42);

    std::set<std::pair<long, long>> points;
    double max_mag = 0;
    for (Eigen::Index k = 0; k < y.size(); ++k)
    {
        const double i = y[k].real() * std::sqrt(42.0), q = y[k].imag() * std::sqrt(42.0);
        CHECK(std::abs(i - std::round(i)) < 1e-12);
        CHECK(std::abs(q - std::round(q)) < 1e-12);
        points.insert({std::lround(i), std::lround(q)});
        max_mag = std::max(max_mag, std::abs(y[k]));
    }
    CHECK(points.size() == 64);
    CHECK(std::abs(y.squaredNorm() / 64.0 - 1.0) < 1e-12);
    CHECK(std::abs(max_mag - std::abs(Complex(7, 7)) / std::sqrt(42.0)) < 1e-12);
    CHECK(std::abs(max_mag - 1.5275) < 1e-4);
}

TEST_CASE("modulate - per-axis Gray code: neighbours differ in one bit")
{
    for (Modulation m : {Modulation::QAM16, Modulation::QAM64})
    {
        const auto& table = constellation(m);
        double min_dist = 1e9;
        for (std::size_t a = 0; a < table.size(); ++a)
            for (std::size_t b = a + 1; b < table.size(); ++b) min_dist = std::min(min_dist, std::abs(table[a] - table[b]));
        for (std::size_t a = 0; a < table.size(); ++a)
            for (std::size_t b = a + 1; b < table.size(); ++b)
                if (std::abs(std::abs(table[a] - table[b]) - min_dist) < 1e-12)
                    CHECK(std::popcount(static_cast<unsigned>(a ^ b)) == 1);
    }
}

TEST_CASE("modulate - rejects bit counts that are not a multiple of bits_per_symbol")
{
    const BitStream bits = {0, 1, 1};
    try
    {
        modulate(bits, Modulation::QAM16);
        FAIL("expected InvalidBitLength");
    }
    catch (const Error& e)
    {
        CHECK(e.kind() == ErrorKind::InvalidBitLength);
    }
}

TEST_CASE("demodulate - round trip over random streams, every scheme")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        for (Modulation m : kSchemes)
        {
            const BitStream bits = random_bits(static_cast<std::size_t>(bits_per_symbol(m)) * (50 + seed * 7), seed);
            CHECK(demodulate(modulate(bits, m), m) == bits);
        }
}

TEST_CASE("demodulate - quadrant rule and tie break")
{
    ComplexSequence y(1);
    y << Complex(0.9, 0.8);
    CHECK(demodulate(y, Modulation::QPSK) == BitStream{0, 0});

    // (0,0) is equidistant from the four inner 16QAM points; the lowest index
    // among them is 0b0101 (+1 on both axes)
    y << Complex(0, 0);
    CHECK(demodulate(y, Modulation::QAM16) == BitStream{0, 1, 0, 1});
    CHECK(decide_symbols(y, Modulation::QAM16)[0] == 5);
}

TEST_CASE("generate_interference - tone has unit modulus")
{
    const auto y = generate_interference(Tone{0.1}, 5, 42);
    REQUIRE(y.size() == 5);
    for (Eigen::Index k = 0; k < y.size(); ++k) CHECK(std::abs(std::abs(y[k]) - 1.0) < 1e-12);
}

TEST_CASE("generate_interference - deterministic for fixed arguments")
{
    const auto a = generate_interference(QamStream{Modulation::QAM16}, 10000, 7);
    const auto b = generate_interference(QamStream{Modulation::QAM16}, 10000, 7);
    CHECK(a == b);
    const auto c = generate_interference(QamStream{Modulation::QAM16}, 10000, 8);
    CHECK(a != c);
}

TEST_CASE("generate_interference - mean power within 2 percent")
{
    // sample-mean oracle
    auto sample_power = [](const ComplexSequence& x) {
        double sum = 0;
        for (Eigen::Index k = 0; k < x.size(); ++k) sum += x[k].real() * x[k].real() + x[k].imag() * x[k].imag();
        return sum / static_cast<double>(x.size());
    };
    const double noise = sample_power(generate_interference(FilteredNoise{0.25}, 100000, 1));
    CHECK(noise >= 0.98);
    CHECK(noise <= 1.02);

    for (const InterferenceKind& kind : {InterferenceKind{QamStream{Modulation::QPSK}},
                                         InterferenceKind{QamStream{Modulation::QAM64}}, InterferenceKind{Tone{0.013}},
                                         InterferenceKind{FilteredNoise{0.02}}, InterferenceKind{FilteredNoise{1.0}}})
    {
        const double p = sample_power(generate_interference(kind, 10000, 3));
        CHECK(p >= 0.98);
        CHECK(p <= 1.02);
    }
}

TEST_CASE("generate_interference - zero length and invalid bandwidth")
{
    CHECK(generate_interference(FilteredNoise{0.5}, 0, 1).size() == 0);
    CHECK_THROWS_AS(generate_interference(FilteredNoise{0.0}, 10, 1), Error);
    CHECK_THROWS_AS(generate_interference(FilteredNoise{1.5}, 10, 1), Error);
}

TEST_CASE("add_awgn - infinite SNR is the identity")
{
    const auto x = generate_interference(QamStream{Modulation::QPSK}, 100, 2);
    CHECK(add_awgn(x, std::numeric_limits<double>::infinity(), 9) == x);
}

TEST_CASE("add_awgn - 0 dB on unit-power input adds unit-power noise")
{
    const auto x = generate_interference(Tone{0.01}, 100000, 2);
    const auto y = add_awgn(x, 0.0, 11);
    const ComplexSequence noise = y - x;
    const double p = noise.squaredNorm() / static_cast<double>(noise.size());
    CHECK(p >= 0.97);
    CHECK(p <= 1.03);
    // split evenly between I and Q
    CHECK(std::abs(noise.real().squaredNorm() / noise.imag().squaredNorm() - 1.0) < 0.03);
}

TEST_CASE("add_awgn - hits the target SNR within 0.3 dB")
{
    for (double snr : {-5.0, 10.0, 25.0, 40.0})
    {
        const auto x = generate_interference(QamStream{Modulation::QAM16}, 100000, 5);
        const ComplexSequence noise = add_awgn(x, snr, 17) - x;
        const double measured = 10.0 * std::log10(x.squaredNorm() / noise.squaredNorm());
        CHECK(std::abs(measured - snr) < 0.3);
    }
}

TEST_CASE("add_awgn - deterministic and rejects empty input")
{
    const auto x = generate_interference(QamStream{Modulation::QPSK}, 1000, 2);
    CHECK(add_awgn(x, 10.0, 3) == add_awgn(x, 10.0, 3));
    try
    {
        add_awgn(ComplexSequence(0), 10.0, 1);
        FAIL("expected EmptyInput");
    }
    catch (const Error& e)
    {
        CHECK(e.kind() == ErrorKind::EmptyInput);
    }
}

TEST_CASE("frames carry a QPSK pilot ahead of the payload")
{
    const Frame f = make_frame(Modulation::QAM64, 64, 200, 5);
    CHECK(f.pilot.size() == 64);
    CHECK(f.payload.size() == 200);
    CHECK(f.payload_bits.size() == 1200);
    CHECK(f.pilot == pilot_sequence(64));
    const auto& qpsk = constellation(Modulation::QPSK);
    for (Eigen::Index k = 0; k < f.pilot.size(); ++k)
    {
        double best = 1e9;
        for (const auto& p : qpsk) best = std::min(best, std::abs(f.pilot[k] - p));
        CHECK(best < 1e-15);
    }
    const auto s = f.symbols();
    CHECK(s.head(64) == f.pilot);
    CHECK(s.tail(200) == f.payload);
}
