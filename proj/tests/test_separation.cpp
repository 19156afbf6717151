// SPDX-License-Identifier: Apache-2.0
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include "hbss/random.hpp"
#include "hbss/separation.hpp"
#include "hbss/signals.hpp"

#include <cmath>
#include <numbers>

using namespace hbss;

namespace {

template <typename F>
ErrorKind error_kind_of(F&& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return e.kind();
    }
    FAIL("expected hbss::Error");
    return ErrorKind::InvalidArgument;
}

Observation stack(const ComplexSequence& a, const ComplexSequence& b)
{
    Observation x(2, a.size());
    x.row(0) = a.transpose();
    x.row(1) = b.transpose();
    return x;
}

ComplexSequence gaussian(Eigen::Index n, std::uint64_t seed)
{
    auto rng = make_engine(seed, {0x6a});
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    ComplexSequence out(n);
    for (auto& v : out) v = Complex(g(rng), g(rng));
    return out;
}

// Independent sample-moment kurtosis, written out term by term.
double oracle_kurtosis(const ComplexSequence& y)
{
    const double n = static_cast<double>(y.size());
    double m2 = 0, m4 = 0, re = 0, im = 0;
    for (const Complex& v : y)
    {
        const double p = v.real() * v.real() + v.imag() * v.imag();
        m2 += p / n;
        m4 += p * p / n;
        re += (v.real() * v.real() - v.imag() * v.imag()) / n;
        im += 2 * v.real() * v.imag() / n;
    }
    return m4 - 2 * m2 * m2 - (re * re + im * im);
}

double oracle_contrast(const Observation& z, double theta)
{
    const double c = std::cos(theta), s = std::sin(theta);
    const ComplexSequence y1 = (c * z.row(0) + s * z.row(1)).transpose();
    const ComplexSequence y2 = (-s * z.row(0) + c * z.row(1)).transpose();
    return std::abs(oracle_kurtosis(y1)) + std::abs(oracle_kurtosis(y2));
}

double angle_error_mod_quarter(double a, double b)
{
    const double q = std::numbers::pi / 2;
    double d = std::fmod(std::abs(a - b), q);
    return std::min(d, q - d);
}

}  // namespace

TEST_CASE("whiten - already white input stays white")
{
    const Observation x = stack(generate_interference(QamStream{Modulation::QPSK}, 100000, 1),
                                generate_interference(QamStream{Modulation::QAM16}, 100000, 2));
    const Whitened w = whiten(x);
    CHECK((real_covariance(w.z) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 2e-2);
    CHECK((w.transform.transpose() * w.transform - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 2e-2);
}

TEST_CASE("whiten - sample covariance of the fitted data is the identity")
{
    const MixingMatrix a(0.8, 0.3, 0.5, 0.9);
    const Observation x = mix(a, generate_interference(QamStream{Modulation::QAM64}, 10000, 3),
                              generate_interference(Tone{0.07}, 10000, 4), kInfinity, 0);
    const Whitened w = whiten(x);
    CHECK((real_covariance(w.z) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("whiten - analytic covariance whitens to 1e-10")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        Eigen::Matrix2d a;
        a << u(rng), u(rng), u(rng), u(rng);
        if (condition_number(a) > 1e3) continue;
        // population covariance of x = A s for unit-power uncorrelated sources
        const Eigen::Matrix2d c = a * a.transpose();
        const Eigen::Matrix2d t = whitening_transform(c);
        CHECK((t * c * t.transpose() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("whiten - whitened mixing is orthogonal")
{
    const MixingMatrix a(0.9, 0.4, 0.2, 0.7);
    const Observation x = mix(a, generate_interference(QamStream{Modulation::QPSK}, 100000, 5),
                              generate_interference(QamStream{Modulation::QAM16}, 100000, 6), kInfinity, 0);
    const Eigen::Matrix2d ta = whiten(x).transform * a.gains();
    CHECK((ta * ta.transpose() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 2e-2);
}

TEST_CASE("whiten - degenerate and short inputs")
{
    const auto s = generate_interference(QamStream{Modulation::QPSK}, 1000, 1);
    CHECK(error_kind_of([&] { whiten(stack(s, ComplexSequence::Zero(1000))); }) == ErrorKind::DegenerateInput);
    CHECK(error_kind_of([&] { whiten(stack(s, s)); }) == ErrorKind::DegenerateInput);
    CHECK(error_kind_of([&] { whiten(stack(s.head(99), s.head(99))); }) == ErrorKind::InsufficientSamples);
}

TEST_CASE("complex_kurtosis - enumerated QPSK is exactly -1")
{
    const auto& table = constellation(Modulation::QPSK);
    ComplexSequence y(100);
    for (Eigen::Index k = 0; k < y.size(); ++k) y[k] = table[static_cast<std::size_t>(k % 4)];
    CHECK(std::abs(complex_kurtosis(y) - (-1.0)) < 1e-12);
}

TEST_CASE("complex_kurtosis - full-period tone is -1")
{
    ComplexSequence y(1000);
    for (Eigen::Index k = 0; k < y.size(); ++k) y[k] = std::polar(1.0, 2 * std::numbers::pi * 0.01 * static_cast<double>(k));
    CHECK(std::abs(complex_kurtosis(y) - (-1.0)) < 1e-12);
}

TEST_CASE("complex_kurtosis - circular Gaussian is near zero")
{
    CHECK(std::abs(complex_kurtosis(gaussian(100000, 3))) < 0.05);
}

TEST_CASE("complex_kurtosis - matches the independent oracle and rejects short input")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const auto y = generate_interference(QamStream{Modulation::QAM16}, 5000, seed);
        CHECK(std::abs(complex_kurtosis(y) - oracle_kurtosis(y)) < 1e-12);
    }
    const ComplexSequence short_seq = ComplexSequence::Ones(99);
    CHECK(error_kind_of([&] { complex_kurtosis(short_seq); }) == ErrorKind::InsufficientSamples);
}

TEST_CASE("RotationContrast - moment form equals brute-force rotation")
{
    const Observation z = whiten(mix(MixingMatrix(0.7, 0.2, 0.4, 0.9),
                                     generate_interference(QamStream{Modulation::QAM16}, 20000, 9),
                                     generate_interference(Tone{0.031}, 20000, 10), 30.0, 11))
                              .z;
    const RotationContrast j(z);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        const double theta = angle(rng);
        CHECK(std::abs(j(theta) - oracle_contrast(z, theta)) < 1e-10);
    }
}

TEST_CASE("find_rotation - recovers a planted rotation")
{
    for (double theta0 : {0.1, 0.5, 0.9, 1.3, 1.55})
    {
        const Observation u = stack(generate_interference(QamStream{Modulation::QPSK}, 100000, 21),
                                    generate_interference(QamStream{Modulation::QPSK}, 100000, 22));
        const Observation z = givens(theta0).transpose().cast<Complex>() * u;
        const RotationEstimate est = find_rotation(z);
        CHECK(angle_error_mod_quarter(est.angle, theta0) < 1e-3);
        CHECK(est.angle >= 0.0);
        CHECK(est.angle < std::numbers::pi / 2);
        CHECK(est.contrast >= est.grid_contrast);
        CHECK_FALSE(est.low_confidence);
    }
}

TEST_CASE("find_rotation - contrast has period pi/2")
{
    const Observation z = stack(generate_interference(QamStream{Modulation::QAM64}, 5000, 1),
                                generate_interference(FilteredNoise{0.2}, 5000, 2));
    const RotationContrast j(z);
    for (double theta = 0; theta < 3; theta += 0.173)
        CHECK(std::abs(j(theta) - j(theta + std::numbers::pi / 2)) < 1e-12);
}

TEST_CASE("find_rotation - Gaussian inputs are flagged low confidence")
{
    const RotationEstimate est = find_rotation(stack(gaussian(100000, 1), gaussian(100000, 2)));
    CHECK(est.low_confidence);
}

TEST_CASE("demix - identity mixing, QPSK + 16QAM")
{
    const MixingMatrix a(1, 0, 0, 1);
    const Observation x = mix(a, generate_interference(QamStream{Modulation::QPSK}, 100000, 31),
                              generate_interference(QamStream{Modulation::QAM16}, 100000, 32), kInfinity, 0);
    const DemixResult r = demix(x, a);
    REQUIRE(r.gain_matrix);
    CHECK(gain_leakage_db(*r.gain_matrix) < -30.0);
    for (Eigen::Index i = 0; i < 2; ++i) CHECK(std::abs(r.outputs.row(i).squaredNorm() / 100000.0 - 1.0) < 1e-9);
}

TEST_CASE("demix - too few samples")
{
    const Observation x = stack(ComplexSequence::Ones(50), ComplexSequence::Ones(50));
    CHECK(error_kind_of([&] { demix(x); }) == ErrorKind::InsufficientSamples);
}

TEST_CASE("demix - well-conditioned random mixtures separate below -25 dB")
{
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int trials = 0;
    while (trials < 5)
    {
        const MixingMatrix a(u(rng), u(rng), u(rng), u(rng));
        if (!(separability_index(a) < 5.0)) continue;
        const Observation x = mix(a, generate_interference(QamStream{Modulation::QPSK}, 100000, 100 + trials),
                                  generate_interference(QamStream{Modulation::QAM16}, 100000, 200 + trials), 25.0,
                                  300 + trials);
        const DemixResult r = demix(x, a);
        CHECK(gain_leakage_db(*r.gain_matrix) < -25.0);
        ++trials;
    }
}

TEST_CASE("demix - ill-conditioned default geometry fails to separate 64QAM")
{
    const MixingMatrix a = mixing_from_geometry(Geometry::default_layout());
    const Frame f = make_frame(Modulation::QAM64, 64, 100000 - 64, 41);
    const Observation x =
        mix(a, f.symbols(), generate_interference(QamStream{Modulation::QAM16}, 100000, 42), 25.0, 43);
    const DemixResult r = demix(x, a);
    CHECK(gain_leakage_db(*r.gain_matrix) > -10.0);

    const PilotAlignment al = fit_pilot_alignment(r.outputs, f.pilot);
    const ComplexSequence y = apply_alignment(r.outputs, al).tail(f.payload.size());
    const auto decided = decide_symbols(y, Modulation::QAM64);
    const auto truth = decide_symbols(f.payload, Modulation::QAM64);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < decided.size(); ++i) errors += decided[i] != truth[i];
    CHECK(static_cast<double>(errors) / static_cast<double>(decided.size()) > 0.1);
}

TEST_CASE("demix - bit-identical on repeated calls")
{
    const Observation x = mix(MixingMatrix(0.6, 0.5, 0.2, 0.9), generate_interference(QamStream{Modulation::QPSK}, 4096, 1),
                              generate_interference(Tone{0.2}, 4096, 2), 20.0, 3);
    const DemixResult a = demix(x), b = demix(x);
    CHECK(a.w == b.w);
    CHECK(a.outputs == b.outputs);
}

TEST_CASE("shift - delays with zero fill")
{
    ComplexSequence x(5);
    x << 1, 2, 3, 4, 5;
    ComplexSequence right(5), left(5);
    right << 0, 0, 1, 2, 3;
    left << 3, 4, 5, 0, 0;
    CHECK(shift(x, 2) == right);
    CHECK(shift(x, -2) == left);
    CHECK(shift(x, 0) == x);
    CHECK(shift(x, 7) == ComplexSequence::Zero(5));
}

TEST_CASE("cancel_with_reference - planted delay and gain, noiseless")
{
    const Eigen::Index n = 100000;
    const ComplexSequence r = generate_interference(QamStream{Modulation::QAM16}, n, 51);
    const ComplexSequence r3 = shift(r, 3);
    ComplexSequence s = generate_interference(QamStream{Modulation::QPSK}, n, 52);
    s -= (r3.dot(s) / r3.squaredNorm()) * r3;  // exact orthogonality to the delayed reference
    const ComplexSequence x1 = s + 0.5 * r3;

    const CancellationResult c = cancel_with_reference(x1, r, 8);
    CHECK(c.delay == 3);
    CHECK(std::abs(c.coefficient - Complex(0.5)) < 1e-6);
    const ComplexSequence residual_interference = c.soi_estimate - s;
    const double before = (0.5 * r3).squaredNorm();
    CHECK(10 * std::log10(residual_interference.squaredNorm() / before) < -80.0);
    CHECK(std::abs(r3.dot(c.soi_estimate)) / (r3.norm() * c.soi_estimate.norm()) < 1e-6);
}

TEST_CASE("cancel_with_reference - uncorrelated reference leaves x1 alone")
{
    const ComplexSequence x1 = generate_interference(QamStream{Modulation::QAM64}, 100000, 61);
    const ComplexSequence r = generate_interference(QamStream{Modulation::QPSK}, 100000, 62);
    const CancellationResult c = cancel_with_reference(x1, r, 4);
    CHECK(std::abs(c.coefficient) < 0.02);
    CHECK((c.soi_estimate - x1).norm() / x1.norm() < 0.02);
}

TEST_CASE("cancel_with_reference - zero delay range gives an orthogonal residual")
{
    const ComplexSequence r = generate_interference(QamStream{Modulation::QAM16}, 20000, 71);
    const ComplexSequence x1 = generate_interference(QamStream{Modulation::QPSK}, 20000, 72) + Complex(0.3, 0.2) * shift(r, 2);
    const CancellationResult c = cancel_with_reference(x1, r, 0);
    CHECK(c.delay == 0);
    CHECK(std::abs(r.dot(c.soi_estimate)) / (r.norm() * c.soi_estimate.norm()) < 1e-12);
}

TEST_CASE("cancel_with_reference - residual power is non-increasing in max_delay")
{
    const ComplexSequence r = generate_interference(FilteredNoise{0.3}, 20000, 81);
    const ComplexSequence x1 = generate_interference(QamStream{Modulation::QAM64}, 20000, 82) + 0.7 * shift(r, 5) +
                               Complex(0, 0.2) * shift(r, -2);
    double previous = kInfinity;
    for (Eigen::Index d = 0; d < 12; ++d)
    {
        const double residual = cancel_with_reference(x1, r, d).soi_estimate.squaredNorm();
        CHECK(residual <= previous * (1 + 1e-12));
        previous = residual;
    }
}

TEST_CASE("cancel_with_reference - error paths")
{
    const ComplexSequence a = ComplexSequence::Ones(400);
    CHECK(error_kind_of([&] { cancel_with_reference(a, ComplexSequence::Ones(399), 0); }) == ErrorKind::LengthMismatch);
    CHECK(error_kind_of([&] { cancel_with_reference(a, a, 100); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind_of([&] { cancel_with_reference(a, a, -1); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind_of([&] { cancel_with_reference(a, ComplexSequence::Zero(400), 4); }) ==
          ErrorKind::DegenerateReference);
}

TEST_CASE("resolve_ambiguity - undoes complex gain and permutation")
{
    const Frame f = make_frame(Modulation::QAM16, 64, 4000, 91);
    const ComplexSequence s = f.symbols();
    const ComplexSequence other = generate_interference(QamStream{Modulation::QPSK}, s.size(), 92);
    const Complex g = std::polar(0.3, std::numbers::pi / 7);
    for (int order = 0; order < 2; ++order)
    {
        const Observation y = order == 0 ? stack(g * s, other) : stack(other, g * s);
        const ComplexSequence out = resolve_ambiguity(y, f.pilot);
        CHECK((out - s).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(fit_pilot_alignment(y, f.pilot).channel == order);
    }
}

TEST_CASE("resolve_ambiguity - pilot absent from both outputs")
{
    const ComplexSequence pilot = pilot_sequence(64);
    const Observation y = stack(generate_interference(QamStream{Modulation::QPSK}, 2000, 1),
                                generate_interference(QamStream{Modulation::QPSK}, 2000, 2));
    CHECK(error_kind_of([&] { resolve_ambiguity(y, pilot); }) == ErrorKind::AmbiguityUnresolved);
    CHECK_FALSE(fit_pilot_alignment(y, pilot).resolved());
}

TEST_CASE("resolve_ambiguity - pilot validation")
{
    const Observation y = stack(ComplexSequence::Ones(500), ComplexSequence::Ones(500));
    CHECK(error_kind_of([&] { resolve_ambiguity(y, ComplexSequence()); }) == ErrorKind::InvalidPilot);
    CHECK(error_kind_of([&] { resolve_ambiguity(y, pilot_sequence(15)); }) == ErrorKind::InvalidPilot);
    CHECK(error_kind_of([&] { resolve_ambiguity(y, pilot_sequence(500)); }) == ErrorKind::InsufficientSamples);
}
