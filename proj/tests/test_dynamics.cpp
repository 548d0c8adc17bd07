#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rwaframe/dynamics.hpp"
#include "rwaframe/enumeration.hpp"
#include "test_helpers.hpp"

using namespace rwaframe;
using namespace rwaframe::testing;

namespace {

constexpr double pi = std::numbers::pi;

// Two-level drive starting in level 1. In the frame wbar = (0, -laser) the
// Hamiltonian is [[w1, rabi/2], [rabi/2, w2 + laser]], so the detuning seen by
// the atom is w2 - w1 + laser.
LevelSystem two_level(double w1, double w2, double rabi, double laser) {
    return make_system({E, O}, {w1, w2}, {{1, 2, {rabi, 0.0}, laser}});
}

double rabi_oracle(double rabi, double detuning, double t) {
    const double g2 = rabi * rabi + detuning * detuning;
    const double s = std::sin(std::sqrt(g2) * t / 2.0);
    return rabi * rabi / g2 * s * s;
}

// exp(-i M t) by Taylor series with scaling and squaring; independent of Jacobi.
ComplexMatrix taylor_exponential(const ComplexMatrix& m, double t) {
    const std::size_t n = m.rows();
    ComplexMatrix a = m * Complex(0.0, -t);
    int squarings = 0;
    while (a.max_abs() * n > 0.5) {
        a *= 0.5;
        ++squarings;
    }
    ComplexMatrix result = ComplexMatrix::identity(n), term = ComplexMatrix::identity(n);
    for (int k = 1; k < 30; ++k) {
        term = term * a * Complex(1.0 / k, 0.0);
        result += term;
    }
    for (int k = 0; k < squarings; ++k) result = result * result;
    return result;
}

ComplexMatrix random_hermitian(std::mt19937& rng, std::size_t n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = g(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = {g(rng), g(rng)};
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

double min_rabi(const LevelSystem& s) {
    double m = 1e300;
    for (const auto& t : s.transitions) m = std::min(m, std::abs(t.rabi));
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// propagate_lab

TEST(PropagateLab, ResonantRabiOscillation) {
    const double rabi = 1.0;
    const auto s = two_level(0.0, 2.0, rabi, -2.0);
    const double period = 2 * pi / rabi;
    const auto r = propagate_lab(build_rwa_hamiltonian(s), StateVector::basis(2, 1), 2 * period, period / 1000);
    for (std::size_t k = 0; k < r.times.size(); ++k)
        ASSERT_NEAR(r.states[k].populations()[1], rabi_oracle(rabi, 0.0, r.times[k]), 1e-6) << r.times[k];
}

TEST(PropagateLab, DetunedRabiOscillation) {
    const double rabi = 1.0, laser = -1.7;
    const auto s = two_level(0.0, 2.0, rabi, laser);
    const double detuning = 2.0 + laser;
    const double period = 2 * pi / rabi;
    const auto r = propagate_lab(build_rwa_hamiltonian(s), StateVector::basis(2, 1), 3 * period, period / 1000);
    double worst = 0.0;
    for (std::size_t k = 0; k < r.times.size(); ++k)
        worst = std::max(worst, std::abs(r.states[k].populations()[1] - rabi_oracle(rabi, detuning, r.times[k])));
    EXPECT_LT(worst, 1e-6);
    // and it genuinely oscillates with reduced contrast
    double peak = 0.0;
    for (const auto& st : r.states) peak = std::max(peak, st.populations()[1]);
    EXPECT_NEAR(peak, rabi * rabi / (rabi * rabi + detuning * detuning), 1e-3);
}

TEST(PropagateLab, ZeroHamiltonianKeepsState) {
    TimeDependentHamiltonian h{{0.0, 0.0, 0.0}, {}};
    StateVector psi{{Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(0.0, 0.0)}};
    const auto r = propagate_lab(h, psi, 5.0, 0.1);
    for (const auto& st : r.states) EXPECT_EQ(st.amplitudes, psi.amplitudes);
    EXPECT_EQ(r.times.back(), 5.0);
}

TEST(PropagateLab, TimeGridAndRecording) {
    const auto h = build_rwa_hamiltonian(two_level(0.0, 1.0, 1.0, -1.0));
    const auto r = propagate_lab(h, StateVector::basis(2, 1), 1.0, 0.03, 4);
    EXPECT_EQ(r.times.front(), 0.0);
    EXPECT_DOUBLE_EQ(r.times.back(), 1.0);
    for (std::size_t k = 1; k < r.times.size(); ++k) EXPECT_GT(r.times[k], r.times[k - 1]);
    EXPECT_EQ(r.times.size(), r.states.size());
}

TEST(PropagateLab, RejectsBadArguments) {
    const auto h = build_rwa_hamiltonian(two_level(0.0, 1.0, 1.0, -1.0));
    EXPECT_THROW(propagate_lab(h, StateVector::basis(2, 1), 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(propagate_lab(h, StateVector::basis(2, 1), -1.0, 0.1), std::invalid_argument);
    EXPECT_THROW(propagate_lab(h, StateVector{{1.0, 1.0}}, 1.0, 0.1), std::invalid_argument);
    EXPECT_THROW(propagate_lab(h, StateVector::basis(3, 1), 1.0, 0.1), std::invalid_argument);
}

TEST(PropagateLab, NonFiniteAborts) {
    TimeDependentHamiltonian h{{1e300, 0.0}, {}};
    EXPECT_THROW(propagate_lab(h, StateVector::basis(2, 1), 1e12, 1e11), NumericalError);
}

TEST(PropagateLab, NormDriftIsSmall) {
    const auto s = lambda_system();
    const auto h = build_rwa_hamiltonian(s);
    const double omega_max = spectral_bound(h);
    const double horizon = 10 * 2 * pi / min_rabi(s);
    const auto r = propagate_lab(h, StateVector::basis(4, 1), horizon, 1.0 / omega_max / 100, 100);
    EXPECT_LT(r.norm_drift, 1e-8);
}

TEST(PropagateLab, PhaseOfRabiAmplitudeDoesNotChangePopulations) {
    const auto base = two_level(0.0, 2.0, 1.0, -1.8);
    auto phased = base;
    phased.transitions[0].rabi *= std::polar(1.0, 1.234);
    const auto a = propagate_lab(build_rwa_hamiltonian(base), StateVector::basis(2, 1), 10.0, 0.002);
    const auto b = propagate_lab(build_rwa_hamiltonian(phased), StateVector::basis(2, 1), 10.0, 0.002);
    EXPECT_LT(compare_populations(a, b), 1e-12);
}

TEST(PropagateLab, FourthOrderConvergence) {
    const auto s = two_level(0.0, 3.0, 1.0, -2.6);
    const auto h = build_rwa_hamiltonian(s);
    const auto frame = solve_frame(s);
    const auto psi0 = StateVector::basis(2, 1);
    const double horizon = 20.0;
    std::vector<double> errors;
    for (double step : {0.04, 0.02, 0.01}) {
        const auto lab = propagate_lab(h, psi0, horizon, step);
        const auto exact = propagate_frame(h, frame, psi0, lab.times);
        errors.push_back(compare_states(lab, exact));
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const double order = std::log2(errors[i] / errors[i + 1]);
        EXPECT_NEAR(order, 4.0, 0.3) << "errors " << errors[i] << " -> " << errors[i + 1];
    }
}

// ---------------------------------------------------------------------------
// hermitian_exponential

TEST(HermitianExponential, Diagonal) {
    const double a = 1.3, b = -0.4, t = 2.1;
    const auto u = hermitian_exponential(ComplexMatrix::diagonal({a, b}), t);
    EXPECT_LT(std::abs(u(0, 0) - std::polar(1.0, -a * t)), 1e-13);
    EXPECT_LT(std::abs(u(1, 1) - std::polar(1.0, -b * t)), 1e-13);
    EXPECT_LT(std::abs(u(0, 1)), 1e-13);
}

TEST(HermitianExponential, TwoByTwoRotation) {
    const double rabi = 1.7, t = 0.9, angle = rabi * t / 2;
    ComplexMatrix m(2, 2);
    m(0, 1) = m(1, 0) = rabi / 2;
    const auto u = hermitian_exponential(m, t);
    EXPECT_LT(std::abs(u(0, 0) - std::cos(angle)), 1e-13);
    EXPECT_LT(std::abs(u(1, 1) - std::cos(angle)), 1e-13);
    EXPECT_LT(std::abs(u(0, 1) - Complex(0, -std::sin(angle))), 1e-13);
    EXPECT_LT(std::abs(u(1, 0) - Complex(0, -std::sin(angle))), 1e-13);
}

TEST(HermitianExponential, UnitaryAndMatchesTaylorSeries) {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> time(-3.0, 3.0);
    for (std::size_t n = 1; n <= 12; ++n)
        for (int k = 0; k < 3; ++k) {
            const auto m = random_hermitian(rng, n, 1.5);
            const double t = time(rng);
            const auto u = hermitian_exponential(m, t);
            EXPECT_LT(max_abs_difference(u * u.adjoint(), ComplexMatrix::identity(n)), 1e-10) << n;
            EXPECT_LT(max_abs_difference(u, taylor_exponential(m, t)), 1e-10) << n;
        }
}

TEST(HermitianExponential, DegenerateSpectrum) {
    // Eigenvalues {1, 1, 3}; Jacobi must cope with the repeated pair.
    ComplexMatrix m(3, 3);
    m(0, 0) = m(1, 1) = 2.0;
    m(0, 1) = Complex(0.0, 1.0);
    m(1, 0) = Complex(0.0, -1.0);
    m(2, 2) = 1.0;
    const auto u = hermitian_exponential(m, 1.3);
    EXPECT_LT(max_abs_difference(u, taylor_exponential(m, 1.3)), 1e-12);
}

TEST(HermitianExponential, RejectsNonHermitian) {
    ComplexMatrix m(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(hermitian_exponential(m, 1.0), std::invalid_argument);
    EXPECT_THROW(hermitian_exponential(ComplexMatrix(2, 3), 1.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// propagate_frame and cross-validation

TEST(PropagateFrame, LambdaAgreesWithLab) {
    const auto s = lambda_system();
    const auto h = build_rwa_hamiltonian(s);
    const auto psi0 = StateVector::basis(4, 1);
    const double horizon = 5 * 2 * pi / min_rabi(s);
    const auto lab = propagate_lab(h, psi0, horizon, default_step(h), 50);
    const auto frame = propagate_frame(h, classify(s).frame, psi0, lab.times);
    EXPECT_LT(compare_populations(lab, frame), 1e-6);
    EXPECT_LT(frame.norm_drift, 1e-12);
}

TEST(PropagateFrame, TunedDiamondAgreesWithLab) {
    const auto s = tune_to_zero_detuning(diamond_system(-2.95, -3.75, -4.05, -3.3));
    const auto h = build_rwa_hamiltonian(s);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    StateVector psi0{{Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng))}};
    const double nrm = psi0.norm();
    for (auto& a : psi0.amplitudes) a /= nrm;
    const double horizon = 5 * 2 * pi / min_rabi(s);
    const auto lab = propagate_lab(h, psi0, horizon, default_step(h), 50);
    const auto frame = propagate_frame(h, classify(s).frame, psi0, lab.times);
    EXPECT_LT(compare_populations(lab, frame), 1e-6);
}

TEST(PropagateFrame, DetunedDiamondRefuses) {
    const auto s = diamond_system(-2.95, -3.75, -4.05, -3.3);
    const auto h = build_rwa_hamiltonian(s);
    EXPECT_THROW(propagate_frame(h, classify(s).frame, StateVector::basis(4, 1), 10.0), FrameNotStaticError);
}

TEST(PropagateFrame, StartsFromInitialState) {
    const auto s = lambda_system();
    const auto h = build_rwa_hamiltonian(s);
    const auto r = propagate_frame(h, classify(s).frame, StateVector::basis(4, 2), 3.0, 10);
    EXPECT_EQ(r.times.size(), 11u);
    EXPECT_LT(std::abs(r.states[0].amplitudes[1] - Complex(1.0, 0.0)), 1e-14);
}

TEST(ComparePopulations, IdenticalIsZeroAndGridMismatchThrows) {
    const auto h = build_rwa_hamiltonian(two_level(0.0, 1.0, 1.0, -1.0));
    const auto a = propagate_lab(h, StateVector::basis(2, 1), 2.0, 0.01);
    EXPECT_EQ(compare_populations(a, a), 0.0);
    const auto b = propagate_lab(h, StateVector::basis(2, 1), 2.0, 0.02);
    EXPECT_THROW(compare_populations(a, b), std::invalid_argument);
}

TEST(ComparePopulations, WrongFrameDeviationGrowsWithError) {
    const auto s = lambda_system();
    const auto h = build_rwa_hamiltonian(s);
    const auto psi0 = StateVector::basis(4, 1);
    const auto lab = propagate_lab(h, psi0, 20.0, default_step(h), 20);
    const auto good = classify(s).frame;
    std::vector<double> deviations;
    for (double delta : {1e-4, 1e-3, 1e-2}) {
        auto wrong = good;
        wrong.omega_bar[2] += delta;  // level 3 touches every coupling
        // Fold the now-slightly-oscillating terms in anyway to expose the error.
        const auto f = propagate_frame(h, wrong, psi0, lab.times, 1.0);
        deviations.push_back(compare_populations(lab, f));
    }
    EXPECT_GT(deviations[0], 1e-6);
    EXPECT_GT(deviations[1], 5 * deviations[0]);
    EXPECT_GT(deviations[2], 5 * deviations[1]);
    // early-time deviation is smaller than late-time deviation
    auto wrong = good;
    wrong.omega_bar[2] += 1e-2;
    const auto f = propagate_frame(h, wrong, psi0, lab.times, 1.0);
    double early = 0.0, late = 0.0;
    for (std::size_t k = 0; k < lab.times.size(); ++k) {
        double d = 0.0;
        const auto pa = lab.states[k].populations(), pb = f.states[k].populations();
        for (std::size_t n = 0; n < 4; ++n) d = std::max(d, std::abs(pa[n] - pb[n]));
        (lab.times[k] < 2.0 ? early : late) = std::max(lab.times[k] < 2.0 ? early : late, d);
    }
    EXPECT_LT(early, late);
}

TEST(Defaults, HorizonAndStep) {
    const auto h = build_rwa_hamiltonian(lambda_system());
    // smallest |rabi| is |0.6 - 0.2i|
    EXPECT_NEAR(default_horizon(h), 10.0 / std::abs(Complex(0.6, -0.2)), 1e-12);
    EXPECT_NEAR(default_step(h), shortest_period(h) / 2000, 1e-15);
    EXPECT_THROW(default_horizon(TimeDependentHamiltonian{{0.0}, {}}), std::invalid_argument);
}
