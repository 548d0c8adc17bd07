#pragma once

// Numerical cross-check of frame transforms: fixed-step RK4 for
// i dpsi/dt = H(t) psi in the lab frame, and exact evolution
// psi(t) = U(t) exp(-i H' t) psi(0) in a frame where H' is static.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "frame_analysis.hpp"
#include "hamiltonian.hpp"
#include "matrix.hpp"

namespace rwaframe {

struct StateVector {
    ComplexVector amplitudes;

    static StateVector basis(std::size_t dimension, LevelIndex level) {
        if (level < 1 || level > dimension) throw std::out_of_range("basis state: level out of range");
        StateVector s{ComplexVector(dimension, Complex{})};
        s.amplitudes[level - 1] = 1.0;
        return s;
    }

    std::size_t size() const { return amplitudes.size(); }
    double norm() const { return rwaframe::norm(amplitudes); }

    std::vector<double> populations() const {
        std::vector<double> p;
        p.reserve(amplitudes.size());
        for (const auto& a : amplitudes) p.push_back(std::norm(a));
        return p;
    }
};

struct PropagationResult {
    std::vector<double> times;
    std::vector<StateVector> states;
    double norm_drift = 0.0;  // max | ||psi|| - 1 | over recorded states
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The frame leaves oscillatory terms behind, so exact exponentiation is not possible.
class FrameNotStaticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_normalised(const StateVector& psi, std::size_t dimension) {
    if (psi.size() != dimension) throw std::invalid_argument("initial state has the wrong dimension");
    if (std::abs(psi.norm() - 1.0) > 1e-12) throw std::invalid_argument("initial state is not normalised");
}

inline double norm_drift(const std::vector<StateVector>& states) {
    double d = 0.0;
    for (const auto& s : states) d = std::max(d, std::abs(s.norm() - 1.0));
    return d;
}

}  // namespace detail

/// Smallest period present in H(t): spectral bound and drive frequencies.
inline double shortest_period(const TimeDependentHamiltonian& h) {
    const double w = std::max(spectral_bound(h), max_term_frequency(h));
    return w > 0.0 ? 2.0 * std::numbers::pi / w : std::numeric_limits<double>::infinity();
}

/// Default RK4 step, shortest period / 2000.
inline double default_step(const TimeDependentHamiltonian& h) { return shortest_period(h) / 2000.0; }

/// Default horizon, 10 / min nonzero |rabi|.
inline double default_horizon(const TimeDependentHamiltonian& h) {
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& term : h.terms) {
        const double rabi = 2.0 * std::abs(term.amplitude);
        if (rabi > 0.0) smallest = std::min(smallest, rabi);
    }
    if (!std::isfinite(smallest)) throw std::invalid_argument("default horizon: no nonzero Rabi amplitude");
    return 10.0 / smallest;
}

/// Classic RK4 with fixed step. The step is shrunk so that an integer number
/// of steps lands exactly on t_final; every `record_every`-th state is kept,
/// always including t = 0 and t = t_final.
inline PropagationResult propagate_lab(const TimeDependentHamiltonian& h, const StateVector& psi0, double t_final,
                                       double step, std::size_t record_every = 1) {
    detail::require_normalised(psi0, h.dimension());
    if (!(step > 0.0) || !(t_final > 0.0) || !std::isfinite(step) || !std::isfinite(t_final))
        throw std::invalid_argument("propagate_lab: step and t_final must be positive and finite");
    if (record_every == 0) record_every = 1;
    const auto steps = static_cast<std::size_t>(std::ceil(t_final / step - 1e-9));
    const double dt = t_final / static_cast<double>(steps);
    const std::size_t n = h.dimension();

    auto rhs = [&](double t, const ComplexVector& psi) {
        ComplexVector out = evaluate(h, t) * psi;
        for (auto& x : out) x *= Complex{0.0, -1.0};
        return out;
    };
    auto axpy = [n](const ComplexVector& x, Complex a, const ComplexVector& y) {
        ComplexVector out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
        return out;
    };

    PropagationResult result;
    ComplexVector psi = psi0.amplitudes;
    result.times.push_back(0.0);
    result.states.push_back(psi0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = dt * static_cast<double>(k);
        const ComplexVector k1 = rhs(t, psi);
        const ComplexVector k2 = rhs(t + dt / 2, axpy(psi, dt / 2, k1));
        const ComplexVector k3 = rhs(t + dt / 2, axpy(psi, dt / 2, k2));
        const ComplexVector k4 = rhs(t + dt, axpy(psi, dt, k3));
        for (std::size_t i = 0; i < n; ++i) {
            psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(psi[i].real()) || !std::isfinite(psi[i].imag()))
                throw NumericalError("propagate_lab: non-finite amplitude for level " + std::to_string(i + 1) +
                                     " at t = " + std::to_string(t + dt));
        }
        if ((k + 1) % record_every == 0 || k + 1 == steps) {
            result.times.push_back(dt * static_cast<double>(k + 1));
            result.states.push_back({psi});
        }
    }
    result.norm_drift = detail::norm_drift(result.states);
    return result;
}

/// exp(-i M t) for Hermitian M, from one eigendecomposition.
///
/// M = A + iB is embedded as the real symmetric [[A, -B], [B, A]], which is
/// diagonalised by cyclic Jacobi. The embedding is an algebra homomorphism,
/// so cos(Mt) and sin(Mt) are read off the blocks of cos/sin of the
/// embedding, and exp(-iMt) = cos(Mt) - i sin(Mt).
class HermitianPropagator {
public:
    explicit HermitianPropagator(const ComplexMatrix& m) : n_(m.rows()) {
        if (m.rows() != m.cols()) throw std::invalid_argument("hermitian exponential: matrix is not square");
        const double scale = m.max_abs();
        if (max_abs_difference(m, m.adjoint()) > 1e-12 * scale)
            throw std::invalid_argument("hermitian exponential: matrix is not Hermitian");
        const std::size_t d = 2 * n_;
        std::vector<double> r(d * d, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                const double re = m(i, j).real(), im = m(i, j).imag();
                r[i * d + j] = re;
                r[(i + n_) * d + (j + n_)] = re;
                r[i * d + (j + n_)] = -im;
                r[(i + n_) * d + j] = im;
            }
        jacobi(r, d);
    }

    ComplexMatrix at(double t) const {
        const std::size_t d = 2 * n_;
        std::vector<double> c(d), s(d);
        for (std::size_t k = 0; k < d; ++k) {
            c[k] = std::cos(eigenvalues_[k] * t);
            s[k] = std::sin(eigenvalues_[k] * t);
        }
        ComplexMatrix out(n_, n_);
        // Block (i + n, j) of V f(L) V^T carries Im f(M)_ij; block (i, j) carries Re f(M)_ij.
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                double re_c = 0, im_c = 0, re_s = 0, im_s = 0;
                for (std::size_t k = 0; k < d; ++k) {
                    const double vj = v_[j * d + k];
                    const double top = v_[i * d + k] * vj, bottom = v_[(i + n_) * d + k] * vj;
                    re_c += top * c[k];
                    im_c += bottom * c[k];
                    re_s += top * s[k];
                    im_s += bottom * s[k];
                }
                // cos - i sin
                out(i, j) = Complex{re_c + im_s, im_c - re_s};
            }
        return out;
    }

    /// Eigenvalues of M, each listed twice (the embedding doubles them).
    const std::vector<double>& embedded_eigenvalues() const { return eigenvalues_; }

private:
    // Cyclic Jacobi on a symmetric d x d matrix; V accumulates rotations so
    // that A = V diag(eigenvalues) V^T.
    void jacobi(std::vector<double>& a, std::size_t d) {
        v_.assign(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i) v_[i * d + i] = 1.0;
        double total = 0.0;
        for (double x : a) total += x * x;
        const double threshold = 1e-14 * std::sqrt(total);
        auto off_norm = [&] {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    if (i != j) s += a[i * d + j] * a[i * d + j];
            return std::sqrt(s);
        };
        for (int sweep = 0; sweep < 100 && off_norm() > threshold; ++sweep) {
            for (std::size_t p = 0; p + 1 < d; ++p)
                for (std::size_t q = p + 1; q < d; ++q) {
                    const double apq = a[p * d + q];
                    if (apq == 0.0) continue;
                    const double theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                    const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                    for (std::size_t k = 0; k < d; ++k) {
                        const double akp = a[k * d + p], akq = a[k * d + q];
                        a[k * d + p] = c * akp - s * akq;
                        a[k * d + q] = s * akp + c * akq;
                    }
                    for (std::size_t k = 0; k < d; ++k) {
                        const double apk = a[p * d + k], aqk = a[q * d + k];
                        a[p * d + k] = c * apk - s * aqk;
                        a[q * d + k] = s * apk + c * aqk;
                    }
                    for (std::size_t k = 0; k < d; ++k) {
                        const double vkp = v_[k * d + p], vkq = v_[k * d + q];
                        v_[k * d + p] = c * vkp - s * vkq;
                        v_[k * d + q] = s * vkp + c * vkq;
                    }
                }
        }
        if (off_norm() > threshold) throw NumericalError("hermitian exponential: Jacobi sweeps did not converge");
        eigenvalues_.resize(d);
        for (std::size_t k = 0; k < d; ++k) eigenvalues_[k] = a[k * d + k];
    }

    std::size_t n_;
    std::vector<double> v_;
    std::vector<double> eigenvalues_;
};

inline ComplexMatrix hermitian_exponential(const ComplexMatrix& m, double t) { return HermitianPropagator(m).at(t); }

/// psi(t) = U(t) exp(-i H' t) psi(0) on the given time grid.
inline PropagationResult propagate_frame(const TimeDependentHamiltonian& h, const FrameSolution& frame,
                                         const StateVector& psi0, std::span<const double> times,
                                         std::optional<double> tolerance = std::nullopt) {
    detail::require_normalised(psi0, h.dimension());
    const TransformedHamiltonian hp = transform(h, frame, tolerance);
    if (!hp.time_independent()) {
        const auto& r = hp.residual.front();
        throw FrameNotStaticError("propagate_frame: frame leaves " + std::to_string(hp.residual.size()) +
                                  " oscillatory term(s), first on " + std::to_string(r.row) + "-" +
                                  std::to_string(r.col) + " at frequency " + std::to_string(r.frequency));
    }
    const HermitianPropagator evolve(hp.constant);
    PropagationResult result;
    for (double t : times) {
        result.times.push_back(t);
        result.states.push_back({frame_unitary(frame, t) * (evolve.at(t) * psi0.amplitudes)});
    }
    result.norm_drift = detail::norm_drift(result.states);
    return result;
}

/// Evenly spaced grid of `samples` intervals on [0, t_final].
inline PropagationResult propagate_frame(const TimeDependentHamiltonian& h, const FrameSolution& frame,
                                         const StateVector& psi0, double t_final, std::size_t samples = 1000) {
    if (!(t_final > 0.0) || samples == 0) throw std::invalid_argument("propagate_frame: bad time grid");
    std::vector<double> times;
    for (std::size_t k = 0; k <= samples; ++k) times.push_back(t_final * static_cast<double>(k) / samples);
    return propagate_frame(h, frame, psi0, times);
}

/// Max over times and levels of | |a_n|^2 - |b_n|^2 |.
inline double compare_populations(const PropagationResult& a, const PropagationResult& b) {
    if (a.times != b.times) throw std::invalid_argument("compare_populations: time grids differ");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        const auto pa = a.states[k].populations(), pb = b.states[k].populations();
        if (pa.size() != pb.size()) throw std::invalid_argument("compare_populations: dimensions differ");
        for (std::size_t n = 0; n < pa.size(); ++n) worst = std::max(worst, std::abs(pa[n] - pb[n]));
    }
    return worst;
}

/// Max over times of the amplitude-vector distance.
inline double compare_states(const PropagationResult& a, const PropagationResult& b) {
    if (a.times != b.times) throw std::invalid_argument("compare_states: time grids differ");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        ComplexVector diff = a.states[k].amplitudes;
        for (std::size_t n = 0; n < diff.size(); ++n) diff[n] -= b.states[k].amplitudes[n];
        worst = std::max(worst, norm(diff));
    }
    return worst;
}

}  // namespace rwaframe
