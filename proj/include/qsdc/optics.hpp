#pragma once

// Polarization algebra: Jones vectors, wave-plate and mirror unitaries, the
// arm-local message operations and Born-rule measurement.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "qsdc/types.hpp"

namespace qsdc {

using Complex = std::complex<double>;

inline constexpr double kAlgebraTolerance = 1e-12;
inline constexpr double kPhaseTolerance = 1e-10;

/// Two complex amplitudes over {H, V}. Sub-normalized vectors are used for
/// branch amplitudes inside the apparatus.
struct JonesVector {
    Complex h{};
    Complex v{};

    double norm_squared() const { return std::norm(h) + std::norm(v); }

    JonesVector normalized() const {
        const double n = std::sqrt(norm_squared());
        if (!(n > 0.0)) throw DomainError("cannot normalize a zero Jones vector");
        return {h / n, v / n};
    }

    friend JonesVector operator+(const JonesVector& a, const JonesVector& b) { return {a.h + b.h, a.v + b.v}; }
    friend JonesVector operator-(const JonesVector& a, const JonesVector& b) { return {a.h - b.h, a.v - b.v}; }
    friend JonesVector operator*(Complex s, const JonesVector& a) { return {s * a.h, s * a.v}; }
    friend JonesVector operator*(double s, const JonesVector& a) { return {s * a.h, s * a.v}; }
};

/// <a|b>
inline Complex inner(const JonesVector& a, const JonesVector& b) {
    return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

inline double fidelity(const JonesVector& a, const JonesVector& b) { return std::norm(inner(a, b)); }

/// 2x2 complex matrix, row-major.
struct PolarizationUnitary {
    Complex m00{1.0}, m01{}, m10{}, m11{1.0};

    static PolarizationUnitary identity() { return {}; }
    static PolarizationUnitary sigma_y() { return {0.0, Complex(0, -1), Complex(0, 1), 0.0}; }
    static PolarizationUnitary sigma_z() { return {1.0, 0.0, 0.0, -1.0}; }

    JonesVector operator*(const JonesVector& x) const { return {m00 * x.h + m01 * x.v, m10 * x.h + m11 * x.v}; }

    PolarizationUnitary operator*(const PolarizationUnitary& b) const {
        return {m00 * b.m00 + m01 * b.m10, m00 * b.m01 + m01 * b.m11, m10 * b.m00 + m11 * b.m10,
                m10 * b.m01 + m11 * b.m11};
    }

    PolarizationUnitary adjoint() const { return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)}; }

    std::array<Complex, 4> entries() const { return {m00, m01, m10, m11}; }

    /// Largest entrywise deviation of U^dagger U from the identity.
    double unitarity_defect() const {
        const auto p = adjoint() * *this;
        return std::max({std::abs(p.m00 - 1.0), std::abs(p.m01), std::abs(p.m10), std::abs(p.m11 - 1.0)});
    }

    bool is_unitary(double tol = kAlgebraTolerance) const { return unitarity_defect() <= tol; }
};

inline double max_entry_distance(const PolarizationUnitary& a, const PolarizationUnitary& b) {
    const auto x = a.entries();
    const auto y = b.entries();
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

/// Rotation angle of a quarter-wave plate. Any finite angle is accepted; the
/// protocol itself only uses pi/2, pi/4 and pi/8.
class WavePlateAngle {
  public:
    constexpr explicit WavePlateAngle(double radians) : radians_(radians) {}
    constexpr double radians() const { return radians_; }

    static constexpr WavePlateAngle identity_setting() { return WavePlateAngle(std::numbers::pi / 2); }
    static constexpr WavePlateAngle flip_setting() { return WavePlateAngle(std::numbers::pi / 4); }
    static constexpr WavePlateAngle test_setting() { return WavePlateAngle(std::numbers::pi / 8); }

    friend constexpr bool operator==(WavePlateAngle, WavePlateAngle) = default;

  private:
    double radians_;
};

inline PolarizationUnitary qwp_unitary(WavePlateAngle angle) {
    const double t = angle.radians();
    if (!std::isfinite(t)) throw DomainError("wave-plate angle must be finite");
    const double c = std::cos(2 * t);
    const double s = std::sin(2 * t);
    const double k = 1.0 / std::numbers::sqrt2;
    return {k * Complex(1.0, -c), k * Complex(0.0, -s), k * Complex(0.0, -s), k * Complex(1.0, c)};
}

/// QWP(theta) -> mirror -> QWP(-theta), returned in closed form with its exact
/// -i global phase. pi/2 gives the identity (up to phase), pi/4 gives sigma_y.
inline PolarizationUnitary message_unitary(WavePlateAngle angle) {
    const double t = angle.radians();
    if (!std::isfinite(t)) throw DomainError("wave-plate angle must be finite");
    const double c = std::cos(2 * t);
    const double s = std::sin(2 * t);
    const Complex mi(0.0, -1.0);
    return {mi * c, mi * s, -mi * s, mi * c};
}

inline JonesVector prepare_polarization(Polarization label) {
    const double k = 1.0 / std::numbers::sqrt2;
    switch (label) {
    case Polarization::H: return {1.0, 0.0};
    case Polarization::V: return {0.0, 1.0};
    case Polarization::D: return {k, k};
    case Polarization::A: return {k, -k};
    }
    throw DomainError("invalid polarization label");
}

struct BornOutcome {
    Polarization label;
    double probability;
};

/// Outcome probabilities of a projective measurement in `basis`. They sum to
/// the squared norm of `state`.
inline std::array<BornOutcome, 2> born_probabilities(const JonesVector& state, Basis basis) {
    if (!(state.norm_squared() > 0.0)) throw DomainError("Born rule on a zero-norm state");
    const auto labels = outcomes_of(basis);
    return {BornOutcome{labels[0], fidelity(prepare_polarization(labels[0]), state)},
            BornOutcome{labels[1], fidelity(prepare_polarization(labels[1]), state)}};
}

/// Nearest of {H, V, D, A} by fidelity; exact for every protocol angle.
inline Polarization nearest_label(const JonesVector& state) {
    Polarization best = Polarization::H;
    double best_f = -1.0;
    for (auto p : kAllPolarizations) {
        const double f = fidelity(prepare_polarization(p), state);
        if (f > best_f + 1e-12) {
            best_f = f;
            best = p;
        }
    }
    return best;
}

/// True iff a = e^{i alpha} b for some real alpha.
inline bool equal_up_to_global_phase(const PolarizationUnitary& a, const PolarizationUnitary& b,
                                     double tol = kPhaseTolerance) {
    const auto x = a.entries();
    const auto y = b.entries();
    // Phase from the largest entry of b.
    std::size_t k = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (std::abs(y[i]) > std::abs(y[k])) k = i;
    if (std::abs(y[k]) < tol) return max_entry_distance(a, b) <= tol;
    const Complex ratio = x[k] / y[k];
    if (std::abs(std::abs(ratio) - 1.0) > tol) return false;
    for (std::size_t i = 0; i < 4; ++i)
        if (std::abs(x[i] - ratio * y[i]) > tol) return false;
    return true;
}

} // namespace qsdc
