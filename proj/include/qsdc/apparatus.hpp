#pragma once

// Mode network between Bob's tunable beam-splitter (T-BS) and Alice's side:
// the two arms, the BS1/BS2 reflectors of reflectivity r, the BS3 combiner
// and Alice's four H/V detectors.
//
// The network is linear in the arm amplitudes. For a photon with Jones
// amplitudes psi_R, psi_L in the arms (u_R, u_L being Alice's message
// operations) the outputs are
//
//   DA1        sqrt(r(1-r)) u_R psi_R
//   DA2        sqrt(r(1-r)) u_L psi_L
//   DA3        sqrt(r/2) (psi_R - psi_L)
//   DA4       -sqrt(r/2) (psi_R + psi_L)
//   return R   (1-r) u_R psi_R
//   return L  -(1-r) u_L psi_L
//
// The returning photon reaches Bob's analyzer when the phase is
// deterministic and is discarded otherwise.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "qsdc/optics.hpp"
#include "qsdc/rng.hpp"

namespace qsdc {

inline double radians(Phi phi) {
    switch (phi) {
    case Phi::Zero: return 0.0;
    case Phi::HalfPi: return std::numbers::pi / 2;
    case Phi::Pi: return std::numbers::pi;
    case Phi::ThreeHalfPi: return 3 * std::numbers::pi / 2;
    }
    throw DomainError("invalid phase setting");
}

inline Phi phi_from_radians(double value, double tol = 1e-9) {
    for (auto phi : kAllPhis)
        if (std::abs(value - radians(phi)) <= tol) return phi;
    throw DomainError("phase must be one of 0, pi/2, pi, 3pi/2");
}

class Reflectivity {
  public:
    explicit Reflectivity(double r) : r_(r) {
        if (!(r >= 0.0 && r <= 1.0)) throw DomainError("reflectivity must lie in [0, 1]");
    }
    double value() const { return r_; }
    double transmittance() const { return 1.0 - r_; }

  private:
    double r_;
};

struct ArmAmplitudes {
    Complex right;
    Complex left;
};

inline ArmAmplitudes tbs_split(Phi phi) {
    const double k = 1.0 / std::numbers::sqrt2;
    switch (phi) {
    case Phi::Zero: return {1.0, 0.0};
    case Phi::HalfPi: return {k, k};
    case Phi::ThreeHalfPi: return {k, -k};
    case Phi::Pi: return {0.0, 1.0};
    }
    throw DomainError("invalid phase setting");
}

/// Photon between the T-BS and Alice: one (sub-normalized) Jones vector per arm.
struct ArmState {
    JonesVector right;
    JonesVector left;

    double weight(Arm a) const { return a == Arm::R ? right.norm_squared() : left.norm_squared(); }
    const JonesVector& at(Arm a) const { return a == Arm::R ? right : left; }
};

inline ArmState launch(Phi phi, const JonesVector& polarization) {
    const auto split = tbs_split(phi);
    return {split.right * polarization, split.left * polarization};
}

/// Amplitudes on every output of the network. The return branch keeps its
/// R and L components apart; only their total weight matters for the
/// discard port and only one of them is ever populated for the analyzer.
struct PortAmplitudeMap {
    OutputPort return_port = OutputPort::ToBobAnalyzer;
    std::array<JonesVector, 4> detectors{};
    JonesVector return_right{};
    JonesVector return_left{};

    double weight(OutputPort port) const {
        if (is_alice_detector(port)) return detectors[detector_number(port) - 1].norm_squared();
        if (port != return_port) return 0.0;
        return return_right.norm_squared() + return_left.norm_squared();
    }

    /// Amplitude at `port`. For the return port this is the coherent sum of the
    /// arm components.
    JonesVector amplitude(OutputPort port) const {
        if (is_alice_detector(port)) return detectors[detector_number(port) - 1];
        if (port != return_port) return {};
        return return_right + return_left;
    }

    double total_weight() const {
        double s = return_right.norm_squared() + return_left.norm_squared();
        for (const auto& d : detectors) s += d.norm_squared();
        return s;
    }
};

/// Propagates an arm-resolved photon through Alice's side.
inline PortAmplitudeMap propagate_arms(const ArmState& arms, Phi phi, Reflectivity refl,
                                       const PolarizationUnitary& u_right, const PolarizationUnitary& u_left) {
    if (!u_right.is_unitary() || !u_left.is_unitary())
        throw DomainError("message operations must be unitary");
    const double r = refl.value();
    const double t = refl.transmittance();
    const double to_own_detector = std::sqrt(r * t);
    const double to_combiner = std::sqrt(r / 2);

    const JonesVector right_after = u_right * arms.right;
    const JonesVector left_after = u_left * arms.left;

    PortAmplitudeMap out;
    out.return_port = is_deterministic(phi) ? OutputPort::ToBobAnalyzer : OutputPort::ToBobDiscard;
    out.detectors[0] = to_own_detector * right_after;
    out.detectors[1] = to_own_detector * left_after;
    out.detectors[2] = to_combiner * (arms.right - arms.left);
    out.detectors[3] = -to_combiner * (arms.right + arms.left);
    out.return_right = t * right_after;
    out.return_left = -t * left_after;
    return out;
}

inline PortAmplitudeMap propagate(Phi phi, Reflectivity refl, const PolarizationUnitary& u_right,
                                  const PolarizationUnitary& u_left, const JonesVector& input) {
    return propagate_arms(launch(phi, input), phi, refl, u_right, u_left);
}

struct PortSample {
    OutputPort port;
    JonesVector polarization; // normalized
    std::optional<Arm> return_arm; // set for the return port
};

inline constexpr double kNormViolationTolerance = 1e-9;

/// Draws the clicking port with Born weights.
inline PortSample sample_port(const PortAmplitudeMap& map, TrialStream& rng) {
    const double total = map.total_weight();
    if (std::abs(total - 1.0) > kNormViolationTolerance)
        throw std::logic_error("port amplitude map is not normalized");

    const std::array<const JonesVector*, 6> parts{&map.detectors[0], &map.detectors[1], &map.detectors[2],
                                                  &map.detectors[3], &map.return_right, &map.return_left};
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = parts.size();
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const double w = parts[i]->norm_squared();
        if (w <= 0.0) continue;
        last_nonzero = i;
        acc += w;
        if (u < acc) {
            pick = i;
            break;
        }
    }
    if (pick == parts.size()) pick = last_nonzero; // rounding at the top end

    PortSample s{};
    s.polarization = parts[pick]->normalized();
    if (pick < 4) {
        s.port = std::array{OutputPort::DA1, OutputPort::DA2, OutputPort::DA3, OutputPort::DA4}[pick];
    } else {
        s.port = map.return_port;
        s.return_arm = pick == 4 ? Arm::R : Arm::L;
    }
    return s;
}

/// Projective measurement; returns the outcome label.
inline Polarization measure(const JonesVector& state, Basis basis, TrialStream& rng) {
    const auto probs = born_probabilities(state.normalized(), basis);
    return rng.uniform() < probs[0].probability ? probs[0].label : probs[1].label;
}

} // namespace qsdc
