#pragma once

// Shared enumerations for the two-fold (polarization x path) QSDC simulator.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qsdc {

class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

enum class Polarization : std::uint8_t { H, V, D, A };
enum class Basis : std::uint8_t { HV, DA };

/// Bob's tunable beam-splitter phase. Zero/Pi route the photon into one arm,
/// HalfPi/ThreeHalfPi send it into both arms at once.
enum class Phi : std::uint8_t { Zero, HalfPi, Pi, ThreeHalfPi };

enum class Arm : std::uint8_t { R, L };

enum class OutputPort : std::uint8_t { ToBobAnalyzer, ToBobDiscard, DA1, DA2, DA3, DA4 };

enum class EventClass : std::uint8_t { MessageDecoded, EveCheck, Discarded, EveDetected };

inline constexpr std::array<Polarization, 4> kAllPolarizations{Polarization::H, Polarization::V,
                                                               Polarization::D, Polarization::A};
inline constexpr std::array<Phi, 4> kAllPhis{Phi::Zero, Phi::HalfPi, Phi::Pi, Phi::ThreeHalfPi};
inline constexpr std::array<OutputPort, 6> kAllPorts{OutputPort::ToBobAnalyzer, OutputPort::ToBobDiscard,
                                                     OutputPort::DA1,           OutputPort::DA2,
                                                     OutputPort::DA3,           OutputPort::DA4};
inline constexpr std::array<EventClass, 4> kAllEvents{EventClass::MessageDecoded, EventClass::EveCheck,
                                                      EventClass::Discarded, EventClass::EveDetected};

constexpr std::size_t index_of(Phi phi) { return static_cast<std::size_t>(phi); }
constexpr std::size_t index_of(OutputPort port) { return static_cast<std::size_t>(port); }
constexpr std::size_t index_of(EventClass e) { return static_cast<std::size_t>(e); }
constexpr std::size_t index_of(Polarization p) { return static_cast<std::size_t>(p); }

constexpr Basis basis_of(Polarization p) {
    return (p == Polarization::H || p == Polarization::V) ? Basis::HV : Basis::DA;
}

constexpr Basis conjugate(Basis b) { return b == Basis::HV ? Basis::DA : Basis::HV; }

constexpr std::array<Polarization, 2> outcomes_of(Basis b) {
    return b == Basis::HV ? std::array{Polarization::H, Polarization::V}
                          : std::array{Polarization::D, Polarization::A};
}

constexpr Polarization orthogonal(Polarization p) {
    switch (p) {
    case Polarization::H: return Polarization::V;
    case Polarization::V: return Polarization::H;
    case Polarization::D: return Polarization::A;
    case Polarization::A: return Polarization::D;
    }
    return p;
}

constexpr bool is_deterministic(Phi phi) { return phi == Phi::Zero || phi == Phi::Pi; }

/// Arm a deterministic phase routes the photon into.
constexpr std::optional<Arm> routed_arm(Phi phi) {
    if (phi == Phi::Zero) return Arm::R;
    if (phi == Phi::Pi) return Arm::L;
    return std::nullopt;
}

constexpr bool is_alice_detector(OutputPort p) {
    return p == OutputPort::DA1 || p == OutputPort::DA2 || p == OutputPort::DA3 || p == OutputPort::DA4;
}

/// 1..4 for Alice's detectors, 0 otherwise.
constexpr int detector_number(OutputPort p) {
    switch (p) {
    case OutputPort::DA1: return 1;
    case OutputPort::DA2: return 2;
    case OutputPort::DA3: return 3;
    case OutputPort::DA4: return 4;
    default: return 0;
    }
}

constexpr std::string_view to_string(Polarization p) {
    constexpr std::array<std::string_view, 4> names{"H", "V", "D", "A"};
    return names[index_of(p)];
}
constexpr std::string_view to_string(Basis b) { return b == Basis::HV ? "HV" : "DA"; }
constexpr std::string_view to_string(Arm a) { return a == Arm::R ? "R" : "L"; }
constexpr std::string_view to_string(Phi phi) {
    constexpr std::array<std::string_view, 4> names{"0", "pi/2", "pi", "3pi/2"};
    return names[index_of(phi)];
}
constexpr std::string_view to_string(OutputPort p) {
    constexpr std::array<std::string_view, 6> names{"to_bob_analyzer", "to_bob_discard", "DA1", "DA2",
                                                    "DA3", "DA4"};
    return names[index_of(p)];
}
constexpr std::string_view to_string(EventClass e) {
    constexpr std::array<std::string_view, 4> names{"message_decoded", "eve_check", "discarded",
                                                    "eve_detected"};
    return names[index_of(e)];
}

inline Polarization parse_polarization(std::string_view s) {
    for (auto p : kAllPolarizations)
        if (to_string(p) == s) return p;
    throw DomainError("unknown polarization label: " + std::string(s));
}

} // namespace qsdc
