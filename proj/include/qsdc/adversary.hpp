#pragma once

// Intercept-resend eavesdroppers sitting between Bob's T-BS and Alice. Each
// scenario differs only in which of Bob's preparation settings it can read.

#include <optional>
#include <string_view>

#include "qsdc/apparatus.hpp"

namespace qsdc {

enum class EveScenario : std::uint8_t { None, Blind, PhiAware, PolarizationAware, SuperEve };

inline constexpr std::array<EveScenario, 5> kAllScenarios{EveScenario::None, EveScenario::Blind,
                                                          EveScenario::PhiAware, EveScenario::PolarizationAware,
                                                          EveScenario::SuperEve};

struct EveKnowledge {
    bool knows_polarization = false;
    bool knows_phi = false;
};

constexpr EveKnowledge knowledge_of(EveScenario s) {
    switch (s) {
    case EveScenario::None:
    case EveScenario::Blind: return {false, false};
    case EveScenario::PhiAware: return {false, true};
    case EveScenario::PolarizationAware: return {true, false};
    case EveScenario::SuperEve: return {true, true};
    }
    return {};
}

constexpr std::string_view to_string(EveScenario s) {
    switch (s) {
    case EveScenario::None: return "none";
    case EveScenario::Blind: return "blind";
    case EveScenario::PhiAware: return "phi-aware";
    case EveScenario::PolarizationAware: return "pol-aware";
    case EveScenario::SuperEve: return "super";
    }
    return "?";
}

inline EveScenario parse_scenario(std::string_view s) {
    if (s == "polarization-aware") return EveScenario::PolarizationAware;
    if (s == "super-eve") return EveScenario::SuperEve;
    for (auto e : kAllScenarios)
        if (to_string(e) == s) return e;
    throw DomainError("unknown eavesdropper scenario: " + std::string(s));
}

enum class AttackRule : std::uint8_t { Never, Always, DeterministicPathsOnly };
enum class BasisRule : std::uint8_t { UniformRandom, AlignedToPreparation };
enum class ResendRule : std::uint8_t { Eigenstate, RandomPolarization };

struct EvePolicy {
    EveScenario scenario = EveScenario::None;
    AttackRule forward = AttackRule::Never;
    AttackRule backward = AttackRule::Never;
    BasisRule basis = BasisRule::UniformRandom;
    ResendRule resend = ResendRule::Eigenstate;

    /// Throws if a rule needs information the scenario does not have.
    void validate() const {
        const auto k = knowledge_of(scenario);
        const bool uses_phi = forward == AttackRule::DeterministicPathsOnly ||
                              backward == AttackRule::DeterministicPathsOnly;
        if (uses_phi && !k.knows_phi) throw DomainError("policy reads phi but the scenario cannot");
        if (basis == BasisRule::AlignedToPreparation && !k.knows_polarization)
            throw DomainError("policy reads Bob's polarization but the scenario cannot");
        if (scenario == EveScenario::None && (forward != AttackRule::Never || backward != AttackRule::Never))
            throw DomainError("the no-eavesdropper scenario cannot attack");
    }
};

/// Default policy per scenario: attack every eligible trial, resend the
/// post-measurement eigenstate.
inline EvePolicy default_policy(EveScenario s) {
    switch (s) {
    case EveScenario::None: return {s, AttackRule::Never, AttackRule::Never};
    case EveScenario::Blind:
        return {s, AttackRule::Always, AttackRule::Always, BasisRule::UniformRandom};
    case EveScenario::PhiAware:
        return {s, AttackRule::DeterministicPathsOnly, AttackRule::Always, BasisRule::UniformRandom};
    case EveScenario::PolarizationAware:
        return {s, AttackRule::Always, AttackRule::Always, BasisRule::AlignedToPreparation};
    case EveScenario::SuperEve:
        return {s, AttackRule::DeterministicPathsOnly, AttackRule::Always, BasisRule::AlignedToPreparation};
    }
    return {};
}

/// The subset of Bob's settings a scenario may read. Fields the scenario is
/// not entitled to are empty.
struct EveView {
    std::optional<Phi> phi;
    std::optional<Polarization> preparation;

    static EveView of(EveScenario s, Phi phi, Polarization prep) {
        const auto k = knowledge_of(s);
        EveView v;
        if (k.knows_phi) v.phi = phi;
        if (k.knows_polarization) v.preparation = prep;
        return v;
    }
};

enum class Segment : std::uint8_t { Forward, Backward };

struct EveObservation {
    Segment segment = Segment::Forward;
    Arm arm = Arm::R;
    Basis basis = Basis::HV;
    Polarization outcome = Polarization::H;
    Polarization resent = Polarization::H;
};

struct ForwardAttack {
    ArmState state;
    std::optional<EveObservation> observation;
};

struct BackwardAttack {
    JonesVector state;
    std::optional<EveObservation> observation;
};

namespace detail {

inline Basis choose_basis(const EvePolicy& policy, const EveView& view, TrialStream& rng) {
    if (policy.basis == BasisRule::AlignedToPreparation) return basis_of(view.preparation.value());
    return rng.coin() ? Basis::DA : Basis::HV;
}

inline Polarization choose_resend(const EvePolicy& policy, Polarization outcome, TrialStream& rng) {
    if (policy.resend == ResendRule::RandomPolarization) return kAllPolarizations[rng.below(4)];
    return outcome;
}

inline bool eligible(AttackRule rule, const EveView& view) {
    switch (rule) {
    case AttackRule::Never: return false;
    case AttackRule::Always: return true;
    case AttackRule::DeterministicPathsOnly: return is_deterministic(view.phi.value());
    }
    return false;
}

} // namespace detail

/// Bob -> Alice interception. Eve's arm detectors find the photon in one arm
/// (collapsing a path superposition), she measures its polarization and sends
/// a fresh photon down the same arm.
inline ForwardAttack eve_forward_attack(const EvePolicy& policy, const EveView& view, const ArmState& arms,
                                        TrialStream& rng) {
    if (!detail::eligible(policy.forward, view)) return {arms, std::nullopt};

    const double p_right = arms.right.norm_squared() / (arms.right.norm_squared() + arms.left.norm_squared());
    const Arm arm = rng.uniform() < p_right ? Arm::R : Arm::L;
    const Basis basis = detail::choose_basis(policy, view, rng);
    const Polarization outcome = measure(arms.at(arm), basis, rng);
    const Polarization resent = detail::choose_resend(policy, outcome, rng);

    ArmState out{};
    (arm == Arm::R ? out.right : out.left) = prepare_polarization(resent);
    return {out, EveObservation{Segment::Forward, arm, basis, outcome, resent}};
}

/// Alice -> Bob interception of a photon heading for Bob's analyzer.
inline BackwardAttack eve_backward_attack(const EvePolicy& policy, const EveView& view, Arm arm,
                                          const JonesVector& returning, TrialStream& rng) {
    if (!detail::eligible(policy.backward, view)) return {returning, std::nullopt};
    const Basis basis = detail::choose_basis(policy, view, rng);
    const Polarization outcome = measure(returning, basis, rng);
    const Polarization resent = detail::choose_resend(policy, outcome, rng);
    return {prepare_polarization(resent), EveObservation{Segment::Backward, arm, basis, outcome, resent}};
}

/// Eve's guess of Alice's bit: did the polarization she sent forward come back
/// flipped? Needs both observations on the same arm with the returning photon
/// measured in a basis containing what she sent. For the scenarios that cannot
/// read Bob's polarization a guess only counts when her bases happened to be
/// Bob's (`bob_basis` is the accounting oracle, never visible to Eve).
inline std::optional<int> eve_infer_bit(const std::optional<EveObservation>& forward,
                                        const std::optional<EveObservation>& backward, EveScenario scenario,
                                        Basis bob_basis) {
    if (!forward || !backward) return std::nullopt;
    if (forward->arm != backward->arm) return std::nullopt;
    if (basis_of(forward->resent) != backward->basis) return std::nullopt;
    if (!knowledge_of(scenario).knows_polarization &&
        (forward->basis != bob_basis || backward->basis != bob_basis))
        return std::nullopt;
    return backward->outcome == forward->resent ? 0 : 1;
}

} // namespace qsdc
