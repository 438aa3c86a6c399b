#include <gtest/gtest.h>

#include <functional>

#include "qsdc/protocol.hpp"
#include "stats.hpp"

using namespace qsdc;

namespace {

struct BasisChoice {
    Basis basis;
    double weight;
};

using Choices = std::vector<BasisChoice>;

const Choices kRandomBasis{{Basis::HV, 0.5}, {Basis::DA, 0.5}};

// Exhaustive walk over Eve's basis choices and measurement outcomes for a
// photon that travels Bob -> Alice -> Bob on one arm with no beam-splitter
// losses. Returns the probability that Bob's analyzer reports `target`.
double enumerate_outcome(Polarization prep, const PolarizationUnitary& alice, const Choices& forward,
                         const Choices& backward, Basis analyzer, Polarization target) {
    std::function<double(const JonesVector&, const Choices&, std::function<double(const JonesVector&)>)> intercept =
        [](const JonesVector& state, const Choices& choices, std::function<double(const JonesVector&)> next) {
            if (choices.empty()) return next(state);
            double total = 0;
            for (const auto& c : choices)
                for (const auto& o : born_probabilities(state, c.basis))
                    if (o.probability > 0) total += c.weight * o.probability * next(prepare_polarization(o.label));
            return total;
        };
    return intercept(prepare_polarization(prep), forward, [&](const JonesVector& s) {
        return intercept(alice * s, backward, [&](const JonesVector& back) {
            for (const auto& o : born_probabilities(back, analyzer))
                if (o.label == target) return o.probability;
            return 0.0;
        });
    });
}

TrialConfig config(EveScenario eve, double r, ProtocolVariant v = ProtocolVariant::Standard) {
    TrialConfig c;
    c.variant = v;
    c.r = r;
    c.eve = default_policy(eve);
    return c;
}

} // namespace

TEST(Scenario, KnowledgeFlags) {
    EXPECT_FALSE(knowledge_of(EveScenario::Blind).knows_phi);
    EXPECT_FALSE(knowledge_of(EveScenario::Blind).knows_polarization);
    EXPECT_TRUE(knowledge_of(EveScenario::PhiAware).knows_phi);
    EXPECT_FALSE(knowledge_of(EveScenario::PhiAware).knows_polarization);
    EXPECT_FALSE(knowledge_of(EveScenario::PolarizationAware).knows_phi);
    EXPECT_TRUE(knowledge_of(EveScenario::PolarizationAware).knows_polarization);
    EXPECT_TRUE(knowledge_of(EveScenario::SuperEve).knows_phi);
    EXPECT_TRUE(knowledge_of(EveScenario::SuperEve).knows_polarization);
}

TEST(Scenario, ParseNames) {
    for (auto s : kAllScenarios) EXPECT_EQ(parse_scenario(to_string(s)), s);
    EXPECT_EQ(parse_scenario("polarization-aware"), EveScenario::PolarizationAware);
    EXPECT_EQ(parse_scenario("super-eve"), EveScenario::SuperEve);
    EXPECT_THROW(parse_scenario("mallory"), DomainError);
}

TEST(View, OnlyPermittedFields) {
    const auto b = EveView::of(EveScenario::Blind, Phi::Pi, Polarization::D);
    EXPECT_FALSE(b.phi);
    EXPECT_FALSE(b.preparation);
    const auto p = EveView::of(EveScenario::PhiAware, Phi::Pi, Polarization::D);
    EXPECT_EQ(p.phi, Phi::Pi);
    EXPECT_FALSE(p.preparation);
    const auto q = EveView::of(EveScenario::PolarizationAware, Phi::Pi, Polarization::D);
    EXPECT_FALSE(q.phi);
    EXPECT_EQ(q.preparation, Polarization::D);
}

TEST(Policy, ValidationRejectsForbiddenReads) {
    EvePolicy p = default_policy(EveScenario::Blind);
    p.forward = AttackRule::DeterministicPathsOnly;
    EXPECT_THROW(p.validate(), DomainError);
    p = default_policy(EveScenario::PhiAware);
    p.basis = BasisRule::AlignedToPreparation;
    EXPECT_THROW(p.validate(), DomainError);
    p = default_policy(EveScenario::None);
    p.backward = AttackRule::Always;
    EXPECT_THROW(p.validate(), DomainError);
    for (auto s : kAllScenarios) EXPECT_NO_THROW(default_policy(s).validate());
}

TEST(ForwardAttack, NonePassesThrough) {
    TrialStream rng(1, 1);
    const auto arms = launch(Phi::HalfPi, prepare_polarization(Polarization::D));
    const auto out = eve_forward_attack(default_policy(EveScenario::None), {}, arms, rng);
    EXPECT_FALSE(out.observation);
    EXPECT_EQ(out.state.right.h, arms.right.h);
    EXPECT_EQ(out.state.left.v, arms.left.v);
}

TEST(ForwardAttack, BlindCollapsesSuperposition) {
    const auto policy = default_policy(EveScenario::Blind);
    const auto arms = launch(Phi::HalfPi, prepare_polarization(Polarization::H));
    std::uint64_t right = 0;
    const std::uint64_t n = 40000;
    for (std::uint64_t i = 0; i < n; ++i) {
        TrialStream rng(2, i);
        const auto out = eve_forward_attack(policy, {}, arms, rng);
        ASSERT_TRUE(out.observation);
        const bool r = out.observation->arm == Arm::R;
        right += r;
        EXPECT_NEAR(out.state.weight(r ? Arm::R : Arm::L), 1.0, 1e-12);
        EXPECT_EQ(out.state.weight(r ? Arm::L : Arm::R), 0.0);
    }
    EXPECT_LT(std::abs(test::binomial_z(right, n, 0.5)), 5);
}

TEST(ForwardAttack, PolarizationAwareEigenstate) {
    const auto policy = default_policy(EveScenario::PolarizationAware);
    const auto view = EveView::of(EveScenario::PolarizationAware, Phi::Zero, Polarization::H);
    for (std::uint64_t i = 0; i < 100; ++i) {
        TrialStream rng(3, i);
        const auto out = eve_forward_attack(policy, view, launch(Phi::Zero, prepare_polarization(Polarization::H)), rng);
        EXPECT_EQ(out.observation->basis, Basis::HV);
        EXPECT_EQ(out.observation->outcome, Polarization::H);
        EXPECT_EQ(nearest_label(out.state.right), Polarization::H);
    }
}

TEST(ForwardAttack, BlindOnDiagonalMatchesEnumeration) {
    // phi=0, prep D, r=0, Alice identity, Bob analyzer DA.
    const auto id = message_unitary(WavePlateAngle::identity_setting());
    const double oracle = enumerate_outcome(Polarization::D, id, kRandomBasis, kRandomBasis, Basis::DA, Polarization::D);
    EXPECT_NEAR(oracle, 5.0 / 8, 1e-12);

    TrialOverrides f;
    f.phi = Phi::Zero;
    f.polarization = Polarization::D;
    f.alice = AliceEncoding::for_bit(Arm::R, 0);
    const std::uint64_t n = 100000;
    std::uint64_t d = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto rec = run_trial(config(EveScenario::Blind, 0.0), 9, i, f);
        ASSERT_EQ(rec.port, OutputPort::ToBobAnalyzer);
        d += rec.detected_polarization == Polarization::D;
    }
    EXPECT_LT(std::abs(test::binomial_z(d, n, oracle)), 5);
}

TEST(BackwardAttack, SuperEveReadsFlip) {
    TrialOverrides f;
    f.phi = Phi::Zero;
    f.polarization = Polarization::H;
    f.alice = AliceEncoding::for_bit(Arm::R, 1);
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto rec = run_trial(config(EveScenario::SuperEve, 0.0), 10, i, f);
        ASSERT_TRUE(rec.eve_backward);
        EXPECT_EQ(rec.eve_backward->outcome, Polarization::V);
        EXPECT_EQ(rec.eve_bit, 1);
        EXPECT_EQ(rec.detected_polarization, Polarization::V);
        EXPECT_FALSE(rec.eve_detected);
        EXPECT_TRUE(rec.eve_verified);
    }
}

TEST(BackwardAttack, NoneIsIdentity) {
    TrialStream rng(1, 2);
    const auto s = prepare_polarization(Polarization::A);
    const auto out = eve_backward_attack(default_policy(EveScenario::None), {}, Arm::L, s, rng);
    EXPECT_FALSE(out.observation);
    EXPECT_EQ(out.state.v, s.v);
}

// Conjugate test configuration against the fully informed eavesdropper:
// exhaustive enumeration of her outcome tree gives the alarm probability.
TEST(BackwardAttack, SuperEveConjugateTestMatchesEnumeration) {
    const auto test_op = message_unitary(WavePlateAngle::test_setting());
    const Choices aligned{{Basis::HV, 1.0}};
    // U(pi/8) H is A, so a D outcome is impossible without her.
    const double oracle = enumerate_outcome(Polarization::H, test_op, aligned, aligned, Basis::DA, Polarization::D);
    EXPECT_NEAR(oracle, 0.5, 1e-12);

    TrialOverrides f;
    f.phi = Phi::Zero;
    f.polarization = Polarization::H;
    f.analyzer_basis = Basis::DA;
    f.alice = AliceEncoding::test(Arm::R);
    const std::uint64_t n = 100000;
    std::uint64_t alarms = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto rec = run_trial(config(EveScenario::SuperEve, 0.0, ProtocolVariant::Modified), 12, i, f);
        ASSERT_TRUE(rec.conjugate_test);
        if (rec.eve_detected) {
            ++alarms;
            EXPECT_EQ(rec.alert, AlertReason::AnalyzerOutcome);
        }
    }
    EXPECT_LT(std::abs(test::binomial_z(alarms, n, oracle)), 5);

    // Without her the same configuration never alarms.
    for (std::uint64_t i = 0; i < 2000; ++i)
        EXPECT_FALSE(run_trial(config(EveScenario::None, 0.0, ProtocolVariant::Modified), 12, i, f).eve_detected);
}

TEST(InferBit, SharedBasis) {
    const EveObservation fwd{Segment::Forward, Arm::R, Basis::HV, Polarization::H, Polarization::H};
    const EveObservation bwd{Segment::Backward, Arm::R, Basis::HV, Polarization::V, Polarization::V};
    EXPECT_EQ(eve_infer_bit(fwd, bwd, EveScenario::SuperEve, Basis::HV), 1);
    EveObservation same = bwd;
    same.outcome = Polarization::H;
    EXPECT_EQ(eve_infer_bit(fwd, same, EveScenario::SuperEve, Basis::HV), 0);
}

TEST(InferBit, MissingOrMismatched) {
    const EveObservation fwd{Segment::Forward, Arm::R, Basis::HV, Polarization::H, Polarization::H};
    EveObservation bwd{Segment::Backward, Arm::R, Basis::HV, Polarization::V, Polarization::V};
    EXPECT_FALSE(eve_infer_bit(fwd, std::nullopt, EveScenario::Blind, Basis::HV));
    EXPECT_FALSE(eve_infer_bit(std::nullopt, bwd, EveScenario::Blind, Basis::HV));
    // Blind guessed HV but Bob prepared a diagonal state
    EXPECT_FALSE(eve_infer_bit(fwd, bwd, EveScenario::Blind, Basis::DA));
    EXPECT_EQ(eve_infer_bit(fwd, bwd, EveScenario::Blind, Basis::HV), 1);
    bwd.arm = Arm::L;
    EXPECT_FALSE(eve_infer_bit(fwd, bwd, EveScenario::SuperEve, Basis::HV));
    bwd.arm = Arm::R;
    bwd.basis = Basis::DA;
    EXPECT_FALSE(eve_infer_bit(fwd, bwd, EveScenario::SuperEve, Basis::HV));
}

TEST(Confinement, BlindBasisIndependentOfBobSettings) {
    std::array<std::array<std::uint64_t, 4>, 4> hv{}, total{};
    for (std::uint64_t i = 0; i < 200000; ++i) {
        const auto rec = run_trial(config(EveScenario::Blind, 0.5), 31, i);
        ASSERT_TRUE(rec.eve_forward);
        auto& t = total[index_of(rec.bob.phi)][index_of(rec.bob.polarization)];
        ++t;
        hv[index_of(rec.bob.phi)][index_of(rec.bob.polarization)] += rec.eve_forward->basis == Basis::HV;
    }
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
            EXPECT_LT(std::abs(test::binomial_z(hv[a][b], total[a][b], 0.5)), 5);
}

TEST(Confinement, PhiAwareLeavesSuperposedPathsAlone) {
    for (std::uint64_t i = 0; i < 50000; ++i) {
        const auto rec = run_trial(config(EveScenario::PhiAware, 0.5), 32, i);
        if (!is_deterministic(rec.bob.phi)) {
            EXPECT_FALSE(rec.eve_forward);
            EXPECT_FALSE(rec.eve_backward);
            EXPECT_FALSE(rec.eve_detected);
        }
    }
}

TEST(Confinement, PolarizationAwareForwardKeepsPreparation) {
    for (std::uint64_t i = 0; i < 50000; ++i) {
        const auto rec = run_trial(config(EveScenario::PolarizationAware, 0.5), 33, i);
        ASSERT_TRUE(rec.eve_forward);
        EXPECT_EQ(rec.eve_forward->outcome, rec.bob.polarization);
        if (rec.eve_detected) EXPECT_TRUE(rec.alert == AlertReason::InvalidArm || rec.alert == AlertReason::AnalyzerOutcome);
    }
}

TEST(SuperEve, StandardVariantNeverDetected) {
    SessionConfig s;
    s.trial = config(EveScenario::SuperEve, 0.5);
    s.n_trials = 100000;
    const auto st = run_session(s, 4);
    EXPECT_EQ(st.eve_detected, 0u);
    EXPECT_LT(std::abs(test::binomial_z(st.eve_verified, st.trials, 1.0 / 16)), 5);
}

TEST(SuperEve, ModifiedDetectionOnlyInConjugateTests) {
    SessionConfig s;
    s.trial = config(EveScenario::SuperEve, 0.25, ProtocolVariant::Modified);
    s.n_trials = 200000;
    const auto st = run_session(s, 4);
    EXPECT_GT(st.eve_detected, 0u);
    EXPECT_EQ(st.detections_outside_conjugate_tests, 0u);
    EXPECT_LT(std::abs(test::binomial_z(st.conjugate_test_detections, st.conjugate_tests, 0.5)), 5);
}

TEST(Resend, RandomPolarizationIsDetectable) {
    SessionConfig s;
    s.trial = config(EveScenario::SuperEve, 0.5);
    s.trial.eve.resend = ResendRule::RandomPolarization;
    s.n_trials = 50000;
    EXPECT_GT(run_session(s, 2).eve_detected, 0u);
}
