#pragma once

// One protocol round between Bob (photon source, T-BS, analyzer) and Alice
// (message operations, detectors), the public-channel exchange, event
// classification and the eavesdropper checks.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qsdc/adversary.hpp"
#include "qsdc/apparatus.hpp"

namespace qsdc {

enum class ProtocolVariant : std::uint8_t { Standard, Modified, ScheduleS1, ScheduleS2 };

constexpr std::string_view to_string(ProtocolVariant v) {
    switch (v) {
    case ProtocolVariant::Standard: return "standard";
    case ProtocolVariant::Modified: return "modified";
    case ProtocolVariant::ScheduleS1: return "S1";
    case ProtocolVariant::ScheduleS2: return "S2";
    }
    return "?";
}

inline ProtocolVariant parse_variant(std::string_view s) {
    for (auto v : {ProtocolVariant::Standard, ProtocolVariant::Modified, ProtocolVariant::ScheduleS1,
                   ProtocolVariant::ScheduleS2})
        if (to_string(v) == s) return v;
    throw DomainError("unknown protocol variant: " + std::string(s));
}

/// Bob's analyzer picks a random basis and Alice has the pi/8 test option.
constexpr bool uses_random_analyzer(ProtocolVariant v) {
    return v == ProtocolVariant::Modified || v == ProtocolVariant::ScheduleS2;
}

enum class PhiMode : std::uint8_t { Uniform, DeterministicOnly, SuperposedOnly };

constexpr std::string_view to_string(PhiMode m) {
    switch (m) {
    case PhiMode::Uniform: return "uniform";
    case PhiMode::DeterministicOnly: return "det-only";
    case PhiMode::SuperposedOnly: return "sup-only";
    }
    return "?";
}

inline PhiMode parse_phi_mode(std::string_view s) {
    for (auto m : {PhiMode::Uniform, PhiMode::DeterministicOnly, PhiMode::SuperposedOnly})
        if (to_string(m) == s) return m;
    throw DomainError("unknown phi mode: " + std::string(s));
}

struct BobPreparation {
    Polarization polarization = Polarization::H;
    Phi phi = Phi::Zero;
    Basis analyzer_basis = Basis::HV;
};

struct AliceEncoding {
    Arm active_arm = Arm::R;
    WavePlateAngle theta = WavePlateAngle::identity_setting();
    std::optional<int> message_bit; // empty for the pi/8 test option

    bool is_test() const { return !message_bit.has_value(); }

    PolarizationUnitary unitary(Arm arm) const {
        return message_unitary(arm == active_arm ? theta : WavePlateAngle::identity_setting());
    }

    static AliceEncoding for_bit(Arm arm, int bit) {
        return {arm, bit ? WavePlateAngle::flip_setting() : WavePlateAngle::identity_setting(), bit};
    }
    static AliceEncoding test(Arm arm) { return {arm, WavePlateAngle::test_setting(), std::nullopt}; }
};

enum class Party : std::uint8_t { Alice, Bob };

enum class AnnouncementKind : std::uint8_t { PhotonReturned, DetectorClick, ActiveArm, TestOperation, EveAlert };

enum class AlertReason : std::uint8_t {
    None,
    InvalidArm,
    DetectorPolarization,
    AnalyzerOutcome,
    DecodingFailure,
};
inline constexpr std::size_t kAlertReasonCount = 5;

constexpr std::string_view to_string(AlertReason r) {
    constexpr std::array<std::string_view, kAlertReasonCount> names{"none", "invalid-arm", "detector-polarization",
                                                                    "analyzer-outcome", "decoding-failure"};
    return names[static_cast<std::size_t>(r)];
}

constexpr std::string_view to_string(AnnouncementKind k) {
    constexpr std::array<std::string_view, 5> names{"photon_returned", "detector_click", "active_arm",
                                                    "test_operation", "eve_alert"};
    return names[static_cast<std::size_t>(k)];
}

/// Public-channel message. Has no field able to carry phi, Bob's
/// polarization label or the message bit.
struct Announcement {
    Party origin = Party::Bob;
    AnnouncementKind kind = AnnouncementKind::PhotonReturned;
    int detector = 0;                         // DetectorClick
    Polarization polarization = Polarization::H; // DetectorClick: presumed (DA1/DA2) or measured (DA3/DA4)
    Arm arm = Arm::R;                         // ActiveArm
    AlertReason reason = AlertReason::None;   // EveAlert

    static Announcement photon_returned() { return {Party::Bob, AnnouncementKind::PhotonReturned}; }
    static Announcement detector_click(int n, Polarization p) {
        return {Party::Alice, AnnouncementKind::DetectorClick, n, p};
    }
    static Announcement active_arm(Arm a) {
        Announcement x{Party::Alice, AnnouncementKind::ActiveArm};
        x.arm = a;
        return x;
    }
    static Announcement test_operation() { return {Party::Alice, AnnouncementKind::TestOperation}; }
    static Announcement eve_alert(AlertReason r) {
        Announcement x{Party::Bob, AnnouncementKind::EveAlert};
        x.reason = r;
        return x;
    }
};

/// Ordered public transcript of one round. At most four messages are ever sent.
class Transcript {
  public:
    void push(const Announcement& a) {
        if (size_ == items_.size()) throw std::logic_error("transcript overflow");
        items_[size_++] = a;
    }
    std::span<const Announcement> items() const { return {items_.data(), size_}; }

    const Announcement* find(AnnouncementKind k) const {
        for (const auto& a : items())
            if (a.kind == k) return &a;
        return nullptr;
    }

  private:
    std::array<Announcement, 4> items_{};
    std::size_t size_ = 0;
};

struct TrialRecord {
    std::uint64_t index = 0;
    ProtocolVariant variant = ProtocolVariant::Standard;
    double r = 0.5;
    EveScenario eve = EveScenario::None;

    BobPreparation bob;
    AliceEncoding alice;

    OutputPort port = OutputPort::ToBobDiscard;
    std::optional<Arm> return_arm;
    /// Alice's H/V outcome at a detector, or Bob's analyzer outcome.
    std::optional<Polarization> detected_polarization;
    Transcript announcements;

    EventClass event = EventClass::Discarded;
    bool eve_detected = false;
    AlertReason alert = AlertReason::None;
    std::optional<int> decoded_bit;

    std::optional<EveObservation> eve_forward;
    std::optional<EveObservation> eve_backward;
    std::optional<int> eve_bit;
    bool message_encoding = false; // a bit-carrying operation returned to Bob along the active arm
    bool eve_success = false;      // Eve holds the right bit of a message-encoding trial and stayed hidden
    bool eve_verified = false;
    bool conjugate_test = false; // pi/8 test on the active arm read out in the conjugate analyzer basis
};

// ---------------------------------------------------------------------------
// Classification and checks. These use only what Alice and Bob jointly know:
// Bob's own settings plus the public transcript.

/// Whether Alice's detector can fire for Bob's phase without interference.
inline bool detector_valid_for(Phi phi, OutputPort port) {
    switch (phi) {
    case Phi::Zero: return port != OutputPort::DA2;
    case Phi::Pi: return port != OutputPort::DA1;
    case Phi::HalfPi: return port != OutputPort::DA3;
    case Phi::ThreeHalfPi: return port != OutputPort::DA4;
    }
    return false;
}

inline EventClass classify_event(const TrialRecord& rec) {
    const Phi phi = rec.bob.phi;
    const OutputPort port = rec.port;

    if (port == OutputPort::ToBobDiscard) return EventClass::Discarded;
    if (!detector_valid_for(phi, port)) return EventClass::EveDetected;

    if (port == OutputPort::ToBobAnalyzer) {
        const auto* arm = rec.announcements.find(AnnouncementKind::ActiveArm);
        if (!arm || arm->arm != routed_arm(phi)) return EventClass::EveCheck;
        if (rec.announcements.find(AnnouncementKind::TestOperation)) return EventClass::EveCheck;
        if (rec.bob.analyzer_basis != basis_of(rec.bob.polarization)) return EventClass::Discarded;
        return EventClass::MessageDecoded;
    }

    if (is_deterministic(phi)) {
        // own-arm reflector detector and DA3 check, DA4 is dropped
        return port == OutputPort::DA4 ? EventClass::Discarded : EventClass::EveCheck;
    }
    // superposed: the populated combiner detector and DA1 check, DA2 is dropped
    return port == OutputPort::DA2 ? EventClass::Discarded : EventClass::EveCheck;
}

struct EveAlert {
    bool detected = false;
    AlertReason reason = AlertReason::None;
};

namespace detail {

inline constexpr double kImpossible = 1e-9;

/// Probability of seeing `outcome` when `state` is measured in basis_of(outcome).
inline double outcome_probability(const JonesVector& state, Polarization outcome) {
    return fidelity(prepare_polarization(outcome), state);
}

} // namespace detail

inline EveAlert check_eve_detection(const TrialRecord& rec) {
    if (is_alice_detector(rec.port) || rec.port == OutputPort::ToBobAnalyzer) {
        if (!detector_valid_for(rec.bob.phi, rec.port)) return {true, AlertReason::InvalidArm};
    }
    const JonesVector prepared = prepare_polarization(rec.bob.polarization);

    if (is_alice_detector(rec.port)) {
        if (basis_of(rec.bob.polarization) != Basis::HV) return {};
        const auto* click = rec.announcements.find(AnnouncementKind::DetectorClick);
        if (!click) return {};
        if (detail::outcome_probability(prepared, click->polarization) < detail::kImpossible)
            return {true, AlertReason::DetectorPolarization};
        return {};
    }

    if (rec.port == OutputPort::ToBobAnalyzer && rec.detected_polarization) {
        const auto* arm = rec.announcements.find(AnnouncementKind::ActiveArm);
        const bool on_active_arm = arm && arm->arm == routed_arm(rec.bob.phi);
        std::array<PolarizationUnitary, 2> candidates{message_unitary(WavePlateAngle::identity_setting())};
        std::size_t n = 1;
        if (on_active_arm) {
            if (rec.announcements.find(AnnouncementKind::TestOperation))
                candidates[0] = message_unitary(WavePlateAngle::test_setting());
            else
                candidates[n++] = message_unitary(WavePlateAngle::flip_setting());
        }
        const bool possible = std::any_of(candidates.begin(), candidates.begin() + n, [&](const auto& u) {
            return detail::outcome_probability(u * prepared, *rec.detected_polarization) >= detail::kImpossible;
        });
        if (!possible) return {true, AlertReason::AnalyzerOutcome};
    }
    return {};
}

/// 0 if the analyzer saw Bob's own polarization, 1 if it saw its sigma_y image.
inline std::optional<int> decode_message(Polarization prepared, Polarization outcome) {
    if (outcome == prepared) return 0;
    const auto flipped = nearest_label(PolarizationUnitary::sigma_y() * prepare_polarization(prepared));
    if (outcome == flipped) return 1;
    return std::nullopt;
}

// ---------------------------------------------------------------------------

struct TrialConfig {
    ProtocolVariant variant = ProtocolVariant::Standard;
    double r = 0.5;
    EvePolicy eve = default_policy(EveScenario::None);
    PhiMode phi_mode = PhiMode::Uniform;
    /// Message bits consumed cyclically by trial index; random bits when empty.
    std::span<const std::uint8_t> message;

    double effective_r() const {
        if (variant == ProtocolVariant::ScheduleS1) return 1.0;
        if (variant == ProtocolVariant::ScheduleS2) return 0.0;
        return r;
    }
};

/// Fixed settings for tests; unset fields are drawn as usual. Random draws are
/// always consumed so forcing a field leaves the rest of the stream unchanged.
struct TrialOverrides {
    std::optional<Polarization> polarization;
    std::optional<Phi> phi;
    std::optional<Basis> analyzer_basis;
    std::optional<AliceEncoding> alice;
};

inline TrialRecord run_trial(const TrialConfig& cfg, TrialStream& rng, std::uint64_t index = 0,
                             const TrialOverrides& force = {}) {
    cfg.eve.validate();
    const Reflectivity refl(cfg.effective_r());

    TrialRecord rec;
    rec.index = index;
    rec.variant = cfg.variant;
    rec.r = refl.value();
    rec.eve = cfg.eve.scenario;

    // Bob's settings.
    rec.bob.polarization = kAllPolarizations[rng.below(4)];
    switch (cfg.phi_mode) {
    case PhiMode::Uniform: rec.bob.phi = kAllPhis[rng.below(4)]; break;
    case PhiMode::DeterministicOnly: rec.bob.phi = rng.coin() ? Phi::Pi : Phi::Zero; break;
    case PhiMode::SuperposedOnly: rec.bob.phi = rng.coin() ? Phi::ThreeHalfPi : Phi::HalfPi; break;
    }
    const bool analyzer_coin = rng.coin();
    if (force.polarization) rec.bob.polarization = *force.polarization;
    if (force.phi) rec.bob.phi = *force.phi;
    rec.bob.analyzer_basis = uses_random_analyzer(cfg.variant)
                                 ? (analyzer_coin ? Basis::DA : Basis::HV)
                                 : basis_of(rec.bob.polarization);
    if (force.analyzer_basis) rec.bob.analyzer_basis = *force.analyzer_basis;

    // Alice's settings.
    const Arm arm = rng.coin() ? Arm::L : Arm::R;
    const unsigned option = rng.below(3);
    int bit = static_cast<int>(rng.coin());
    if (!cfg.message.empty()) bit = cfg.message[index % cfg.message.size()] ? 1 : 0;
    switch (cfg.variant) {
    case ProtocolVariant::Standard:
    case ProtocolVariant::ScheduleS1: rec.alice = AliceEncoding::for_bit(arm, bit); break;
    case ProtocolVariant::Modified:
        rec.alice = option == 2 ? AliceEncoding::test(arm) : AliceEncoding::for_bit(arm, bit);
        break;
    case ProtocolVariant::ScheduleS2: rec.alice = AliceEncoding::test(arm); break;
    }
    if (force.alice) rec.alice = *force.alice;

    const JonesVector prepared = prepare_polarization(rec.bob.polarization);
    const EveView view = EveView::of(cfg.eve.scenario, rec.bob.phi, rec.bob.polarization);

    // Bob -> Alice.
    auto forward = eve_forward_attack(cfg.eve, view, launch(rec.bob.phi, prepared), rng);
    rec.eve_forward = forward.observation;

    const auto map = propagate_arms(forward.state, rec.bob.phi, refl, rec.alice.unitary(Arm::R),
                                    rec.alice.unitary(Arm::L));
    const PortSample hit = sample_port(map, rng);
    rec.port = hit.port;
    rec.return_arm = hit.return_arm;

    if (is_alice_detector(hit.port)) {
        const Polarization seen = measure(hit.polarization, Basis::HV, rng);
        rec.detected_polarization = seen;
        Polarization announced = seen;
        if (hit.port == OutputPort::DA1 || hit.port == OutputPort::DA2) {
            const Arm detector_arm = hit.port == OutputPort::DA1 ? Arm::R : Arm::L;
            announced = nearest_label(rec.alice.unitary(detector_arm).adjoint() * prepare_polarization(seen));
        }
        rec.announcements.push(Announcement::detector_click(detector_number(hit.port), announced));
    } else if (hit.port == OutputPort::ToBobAnalyzer) {
        auto backward = eve_backward_attack(cfg.eve, view, *hit.return_arm, hit.polarization, rng);
        rec.eve_backward = backward.observation;
        rec.detected_polarization = measure(backward.state, rec.bob.analyzer_basis, rng);
        rec.announcements.push(Announcement::photon_returned());
        rec.announcements.push(Announcement::active_arm(rec.alice.active_arm));
        if (rec.alice.is_test()) rec.announcements.push(Announcement::test_operation());
    }

    rec.event = classify_event(rec);
    const EveAlert alert = check_eve_detection(rec);
    if (alert.detected) {
        rec.eve_detected = true;
        rec.alert = alert.reason;
        rec.event = EventClass::EveDetected;
    } else if (rec.event == EventClass::EveDetected) {
        rec.eve_detected = true;
        rec.alert = AlertReason::InvalidArm;
    }
    if (rec.event == EventClass::MessageDecoded) {
        rec.decoded_bit = decode_message(rec.bob.polarization, *rec.detected_polarization);
        if (!rec.decoded_bit) {
            rec.event = EventClass::EveDetected;
            rec.eve_detected = true;
            rec.alert = AlertReason::DecodingFailure;
        }
    }
    if (rec.eve_detected) rec.announcements.push(Announcement::eve_alert(rec.alert));

    const bool on_active_return = rec.port == OutputPort::ToBobAnalyzer && rec.return_arm == rec.alice.active_arm;
    rec.message_encoding = on_active_return && !rec.alice.is_test();
    rec.conjugate_test = on_active_return && rec.alice.is_test() &&
                         rec.bob.analyzer_basis == conjugate(basis_of(rec.bob.polarization));

    rec.eve_bit = eve_infer_bit(rec.eve_forward, rec.eve_backward, cfg.eve.scenario,
                                basis_of(rec.bob.polarization));
    rec.eve_success = rec.message_encoding && rec.eve_bit == rec.alice.message_bit && !rec.eve_detected;
    rec.eve_verified = rec.eve_success && cfg.eve.scenario == EveScenario::SuperEve;
    return rec;
}

inline TrialRecord run_trial(const TrialConfig& cfg, std::uint64_t master_seed, std::uint64_t index,
                             const TrialOverrides& force = {}) {
    TrialStream rng(master_seed, index);
    return run_trial(cfg, rng, index, force);
}

// ---------------------------------------------------------------------------

struct SessionStatistics {
    std::uint64_t trials = 0;
    std::array<std::uint64_t, 4> events{};
    std::array<std::uint64_t, 4> phi_trials{};
    std::array<std::array<std::uint64_t, 6>, 4> phi_port{};
    std::uint64_t eve_detected = 0;
    std::array<std::uint64_t, kAlertReasonCount> alerts{};
    std::uint64_t decoded_bits = 0;
    std::uint64_t decode_errors = 0;
    std::uint64_t message_encoding = 0;
    std::uint64_t eve_inferred = 0;
    std::uint64_t eavesdropped_bits = 0;
    std::uint64_t eve_verified = 0;
    std::uint64_t conjugate_tests = 0;
    std::uint64_t conjugate_test_detections = 0;
    std::uint64_t detections_outside_conjugate_tests = 0;

    void add(const TrialRecord& rec) {
        ++trials;
        ++events[index_of(rec.event)];
        ++phi_trials[index_of(rec.bob.phi)];
        ++phi_port[index_of(rec.bob.phi)][index_of(rec.port)];
        if (rec.eve_detected) {
            ++eve_detected;
            ++alerts[static_cast<std::size_t>(rec.alert)];
            if (rec.conjugate_test)
                ++conjugate_test_detections;
            else
                ++detections_outside_conjugate_tests;
        }
        if (rec.decoded_bit) {
            ++decoded_bits;
            if (rec.decoded_bit != rec.alice.message_bit) ++decode_errors;
        }
        if (rec.message_encoding) ++message_encoding;
        if (rec.eve_bit) ++eve_inferred;
        if (rec.eve_success) ++eavesdropped_bits;
        if (rec.eve_verified) ++eve_verified;
        if (rec.conjugate_test) ++conjugate_tests;
    }

    SessionStatistics& merge(const SessionStatistics& o) {
        trials += o.trials;
        for (std::size_t i = 0; i < events.size(); ++i) events[i] += o.events[i];
        for (std::size_t i = 0; i < 4; ++i) {
            phi_trials[i] += o.phi_trials[i];
            for (std::size_t j = 0; j < 6; ++j) phi_port[i][j] += o.phi_port[i][j];
        }
        eve_detected += o.eve_detected;
        for (std::size_t i = 0; i < alerts.size(); ++i) alerts[i] += o.alerts[i];
        decoded_bits += o.decoded_bits;
        decode_errors += o.decode_errors;
        message_encoding += o.message_encoding;
        eve_inferred += o.eve_inferred;
        eavesdropped_bits += o.eavesdropped_bits;
        eve_verified += o.eve_verified;
        conjugate_tests += o.conjugate_tests;
        conjugate_test_detections += o.conjugate_test_detections;
        detections_outside_conjugate_tests += o.detections_outside_conjugate_tests;
        return *this;
    }

    std::uint64_t count(EventClass e) const { return events[index_of(e)]; }
    double fraction(std::uint64_t k) const { return trials ? static_cast<double>(k) / trials : 0.0; }
    double frequency(EventClass e) const { return fraction(count(e)); }

    friend bool operator==(const SessionStatistics&, const SessionStatistics&) = default;
};

struct SessionConfig {
    TrialConfig trial;
    std::uint64_t n_trials = 1;
    std::uint64_t master_seed = 0;
};

using TrialSink = std::function<void(const TrialRecord&)>;

/// Runs n_trials independent rounds. Trial i always uses stream (seed, i), so
/// the statistics do not depend on `workers`. A sink forces in-order,
/// single-threaded execution.
inline SessionStatistics run_session(const SessionConfig& cfg, unsigned workers = 1, const TrialSink& sink = {}) {
    if (cfg.n_trials < 1) throw DomainError("a session needs at least one trial");
    cfg.trial.eve.validate();
    (void)Reflectivity(cfg.trial.effective_r());

    auto run_range = [&cfg](std::uint64_t begin, std::uint64_t end, SessionStatistics& out) {
        for (std::uint64_t i = begin; i < end; ++i) out.add(run_trial(cfg.trial, cfg.master_seed, i));
    };

    if (sink) {
        SessionStatistics stats;
        for (std::uint64_t i = 0; i < cfg.n_trials; ++i) {
            const auto rec = run_trial(cfg.trial, cfg.master_seed, i);
            stats.add(rec);
            sink(rec);
        }
        return stats;
    }

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(cfg.n_trials, 256))));
    if (workers == 1) {
        SessionStatistics stats;
        run_range(0, cfg.n_trials, stats);
        return stats;
    }
    std::vector<SessionStatistics> partial(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::uint64_t chunk = (cfg.n_trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = std::min(cfg.n_trials, w * chunk);
            const std::uint64_t end = std::min(cfg.n_trials, begin + chunk);
            pool.emplace_back([&, begin, end, w] { run_range(begin, end, partial[w]); });
        }
    }
    SessionStatistics stats;
    for (const auto& p : partial) stats.merge(p);
    return stats;
}

// ---------------------------------------------------------------------------
// Beforehand testing: alternate r=1 (everything used for checks) and r=0 with
// only the pi/8 test operation.

enum class Stage : std::uint8_t { S1, S2 };

struct StageSpec {
    Stage stage = Stage::S1;
    std::uint64_t trials = 1;
    friend bool operator==(const StageSpec&, const StageSpec&) = default;
};

struct StageResult {
    StageSpec spec;
    SessionStatistics stats;
};

struct ScheduleResult {
    std::vector<StageResult> stages;
    bool clear = true; // no Eve detection anywhere; gates message communication

    std::uint64_t total_detections() const {
        std::uint64_t n = 0;
        for (const auto& s : stages) n += s.stats.eve_detected;
        return n;
    }
};

inline std::vector<StageSpec> parse_schedule(std::string_view text) {
    std::vector<StageSpec> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view item = text.substr(pos, comma - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) throw DomainError("schedule stage must look like S1:1000");
        const std::string_view name = item.substr(0, colon);
        StageSpec spec;
        if (name == "S1")
            spec.stage = Stage::S1;
        else if (name == "S2")
            spec.stage = Stage::S2;
        else
            throw DomainError("unknown schedule stage: " + std::string(name));
        const std::string count(item.substr(colon + 1));
        std::size_t used = 0;
        long long n = 0;
        try {
            n = std::stoll(count, &used);
        } catch (const std::exception&) {
            throw DomainError("bad trial count in schedule: " + count);
        }
        if (used != count.size() || n < 1) throw DomainError("bad trial count in schedule: " + count);
        spec.trials = static_cast<std::uint64_t>(n);
        out.push_back(spec);
        pos = comma + 1;
    }
    return out;
}

inline ScheduleResult run_schedule(const std::vector<StageSpec>& stages, const EvePolicy& eve,
                                   std::uint64_t master_seed, unsigned workers = 1) {
    if (stages.empty()) throw DomainError("empty schedule");
    for (std::size_t i = 1; i < stages.size(); ++i)
        if (stages[i].stage == stages[i - 1].stage) throw DomainError("schedule stages must alternate S1/S2");

    ScheduleResult result;
    for (std::size_t j = 0; j < stages.size(); ++j) {
        const auto& spec = stages[j];
        if (spec.trials < 1) throw DomainError("each stage needs at least one trial");
        SessionConfig cfg;
        cfg.trial.variant = spec.stage == Stage::S1 ? ProtocolVariant::ScheduleS1 : ProtocolVariant::ScheduleS2;
        cfg.trial.eve = eve;
        cfg.n_trials = spec.trials;
        cfg.master_seed = derive_seed(master_seed, j);
        auto stats = run_session(cfg, workers);
        if (stats.eve_detected) result.clear = false;
        result.stages.push_back({spec, stats});
    }
    return result;
}

} // namespace qsdc
