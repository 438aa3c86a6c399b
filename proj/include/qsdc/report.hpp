#pragma once

// Run configuration, machine-readable reports and per-trial transcripts for
// the command-line front end.

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsdc/analytics.hpp"
#include "qsdc/protocol.hpp"

namespace qsdc {

using Json = nlohmann::json;

inline constexpr double kZThreshold = 5.0;

struct RunConfig {
    ProtocolVariant variant = ProtocolVariant::Standard;
    std::string r = "0.5"; // kept as text so closed forms can use the exact value
    EveScenario eve = EveScenario::None;
    ResendRule resend = ResendRule::Eigenstate;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    PhiMode phi = PhiMode::Uniform;
    std::string message_file; // empty: seeded random bits
    std::string schedule;     // e.g. "S1:10000,S2:10000"; empty: single session
    std::string sweep;        // closed-form sweep name; empty: simulate
    std::string scenario = "pol-aware";
    std::string grid = "0:1:0.05";
    std::string out;
    bool transcript = false;
    unsigned workers = 1;

    Rational r_exact() const { return parse_rational(r); }

    void validate() const {
        const Rational q = r_exact();
        if (q < 0 || q > 1) throw DomainError("r must lie in [0, 1]");
        if (trials < 1) throw DomainError("trials must be >= 1");
        if (workers < 1) throw DomainError("workers must be >= 1");
        if (variant == ProtocolVariant::ScheduleS1 || variant == ProtocolVariant::ScheduleS2)
            throw DomainError("use --schedule for the S1/S2 stages");
        if (!schedule.empty()) (void)parse_schedule(schedule);
        if (!sweep.empty()) {
            (void)parse_sweep(sweep, scenario);
            (void)parse_grid(grid);
        }
        policy().validate();
    }

    EvePolicy policy() const {
        auto p = default_policy(eve);
        p.resend = resend;
        return p;
    }
};

constexpr std::string_view to_string(ResendRule r) {
    return r == ResendRule::Eigenstate ? "eigenstate" : "random";
}

inline ResendRule parse_resend(std::string_view s) {
    if (s == "eigenstate") return ResendRule::Eigenstate;
    if (s == "random") return ResendRule::RandomPolarization;
    throw DomainError("unknown resend rule: " + std::string(s));
}

inline Json to_json(const RunConfig& c) {
    return Json{{"variant", to_string(c.variant)},
                {"r", c.r},
                {"eve", to_string(c.eve)},
                {"resend", to_string(c.resend)},
                {"trials", c.trials},
                {"seed", c.seed},
                {"phi", to_string(c.phi)},
                {"message_file", c.message_file},
                {"schedule", c.schedule},
                {"sweep", c.sweep},
                {"scenario", c.scenario},
                {"grid", c.grid},
                {"out", c.out},
                {"transcript", c.transcript},
                {"workers", c.workers}};
}

/// Accepts a bare config object or a whole report (uses its "config" member).
inline RunConfig config_from_json(const Json& j_in) {
    const Json& j = j_in.contains("config") ? j_in.at("config") : j_in;
    RunConfig c;
    if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
    if (j.contains("r")) {
        const auto& r = j.at("r");
        c.r = r.is_string() ? r.get<std::string>() : r.dump();
    }
    if (j.contains("eve")) c.eve = parse_scenario(j.at("eve").get<std::string>());
    if (j.contains("resend")) c.resend = parse_resend(j.at("resend").get<std::string>());
    if (j.contains("trials")) c.trials = j.at("trials").get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("phi")) c.phi = parse_phi_mode(j.at("phi").get<std::string>());
    if (j.contains("message_file")) c.message_file = j.at("message_file").get<std::string>();
    if (j.contains("schedule")) c.schedule = j.at("schedule").get<std::string>();
    if (j.contains("sweep")) c.sweep = j.at("sweep").get<std::string>();
    if (j.contains("scenario")) c.scenario = j.at("scenario").get<std::string>();
    if (j.contains("grid")) c.grid = j.at("grid").get<std::string>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("transcript")) c.transcript = j.at("transcript").get<bool>();
    if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
    return c;
}

inline Json to_json(const SessionStatistics& s) {
    Json events = Json::object();
    for (auto e : kAllEvents) events[std::string(to_string(e))] = s.count(e);
    Json by_phi = Json::object();
    for (auto phi : kAllPhis) {
        Json ports = Json::object();
        for (auto p : kAllPorts) ports[std::string(to_string(p))] = s.phi_port[index_of(phi)][index_of(p)];
        by_phi[std::string(to_string(phi))] = Json{{"trials", s.phi_trials[index_of(phi)]}, {"ports", ports}};
    }
    Json alerts = Json::object();
    for (std::size_t i = 1; i < kAlertReasonCount; ++i)
        alerts[std::string(to_string(static_cast<AlertReason>(i)))] = s.alerts[i];
    return Json{{"trials", s.trials},
                {"events", events},
                {"phi_port_counts", by_phi},
                {"eve_detected", s.eve_detected},
                {"alerts", alerts},
                {"decoded_bits", s.decoded_bits},
                {"decode_errors", s.decode_errors},
                {"message_encoding", s.message_encoding},
                {"eve_inferred_bits", s.eve_inferred},
                {"eavesdropped_bits", s.eavesdropped_bits},
                {"eve_verified_bits", s.eve_verified},
                {"conjugate_tests", s.conjugate_tests},
                {"conjugate_test_detections", s.conjugate_test_detections},
                {"detections_outside_conjugate_tests", s.detections_outside_conjugate_tests}};
}

/// One empirical frequency next to its closed form.
struct Comparison {
    std::string quantity;
    std::uint64_t count = 0;
    std::uint64_t trials = 0;
    Rational closed_form;

    double empirical() const { return trials ? static_cast<double>(count) / trials : 0.0; }

    /// Binomial z-score; infinite when the closed form is 0 or 1 and the
    /// empirical value differs from it.
    double z() const {
        const double p = to_double(closed_form);
        const double var = p * (1 - p) / static_cast<double>(trials);
        const double diff = empirical() - p;
        if (var <= 0.0) return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
        return diff / std::sqrt(var);
    }

    bool consistent(double threshold = kZThreshold) const { return std::abs(z()) <= threshold; }
};

inline Json to_json(const Comparison& c) {
    const double z = c.z();
    return Json{{"quantity", c.quantity},
                {"count", c.count},
                {"trials", c.trials},
                {"empirical", c.empirical()},
                {"closed_form", to_fraction(c.closed_form)},
                {"closed_form_decimal", to_double(c.closed_form)},
                {"z", std::isfinite(z) ? Json(z) : Json(z > 0 ? "inf" : "-inf")},
                {"within_5_sigma", c.consistent()}};
}

inline std::vector<Phi> phis_of(PhiMode mode) {
    switch (mode) {
    case PhiMode::Uniform: return {kAllPhis.begin(), kAllPhis.end()};
    case PhiMode::DeterministicOnly: return {Phi::Zero, Phi::Pi};
    case PhiMode::SuperposedOnly: return {Phi::HalfPi, Phi::ThreeHalfPi};
    }
    return {};
}

/// Every closed form that applies to a session with this configuration.
inline std::vector<Comparison> compare_session(ProtocolVariant variant, EveScenario eve, ResendRule resend,
                                               PhiMode phi_mode, const Rational& r, const SessionStatistics& s) {
    std::vector<Comparison> out;
    const auto phis = phis_of(phi_mode);
    const auto events = average_over(phis, r);
    const std::uint64_t n = s.trials;

    if (eve == EveScenario::None) {
        if (variant == ProtocolVariant::Standard) {
            out.push_back({"p_message", s.count(EventClass::MessageDecoded), n, events.p_message});
            out.push_back({"p_eve_check", s.count(EventClass::EveCheck), n, events.p_eve_check});
            out.push_back({"p_discard", s.count(EventClass::Discarded), n, events.p_discard});
        } else if (variant == ProtocolVariant::Modified) {
            out.push_back({"p_message_encoding", s.message_encoding, n, Rational(2, 3) * events.p_message});
        }
        out.push_back({"p_eve_detected", s.eve_detected, n, Rational(0)});
        out.push_back({"p_decode_error", s.decode_errors, n, Rational(0)});
        return out;
    }

    const bool uniform = phi_mode == PhiMode::Uniform;
    if (eve == EveScenario::SuperEve) {
        if (variant == ProtocolVariant::Standard) {
            out.push_back({"p_eve_detected", s.eve_detected, n, Rational(0)});
            out.push_back({"p_eve_verified_bits", s.eve_verified, n, events.p_message});
        } else if (variant == ProtocolVariant::Modified) {
            out.push_back({"p_message_encoding", s.message_encoding, n, Rational(2, 3) * events.p_message});
            if (uniform) out.push_back({"p_eavesdropping", s.eavesdropped_bits, n, supereve_probability(r)});
        }
        return out;
    }

    if (variant == ProtocolVariant::Standard && uniform && resend == ResendRule::Eigenstate)
        out.push_back({"p_eavesdropping", s.eavesdropped_bits, n, eavesdrop_probability(eve, r)});
    return out;
}

inline Json known_discrepancies_json() {
    Json arr = Json::array();
    for (const auto& d : known_discrepancies())
        arr.push_back(Json{{"quantity", d.quantity},
                           {"r", to_fraction(d.r)},
                           {"quoted_value", d.quoted},
                           {"formula_value", to_fraction(d.formula)},
                           {"formula_decimal", to_double(d.formula)},
                           {"note", "quoted point value is not reproduced by the closed form; the formula value is used"}});
    return arr;
}

inline Json verdict_of(const std::vector<Comparison>& comparisons) {
    Json deviations = Json::array();
    for (const auto& c : comparisons)
        if (!c.consistent())
            deviations.push_back(Json{{"quantity", c.quantity}, {"measured", c.empirical()},
                                      {"closed_form", to_double(c.closed_form)}});
    return Json{{"consistent_with_closed_forms", deviations.empty()},
                {"summary", deviations.empty() ? "consistent with closed-form probabilities (|z| <= 5)"
                                               : "deviations from closed-form probabilities beyond 5 sigma"},
                {"deviations", deviations}};
}

inline Json session_report(const RunConfig& cfg, const SessionStatistics& stats) {
    const auto comparisons =
        compare_session(cfg.variant, cfg.eve, cfg.resend, cfg.phi, cfg.r_exact(), stats);
    Json cmp = Json::array();
    for (const auto& c : comparisons) cmp.push_back(to_json(c));
    return Json{{"kind", "session"},
                {"config", to_json(cfg)},
                {"statistics", to_json(stats)},
                {"comparisons", cmp},
                {"eve_detection", Json{{"detections", stats.eve_detected}, {"trials", stats.trials}}},
                {"verdict", verdict_of(comparisons)},
                {"known_discrepancies", known_discrepancies_json()}};
}

inline Json schedule_report(const RunConfig& cfg, const ScheduleResult& result) {
    Json stages = Json::array();
    for (std::size_t j = 0; j < result.stages.size(); ++j) {
        const auto& st = result.stages[j];
        stages.push_back(Json{{"stage", st.spec.stage == Stage::S1 ? "S1" : "S2"},
                              {"trials", st.spec.trials},
                              {"eve_detected", st.stats.eve_detected},
                              {"statistics", to_json(st.stats)}});
    }
    return Json{{"kind", "schedule"},
                {"config", to_json(cfg)},
                {"stages", stages},
                {"total_detections", result.total_detections()},
                {"verdict", result.clear ? "clear" : "eve-detected"},
                {"message_communication", result.clear ? "permitted" : "blocked"}};
}

inline Json transcript_record(const TrialRecord& rec) {
    Json announcements = Json::array();
    for (const auto& a : rec.announcements.items()) {
        Json j{{"from", a.origin == Party::Alice ? "alice" : "bob"}, {"kind", to_string(a.kind)}};
        if (a.kind == AnnouncementKind::DetectorClick) {
            j["detector"] = a.detector;
            j["polarization"] = to_string(a.polarization);
        }
        if (a.kind == AnnouncementKind::ActiveArm) j["arm"] = to_string(a.arm);
        if (a.kind == AnnouncementKind::EveAlert) j["reason"] = to_string(a.reason);
        announcements.push_back(std::move(j));
    }
    auto obs = [](const std::optional<EveObservation>& o) -> Json {
        if (!o) return nullptr;
        return Json{{"arm", to_string(o->arm)}, {"basis", to_string(o->basis)},
                    {"outcome", to_string(o->outcome)}, {"resent", to_string(o->resent)}};
    };
    auto opt_bit = [](const std::optional<int>& b) -> Json { return b ? Json(*b) : Json(nullptr); };
    return Json{{"trial", rec.index},
                {"bob", Json{{"polarization", to_string(rec.bob.polarization)},
                             {"phi", to_string(rec.bob.phi)},
                             {"analyzer_basis", to_string(rec.bob.analyzer_basis)}}},
                {"alice", Json{{"active_arm", to_string(rec.alice.active_arm)},
                               {"theta", rec.alice.theta.radians()},
                               {"message_bit", opt_bit(rec.alice.message_bit)}}},
                {"port", to_string(rec.port)},
                {"detected_polarization",
                 rec.detected_polarization ? Json(to_string(*rec.detected_polarization)) : Json(nullptr)},
                {"announcements", announcements},
                {"event", to_string(rec.event)},
                {"eve_detected", rec.eve_detected},
                {"alert", to_string(rec.alert)},
                {"decoded_bit", opt_bit(rec.decoded_bit)},
                {"eve_forward", obs(rec.eve_forward)},
                {"eve_backward", obs(rec.eve_backward)},
                {"eve_bit", opt_bit(rec.eve_bit)},
                {"eve_success", rec.eve_success}};
}

/// Reads a message file of '0'/'1' characters; whitespace is ignored.
inline std::vector<std::uint8_t> read_message_bits(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open message file: " + path);
    std::vector<std::uint8_t> bits;
    char c = 0;
    while (in.get(c)) {
        if (c == '0' || c == '1')
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        else if (!std::isspace(static_cast<unsigned char>(c)))
            throw DomainError(std::string("message file may only contain 0/1, found '") + c + "'");
    }
    if (bits.empty()) throw DomainError("message file is empty");
    return bits;
}

} // namespace qsdc
