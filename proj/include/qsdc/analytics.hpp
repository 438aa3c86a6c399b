#pragma once

// Closed-form event and eavesdropping probabilities, evaluated exactly in
// rational arithmetic.

#include <boost/multiprecision/cpp_int.hpp>

#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qsdc/adversary.hpp"
#include "qsdc/types.hpp"

namespace qsdc {

using Rational = boost::multiprecision::cpp_rational;

inline Rational rational(long long num, long long den = 1) { return Rational(num, den); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Parses "0.05", "1/20", "-3", "2.5e-1" into an exact rational.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw DomainError("empty number");
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        const Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw DomainError("zero denominator in " + s);
        return parse_rational(s.substr(0, slash)) / den;
    }
    long long exponent = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
        try {
            std::size_t used = 0;
            exponent = std::stoll(s.substr(e + 1), &used);
            if (used != s.size() - e - 1) throw DomainError("bad exponent");
        } catch (const std::exception&) {
            throw DomainError("bad number: " + s);
        }
        s.resize(e);
    }
    bool negative = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
    boost::multiprecision::cpp_int digits = 0;
    long long scale = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            digits = digits * 10 + (c - '0');
            seen_digit = true;
            if (seen_dot) ++scale;
        } else {
            throw DomainError("bad number: " + std::string(text));
        }
    }
    if (!seen_digit) throw DomainError("bad number: " + std::string(text));
    exponent -= scale;
    Rational q(digits);
    const boost::multiprecision::cpp_int ten_pow = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                            static_cast<unsigned>(std::llabs(exponent)));
    q = exponent >= 0 ? q * Rational(ten_pow) : q / Rational(ten_pow);
    return negative ? -q : q;
}

/// Fixed-point decimal rendering (round half away from zero).
inline std::string to_decimal(const Rational& q, int places = 12) {
    using boost::multiprecision::cpp_int;
    const cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(places));
    const Rational scaled = abs(q) * Rational(scale);
    cpp_int whole = numerator(scaled) / denominator(scaled);
    const cpp_int rem = numerator(scaled) % denominator(scaled);
    if (2 * rem >= denominator(scaled)) ++whole;
    std::string digits = whole.str();
    if (digits.size() <= static_cast<std::size_t>(places)) digits.insert(0, places + 1 - digits.size(), '0');
    std::string out = (q < 0 && whole != 0 ? "-" : "") + digits.substr(0, digits.size() - places);
    if (places > 0) out += "." + digits.substr(digits.size() - places);
    return out;
}

inline std::string to_fraction(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

inline void require_unit_interval(const Rational& r) {
    if (r < 0 || r > 1) throw DomainError("reflectivity must lie in [0, 1]");
}

struct EventProbabilities {
    Rational p_message;
    Rational p_eve_check;
    Rational p_discard;
};

/// Averaged over the four equally likely phases.
inline EventProbabilities event_probabilities(const Rational& r) {
    require_unit_interval(r);
    const Rational t = 1 - r;
    return {t * t / 4, (1 + 4 * r - 2 * r * r) / 4, (2 - 2 * r + r * r) / 4};
}

/// One row of the per-phase event table: where the photon ends up, what the
/// round is used for, and how likely it is.
struct PhiEventEntry {
    OutputPort port;
    EventClass use;
    Rational probability;
};

/// Per-phase event tables, encoded as data.
inline std::vector<PhiEventEntry> per_phi_event_table(Phi phi, const Rational& r) {
    require_unit_interval(r);
    const Rational t = 1 - r;
    switch (phi) {
    case Phi::Zero:
        return {{OutputPort::ToBobAnalyzer, EventClass::MessageDecoded, t * t / 2},
                {OutputPort::ToBobAnalyzer, EventClass::EveCheck, t * t / 2},
                {OutputPort::DA1, EventClass::EveCheck, r * t},
                {OutputPort::DA3, EventClass::EveCheck, r / 2},
                {OutputPort::DA4, EventClass::Discarded, r / 2}};
    case Phi::Pi:
        return {{OutputPort::ToBobAnalyzer, EventClass::MessageDecoded, t * t / 2},
                {OutputPort::ToBobAnalyzer, EventClass::EveCheck, t * t / 2},
                {OutputPort::DA2, EventClass::EveCheck, r * t},
                {OutputPort::DA3, EventClass::EveCheck, r / 2},
                {OutputPort::DA4, EventClass::Discarded, r / 2}};
    case Phi::HalfPi:
        return {{OutputPort::ToBobDiscard, EventClass::Discarded, t * t},
                {OutputPort::DA4, EventClass::EveCheck, r},
                {OutputPort::DA1, EventClass::EveCheck, r * t / 2},
                {OutputPort::DA2, EventClass::Discarded, r * t / 2}};
    case Phi::ThreeHalfPi:
        return {{OutputPort::ToBobDiscard, EventClass::Discarded, t * t},
                {OutputPort::DA3, EventClass::EveCheck, r},
                {OutputPort::DA1, EventClass::EveCheck, r * t / 2},
                {OutputPort::DA2, EventClass::Discarded, r * t / 2}};
    }
    throw DomainError("invalid phase setting");
}

inline Rational table_probability(const std::vector<PhiEventEntry>& table, OutputPort port) {
    Rational s = 0;
    for (const auto& e : table)
        if (e.port == port) s += e.probability;
    return s;
}

inline Rational table_probability(const std::vector<PhiEventEntry>& table, EventClass use) {
    Rational s = 0;
    for (const auto& e : table)
        if (e.use == use) s += e.probability;
    return s;
}

/// Event probabilities averaged over a set of equally likely phases.
inline EventProbabilities average_over(std::span<const Phi> phis, const Rational& r) {
    if (phis.empty()) throw DomainError("empty phase set");
    EventProbabilities out{0, 0, 0};
    for (auto phi : phis) {
        const auto table = per_phi_event_table(phi, r);
        out.p_message += table_probability(table, EventClass::MessageDecoded);
        out.p_eve_check += table_probability(table, EventClass::EveCheck);
        out.p_discard += table_probability(table, EventClass::Discarded);
    }
    const Rational n(static_cast<long long>(phis.size()));
    out.p_message /= n;
    out.p_eve_check /= n;
    out.p_discard /= n;
    return out;
}

/// Probability of Eve staying hidden, split by where she could be caught:
/// (i) Bob->Alice on superposed paths, (ii) Bob->Alice on deterministic paths,
/// (iii) Alice->Bob on deterministic paths.
struct UndetectedDecomposition {
    Rational case_i;
    Rational case_ii;
    Rational case_iii;

    Rational total() const { return case_i + case_ii + case_iii; }
};

inline UndetectedDecomposition undetected_decomposition(EveScenario scenario, const Rational& r) {
    require_unit_interval(r);
    const Rational t = 1 - r;
    switch (scenario) {
    case EveScenario::Blind:
        return {(41 - 28 * r + 11 * r * r) / 384, (5 * r - 3 * r * r) / 32, Rational(13, 128) * t * t};
    case EveScenario::PhiAware: return {Rational(1, 2), r * (5 - 3 * r) / 32, Rational(13, 128) * t * t};
    case EveScenario::PolarizationAware: return {Rational(1, 2), r * (5 - 3 * r) / 12, t * t / 2};
    case EveScenario::SuperEve:
        throw DomainError("no undetected decomposition for the super eavesdropper; use supereve_probability");
    case EveScenario::None: break;
    }
    throw DomainError("undetected decomposition needs an eavesdropping scenario");
}

/// Probability that Eve obtains one message bit, for the three limited-knowledge
/// scenarios. Also checks that the closed form equals its composition from the
/// undetected decomposition.
inline Rational eavesdrop_probability(EveScenario scenario, const Rational& r) {
    require_unit_interval(r);
    const Rational t = 1 - r;
    Rational closed;
    Rational factor;
    switch (scenario) {
    case EveScenario::Blind:
        closed = t * t * (40 - 23 * r + 7 * r * r) / 12288;
        factor = Rational(1, 16);
        break;
    case EveScenario::PhiAware:
        closed = t * t * (77 - 6 * r + r * r) / 8192;
        factor = Rational(1, 16);
        break;
    case EveScenario::PolarizationAware:
        closed = t * t * (12 - 7 * r + 3 * r * r) / 48;
        factor = Rational(1);
        break;
    default: throw DomainError("eavesdrop_probability covers blind, phi-aware and pol-aware");
    }
    const Rational composed = factor * event_probabilities(r).p_message * undetected_decomposition(scenario, r).total();
    if (composed != closed) throw std::logic_error("eavesdropping closed form disagrees with its decomposition");
    return closed;
}

/// The super eavesdropper against the modified encoding gets every
/// message-encoding event, i.e. two thirds of the standard message events.
inline Rational supereve_probability(const Rational& r) {
    require_unit_interval(r);
    return Rational(2, 3) * event_probabilities(r).p_message;
}

// ---------------------------------------------------------------------------

enum class SweepQuantity : std::uint8_t {
    Events,          // p_message, p_eve_check, p_discard
    PMessage,
    PEveCheck,
    PDiscard,
    Eavesdropping,   // blind, phi-aware, pol-aware
    PEavesdropping,  // one scenario
    SuperEve,
};

struct SweepSelector {
    SweepQuantity quantity = SweepQuantity::Events;
    EveScenario scenario = EveScenario::PolarizationAware; // PEavesdropping only
};

inline SweepSelector parse_sweep(std::string_view name, std::string_view scenario = "pol-aware") {
    SweepSelector s;
    if (name == "events" || name == "fig-events")
        s.quantity = SweepQuantity::Events;
    else if (name == "p-message")
        s.quantity = SweepQuantity::PMessage;
    else if (name == "p-eve-check")
        s.quantity = SweepQuantity::PEveCheck;
    else if (name == "p-discard")
        s.quantity = SweepQuantity::PDiscard;
    else if (name == "eavesdropping" || name == "fig-eavesdropping")
        s.quantity = SweepQuantity::Eavesdropping;
    else if (name == "p-eavesdropping")
        s.quantity = SweepQuantity::PEavesdropping;
    else if (name == "super" || name == "p-supereve")
        s.quantity = SweepQuantity::SuperEve;
    else
        throw DomainError("unknown sweep quantity: " + std::string(name));
    if (s.quantity == SweepQuantity::PEavesdropping) {
        s.scenario = parse_scenario(scenario);
        if (s.scenario == EveScenario::SuperEve) s.quantity = SweepQuantity::SuperEve;
        if (s.scenario == EveScenario::None) throw DomainError("p-eavesdropping needs an eavesdropper scenario");
    }
    return s;
}

struct SweepTable {
    std::vector<std::string> columns; // first column is "r"
    std::vector<std::vector<Rational>> rows;
};

inline std::vector<std::string> sweep_columns(const SweepSelector& sel) {
    switch (sel.quantity) {
    case SweepQuantity::Events: return {"r", "p_message", "p_eve_check", "p_discard"};
    case SweepQuantity::PMessage: return {"r", "p_message"};
    case SweepQuantity::PEveCheck: return {"r", "p_eve_check"};
    case SweepQuantity::PDiscard: return {"r", "p_discard"};
    case SweepQuantity::Eavesdropping: return {"r", "p_eav_blind", "p_eav_phi_aware", "p_eav_pol_aware"};
    case SweepQuantity::PEavesdropping: return {"r", "p_eav_" + std::string(to_string(sel.scenario))};
    case SweepQuantity::SuperEve: return {"r", "p_eav_super"};
    }
    return {"r"};
}

inline std::vector<Rational> sweep_values(const SweepSelector& sel, const Rational& r) {
    switch (sel.quantity) {
    case SweepQuantity::Events: {
        const auto e = event_probabilities(r);
        return {e.p_message, e.p_eve_check, e.p_discard};
    }
    case SweepQuantity::PMessage: return {event_probabilities(r).p_message};
    case SweepQuantity::PEveCheck: return {event_probabilities(r).p_eve_check};
    case SweepQuantity::PDiscard: return {event_probabilities(r).p_discard};
    case SweepQuantity::Eavesdropping:
        return {eavesdrop_probability(EveScenario::Blind, r), eavesdrop_probability(EveScenario::PhiAware, r),
                eavesdrop_probability(EveScenario::PolarizationAware, r)};
    case SweepQuantity::PEavesdropping: return {eavesdrop_probability(sel.scenario, r)};
    case SweepQuantity::SuperEve: return {supereve_probability(r)};
    }
    return {};
}

/// Inclusive grid start, start+step, ... up to stop.
inline std::vector<Rational> make_grid(const Rational& start, const Rational& stop, const Rational& step) {
    if (step <= 0) throw DomainError("grid step must be positive");
    if (start > stop) throw DomainError("grid start exceeds stop");
    require_unit_interval(start);
    require_unit_interval(stop);
    std::vector<Rational> grid;
    for (Rational x = start; x <= stop; x += step) grid.push_back(x);
    return grid;
}

/// Parses "A:B:STEP".
inline std::vector<Rational> parse_grid(std::string_view spec) {
    const auto a = spec.find(':');
    const auto b = a == std::string_view::npos ? a : spec.find(':', a + 1);
    if (a == std::string_view::npos || b == std::string_view::npos)
        throw DomainError("grid must look like A:B:STEP");
    return make_grid(parse_rational(spec.substr(0, a)), parse_rational(spec.substr(a + 1, b - a - 1)),
                     parse_rational(spec.substr(b + 1)));
}

inline SweepTable sweep(const SweepSelector& sel, const std::vector<Rational>& grid) {
    SweepTable table{sweep_columns(sel), {}};
    for (const auto& r : grid) {
        std::vector<Rational> row{r};
        for (auto& v : sweep_values(sel, r)) row.push_back(std::move(v));
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Delimited text with a header row; values as fixed-point decimals.
inline std::string render_table(const SweepTable& table, char delimiter = ',', int places = 12) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? std::string(1, delimiter) : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? std::string(1, delimiter) : "") << to_decimal(row[i], places);
        out << '\n';
    }
    return out.str();
}

/// Point values quoted alongside the closed forms that the closed forms do not
/// reproduce. Reports list them instead of silently matching the quote.
struct KnownDiscrepancy {
    std::string quantity;
    Rational r;
    double quoted;
    Rational formula;
};

inline std::vector<KnownDiscrepancy> known_discrepancies() {
    return {{"p_eavesdropping.blind", Rational(0), 0.0019, eavesdrop_probability(EveScenario::Blind, Rational(0))}};
}

} // namespace qsdc
