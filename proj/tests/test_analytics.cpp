#include <gtest/gtest.h>

#include "qsdc/analytics.hpp"

using namespace qsdc;

namespace {

Rational q(long long a, long long b = 1) { return Rational(a, b); }

void expect_events(const EventProbabilities& e, Rational m, Rational c, Rational d) {
    EXPECT_EQ(e.p_message, m);
    EXPECT_EQ(e.p_eve_check, c);
    EXPECT_EQ(e.p_discard, d);
}

std::vector<Rational> grid_of_twentieths() { return make_grid(q(0), q(1), q(1, 20)); }

} // namespace

TEST(Rationals, Parse) {
    EXPECT_EQ(parse_rational("0.5"), q(1, 2));
    EXPECT_EQ(parse_rational("1/3"), q(1, 3));
    EXPECT_EQ(parse_rational("0.05"), q(1, 20));
    EXPECT_EQ(parse_rational("1"), q(1));
    EXPECT_EQ(parse_rational("2.5e-1"), q(1, 4));
    for (auto bad : {"", "abc", "1/0", "0.5.5", "1/", "--1"}) EXPECT_THROW(parse_rational(bad), DomainError) << bad;
}

TEST(Rationals, Render) {
    EXPECT_EQ(to_decimal(q(1, 16), 4), "0.0625");
    EXPECT_EQ(to_decimal(q(2, 3), 3), "0.667");
    EXPECT_EQ(to_fraction(q(37, 768)), "37/768");
    EXPECT_EQ(to_fraction(q(0)), "0");
}

TEST(Events, PointValues) {
    expect_events(event_probabilities(q(1, 2)), q(1, 16), q(5, 8), q(5, 16));
    expect_events(event_probabilities(q(0)), q(1, 4), q(1, 4), q(1, 2));
    expect_events(event_probabilities(q(1)), q(0), q(3, 4), q(1, 4));
    EXPECT_THROW(event_probabilities(q(-1, 10)), DomainError);
    EXPECT_THROW(event_probabilities(q(11, 10)), DomainError);
}

TEST(Events, SumToOne) {
    for (const auto& r : grid_of_twentieths()) {
        const auto e = event_probabilities(r);
        EXPECT_EQ(e.p_message + e.p_eve_check + e.p_discard, 1);
    }
}

TEST(Tables, Examples) {
    const auto t0 = per_phi_event_table(Phi::Zero, q(1, 2));
    EXPECT_EQ(table_probability(t0, OutputPort::ToBobAnalyzer), q(1, 4));
    EXPECT_EQ(table_probability(t0, OutputPort::DA1), q(1, 4));
    EXPECT_EQ(table_probability(t0, OutputPort::DA3), q(1, 4));
    EXPECT_EQ(table_probability(t0, OutputPort::DA4), q(1, 4));
    const auto t1 = per_phi_event_table(Phi::HalfPi, q(1));
    EXPECT_EQ(table_probability(t1, OutputPort::DA4), 1);
    for (auto p : {OutputPort::DA1, OutputPort::DA2, OutputPort::DA3, OutputPort::ToBobDiscard})
        EXPECT_EQ(table_probability(t1, p), 0);
}

TEST(Tables, RowsSumToOne) {
    for (auto phi : kAllPhis)
        for (const auto& r : grid_of_twentieths()) {
            Rational s = 0;
            for (const auto& e : per_phi_event_table(phi, r)) s += e.probability;
            EXPECT_EQ(s, 1);
        }
}

TEST(Tables, PhaseAverageIsEventProbabilities) {
    for (const auto& r : grid_of_twentieths()) {
        const auto a = average_over(kAllPhis, r);
        const auto e = event_probabilities(r);
        EXPECT_EQ(a.p_message, e.p_message);
        EXPECT_EQ(a.p_eve_check, e.p_eve_check);
        EXPECT_EQ(a.p_discard, e.p_discard);
    }
    EXPECT_THROW(average_over(std::span<const Phi>{}, q(0)), DomainError);
}

TEST(Undetected, Examples) {
    const auto b = undetected_decomposition(EveScenario::Blind, q(0));
    EXPECT_EQ(b.case_i, q(41, 384));
    EXPECT_EQ(b.case_ii, 0);
    EXPECT_EQ(b.case_iii, q(13, 128));
    const auto p = undetected_decomposition(EveScenario::PhiAware, q(0));
    EXPECT_EQ(p.case_i, q(1, 2));
    EXPECT_EQ(p.case_ii, 0);
    EXPECT_EQ(p.case_iii, q(13, 128));
    const auto pol = undetected_decomposition(EveScenario::PolarizationAware, q(1));
    EXPECT_EQ(pol.case_i, q(1, 2));
    EXPECT_EQ(pol.case_ii, q(1, 6));
    EXPECT_EQ(pol.case_iii, 0);
    EXPECT_THROW(undetected_decomposition(EveScenario::SuperEve, q(0)), DomainError);
    EXPECT_THROW(undetected_decomposition(EveScenario::None, q(0)), DomainError);
}

TEST(Eavesdropping, PointValues) {
    EXPECT_EQ(eavesdrop_probability(EveScenario::PhiAware, q(0)), q(77, 8192));
    EXPECT_EQ(eavesdrop_probability(EveScenario::PolarizationAware, q(1, 2)), q(37, 768));
    EXPECT_EQ(eavesdrop_probability(EveScenario::Blind, q(1, 2)), q(121, 196608));
    EXPECT_EQ(eavesdrop_probability(EveScenario::PolarizationAware, q(0)), q(1, 4));
    EXPECT_NEAR(to_double(eavesdrop_probability(EveScenario::PhiAware, q(1, 2))), 0.0023, 5e-4);
    EXPECT_NEAR(to_double(eavesdrop_probability(EveScenario::PolarizationAware, q(1, 2))), 0.0481, 5e-4);
    EXPECT_NEAR(to_double(eavesdrop_probability(EveScenario::Blind, q(1, 2))), 6.15e-4, 1e-6);
    EXPECT_THROW(eavesdrop_probability(EveScenario::SuperEve, q(0)), DomainError);
}

TEST(Eavesdropping, BlindZeroReflectivityIsFormulaValue) {
    const auto v = eavesdrop_probability(EveScenario::Blind, q(0));
    EXPECT_EQ(v, q(5, 1536));
    EXPECT_GT(std::abs(to_double(v) - 0.0019), 1e-3);
    const auto d = known_discrepancies();
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].formula, v);
    EXPECT_EQ(d[0].quoted, 0.0019);
}

TEST(Eavesdropping, SuperEve) {
    EXPECT_EQ(supereve_probability(q(0)), q(1, 6));
    EXPECT_EQ(supereve_probability(q(1)), 0);
    EXPECT_EQ(supereve_probability(q(1, 2)), q(1, 24));
}

TEST(Eavesdropping, OrderingAndRange) {
    for (const auto& r : grid_of_twentieths()) {
        const auto b = eavesdrop_probability(EveScenario::Blind, r);
        const auto p = eavesdrop_probability(EveScenario::PhiAware, r);
        const auto pol = eavesdrop_probability(EveScenario::PolarizationAware, r);
        const auto s = supereve_probability(r);
        EXPECT_LE(b, p);
        EXPECT_LE(p, pol);
        for (const auto& v : {b, p, pol, s}) {
            EXPECT_GE(v, 0);
            EXPECT_LE(v, 1);
        }
    }
    for (auto e : {EveScenario::Blind, EveScenario::PhiAware, EveScenario::PolarizationAware})
        EXPECT_EQ(eavesdrop_probability(e, q(1)), 0);
}

TEST(Sweep, ParseSelectors) {
    EXPECT_EQ(parse_sweep("events").quantity, SweepQuantity::Events);
    EXPECT_EQ(parse_sweep("p-eavesdropping", "blind").scenario, EveScenario::Blind);
    EXPECT_EQ(parse_sweep("p-eavesdropping", "super").quantity, SweepQuantity::SuperEve);
    EXPECT_THROW(parse_sweep("p-eavesdropping", "none"), DomainError);
    EXPECT_THROW(parse_sweep("nope"), DomainError);
}

TEST(Sweep, Grid) {
    EXPECT_EQ(parse_grid("0:1:0.05").size(), 21u);
    EXPECT_EQ(parse_grid("0:1:1/3").size(), 4u);
    EXPECT_THROW(parse_grid("0:1"), DomainError);
    EXPECT_THROW(parse_grid("0:1:0"), DomainError);
    EXPECT_THROW(parse_grid("1:0:0.1"), DomainError);
    EXPECT_THROW(parse_grid("0:2:0.5"), DomainError);
}

TEST(Sweep, EventsTable) {
    const auto t = sweep(parse_sweep("events"), parse_grid("0:1:0.5"));
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.columns.size(), 4u);
    EXPECT_EQ(t.rows[0][1], q(1, 4));
    EXPECT_EQ(t.rows[0][3], q(1, 2));
    EXPECT_EQ(t.rows[1][2], q(5, 8));
    EXPECT_EQ(t.rows[2][1], 0);
}

TEST(Sweep, MessageProbabilityDecreases) {
    const auto t = sweep(parse_sweep("p-message"), parse_grid("0:1:0.01"));
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LE(t.rows[i][1], t.rows[i - 1][1]);
}

TEST(Sweep, EavesdroppingCurvesVanishAtOne) {
    const auto t = sweep(parse_sweep("eavesdropping"), parse_grid("0:1:0.05"));
    ASSERT_EQ(t.rows.size(), 21u);
    for (std::size_t c = 1; c < 4; ++c) EXPECT_EQ(t.rows.back()[c], 0);
    EXPECT_EQ(t.rows.front()[3], q(1, 4));
}

TEST(Sweep, RenderedTable) {
    const auto text = render_table(sweep(parse_sweep("p-eavesdropping", "pol-aware"), parse_grid("0:1:0.05")), '\t', 4);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "r\tp_eav_pol-aware");
    std::getline(in, line);
    EXPECT_EQ(line, "0.0000\t0.2500");
    int rows = 1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 21);
}
