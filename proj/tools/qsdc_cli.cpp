// qsdc: run protocol sessions, beforehand-test schedules and closed-form sweeps.
//
// Exit status: 0 success, 2 invalid configuration or usage, 3 I/O failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qsdc/qsdc.hpp"

using qsdc::Json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw qsdc::DomainError("config file is not valid JSON: " + std::string(e.what()));
    }
}

int run(const qsdc::RunConfig& cfg, char delimiter) {
    using namespace qsdc;
    cfg.validate();

    if (!cfg.sweep.empty()) {
        const auto table = sweep(parse_sweep(cfg.sweep, cfg.scenario), parse_grid(cfg.grid));
        const std::string text = render_table(table, delimiter);
        if (cfg.out.empty())
            std::cout << text;
        else
            write_text(cfg.out, text);
        return 0;
    }

    Json report;
    if (!cfg.schedule.empty()) {
        const auto result = run_schedule(parse_schedule(cfg.schedule), cfg.policy(), cfg.seed, cfg.workers);
        report = schedule_report(cfg, result);
    } else {
        std::vector<std::uint8_t> message;
        if (!cfg.message_file.empty()) {
            try {
                message = read_message_bits(cfg.message_file);
            } catch (const std::ios_base::failure& e) {
                throw IoError(e.what());
            }
        }
        SessionConfig session;
        session.trial.variant = cfg.variant;
        session.trial.r = to_double(cfg.r_exact());
        session.trial.eve = cfg.policy();
        session.trial.phi_mode = cfg.phi;
        session.trial.message = message;
        session.n_trials = cfg.trials;
        session.master_seed = cfg.seed;

        SessionStatistics stats;
        if (cfg.transcript) {
            const std::string path = (cfg.out.empty() ? std::string("qsdc") : cfg.out) + ".transcript.jsonl";
            std::ofstream tx(path, std::ios::binary);
            if (!tx) throw IoError("cannot open transcript file: " + path);
            stats = run_session(session, 1, [&tx](const TrialRecord& rec) { tx << transcript_record(rec).dump() << '\n'; });
            if (!tx) throw IoError("write failed: " + path);
        } else {
            stats = run_session(session, cfg.workers);
        }
        report = session_report(cfg, stats);
    }

    const std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (!cfg.out.empty()) write_text(cfg.out, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-fold degree-of-freedom QSDC simulator: Monte Carlo sessions, S1/S2 schedules and "
                 "closed-form sweeps.\nFlags override values read from --config."};

    std::string config_path, variant, r, eve, resend, phi, scenario, delimiter = "comma";
    std::uint64_t trials = 0, seed = 0;
    unsigned workers = 1;
    qsdc::RunConfig flags;

    app.add_option("--config", config_path, "JSON config (or a previous report) to start from");
    app.add_option("--variant", variant, "standard | modified");
    app.add_option("--r", r, "Reflectivity of Alice's beam-splitters, e.g. 0.5 or 1/3");
    app.add_option("--eve", eve, "none | blind | phi-aware | pol-aware | super");
    app.add_option("--resend", resend, "Eve's resend rule: eigenstate | random");
    app.add_option("--trials", trials, "Number of trials");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--phi", phi, "uniform | det-only | sup-only");
    app.add_option("--message", flags.message_file, "File of 0/1 message bits (default: seeded random bits)");
    app.add_option("--sweep", flags.sweep,
                   "Closed-form sweep: events | p-message | p-eve-check | p-discard | eavesdropping | "
                   "p-eavesdropping | super");
    app.add_option("--scenario", scenario, "Scenario for --sweep p-eavesdropping");
    app.add_option("--grid", flags.grid, "Sweep grid A:B:STEP");
    app.add_option("--delimiter", delimiter, "Sweep delimiter: comma | tab");
    app.add_option("--schedule", flags.schedule, "Alternating stages, e.g. S1:10000,S2:10000");
    app.add_option("--out", flags.out, "Write the report or table to this path");
    app.add_flag("--transcript", flags.transcript, "Write one JSON record per trial to <out>.transcript.jsonl");
    app.add_option("--workers", workers, "Worker threads for session execution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        qsdc::RunConfig cfg;
        if (!config_path.empty()) cfg = qsdc::config_from_json(load_json(config_path));
        if (app.count("--variant")) cfg.variant = qsdc::parse_variant(variant);
        if (app.count("--r")) cfg.r = r;
        if (app.count("--eve")) cfg.eve = qsdc::parse_scenario(eve);
        if (app.count("--resend")) cfg.resend = qsdc::parse_resend(resend);
        if (app.count("--trials")) cfg.trials = trials;
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--phi")) cfg.phi = qsdc::parse_phi_mode(phi);
        if (app.count("--message")) cfg.message_file = flags.message_file;
        if (app.count("--sweep")) cfg.sweep = flags.sweep;
        if (app.count("--scenario")) cfg.scenario = scenario;
        if (app.count("--grid")) cfg.grid = flags.grid;
        if (app.count("--schedule")) cfg.schedule = flags.schedule;
        if (app.count("--out")) cfg.out = flags.out;
        if (app.count("--transcript")) cfg.transcript = flags.transcript;
        if (app.count("--workers")) cfg.workers = workers;
        if (delimiter != "comma" && delimiter != "tab") throw qsdc::DomainError("delimiter must be comma or tab");
        return run(cfg, delimiter == "tab" ? '\t' : ',');
    } catch (const IoError& e) {
        std::cerr << "qsdc: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "qsdc: " << e.what() << "\n";
        return kExitConfig;
    }
}
