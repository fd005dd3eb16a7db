// Copyright 2026 The cdsc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdsc/protocol.hpp"
#include "cdsc/rng.hpp"
#include "cdsc/security.hpp"

namespace cdsc::cli {

using nlohmann::json;

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Bad flags, bad values or an unusable combination. Exit code 1.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// --help was requested; what() carries the help text.
struct HelpRequested : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Command { Send, TestChannel, Attack, DetectionSweep };

inline std::string_view name(Command c) {
    switch (c) {
        case Command::Send:
            return "send";
        case Command::TestChannel:
            return "test-channel";
        case Command::Attack:
            return "attack";
        case Command::DetectionSweep:
            return "detection-sweep";
    }
    return "?";
}

struct RunConfig {
    Command command = Command::Send;
    std::string message;
    /// "honest", "ghz-intercept" or "probe:<path>".
    std::string source = "honest";
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    bool seed_generated = false;
    std::size_t k_max = 10;
    std::size_t trials = 10000;
    bool charlie_cooperates = true;
    /// Empty or "-" means standard output.
    std::string out;
};

// ---------------------------------------------------------------------------
// Probe spec files
// ---------------------------------------------------------------------------

/// {"eve_dimension": d,
///  "components": {"000": [[re, im], ...], ..., "111": [...]},
///  "signs": {"111": -1}}
/// Missing components are zero vectors; missing signs are +1.
inline std::pair<security::ProbeState, security::SignPattern> parse_probe_spec(const json &doc) {
    if (!doc.is_object()) {
        throw UsageError("probe spec must be a JSON object");
    }
    for (const auto &[key, _] : doc.items()) {
        if (key != "eve_dimension" && key != "components" && key != "signs") {
            throw UsageError("unknown probe spec field '" + key + "'");
        }
    }
    if (!doc.contains("eve_dimension") || !doc["eve_dimension"].is_number_unsigned()) {
        throw UsageError("probe spec needs a positive integer 'eve_dimension'");
    }
    security::ProbeState probe;
    probe.eve_dimension = doc["eve_dimension"].get<std::size_t>();
    for (auto &c : probe.components) {
        c.assign(probe.eve_dimension, qsim::Complex(0));
    }
    security::SignPattern signs = security::kNoSigns;

    auto index_of = [](const std::string &key) -> std::size_t {
        if (key.size() != 3 || key.find_first_not_of("01") != std::string::npos) {
            throw UsageError("probe spec keys must be three-bit strings like \"011\", got '" + key + "'");
        }
        return static_cast<std::size_t>((key[0] - '0') * 4 + (key[1] - '0') * 2 + (key[2] - '0'));
    };

    if (doc.contains("components")) {
        for (const auto &[key, vec] : doc["components"].items()) {
            auto ijk = index_of(key);
            if (!vec.is_array() || vec.size() != probe.eve_dimension) {
                throw UsageError("probe component '" + key + "' must list " + std::to_string(probe.eve_dimension) +
                                 " [re, im] pairs");
            }
            for (std::size_t e = 0; e < vec.size(); e++) {
                const auto &pair = vec[e];
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
                    throw UsageError("probe component '" + key + "' entry " + std::to_string(e) +
                                     " is not an [re, im] pair");
                }
                probe.components[ijk][e] = {pair[0].get<double>(), pair[1].get<double>()};
            }
        }
    }
    if (doc.contains("signs")) {
        for (const auto &[key, v] : doc["signs"].items()) {
            if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1)) {
                throw UsageError("probe sign for '" + key + "' must be 1 or -1");
            }
            signs[index_of(key)] = v.get<int>();
        }
    }
    try {
        probe.validate();
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
    return {probe, signs};
}

inline json read_json_file(const std::string &path, std::string_view what) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open " + std::string(what) + " '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw UsageError(std::string(what) + " '" + path + "' is not valid JSON: " + e.what());
    }
}

inline security::ChannelSource make_source(const std::string &source) {
    if (source == "honest") {
        return security::ChannelSource::honest();
    }
    if (source == "ghz-intercept") {
        return security::ChannelSource::ghz_intercept();
    }
    if (source.rfind("probe", 0) == 0) {
        if (source.size() <= 6 || source[5] != ':') {
            throw UsageError("probe sources need a spec file: --source probe:<path>");
        }
        auto [probe, signs] = parse_probe_spec(read_json_file(source.substr(6), "probe spec"));
        try {
            return security::ChannelSource::probe_coupled(std::move(probe), signs);
        } catch (const std::invalid_argument &e) {
            throw UsageError(std::string("malformed probe spec: ") + e.what());
        }
    }
    throw UsageError("unknown source '" + source + "' (expected honest, ghz-intercept or probe:<path>)");
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void apply_file(RunConfig &cfg, const json &doc) {
    if (!doc.is_object()) {
        throw UsageError("config file must be a JSON object");
    }
    for (const auto &[key, v] : doc.items()) {
        try {
            if (key == "message") {
                cfg.message = v.get<std::string>();
            } else if (key == "source") {
                cfg.source = v.get<std::string>();
            } else if (key == "samples") {
                cfg.samples = v.get<std::size_t>();
            } else if (key == "seed") {
                cfg.seed = v.get<std::uint64_t>();
                cfg.seed_generated = false;
            } else if (key == "k_max") {
                cfg.k_max = v.get<std::size_t>();
            } else if (key == "trials") {
                cfg.trials = v.get<std::size_t>();
            } else if (key == "cooperate") {
                cfg.charlie_cooperates = v.get<bool>();
            } else if (key == "out") {
                cfg.out = v.get<std::string>();
            } else {
                throw UsageError("unknown config file field '" + key + "'");
            }
        } catch (const json::type_error &) {
            throw UsageError("config file field '" + key + "' has the wrong type");
        }
    }
}

inline void validate(const RunConfig &cfg, bool has_message) {
    if (cfg.message.find_first_not_of("01") != std::string::npos) {
        throw UsageError("--message must contain only '0' and '1', got '" + cfg.message + "'");
    }
    if (cfg.command == Command::Send && !has_message) {
        throw UsageError("send needs --message <bits>");
    }
    if ((cfg.command == Command::TestChannel || cfg.command == Command::Attack) && cfg.samples < 4) {
        throw UsageError("--samples must be at least 4 so every parity operator can be drawn");
    }
    if (cfg.command == Command::DetectionSweep && (cfg.k_max < 1 || cfg.trials < 1)) {
        throw UsageError("--k-max and --trials must be at least 1");
    }
    if (cfg.source != "honest" && cfg.source != "ghz-intercept" && cfg.source.rfind("probe:", 0) != 0) {
        if (cfg.source == "probe") {
            throw UsageError("probe sources need a spec file: --source probe:<path>");
        }
        throw UsageError("unknown source '" + cfg.source + "' (expected honest, ghz-intercept or probe:<path>)");
    }
    if (cfg.source == "probe:") {
        throw UsageError("probe sources need a spec file: --source probe:<path>");
    }
}

}  // namespace detail

/// Parses arguments (without the program name). Values from the config file
/// (argument or --config) are applied first and flags override them. A
/// missing seed is drawn from the OS and flagged as generated.
inline RunConfig parse_config(const std::vector<std::string> &args,
                              const std::optional<std::string> &config_file = std::nullopt) {
    CLI::App app{"Controlled secure direct communication over GHZ channels", "cdsc"};
    app.require_subcommand(1);

    struct Flags {
        std::string message, source, config, out;
        std::size_t samples = 0, k_max = 0, trials = 0;
        std::uint64_t seed = 0;
        bool no_cooperation = false;
    } f;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--source", f.source, "honest | ghz-intercept | probe:<path>");
        sub->add_option("--seed", f.seed, "64-bit seed; generated and reported when omitted");
        sub->add_option("--out", f.out, "report path (default: stdout)");
        sub->add_option("--config", f.config, "JSON config file; flags override its values");
    };

    auto *send = app.add_subcommand("send", "teleport a message and report the recovered bits");
    add_common(send);
    send->add_option("--message", f.message, "bit string, e.g. 101001");
    send->add_flag("--no-cooperation", f.no_cooperation, "Charlie withholds his measurement result");

    auto *test = app.add_subcommand("test-channel", "run the Z-correlation and parity tests");
    add_common(test);
    test->add_option("--samples", f.samples, "triplets per test");

    auto *attack = app.add_subcommand("attack", "channel tests plus a session over the given source");
    add_common(attack);
    attack->add_option("--samples", f.samples, "triplets per test");
    attack->add_option("--message", f.message, "bit string (default 101001)");

    auto *sweep = app.add_subcommand("detection-sweep", "detection probability versus tested triplets");
    add_common(sweep);
    sweep->add_option("--k-max", f.k_max, "largest campaign size");
    sweep->add_option("--trials", f.trials, "campaigns per k");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError &e) {
        throw UsageError(e.what());
    }

    CLI::App *sub = app.get_subcommands().front();
    RunConfig cfg;
    if (sub == send) {
        cfg.command = Command::Send;
    } else if (sub == test) {
        cfg.command = Command::TestChannel;
    } else if (sub == attack) {
        cfg.command = Command::Attack;
        cfg.message = "101001";
    } else {
        cfg.command = Command::DetectionSweep;
    }

    bool has_seed = false;
    bool has_message = false;
    std::optional<std::string> file = config_file;
    if (sub->count("--config")) {
        file = f.config;
    }
    if (file) {
        auto doc = read_json_file(*file, "config file");
        detail::apply_file(cfg, doc);
        has_seed = doc.contains("seed");
        has_message = doc.contains("message");
    }

    auto given = [&](const char *flag) { return sub->get_option_no_throw(flag) && sub->count(flag) > 0; };
    if (given("--message")) {
        cfg.message = f.message;
        has_message = true;
    }
    if (given("--source")) {
        cfg.source = f.source;
    }
    if (given("--samples")) {
        cfg.samples = f.samples;
    }
    if (given("--k-max")) {
        cfg.k_max = f.k_max;
    }
    if (given("--trials")) {
        cfg.trials = f.trials;
    }
    if (given("--out")) {
        cfg.out = f.out;
    }
    if (given("--no-cooperation")) {
        cfg.charlie_cooperates = false;
    }
    if (given("--seed")) {
        cfg.seed = f.seed;
        has_seed = true;
    }
    if (!has_seed) {
        std::random_device rd;
        cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        cfg.seed_generated = true;
    }
    detail::validate(cfg, has_message || cfg.command == Command::Attack);
    return cfg;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Report {
    json document;
    std::string verdict;

    /// 0 on PASS / CHANNEL-OK, 2 on a detected eavesdropper or corrupted message.
    int exit_code() const {
        return (verdict == "PASS" || verdict == "CHANNEL-OK") ? 0 : 2;
    }
};

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

// Stream indices for independent parts of one run.
inline constexpr std::uint64_t kSessionStream = 0;
inline constexpr std::uint64_t kZTestStream = 1;
inline constexpr std::uint64_t kParityStream = 2;
inline constexpr std::uint64_t kSweepStream = 3;
inline constexpr std::uint64_t kEveStream = 4;

inline std::string triple_key(const std::array<int, 3> &t) {
    std::string s;
    for (std::size_t i = 0; i < 3; i++) {
        if (i) {
            s += ',';
        }
        s += t[i] > 0 ? "+1" : "-1";
    }
    return s;
}

inline json session_json(const std::string &message, const protocol::SessionResult &r, bool cooperated) {
    std::size_t errors = 0;
    for (std::size_t i = 0; i < message.size(); i++) {
        errors += message[i] != r.recovered[i];
    }
    json histogram = json::object();
    for (const auto &rec : r.transcript.records) {
        auto key = rec.classical_bits();
        histogram[key] = histogram.value(key, 0) + 1;
    }
    return json{{"message_length", message.size()},
                {"recovered", r.recovered},
                {"bit_errors", errors},
                {"charlie_cooperated", cooperated},
                {"classical_histogram", histogram},
                {"transcript_digest", "fnv1a64:" + fnv1a64(r.transcript.serialize())}};
}

inline json z_json(const security::CorrelationStats &z) {
    return json{{"samples", z.samples}, {"all_equal_count", z.all_equal_count}, {"fraction", z.fraction()}};
}

inline json parity_json(const security::ParityStats &p) {
    json out = json::object();
    for (auto op : security::kParityOperators) {
        const auto &s = p[op];
        json triples = json::object();
        for (const auto &[t, n] : s.triples) {
            triples[triple_key(t)] = n;
        }
        out[std::string(security::letters(op))] = json{{"samples", s.samples},
                                                       {"mean", s.mean()},
                                                       {"sigma", s.sigma()},
                                                       {"honest_value", security::honest_value(op)},
                                                       {"violations", s.violations},
                                                       {"triples", triples}};
    }
    return out;
}

inline json config_json(const RunConfig &cfg) {
    json c{{"source", cfg.source}, {"seed", cfg.seed}, {"seed_generated", cfg.seed_generated}};
    switch (cfg.command) {
        case Command::Send:
            c["message"] = cfg.message;
            c["cooperate"] = cfg.charlie_cooperates;
            break;
        case Command::TestChannel:
            c["samples"] = cfg.samples;
            break;
        case Command::Attack:
            c["samples"] = cfg.samples;
            c["message"] = cfg.message;
            break;
        case Command::DetectionSweep:
            c["k_max"] = cfg.k_max;
            c["trials"] = cfg.trials;
            break;
    }
    return c;
}

struct ChannelTests {
    security::CorrelationStats z;
    security::ParityStats parity;
    security::ChannelVerdict verdict;
};

inline ChannelTests run_channel_tests(const security::ChannelSource &source, const RunConfig &cfg) {
    Rng z_rng(cfg.seed, kZTestStream);
    Rng p_rng(cfg.seed, kParityStream);
    auto z = security::z_basis_test(source, cfg.samples, z_rng);
    auto parity = security::parity_test(source, cfg.samples, p_rng);
    return {z, parity, security::judge_channel(z, parity)};
}

inline json eavesdropper_json(const security::ChannelSource &source, const RunConfig &cfg) {
    json eve = json::object();
    if (source.kind() == security::SourceKind::GhzIntercept) {
        Rng rng(cfg.seed, kEveStream);
        json outcomes = json::object();
        std::array<double, 3> corr{};
        for (std::size_t i = 0; i < cfg.samples; i++) {
            auto r = security::eve_ghz_intercept(protocol::prepare_ghz(), protocol::prepare_ghz(security::kEveTriplet),
                                                 rng, source.intercepted());
            outcomes[r.outcome] = outcomes.value(r.outcome, 0) + 1;
            auto c = security::z_correlations(r.joint);
            for (std::size_t k = 0; k < 3; k++) {
                corr[k] += c[k];
            }
        }
        double n = static_cast<double>(cfg.samples);
        eve["intercept_outcomes"] = outcomes;
        eve["mean_z_correlations"] = json{{"AB", corr[0] / n}, {"AC", corr[1] / n}, {"BC", corr[2] / n}};
    } else {
        Rng rng(cfg.seed, kEveStream);
        auto rep = security::check_probe_separability(source.sample(rng));
        eve["separability"] = json{{"verdict", std::string(security::name(rep.verdict))},
                                   {"ghz_fidelity", rep.ghz_fidelity},
                                   {"parities",
                                    json{{"XXX", rep.parities[0]},
                                         {"YXY", rep.parities[1]},
                                         {"YYX", rep.parities[2]},
                                         {"XYY", rep.parities[3]}}}};
    }
    return eve;
}

}  // namespace detail

/// Runs one configured command.
inline Report run_command(const RunConfig &cfg) {
    auto source = make_source(cfg.source);
    Report report;
    json result;
    switch (cfg.command) {
        case Command::Send: {
            Rng rng(cfg.seed, detail::kSessionStream);
            auto session = protocol::run_session(cfg.message, source, rng, cfg.charlie_cooperates);
            result = detail::session_json(cfg.message, session, cfg.charlie_cooperates);
            report.verdict = session.recovered == cfg.message ? "PASS" : "MESSAGE-CORRUPTED";
            break;
        }
        case Command::TestChannel: {
            auto tests = detail::run_channel_tests(source, cfg);
            result = json{{"z_test", detail::z_json(tests.z)}, {"parity_test", detail::parity_json(tests.parity)}};
            report.verdict = std::string(security::name(tests.verdict));
            break;
        }
        case Command::Attack: {
            auto tests = detail::run_channel_tests(source, cfg);
            Rng rng(cfg.seed, detail::kSessionStream);
            auto session = protocol::run_session(cfg.message, source, rng);
            result = json{{"z_test", detail::z_json(tests.z)},
                          {"parity_test", detail::parity_json(tests.parity)},
                          {"session", detail::session_json(cfg.message, session, true)},
                          {"eavesdropper", detail::eavesdropper_json(source, cfg)}};
            report.verdict = std::string(security::name(tests.verdict));
            break;
        }
        case Command::DetectionSweep: {
            Rng rng(cfg.seed, detail::kSweepStream);
            auto curve = security::detection_curve(source, cfg.k_max, cfg.trials, rng);
            json points = json::array();
            bool detected = false;
            for (const auto &p : curve) {
                points.push_back(json{{"k", p.k},
                                      {"trials", p.trials},
                                      {"detections", p.detections},
                                      {"probability", p.probability()},
                                      {"sigma", p.sigma()}});
                detected |= p.detections > 0;
            }
            result = json{{"curve", points}};
            report.verdict = detected ? "EAVESDROPPER-DETECTED" : "CHANNEL-OK";
            break;
        }
    }
    report.document = json{{"schema_version", kSchemaVersion},
                           {"tool", json{{"name", "cdsc"}, {"version", std::string(kToolVersion)}}},
                           {"command", std::string(name(cfg.command))},
                           {"config", detail::config_json(cfg)},
                           {"result", result},
                           {"verdict", report.verdict}};
    return report;
}

namespace detail {

inline std::string format_double(double v) {
    if (v == 0.0) {
        return "0";
    }
    if (!std::isfinite(v)) {
        return "null";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_json(std::string &out, const json &j, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto &[key, value] : j.items()) {
                if (!first) {
                    out += ",\n";
                }
                first = false;
                out += inner + json(key).dump() + ": ";
                write_json(out, value, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); i++) {
                if (i) {
                    out += ",\n";
                }
                out += inner;
                write_json(out, j[i], indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace detail

/// Byte-stable text: sorted keys, two-space indent, floats at 12 significant digits.
inline std::string serialize_report(const Report &report) {
    std::string out;
    detail::write_json(out, report.document, 0);
    out += '\n';
    return out;
}

inline void emit_report(const Report &report, const std::string &path) {
    auto text = serialize_report(report);
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open report file '" + path + "' for writing");
    }
    out << text;
    out.close();
    if (!out) {
        throw std::runtime_error("failed writing report file '" + path + "'");
    }
}

}  // namespace cdsc::cli
