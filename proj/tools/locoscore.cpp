// Command-line front end: ingest raw data, score it, print rankings, serve the HTTP API.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "locoscore/error.hpp"
#include "locoscore/ingest.hpp"
#include "locoscore/scoring.hpp"
#include "locoscore/service.hpp"

namespace {

using namespace locoscore;
using nlohmann::json;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

void print_ranking(const std::vector<RankEntry>& ranking) {
    std::printf("%-5s %-12s %12s\n", "rank", "technique", "score");
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        const auto& r = ranking[i];
        std::printf("%-5zu %-12s %12.4f%s\n", i + 1, r.technique.c_str(), r.score, r.tied ? "  (tie)" : "");
    }
}

WeightConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    return weight_config_from_json(read_json(path));
}

RawDatabase load_valid_rdb(const std::string& path) {
    auto rdb = load_rdb(path);
    const auto violations = validate_rdb(rdb);
    if (!violations.empty()) {
        std::string msg = path + " is not a valid RDB:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw Error(msg);
    }
    return rdb;
}

int cmd_ingest(const std::string& logs, const std::string& questionnaires, const std::string& out,
               const std::string& study_path, const std::string& map_path, const std::vector<std::string>& constraints) {
    const StudyConfig study = study_path.empty() ? StudyConfig{} : StudyConfig::from_json(read_json(study_path));
    const QuestionMap map = map_path.empty() ? QuestionMap::defaults() : QuestionMap::from_json(read_json(map_path));
    auto rdb = ingest_directories(logs, questionnaires, study, map);
    if (!constraints.empty()) {
        std::vector<DemographicConstraint> parsed;
        for (const auto& c : constraints) parsed.push_back(parse_constraint(c));
        rdb = filter_demographics(rdb, parsed);
    }
    const auto violations = validate_rdb(rdb);
    save_rdb(rdb, out);

    const auto assignments = rdb.assignments();
    std::printf("participants: %zu\n", assignments.size());
    for (const auto& t : rdb.fixed.techniques) {
        std::size_t n = 0;
        for (const auto& [pid, tech] : assignments) n += tech == t.id;
        std::printf("  %-10s %zu\n", t.id.c_str(), n);
    }
    std::printf("measurements: %zu\nheart-rate pairs: %zu\nquestionnaires: %zu\n", rdb.measurements.size(),
                rdb.heart_rates.size(), rdb.questionnaires.size());
    if (violations.empty()) {
        std::printf("validation: ok\n");
        return 0;
    }
    std::printf("validation: %zu violation(s)\n", violations.size());
    for (const auto& v : violations) std::printf("  - %s\n", v.c_str());
    return 2;
}

int cmd_score(const std::string& rdb_path, const std::string& config_path, const std::string& out) {
    const auto config = load_config(config_path);
    const auto rdb = load_valid_rdb(rdb_path);
    const auto wdb = build_wdb(rdb, config);
    const auto text = serialize_wdb(wdb);
    if (out.empty() || out == "-") {
        std::cout << text;
        return 0;
    }
    write_text(out, text);
    print_ranking(wdb.ranking);
    return 0;
}

int cmd_rank(const std::string& wdb_path, const std::string& rdb_path, const std::string& config_path) {
    if (!wdb_path.empty()) {
        const auto doc = read_json(wdb_path);
        PointVector totals;
        for (const auto& [t, s] : doc.at("scores").at("total").items()) totals[t] = s.get<double>();
        print_ranking(rank(totals));
        return 0;
    }
    if (rdb_path.empty()) throw Error("rank needs --wdb or --rdb");
    print_ranking(build_wdb(load_valid_rdb(rdb_path), load_config(config_path)).ranking);
    return 0;
}

HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

int cmd_serve(const std::string& rdb_path, const std::string& host, int port) {
    const Service service(load_valid_rdb(rdb_path));
    HttpServer server(service);
    const int bound = server.bind(host, port);
    if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::printf("listening on http://%s:%d\n", host.c_str(), bound);
    std::fflush(stdout);
    server.listen();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted multi-criteria scoring of VR locomotion techniques"};
    app.require_subcommand(1);

    std::string logs, questionnaires, out, study, question_map, rdb_path, config_path, wdb_path;
    std::string host = "127.0.0.1";
    std::vector<std::string> constraints;
    int port = 8080;

    auto* ingest = app.add_subcommand("ingest", "Parse logs and questionnaires into an RDB document");
    ingest->add_option("--logs", logs, "Directory with session logs, trajectories and heart rates")->required();
    ingest->add_option("--questionnaires", questionnaires, "Directory with questionnaire answer files")->required();
    ingest->add_option("--out", out, "RDB output path")->required();
    ingest->add_option("--study", study, "Study configuration (techniques, scenarios, missing-data policy)");
    ingest->add_option("--question-map", question_map, "Expected question count per subjective metric");
    ingest->add_option("--constraint", constraints, "Demographic constraint, e.g. \"vr_experience <= 2\"");

    auto* score = app.add_subcommand("score", "Score an RDB and write the WDB document");
    score->add_option("--rdb", rdb_path, "RDB document")->required();
    score->add_option("--config", config_path, "Weight configuration (defaults: every weight 1)");
    score->add_option("--out", out, "WDB output path ('-' or omitted: stdout)");

    auto* rank_cmd = app.add_subcommand("rank", "Print the ranking of a WDB, or of an RDB under a configuration");
    rank_cmd->add_option("--wdb", wdb_path, "WDB document");
    rank_cmd->add_option("--rdb", rdb_path, "RDB document");
    rank_cmd->add_option("--config", config_path, "Weight configuration");

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API over an RDB");
    serve->add_option("--rdb", rdb_path, "RDB document")->required();
    serve->add_option("--port", port, "Port (0 picks a free one)");
    serve->add_option("--host", host, "Bind address");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return cmd_ingest(logs, questionnaires, out, study, question_map, constraints);
        if (*score) return cmd_score(rdb_path, config_path, out);
        if (*rank_cmd) return cmd_rank(wdb_path, rdb_path, config_path);
        if (*serve) return cmd_serve(rdb_path, host, port);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const SubsetError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
