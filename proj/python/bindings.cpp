#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "locoscore/error.hpp"
#include "locoscore/ingest.hpp"
#include "locoscore/questionnaire.hpp"
#include "locoscore/scoring.hpp"
#include "locoscore/service.hpp"
#include "locoscore/stats.hpp"
#include "locoscore/trajectory.hpp"

namespace py = pybind11;
using namespace locoscore;
using nlohmann::json;

namespace {

std::vector<std::vector<double>> matrix(const PairMatrix& m) {
    std::vector<std::vector<double>> out(m.size(), std::vector<double>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = m(i, j);
    return out;
}

Direction direction(const std::string& text) {
    const auto d = parse_direction(text);
    if (!d) throw Error("direction must be 'positive' or 'negative'");
    return *d;
}

RawDatabase rdb_from_text(const std::string& text) { return rdb_from_json(json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_locoscore, m) {
    m.doc() = "Scoring engine bindings; JSON documents cross the boundary as strings.";

    // Translators run newest first, so the base class goes in before its subclasses.
    const auto& base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<SubsetError>(m, "SubsetError", base);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<UntestableError>(m, "UntestableError", base);

    m.def("registry_json", [] { return registry_json(builtin_registry()).dump(); });

    m.def("st_path_dev", [](const std::vector<std::pair<double, double>>& samples) {
        std::vector<TrajectorySample> s;
        for (const auto& [t, d] : samples) s.push_back({t, d, false, false, false});
        return st_path_dev(s);
    }, py::arg("samples"));
    m.def("nr_st_path_dev", &nr_st_path_dev, py::arg("st_path_dev"), py::arg("max_dist"), py::arg("compl_time"));
    m.def("compound_accuracy", &compound_accuracy, py::arg("rate"), py::arg("nr_dev"));
    m.def("score_rate", &score_rate, py::arg("coins"));
    m.def("physical_effort", &physical_effort, py::arg("hr_before"), py::arg("hr_after"));
    m.def("average_over_targets", [](const std::vector<double>& v) { return average_over_targets(v); });

    m.def("ssq_scores", [](const std::vector<int>& answers) {
        const auto s = ssq_scores(answers);
        return py::make_tuple(s.nausea, s.oculomotor, s.disorientation, s.total);
    }, py::arg("answers"));
    m.def("likert_metric", [](const std::vector<int>& a) { return likert_metric(a); }, py::arg("answers"));

    m.def("zscore_filter", [](const std::vector<double>& v, double threshold) {
        auto s = zscore_filter(v, threshold);
        return py::make_tuple(s.kept, s.removed);
    }, py::arg("samples"), py::arg("threshold") = 3.0);
    m.def("shapiro_wilk", [](const std::vector<double>& v) {
        const auto r = shapiro_wilk(v);
        return py::make_tuple(r.statistic, r.p);
    });
    m.def("anova_oneway", [](const GroupedSamples& g) {
        const auto r = anova_oneway(g);
        return py::make_tuple(r.statistic, r.p);
    });
    m.def("kruskal_wallis", [](const GroupedSamples& g) {
        const auto r = kruskal_wallis(g);
        return py::make_tuple(r.statistic, r.p);
    });
    m.def("tukey_hsd", [](const GroupedSamples& g) { return matrix(tukey_hsd(g)); });
    m.def("dunn_test", [](const GroupedSamples& g, const std::string& adjustment) {
        return matrix(dunn_test(g, parse_adjustment(adjustment)));
    }, py::arg("groups"), py::arg("adjustment") = "none");
    m.def("compare_groups", [](const GroupedSamples& g, double alpha, const std::string& adjustment) {
        const auto r = compare_groups(g, alpha, parse_adjustment(adjustment));
        py::dict d;
        d["plan"] = to_string(r.plan);
        d["omnibus_statistic"] = r.omnibus_statistic;
        d["omnibus_p"] = r.omnibus_p;
        d["pairwise_p"] = matrix(r.pairwise_p);
        d["normality_p"] = r.normality_p;
        d["alpha"] = r.alpha;
        return d;
    }, py::arg("groups"), py::arg("alpha") = 0.05, py::arg("adjustment") = "none");

    m.def("assign_points", [](const std::vector<std::string>& techniques, const std::vector<double>& means,
                              const std::vector<std::vector<double>>& pairwise_p, double alpha,
                              const std::string& dir) {
        SignificanceResult sig;
        sig.alpha = alpha;
        sig.pairwise_p = PairMatrix(pairwise_p.size());
        for (std::size_t i = 0; i < pairwise_p.size(); ++i)
            for (std::size_t j = i + 1; j < pairwise_p.size(); ++j) sig.pairwise_p.set(i, j, pairwise_p[i][j]);
        return assign_points(techniques, means, sig, direction(dir)).points;
    }, py::arg("techniques"), py::arg("means"), py::arg("pairwise_p"), py::arg("alpha"), py::arg("direction"));
    m.def("cumulative_points", [](const std::vector<PointVector>& elements, const std::vector<bool>& significant) {
        return cumulative_points(elements, significant);
    });

    m.def("ingest", [](const std::string& log_dir, const std::string& questionnaire_dir, const std::string& study) {
        const StudyConfig cfg = study.empty() ? StudyConfig{} : StudyConfig::from_json(json::parse(study));
        return to_json(ingest_directories(log_dir, questionnaire_dir, cfg)).dump();
    }, py::arg("log_dir"), py::arg("questionnaire_dir"), py::arg("study") = "");
    m.def("validate_rdb", [](const std::string& rdb) { return validate_rdb(rdb_from_text(rdb)); });
    m.def("build_wdb", [](const std::string& rdb, const std::string& config) {
        const auto cfg = weight_config_from_json(config.empty() ? json::object() : json::parse(config));
        return serialize_wdb(build_wdb(rdb_from_text(rdb), cfg));
    }, py::arg("rdb"), py::arg("config") = "");
}
