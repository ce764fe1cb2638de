#include <gtest/gtest.h>

#include <future>
#include <thread>

#include <httplib.h>

#include "locoscore/service.hpp"
#include "synthetic.hpp"

using namespace locoscore;
using nlohmann::json;

namespace {

RawDatabase four_techniques() {
    testkit::SyntheticSpec s;
    s.techniques = {"AS", "WIP", "CV", "JS"};
    s.participants_per_technique = 8;
    s.scenarios = {Scenario::S1, Scenario::S2, Scenario::S4};
    return testkit::synthetic_rdb(s);
}

class ServiceTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() { service_ = new Service(four_techniques()); }
    static void TearDownTestSuite() { delete service_; }
    static Service* service_;
};
Service* ServiceTest::service_ = nullptr;

}  // namespace

TEST_F(ServiceTest, Registry) {
    const auto r = service_->get_registry();
    EXPECT_EQ(r.status, 200);
    const auto doc = json::parse(r.body);
    EXPECT_EQ(doc["tasks"].size(), 18u);
    EXPECT_EQ(doc["metrics"].size(), builtin_registry().all().size());
}

TEST_F(ServiceTest, Summary) {
    const auto doc = json::parse(service_->get_summary().body);
    EXPECT_EQ(doc["participants"], 32);
    EXPECT_EQ(doc["techniques"].size(), 4u);
    EXPECT_EQ(doc["techniques"][2]["participants"], 8);
    EXPECT_EQ(doc["scenarios"], json({"S1", "S2", "S4"}));
    EXPECT_EQ(doc["demographics_keys"], json({"age", "vr_experience"}));
}

TEST_F(ServiceTest, AllOnesMatchesEngineBytes) {
    const auto r = service_->post_wdb("{}");
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body, serialize_wdb(build_wdb(service_->rdb(), {})));
    const auto wrapped = service_->post_wdb(R"({"weights": {}})");
    EXPECT_EQ(wrapped.body, r.body);
}

TEST_F(ServiceTest, SubsetRecomputesStatistics) {
    const auto r = service_->post_wdb(R"({"weights": {}, "technique_subset": ["AS", "WIP", "JS"]})");
    ASSERT_EQ(r.status, 200);
    const auto doc = json::parse(r.body);
    EXPECT_EQ(doc["techniques"], json({"AS", "WIP", "JS"}));

    WeightConfig c;
    c.technique_subset = {"AS", "WIP", "JS"};
    EXPECT_EQ(r.body, serialize_wdb(build_wdb(service_->rdb(), c)));

    // Not a filter of the four-technique run: pairwise p-values are pooled over the subset.
    const auto full = json::parse(service_->post_wdb("{}").body);
    bool any_p_changed = false;
    for (const auto& [key, stats] : doc["diagnostics"]["statistics"].items()) {
        if (stats["pairwise"].is_null() || !full["diagnostics"]["statistics"][key].contains("pairwise")) continue;
        for (const auto& p : stats["pairwise"])
            for (const auto& q : full["diagnostics"]["statistics"][key]["pairwise"])
                if (p["a"] == q["a"] && p["b"] == q["b"] && p["p"] != q["p"]) any_p_changed = true;
    }
    EXPECT_TRUE(any_p_changed);
}

TEST_F(ServiceTest, MalformedKeyNamed) {
    const auto r = service_->post_wdb(R"({"weights": {"nfr_weights": {"Sped": 1}}})");
    EXPECT_EQ(r.status, 400);
    EXPECT_NE(r.body.find("Sped"), std::string::npos);
    const auto top = service_->post_wdb(R"({"weights": {}, "subset": ["AS"]})");
    EXPECT_EQ(top.status, 400);
    EXPECT_NE(top.body.find("subset"), std::string::npos);
    const auto errors = json::parse(top.body)["errors"];
    EXPECT_TRUE(errors.is_array());
}

TEST_F(ServiceTest, ErrorStatuses) {
    EXPECT_EQ(service_->post_wdb("{not json").status, 400);
    EXPECT_EQ(service_->post_wdb("[1,2]").status, 400);
    EXPECT_EQ(service_->post_wdb(R"({"w_ST": 1, "w_RA": 1})").status, 400);
    EXPECT_EQ(service_->post_wdb(R"({"technique_subset": ["AS"]})").status, 422);
    EXPECT_EQ(service_->post_wdb(R"({"technique_subset": ["AS", "ZZ"]})").status, 400);
}

TEST_F(ServiceTest, ConcurrentRequestsIndependent) {
    const std::vector<std::string> bodies{R"({})", R"({"technique_subset": ["AS", "JS"]})",
                                          R"({"alpha": 0.01})", R"({"fr_weights": {"S1": 0.2}})"};
    std::vector<std::string> expected;
    for (const auto& b : bodies) expected.push_back(service_->post_wdb(b).body);
    std::vector<std::future<std::string>> futures;
    for (int rep = 0; rep < 3; ++rep)
        for (const auto& b : bodies)
            futures.push_back(std::async(std::launch::async, [&, b] { return service_->post_wdb(b).body; }));
    for (std::size_t i = 0; i < futures.size(); ++i) EXPECT_EQ(futures[i].get(), expected[i % bodies.size()]);
}

TEST_F(ServiceTest, HttpEndpoints) {
    HttpServer server(*service_);
    const int port = server.bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    std::thread th([&] { server.listen(); });
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(60, 0);

    auto reg = client.Get("/api/registry");
    ASSERT_TRUE(reg);
    EXPECT_EQ(reg->status, 200);
    EXPECT_EQ(reg->get_header_value("Access-Control-Allow-Origin"), "*");
    auto sum = client.Get("/api/rdb/summary");
    ASSERT_TRUE(sum);
    EXPECT_EQ(json::parse(sum->body)["participants"], 32);

    auto wdb = client.Post("/api/wdb", "{}", "application/json");
    ASSERT_TRUE(wdb);
    EXPECT_EQ(wdb->status, 200);
    EXPECT_EQ(wdb->body, service_->post_wdb("{}").body);

    auto bad = client.Post("/api/wdb", R"({"technique_subset": ["CV"]})", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 422);

    auto missing = client.Get("/api/nothing");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);

    server.stop();
    th.join();
}

TEST(RecomputeRequest, OverridesInsideWeights) {
    const auto c = parse_recompute_request(
        json::parse(R"({"weights": {"alpha": 0.1, "technique_subset": ["AS", "CV"]}, "alpha": 0.01})"));
    EXPECT_EQ(c.alpha, 0.01);
    EXPECT_EQ(c.technique_subset, (std::vector<std::string>{"AS", "CV"}));
}
