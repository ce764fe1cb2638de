#include <gtest/gtest.h>

#include <set>

#include "locoscore/rdb.hpp"
#include "synthetic.hpp"

using namespace locoscore;

TEST(Registry, StraightLinePathDeviation) {
    const auto& s = builtin_registry().at(Scope::of(TaskRef{Scenario::S1, 1}), "STPathDev");
    EXPECT_EQ(s.kind, RequirementKind::AC);
    EXPECT_EQ(s.unit, "m*s");
    EXPECT_EQ(s.default_direction, Direction::Negative);
}

TEST(Registry, StairsChoiceIsBinaryOther) {
    const auto& s = builtin_registry().at(Scope::of(TaskRef{Scenario::S2, 4}), "StairsChoice");
    EXPECT_EQ(s.kind, RequirementKind::OT);
    EXPECT_EQ(s.aggregation.kind, Aggregation::Kind::Elementary);
    EXPECT_EQ(s.domain, ValueDomain::Binary);
}

TEST(Registry, EighteenTasksOverFiveScenarios) {
    const auto tasks = builtin_registry().tasks();
    EXPECT_EQ(tasks.size(), 18u);
    std::set<Scenario> scenarios;
    for (const auto& t : tasks) scenarios.insert(t.scenario);
    EXPECT_EQ(scenarios.size(), 5u);
    int total = 0;
    for (auto s : kAllScenarios) total += task_count(s);
    EXPECT_EQ(total, 18);
}

TEST(Registry, OnePhysicalEffortPerScenarioAndOneSud) {
    std::map<Scenario, int> pe;
    int sud = 0;
    for (const auto& s : builtin_registry().all()) {
        if (s.kind == RequirementKind::PE) {
            ASSERT_TRUE(s.scope.is_scenario());
            ++pe[*s.scope.scenario];
        }
        if (s.id == metric_ids::kSud) {
            ++sud;
            EXPECT_EQ(to_string(s.scope), "S2.T5");
        }
    }
    EXPECT_EQ(pe.size(), 5u);
    for (const auto& [s, n] : pe) EXPECT_EQ(n, 1) << to_string(s);
    EXPECT_EQ(sud, 1);
}

TEST(Registry, DefaultDirections) {
    for (const auto& s : builtin_registry().all()) {
        const bool ssq = s.id.rfind("SSQ_", 0) == 0;
        // Cumulative metrics hold points, so more is better whatever their kind.
        if (s.aggregation.kind == Aggregation::Kind::Cumulative) {
            EXPECT_EQ(s.default_direction, Direction::Positive) << s.key();
            continue;
        }
        if (s.kind == RequirementKind::EP || s.id == metric_ids::kComplTime || ssq ||
            s.kind == RequirementKind::PE)
            EXPECT_EQ(s.default_direction, Direction::Negative) << s.key();
    }
    const auto& r = builtin_registry();
    EXPECT_EQ(r.at(Scope::of(TaskRef{Scenario::S2, 5}), "Avoidance").default_direction, Direction::Positive);
    EXPECT_EQ(r.at(Scope::of(Scenario::S1), "MentalEffort").default_direction, Direction::Negative);
    EXPECT_EQ(r.at(Scope::of(Scenario::S1), "Satisfaction").default_direction, Direction::Positive);
}

TEST(Registry, ScopesMatchKinds) {
    for (const auto& s : builtin_registry().all()) {
        switch (s.kind) {
            case RequirementKind::OS:
            case RequirementKind::AC:
            case RequirementKind::EP:
            case RequirementKind::OT: EXPECT_TRUE(s.scope.is_task()) << s.key(); break;
            case RequirementKind::PE: EXPECT_TRUE(s.scope.is_scenario()) << s.key(); break;
            case RequirementKind::SubjOverall: EXPECT_TRUE(s.scope.is_overall()) << s.key(); break;
            case RequirementKind::SubjScenario:
                EXPECT_TRUE(s.scope.is_scenario() || s.id == metric_ids::kSud) << s.key();
                break;
        }
        if (s.aggregation.kind == Aggregation::Kind::Cumulative) {
            EXPECT_GE(s.aggregation.elements.size(), 2u) << s.key();
            for (const auto& e : s.aggregation.elements) EXPECT_NE(builtin_registry().find(s.scope, e), nullptr);
        }
    }
}

TEST(Registry, KeysAreUniqueAndResolve) {
    std::set<std::string> keys;
    for (const auto& s : builtin_registry().all()) {
        EXPECT_TRUE(keys.insert(s.key()).second) << s.key();
        EXPECT_EQ(builtin_registry().find(s.key()), &s);
    }
}

TEST(Model, TaskParsing) {
    EXPECT_EQ(to_string(*parse_task("S2.T4")), "S2.T4");
    EXPECT_FALSE(parse_task("S3.T4"));
    EXPECT_FALSE(parse_task("S6.T1"));
    EXPECT_FALSE(parse_task("S1T1"));
}

TEST(ValidateRdb, EmptyHasNoParticipants) {
    const auto v = validate_rdb(RawDatabase{});
    ASSERT_FALSE(v.empty());
    EXPECT_NE(std::find(v.begin(), v.end(), "no participants"), v.end());
}

TEST(ValidateRdb, SyntheticIsValid) {
    EXPECT_EQ(validate_rdb(testkit::synthetic_rdb()), std::vector<std::string>{});
}

TEST(ValidateRdb, NegativeDuration) {
    auto rdb = testkit::synthetic_rdb();
    for (auto& m : rdb.measurements)
        if (m.metric == "ComplTime") {
            m.value = -1;
            break;
        }
    const auto v = validate_rdb(rdb);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("negative duration"), std::string::npos);
}

TEST(ValidateRdb, DuplicateAssignment) {
    auto rdb = testkit::synthetic_rdb();
    auto m = rdb.measurements.front();
    m.technique = m.technique == "AS" ? "JS" : "AS";
    m.metric = "NumWallColl";
    m.task = {Scenario::S1, 1};
    rdb.measurements.erase(std::remove_if(rdb.measurements.begin(), rdb.measurements.end(),
                                          [&](const Measurement& x) {
                                              return x.participant == m.participant && x.task == m.task &&
                                                     x.metric == m.metric;
                                          }),
                           rdb.measurements.end());
    rdb.measurements.push_back(m);
    const auto v = validate_rdb(rdb);
    EXPECT_TRUE(std::any_of(v.begin(), v.end(),
                            [](const std::string& s) { return s.find("duplicate assignment") != std::string::npos; }));
}

TEST(ValidateRdb, DomainChecks) {
    const auto& r = builtin_registry();
    const TaskRef s1t1{Scenario::S1, 1};
    EXPECT_EQ(domain_violation(r.at(Scope::of(s1t1), "NumWallColl"), 1.5), "count must be a non-negative integer");
    EXPECT_EQ(domain_violation(r.at(Scope::of(TaskRef{Scenario::S1, 3}), "InsideTargetRate"), 1.2),
              "rate outside [0,1]");
    EXPECT_EQ(domain_violation(r.at(Scope::of(TaskRef{Scenario::S2, 4}), "StairsChoice"), 0.5),
              "binary value must be 0 or 1");
    EXPECT_EQ(domain_violation(r.at(Scope::of(s1t1), "ComplTime"), 3.0), "");
}

TEST(ValidateRdb, LikertAndSsqRanges) {
    auto rdb = testkit::synthetic_rdb();
    auto& q = rdb.questionnaires.begin()->second;
    q.after_scenario[Scenario::S1]["Satisfaction"] = {6};
    (*q.post_ssq)[0] = 4;
    const auto v = validate_rdb(rdb);
    EXPECT_EQ(v.size(), 2u);
}
