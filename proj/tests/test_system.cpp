#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "conceal/json_io.hpp"
#include "conceal/system.hpp"

#include "util.hpp"

using namespace conceal;

namespace {

System two_state(std::vector<Transition> transitions, EventPartition events) {
    return System({"1", "2"}, "1", std::move(events), std::move(transitions));
}

EventPartition ab_partition() {
    EventPartition events;
    events.observable = {"a", "b"};
    events.unobservable = {"s"};
    events.secret = {"s"};
    return events;
}

}  // namespace

TEST_CASE("labeled states render state then label") {
    CHECK(to_string(LabeledState{"3", Label::Secret}) == "3S");
    CHECK(to_string(LabeledState{"5", Label::Normal}) == "5N");
    CHECK(label_char(Label::Normal) == 'N');
    CHECK(label_char(Label::Secret) == 'S');
}

TEST_CASE("construction rejects structural defects") {
    EventPartition events = ab_partition();

    CHECK_THROWS_AS(System({}, "1", events, {}), std::invalid_argument);
    CHECK_THROWS_AS(System({"1"}, "2", events, {}), std::invalid_argument);
    CHECK_THROWS_AS(two_state({{"1", "a", "3"}}, events), std::invalid_argument);
    CHECK_THROWS_AS(two_state({{"3", "a", "1"}}, events), std::invalid_argument);
    CHECK_THROWS_AS(two_state({{"1", "x", "2"}}, events), std::invalid_argument);

    EventPartition overlap = events;
    overlap.unobservable.insert("a");
    CHECK_THROWS_AS(two_state({}, overlap), std::invalid_argument);

    EventPartition stray_secret = events;
    stray_secret.secret.insert("z");
    CHECK_THROWS_AS(two_state({}, stray_secret), std::invalid_argument);

    // Event names must survive the rendered-action syntax.
    EventPartition slashed = events;
    slashed.observable.insert("a/b");
    CHECK_THROWS_AS(two_state({}, slashed), std::invalid_argument);
    EventPartition eps = events;
    eps.observable.insert("eps");
    CHECK_THROWS_AS(two_state({}, eps), std::invalid_argument);
}

TEST_CASE("successors are sorted and deduplicated") {
    EventPartition events = ab_partition();
    System g = two_state({{"1", "a", "2"}, {"1", "a", "2"}, {"1", "a", "1"}}, events);
    CHECK(g.successors("1", "a") == std::vector<StateId>{"1", "2"});
    CHECK(g.successors("1", "b").empty());
    CHECK(g.successors("2", "a").empty());
    CHECK(g.outgoing("2").empty());
}

TEST_CASE("validation passes on the running example") {
    System g = load_system_file(fixture_path("fig2.json"));
    ValidationReport report = validate(g);
    CHECK(report.passed());
    CHECK(report.live);
    CHECK(report.unobservable_cycle_free);
    CHECK(report.secrets_unobservable);
    CHECK(report.violations.empty());
}

TEST_CASE("validation reports deadlocks with a witness") {
    EventPartition events = ab_partition();
    System g = two_state({{"1", "a", "2"}}, events);
    ValidationReport report = validate(g);
    CHECK_FALSE(report.passed());
    CHECK_FALSE(report.live);
    bool mentions_two = false;
    for (const auto& v : report.violations) {
        if (v.find("'2'") != std::string::npos) mentions_two = true;
    }
    CHECK(mentions_two);
}

TEST_CASE("validation reports unobservable cycles") {
    EventPartition events = ab_partition();
    System g = two_state({{"1", "s", "2"}, {"2", "s", "1"}, {"1", "a", "1"}, {"2", "a", "2"}},
                         events);
    ValidationReport report = validate(g);
    CHECK_FALSE(report.unobservable_cycle_free);
    CHECK_FALSE(report.passed());
}

TEST_CASE("validation reports observable secret events") {
    EventPartition events;
    events.observable = {"a", "s"};
    events.secret = {"s"};
    System g = two_state({{"1", "s", "2"}, {"2", "a", "2"}, {"1", "a", "1"}}, events);
    ValidationReport report = validate(g);
    CHECK_FALSE(report.secrets_unobservable);
    CHECK_FALSE(report.passed());
}

TEST_CASE("liveness is only required on reachable states") {
    EventPartition events = ab_partition();
    // State 2 is unreachable and dead; the report passes but notes it.
    System g = two_state({{"1", "a", "1"}}, events);
    ValidationReport report = validate(g);
    CHECK(report.passed());
    CHECK_FALSE(report.notes.empty());
}

TEST_CASE("projection erases unobservable events only") {
    System g = load_system_file(fixture_path("fig2.json"));
    CHECK(project({"s", "d", "a", "a"}, g.events()) == std::vector<EventId>{"d", "a", "a"});
    CHECK(project({}, g.events()).empty());
    CHECK(project({"s"}, g.events()).empty());
    CHECK_THROWS_AS(project({"z"}, g.events()), UnknownEventError);
}

TEST_CASE("labeled unobservable reach closes over secrets") {
    System g = load_system_file(fixture_path("fig2.json"));

    std::set<LabeledState> from_initial = labeled_unobservable_reach(g, {"1", Label::Normal});
    CHECK(from_initial == std::set<LabeledState>{{"1", Label::Normal}, {"2", Label::Secret}});

    std::set<LabeledState> from_five = labeled_unobservable_reach(g, {"5", Label::Normal});
    CHECK(from_five == std::set<LabeledState>{{"5", Label::Normal}, {"6", Label::Secret}});

    // A Secret label never resets.
    std::set<LabeledState> tainted = labeled_unobservable_reach(g, {"5", Label::Secret});
    CHECK(tainted == std::set<LabeledState>{{"5", Label::Secret}, {"6", Label::Secret}});

    CHECK_THROWS_AS(labeled_unobservable_reach(g, {"9", Label::Normal}), std::invalid_argument);
}

TEST_CASE("labeled unobservable reach rejects cyclic unobservable subgraphs") {
    EventPartition events = ab_partition();
    System g = two_state({{"1", "s", "2"}, {"2", "s", "1"}, {"1", "a", "1"}, {"2", "a", "2"}},
                         events);
    CHECK_THROWS_AS(labeled_unobservable_reach(g, {"1", Label::Normal}), UnobservableCycleError);
}

TEST_CASE("enabled observable events union over the state set") {
    System g = load_system_file(fixture_path("fig2.json"));
    CHECK(enabled_observable(g, {"1", "2"}) == std::set<EventId>{"c", "d"});
    CHECK(enabled_observable(g, {"3"}) == std::set<EventId>{"d"});
    CHECK(enabled_observable(g, {}).empty());
}

TEST_CASE("string enumeration is shortlex ordered and secret flagged") {
    System g = load_system_file(fixture_path("fig2.json"));

    std::vector<FlaggedString> depth1 = enumerate_strings(g, 1);
    REQUIRE(depth1.size() == 3);
    CHECK(depth1[0] == FlaggedString{{}, false});
    CHECK(depth1[1] == FlaggedString{{"c"}, false});
    CHECK(depth1[2] == FlaggedString{{"s"}, true});

    std::vector<FlaggedString> depth2 = enumerate_strings(g, 2);
    REQUIRE(depth2.size() == 7);
    CHECK(depth2[3] == FlaggedString{{"c", "d"}, false});
    CHECK(depth2[4] == FlaggedString{{"c", "s"}, true});
    CHECK(depth2[5] == FlaggedString{{"s", "c"}, true});
    CHECK(depth2[6] == FlaggedString{{"s", "d"}, true});

    // Monotone: every string at depth k persists at depth k+1.
    std::vector<FlaggedString> depth3 = enumerate_strings(g, 3);
    for (const auto& fs : depth2) {
        CHECK(std::find(depth3.begin(), depth3.end(), fs) != depth3.end());
    }

    CHECK_THROWS_AS(enumerate_strings(g, -1), std::invalid_argument);
}

TEST_CASE("reachable states cover the running example") {
    System g = load_system_file(fixture_path("fig2.json"));
    CHECK(reachable_states(g) == std::set<StateId>{"1", "2", "3", "4", "5", "6", "7"});
}

TEST_CASE("require_valid throws a carrying error") {
    EventPartition events = ab_partition();
    System g = two_state({{"1", "a", "2"}}, events);
    CHECK_THROWS_AS(require_valid(g), InvalidSystemError);
    System ok = load_system_file(fixture_path("fig2.json"));
    CHECK_NOTHROW(require_valid(ok));
}
