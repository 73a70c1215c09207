#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "conceal/defense.hpp"
#include "conceal/json_io.hpp"
#include "conceal/system.hpp"
#include "conceal/verifier.hpp"

#include "util.hpp"

using namespace conceal;

namespace {

System fig2() { return load_system_file(fixture_path("fig2.json")); }

DefenseSpec ex5(const System& g) {
    return load_defense_file(fixture_path("ex5.json"), g.events());
}

std::vector<std::string> renders(const std::vector<DefensiveAction>& actions) {
    std::vector<std::string> out;
    for (const DefensiveAction& a : actions) out.push_back(a.render());
    return out;
}

}  // namespace

TEST_CASE("boundary specs cover the observable alphabet") {
    System g = fig2();

    DefenseSpec all = DefenseSpec::unconstrained(g.events());
    CHECK(all.replacements.size() == 4);
    CHECK(all.replacements.at("a") == g.events().observable);
    CHECK(all.insertions.at("d") == g.events().observable);
    CHECK(all.deletions == g.events().observable);

    DefenseSpec id = DefenseSpec::identity(g.events());
    CHECK(id.replacements.at("b") == std::set<EventId>{"b"});
    CHECK(id.insertions.empty());
    CHECK(id.deletions.empty());

    CHECK_NOTHROW(validate_defense_spec(all, g.events()));
    CHECK_NOTHROW(validate_defense_spec(id, g.events()));
}

TEST_CASE("defense specs mentioning unobservable events are rejected") {
    System g = fig2();
    DefenseSpec spec;
    spec.replacements["s"] = {"a"};
    CHECK_THROWS_AS(validate_defense_spec(spec, g.events()), UnknownEventError);

    spec = DefenseSpec{};
    spec.replacements["a"] = {"s"};
    CHECK_THROWS_AS(validate_defense_spec(spec, g.events()), UnknownEventError);

    spec = DefenseSpec{};
    spec.insertions["a"] = {"x"};
    CHECK_THROWS_AS(validate_defense_spec(spec, g.events()), UnknownEventError);

    spec = DefenseSpec{};
    spec.deletions = {"s"};
    CHECK_THROWS_AS(validate_defense_spec(spec, g.events()), UnknownEventError);
}

TEST_CASE("actions render and project by kind") {
    DefensiveAction replace{"d", DefensiveAction::Kind::Replace, "c"};
    DefensiveAction erase{"d", DefensiveAction::Kind::Delete, ""};
    DefensiveAction insert{"d", DefensiveAction::Kind::Insert, "c"};

    CHECK(replace.render() == "d/c");
    CHECK(erase.render() == "d/eps");
    CHECK(insert.render() == "d/cd");

    CHECK(replace.projection() == std::vector<EventId>{"c"});
    CHECK(erase.projection().empty());
    CHECK(insert.projection() == std::vector<EventId>{"c", "d"});

    CHECK(defensive_projection({insert, {"a", DefensiveAction::Kind::Replace, "d"}}) ==
          std::vector<EventId>{"c", "d", "d"});
}

TEST_CASE("per event action menus are sorted by rendering") {
    System g = fig2();
    DefenseSpec spec = ex5(g);

    CHECK(renders(actions_for(spec, "a")) == std::vector<std::string>{"a/a", "a/d"});
    CHECK(renders(actions_for(spec, "b")) == std::vector<std::string>{"b/b"});
    CHECK(renders(actions_for(spec, "c")) == std::vector<std::string>{"c/c"});
    CHECK(renders(actions_for(spec, "d")) ==
          std::vector<std::string>{"d/cd", "d/d", "d/eps"});
    CHECK(actions_for(spec, "x").empty());
}

TEST_CASE("defensive verifier of the running example") {
    System g = fig2();
    Verifier v = build_verifier(build_observer(g));
    DefensiveVerifier dv = build_defensive_verifier(v, ex5(g));

    REQUIRE(dv.states().size() == 3);
    CHECK(dv.states()[0].id() == "{1N,1N}");
    CHECK(dv.states()[1].id() == "{3S,5N}");
    CHECK(dv.states()[2].id() == "{5N,5N}");

    DefensiveAction cc{"c", DefensiveAction::Kind::Replace, "c"};
    DefensiveAction dcd{"d", DefensiveAction::Kind::Insert, "c"};
    DefensiveAction deps{"d", DefensiveAction::Kind::Delete, ""};
    DefensiveAction ad{"a", DefensiveAction::Kind::Replace, "d"};
    DefensiveAction dd{"d", DefensiveAction::Kind::Replace, "d"};

    CHECK(dv.next(0, cc) == std::vector<std::size_t>{1, 2});
    CHECK(dv.next(0, dcd) == std::vector<std::size_t>{1, 2});
    CHECK(dv.next(0, deps) == std::vector<std::size_t>{0});
    CHECK(dv.next(0, dd).empty());  // d reaches only the forbidden {4S,4S}
    CHECK(dv.next(0, ad).empty());

    for (std::size_t state : {std::size_t{1}, std::size_t{2}}) {
        CHECK(dv.next(state, ad) == std::vector<std::size_t>{state});
        CHECK(dv.next(state, dd) == std::vector<std::size_t>{state});
        CHECK(dv.next(state, deps) == std::vector<std::size_t>{state});
        CHECK(dv.next(state, cc).empty());
    }
    CHECK(dv.transitions().size() == 9);
}

TEST_CASE("defensive verifier refuses a certainly revealed start") {
    VerifierState bad = VerifierState::canonical({"1", Label::Secret}, {"1", Label::Secret});
    Verifier v({bad}, {}, {"a"});
    System g = fig2();
    CHECK_THROWS_AS(build_defensive_verifier(v, DefenseSpec::identity(g.events())),
                    SecretInitialError);
}

TEST_CASE("joint tracking structure of the running example") {
    System g = fig2();
    DefenseSpec spec = ex5(g);
    Verifier v = build_verifier(build_observer(g));
    EVerifier ev = build_e_verifier(v, build_defensive_verifier(v, spec), spec);

    REQUIRE(ev.states().size() == 10);
    CHECK(ev.states()[0].id() == "({1N,1N},{1N,1N})");
    CHECK(ev.states()[1].id() == "({3S,3S},{3S,5N})");
    CHECK(ev.states()[2].id() == "({3S,3S},{5N,5N})");
    CHECK(ev.states()[3].id() == "({3S,5N},{3S,5N})");
    CHECK(ev.states()[4].id() == "({3S,5N},{5N,5N})");
    CHECK(ev.states()[5].id() == "({5N,5N},{3S,5N})");
    CHECK(ev.states()[6].id() == "({5N,5N},{5N,5N})");
    CHECK(ev.states()[7].id() == "({4S,4S},{3S,5N})");
    CHECK(ev.states()[8].id() == "({4S,4S},{5N,5N})");
    CHECK(ev.states()[9].id() == "({4S,4S},{1N,1N})");

    DefensiveAction cc{"c", DefensiveAction::Kind::Replace, "c"};
    DefensiveAction dcd{"d", DefensiveAction::Kind::Insert, "c"};
    DefensiveAction deps{"d", DefensiveAction::Kind::Delete, ""};
    CHECK(ev.next(0, cc) == std::vector<std::size_t>{1, 2, 3, 4, 5, 6});
    CHECK(ev.next(0, dcd) == std::vector<std::size_t>{7, 8});
    CHECK(ev.next(0, deps) == std::vector<std::size_t>{9});

    // The faked estimate cannot answer b at {3S,5N}/{5N,5N}, nor a at
    // {1N,1N}: these are the states the reduction will prune.
    CHECK(ev.infeasible_events(5) == std::vector<EventId>{"b"});
    CHECK(ev.infeasible_events(6) == std::vector<EventId>{"b"});
    CHECK(ev.infeasible_events(9) == std::vector<EventId>{"a"});
    CHECK(ev.infeasible_events(0).empty());

    CHECK(ev.responds_to(0, "c"));
    CHECK(ev.responds_to(0, "d"));
    CHECK_FALSE(ev.responds_to(5, "b"));
    CHECK(ev.responds_to(5, "d"));
}

TEST_CASE("necessary condition fails at the normal loop pair") {
    System g = fig2();
    DefenseSpec spec = ex5(g);
    Verifier v = build_verifier(build_observer(g));
    EVerifier ev = build_e_verifier(v, build_defensive_verifier(v, spec), spec);

    NecessaryVerdict verdict = check_necessary(ev, v);
    CHECK_FALSE(verdict.maybe_enforceable);
    CHECK(verdict.witness_state == "{5N,5N}");
    CHECK(verdict.witness_event == "b");
}

TEST_CASE("necessary condition passes with every action allowed") {
    System g = fig2();
    DefenseSpec spec = DefenseSpec::unconstrained(g.events());
    Verifier v = build_verifier(build_observer(g));
    EVerifier ev = build_e_verifier(v, build_defensive_verifier(v, spec), spec);

    NecessaryVerdict verdict = check_necessary(ev, v);
    CHECK(verdict.maybe_enforceable);
    CHECK(verdict.witness_state.empty());
}

TEST_CASE("reduction prunes the unanswerable states and nothing else") {
    System g = fig2();
    DefenseSpec spec = ex5(g);
    Verifier v = build_verifier(build_observer(g));
    EVerifier ev = build_e_verifier(v, build_defensive_verifier(v, spec), spec);
    EVerifier reduced = reduce_e_verifier(ev, v, spec);

    REQUIRE(reduced.states().size() == 7);
    CHECK(reduced.states()[0].id() == "({1N,1N},{1N,1N})");
    CHECK(reduced.states()[1].id() == "({3S,3S},{3S,5N})");
    CHECK(reduced.states()[2].id() == "({3S,3S},{5N,5N})");
    CHECK(reduced.states()[3].id() == "({3S,5N},{3S,5N})");
    CHECK(reduced.states()[4].id() == "({3S,5N},{5N,5N})");
    CHECK(reduced.states()[5].id() == "({4S,4S},{3S,5N})");
    CHECK(reduced.states()[6].id() == "({4S,4S},{5N,5N})");

    DefensiveAction cc{"c", DefensiveAction::Kind::Replace, "c"};
    DefensiveAction dcd{"d", DefensiveAction::Kind::Insert, "c"};
    DefensiveAction deps{"d", DefensiveAction::Kind::Delete, ""};
    CHECK(reduced.next(0, cc) == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(reduced.next(0, dcd) == std::vector<std::size_t>{5, 6});
    CHECK(reduced.next(0, deps).empty());  // pointed at a pruned state

    for (std::size_t i = 0; i < reduced.states().size(); ++i)
        CHECK(reduced.infeasible_events(i).empty());
}

TEST_CASE("sufficient condition reports the uncovered verifier states") {
    System g = fig2();
    Verifier v = build_verifier(build_observer(g));

    DefenseSpec constrained = ex5(g);
    EVerifier ev =
        build_e_verifier(v, build_defensive_verifier(v, constrained), constrained);
    SufficientVerdict narrow = check_sufficient(reduce_e_verifier(ev, v, constrained), v);
    CHECK_FALSE(narrow.enforceable);
    CHECK(narrow.missing == std::vector<std::string>{"{5N,5N}", "{7S,7S}"});

    DefenseSpec all = DefenseSpec::unconstrained(g.events());
    EVerifier ev_all = build_e_verifier(v, build_defensive_verifier(v, all), all);
    SufficientVerdict wide = check_sufficient(reduce_e_verifier(ev_all, v, all), v);
    CHECK(wide.enforceable);
    CHECK(wide.missing.empty());
}

TEST_CASE("strategy extraction guards its preconditions") {
    System g = fig2();
    Verifier v = build_verifier(build_observer(g));

    SafeLasso no_cycle;
    no_cycle.stem = {"c"};
    CHECK_THROWS_AS(extract_strategy(no_cycle), NotEnforceableError);

    DefenseSpec constrained = ex5(g);
    EVerifier ev =
        build_e_verifier(v, build_defensive_verifier(v, constrained), constrained);
    EVerifier reduced = reduce_e_verifier(ev, v, constrained);
    CHECK_THROWS_AS(extract_strategy(reduced, v, constrained), NotEnforceableError);

    DefenseSpec all = DefenseSpec::unconstrained(g.events());
    EVerifier ev_all = build_e_verifier(v, build_defensive_verifier(v, all), all);
    CHECK_NOTHROW(extract_strategy(reduce_e_verifier(ev_all, v, all), v, all));
}

TEST_CASE("lasso replay aligns the first matching observation by insertion") {
    System g = fig2();
    UnconstrainedVerdict verdict = check_unconstrained(g);
    REQUIRE(verdict.lasso.has_value());

    // d matches the continuation after the stem head c: the head is
    // inserted and the real d survives.
    DefenseSession aligned(extract_strategy(*verdict.lasso));
    CHECK(aligned.step("d") == std::vector<EventId>{"c", "d"});
    CHECK(aligned.step("a") == std::vector<EventId>{"d"});
    CHECK(aligned.step("a") == std::vector<EventId>{"d"});
    CHECK(aligned.emitted() == std::vector<EventId>{"c", "d", "d", "d"});

    // c does not match, so the replay replaces positionally throughout.
    DefenseSession positional(extract_strategy(*verdict.lasso));
    CHECK(positional.step("c") == std::vector<EventId>{"c"});
    CHECK(positional.step("d") == std::vector<EventId>{"d"});
    CHECK(positional.step("b") == std::vector<EventId>{"d"});
    CHECK(positional.step("d") == std::vector<EventId>{"d"});
    CHECK(positional.emitted() == std::vector<EventId>{"c", "d", "d", "d"});
}

TEST_CASE("constrained session follows the reduced structure") {
    System g = fig2();
    DefenseSpec spec = ex5(g);
    Verifier v = build_verifier(build_observer(g));
    EVerifier ev = build_e_verifier(v, build_defensive_verifier(v, spec), spec);
    EVerifier reduced = reduce_e_verifier(ev, v, spec);

    // The sufficient check fails for this spec, so build the strategy
    // unchecked and walk only continuations the reduction still covers.
    DefenseSession session(Strategy::constrained(reduced, spec));
    CHECK(session.belief() == std::set<std::size_t>{0});

    CHECK(session.step("d") == std::vector<EventId>{"c", "d"});
    CHECK(session.belief() == std::set<std::size_t>{5, 6});
    CHECK(session.step("a") == std::vector<EventId>{"d"});
    CHECK(session.belief() == std::set<std::size_t>{5, 6});
    CHECK(session.emitted() == std::vector<EventId>{"c", "d", "d"});

    CHECK_THROWS_AS(session.step("b"), NoFeasibleActionError);
}

TEST_CASE("identity session passes events through") {
    DefenseSession session(Strategy::identity());
    CHECK(session.step("d") == std::vector<EventId>{"d"});
    CHECK(session.step("a") == std::vector<EventId>{"a"});
    CHECK(session.emitted() == std::vector<EventId>{"d", "a"});
}

TEST_CASE("substitution replay conceals the secret run") {
    System g = fig2();
    UnconstrainedVerdict verdict = check_unconstrained(g);
    REQUIRE(verdict.lasso.has_value());
    Strategy strategy = extract_strategy(*verdict.lasso);

    DefenseSimReport report = simulate_defense(g, strategy, {"s", "d", "a", "a"});
    CHECK(report.emitted == std::vector<EventId>{"c", "d", "d", "d"});
    CHECK(report.eavesdropper_states ==
          std::vector<std::string>{"{1N,2S}", "{3S,5N,6S}", "{3S,5N,6S}", "{3S,5N,6S}",
                                   "{3S,5N,6S}"});
    CHECK_FALSE(report.certain_secret);
    CHECK(report.consistent);
}

TEST_CASE("identity replay reveals the secret run") {
    System g = fig2();
    DefenseSimReport report = simulate_defense(g, Strategy::identity(), {"s", "d", "a"});
    CHECK(report.emitted == std::vector<EventId>{"d", "a"});
    CHECK(report.eavesdropper_states ==
          std::vector<std::string>{"{1N,2S}", "{4S}", "{4S}"});
    CHECK(report.certain_secret);
    CHECK(report.consistent);
}

TEST_CASE("simulation guards the trace") {
    System g = fig2();
    Strategy id = Strategy::identity();

    DefenseSimReport empty = simulate_defense(g, id, {});
    CHECK(empty.emitted.empty());
    CHECK(empty.eavesdropper_states == std::vector<std::string>{"{1N,2S}"});
    CHECK_FALSE(empty.certain_secret);
    CHECK(empty.consistent);

    CHECK_THROWS_AS(simulate_defense(g, id, {"d"}), std::invalid_argument);
    CHECK_THROWS_AS(simulate_defense(g, id, {"z"}), UnknownEventError);
}
