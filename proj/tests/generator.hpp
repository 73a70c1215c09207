#ifndef TESTS_GENERATOR_HPP
#define TESTS_GENERATOR_HPP

#include <random>
#include <set>
#include <string>
#include <vector>

#include "conceal/defense.hpp"
#include "conceal/system.hpp"

// Random small instances for property tests: up to 5 states, up to 4
// observable events, one unobservable secret event "s". Validity is
// guaranteed by construction: every state carries at least one observable
// transition (liveness) and secret edges only go from lower to higher state
// numbers (acyclic unobservable subgraph).
inline conceal::System random_valid_system(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> state_count(2, 5);
    const int n = state_count(rng);

    std::set<conceal::StateId> states;
    std::vector<conceal::StateId> names;
    for (int i = 1; i <= n; ++i) {
        names.push_back(std::to_string(i));
        states.insert(names.back());
    }

    const std::vector<conceal::EventId> pool = {"a", "b", "c", "d"};
    std::uniform_int_distribution<int> obs_count(1, 4);
    const int m = obs_count(rng);
    conceal::EventPartition events;
    for (int i = 0; i < m; ++i) events.observable.insert(pool[static_cast<std::size_t>(i)]);
    events.unobservable.insert("s");
    events.secret.insert("s");

    std::vector<conceal::EventId> obs(events.observable.begin(), events.observable.end());
    std::uniform_int_distribution<std::size_t> pick_event(0, obs.size() - 1);
    std::uniform_int_distribution<int> pick_state(0, n - 1);
    std::uniform_int_distribution<int> out_degree(1, 3);
    std::uniform_int_distribution<int> coin(0, 99);

    std::set<conceal::Transition> edges;
    for (int i = 0; i < n; ++i) {
        const int degree = out_degree(rng);
        for (int k = 0; k < degree; ++k) {
            edges.insert({names[static_cast<std::size_t>(i)], obs[pick_event(rng)],
                          names[static_cast<std::size_t>(pick_state(rng))]});
        }
        // Secret edges form a DAG: strictly increasing state number.
        if (i + 1 < n && coin(rng) < 50) {
            std::uniform_int_distribution<int> pick_higher(i + 1, n - 1);
            edges.insert({names[static_cast<std::size_t>(i)], "s",
                          names[static_cast<std::size_t>(pick_higher(rng))]});
        }
    }

    return conceal::System(states, names[0], events,
                           std::vector<conceal::Transition>(edges.begin(), edges.end()));
}

// Random defense over the system's observable events. Biased toward the two
// boundary specs so the property suite exercises both extremes: half
// identity, a sixth unconstrained, the rest freely mixed (possibly leaving
// some event with no action at all).
inline conceal::DefenseSpec random_defense(std::mt19937_64& rng,
                                           const conceal::EventPartition& events) {
    std::uniform_int_distribution<int> coin(0, 99);
    const int roll = coin(rng);
    if (roll < 50) return conceal::DefenseSpec::identity(events);
    if (roll < 65) return conceal::DefenseSpec::unconstrained(events);

    conceal::DefenseSpec spec;
    for (const auto& t : events.observable) {
        for (const auto& o : events.observable) {
            const int bias = (o == t) ? 70 : 30;
            if (coin(rng) < bias) spec.replacements[t].insert(o);
        }
        for (const auto& e : events.observable) {
            if (coin(rng) < 15) spec.insertions[t].insert(e);
        }
        if (coin(rng) < 30) spec.deletions.insert(t);
    }
    // Drop empty entries so rendered specs stay tidy.
    for (auto it = spec.replacements.begin(); it != spec.replacements.end();) {
        it = it->second.empty() ? spec.replacements.erase(it) : std::next(it);
    }
    for (auto it = spec.insertions.begin(); it != spec.insertions.end();) {
        it = it->second.empty() ? spec.insertions.erase(it) : std::next(it);
    }
    return spec;
}

// Random string of L(G) obtained by a bounded random walk from the initial
// state; may be shorter than max_len when the walk is cut off.
inline std::vector<conceal::EventId> random_trace(std::mt19937_64& rng,
                                                  const conceal::System& system, int max_len) {
    std::vector<conceal::EventId> trace;
    conceal::StateId current = system.initial();
    for (int step = 0; step < max_len; ++step) {
        const auto& out = system.outgoing(current);
        if (out.empty()) break;
        std::vector<std::pair<conceal::EventId, conceal::StateId>> choices;
        for (const auto& [event, dsts] : out) {
            for (const auto& dst : dsts) choices.emplace_back(event, dst);
        }
        std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
        const auto& [event, dst] = choices[pick(rng)];
        trace.push_back(event);
        current = dst;
    }
    return trace;
}

#endif
