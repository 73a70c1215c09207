#include "conceal/diagnoser.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "conceal/verifier.hpp"
#include "scc.hpp"

namespace conceal {

std::string to_string(StateClass c) {
    switch (c) {
        case StateClass::Normal: return "normal";
        case StateClass::Secret: return "secret";
        case StateClass::Uncertain: return "uncertain";
    }
    return "?";
}

DiagnoserState DiagnoserState::canonical(const std::set<LabeledState>& members) {
    DiagnoserState s;
    s.members.assign(members.begin(), members.end());
    return s;
}

StateClass DiagnoserState::classification() const {
    bool any_secret = false, any_normal = false;
    for (const LabeledState& m : members) {
        (m.label == Label::Secret ? any_secret : any_normal) = true;
    }
    if (any_secret && any_normal) return StateClass::Uncertain;
    return any_secret ? StateClass::Secret : StateClass::Normal;
}

std::string DiagnoserState::id() const {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) out << ',';
        out << to_string(members[i]);
    }
    out << '}';
    return out.str();
}

StateClass classify(const DiagnoserState& state) {
    return state.classification();
}

Diagnoser::Diagnoser(std::vector<DiagnoserState> states,
                     std::map<std::pair<std::size_t, EventId>, std::size_t> transitions,
                     std::set<EventId> alphabet)
    : states_(std::move(states)),
      transitions_(std::move(transitions)),
      alphabet_(std::move(alphabet)) {}

std::optional<std::size_t> Diagnoser::next(std::size_t state, const EventId& e) const {
    auto it = transitions_.find({state, e});
    if (it == transitions_.end()) return std::nullopt;
    return it->second;
}

std::vector<EventId> Diagnoser::enabled_events(std::size_t state) const {
    std::vector<EventId> out;
    for (const EventId& e : alphabet_) {
        if (transitions_.count({state, e})) out.push_back(e);
    }
    return out;
}

std::optional<std::size_t> Diagnoser::run(const std::vector<EventId>& observation) const {
    std::size_t cur = initial();
    for (const EventId& e : observation) {
        std::optional<std::size_t> nxt = next(cur, e);
        if (!nxt) return std::nullopt;
        cur = *nxt;
    }
    return cur;
}

namespace {

// Labeled unobservable closure of a landing set; the per-start closure in
// the automata module handles the cycle guard, so this one assumes a
// validated system and just saturates.
std::set<LabeledState> labeled_closure(const System& system, std::set<LabeledState> set) {
    std::deque<LabeledState> queue(set.begin(), set.end());
    while (!queue.empty()) {
        LabeledState cur = queue.front();
        queue.pop_front();
        for (const auto& [event, dsts] : system.outgoing(cur.state)) {
            if (!system.events().is_unobservable(event)) continue;
            Label next_label =
                (cur.label == Label::Secret || system.events().is_secret(event)) ? Label::Secret
                                                                                 : Label::Normal;
            for (const StateId& d : dsts) {
                LabeledState next{d, next_label};
                if (set.insert(next).second) queue.push_back(next);
            }
        }
    }
    return set;
}

}  // namespace

Diagnoser build_diagnoser(const System& system) {
    require_valid(system);

    const std::set<EventId>& observable = system.events().observable;

    std::set<LabeledState> initial_members =
        labeled_closure(system, {{system.initial(), Label::Normal}});
    DiagnoserState initial = DiagnoserState::canonical(initial_members);

    std::vector<DiagnoserState> states{initial};
    std::map<DiagnoserState, std::size_t> index{{initial, 0}};
    std::map<std::pair<std::size_t, EventId>, std::size_t> transitions;

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (const EventId& e : observable) {
            std::set<LabeledState> landing;
            for (const LabeledState& m : states[cur].members) {
                for (const StateId& d : system.successors(m.state, e)) {
                    landing.insert({d, m.label});
                }
            }
            if (landing.empty()) continue;
            DiagnoserState next = DiagnoserState::canonical(labeled_closure(system, landing));
            auto [it, inserted] = index.try_emplace(next, states.size());
            if (inserted) {
                states.push_back(next);
                queue.push_back(it->second);
            }
            transitions[{cur, e}] = it->second;
        }
    }
    return Diagnoser(std::move(states), std::move(transitions), observable);
}

namespace {

struct StemEntry {
    std::vector<EventId> stem;
    bool reached = false;
};

// Shortest stems from the initial state; BFS in sorted event order makes the
// recorded stem the lexicographically least among the shortest ones.
std::vector<StemEntry> shortest_stems(const Diagnoser& diagnoser) {
    std::vector<StemEntry> stems(diagnoser.states().size());
    stems[diagnoser.initial()].reached = true;
    std::deque<std::size_t> queue{diagnoser.initial()};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (const EventId& e : diagnoser.enabled_events(cur)) {
            std::size_t nxt = *diagnoser.next(cur, e);
            if (stems[nxt].reached) continue;
            stems[nxt].reached = true;
            stems[nxt].stem = stems[cur].stem;
            stems[nxt].stem.push_back(e);
            queue.push_back(nxt);
        }
    }
    return stems;
}

// Shortest cycle (lexicographically least among the shortest) from `entry`
// back to itself using only nodes inside `allowed`.
std::pair<std::vector<EventId>, std::vector<std::size_t>> shortest_cycle(
    const Diagnoser& diagnoser, std::size_t entry, const std::set<std::size_t>& allowed) {
    struct Path {
        std::vector<EventId> events;
        std::vector<std::size_t> nodes;  // nodes visited before each event
    };
    std::map<std::size_t, Path> best;  // first discovery = shortest + lex-least
    std::deque<std::size_t> queue;

    auto expand = [&](std::size_t from, const Path& path)
        -> std::optional<std::pair<std::vector<EventId>, std::vector<std::size_t>>> {
        for (const EventId& e : diagnoser.enabled_events(from)) {
            std::size_t nxt = *diagnoser.next(from, e);
            if (allowed.count(nxt) == 0) continue;
            Path extended = path;
            extended.events.push_back(e);
            extended.nodes.push_back(from);
            if (nxt == entry) return std::make_pair(extended.events, extended.nodes);
            if (best.count(nxt)) continue;
            best[nxt] = std::move(extended);
            queue.push_back(nxt);
        }
        return std::nullopt;
    };

    if (auto found = expand(entry, Path{})) return *found;
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        if (auto found = expand(cur, best[cur])) return *found;
    }
    return {};  // unreachable for components that contain a cycle
}

}  // namespace

std::vector<CycleWitness> find_secret_cycles(const Diagnoser& diagnoser) {
    const std::size_t n = diagnoser.states().size();

    // Subgraph induced by Secret-classified states.
    std::vector<std::vector<int>> graph(n);
    std::vector<bool> secret(n, false);
    for (std::size_t i = 0; i < n; ++i)
        secret[i] = diagnoser.states()[i].classification() == StateClass::Secret;
    for (const auto& [key, dst] : diagnoser.transitions()) {
        if (secret[key.first] && secret[dst])
            graph[key.first].push_back(static_cast<int>(dst));
    }

    std::vector<StemEntry> stems = shortest_stems(diagnoser);
    std::vector<CycleWitness> witnesses;
    for (const std::vector<int>& component :
         detail::strongly_connected_components(graph)) {
        if (!secret[component.front()]) continue;
        if (!detail::component_has_cycle(component, graph)) continue;

        // Entry state: reachable member with the least (|stem|, stem, id).
        std::optional<std::size_t> entry;
        for (int v : component) {
            std::size_t node = static_cast<std::size_t>(v);
            if (!stems[node].reached) continue;
            if (!entry) {
                entry = node;
                continue;
            }
            const auto& a = stems[node];
            const auto& b = stems[*entry];
            auto key = [&](std::size_t idx, const StemEntry& s) {
                return std::make_tuple(s.stem.size(), s.stem, diagnoser.states()[idx].id());
            };
            if (key(node, a) < key(*entry, b)) entry = node;
        }
        if (!entry) continue;  // component not reachable from the initial state

        std::set<std::size_t> allowed;
        for (int v : component) allowed.insert(static_cast<std::size_t>(v));
        auto [cycle_events, cycle_nodes] = shortest_cycle(diagnoser, *entry, allowed);

        CycleWitness w;
        w.stem = stems[*entry].stem;
        w.cycle = cycle_events;
        for (std::size_t node : cycle_nodes) w.states.push_back(diagnoser.states()[node].id());
        witnesses.push_back(std::move(w));
    }

    std::sort(witnesses.begin(), witnesses.end(), [](const CycleWitness& a, const CycleWitness& b) {
        return std::make_tuple(a.stem.size(), a.stem, a.states) <
               std::make_tuple(b.stem.size(), b.stem, b.states);
    });
    return witnesses;
}

ConcealabilityVerdict is_concealable(const System& system) {
    Diagnoser diagnoser = build_diagnoser(system);
    ConcealabilityVerdict verdict;
    verdict.witnesses = find_secret_cycles(diagnoser);
    verdict.concealable = verdict.witnesses.empty();
    return verdict;
}

bool is_diagnosable(const System& system) {
    require_valid(system);
    Verifier verifier = build_verifier(build_observer(system));

    const std::size_t n = verifier.states().size();
    std::vector<std::vector<int>> graph(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const EventId& e : verifier.enabled_events(i)) {
            for (std::size_t j : verifier.next(i, e)) graph[i].push_back(static_cast<int>(j));
        }
    }
    for (const std::vector<int>& component : detail::strongly_connected_components(graph)) {
        if (!detail::component_has_cycle(component, graph)) continue;
        for (int v : component) {
            if (verifier.states()[static_cast<std::size_t>(v)].classification() ==
                StateClass::Uncertain)
                return false;
        }
    }
    return true;
}

}  // namespace conceal
