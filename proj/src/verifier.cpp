#include "conceal/verifier.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <tuple>

#include "scc.hpp"

namespace conceal {

const std::set<LabeledState>& ObserverNfa::next(const LabeledState& s, const EventId& e) const {
    static const std::set<LabeledState> none;
    auto it = transitions.find({s, e});
    return it == transitions.end() ? none : it->second;
}

ObserverNfa build_observer(const System& system) {
    require_valid(system);

    // (state, crossed-a-secret) pairs reachable via unobservable strings.
    auto flagged_closure = [&system](const StateId& start) {
        std::set<std::pair<StateId, bool>> reach{{start, false}};
        std::deque<std::pair<StateId, bool>> queue{{start, false}};
        while (!queue.empty()) {
            auto [cur, flag] = queue.front();
            queue.pop_front();
            for (const auto& [event, dsts] : system.outgoing(cur)) {
                if (!system.events().is_unobservable(event)) continue;
                bool next_flag = flag || system.events().is_secret(event);
                for (const StateId& d : dsts) {
                    if (reach.insert({d, next_flag}).second) queue.push_back({d, next_flag});
                }
            }
        }
        return reach;
    };

    ObserverNfa observer;
    observer.initial = {system.initial(), Label::Normal};
    observer.alphabet = system.events().observable;
    observer.states.insert(observer.initial);

    std::deque<LabeledState> queue{observer.initial};
    while (!queue.empty()) {
        LabeledState cur = queue.front();
        queue.pop_front();
        auto closure = flagged_closure(cur.state);
        for (const EventId& e : observer.alphabet) {
            std::set<LabeledState> succ;
            for (const auto& [mid, crossed_secret] : closure) {
                Label label = (cur.label == Label::Secret || crossed_secret) ? Label::Secret
                                                                             : Label::Normal;
                for (const StateId& d : system.successors(mid, e)) succ.insert({d, label});
            }
            if (succ.empty()) continue;
            for (const LabeledState& s : succ) {
                if (observer.states.insert(s).second) queue.push_back(s);
            }
            observer.transitions[{cur, e}] = std::move(succ);
        }
    }
    return observer;
}

VerifierState VerifierState::canonical(LabeledState a, LabeledState b) {
    VerifierState v;
    if (b < a) std::swap(a, b);
    v.pair = {std::move(a), std::move(b)};
    return v;
}

StateClass VerifierState::classification() const {
    bool first = pair[0].label == Label::Secret;
    bool second = pair[1].label == Label::Secret;
    if (first && second) return StateClass::Secret;
    if (!first && !second) return StateClass::Normal;
    return StateClass::Uncertain;
}

std::string VerifierState::id() const {
    return "{" + to_string(pair[0]) + "," + to_string(pair[1]) + "}";
}

Verifier::Verifier(std::vector<VerifierState> states,
                   std::map<std::pair<std::size_t, EventId>, std::vector<std::size_t>> transitions,
                   std::set<EventId> alphabet)
    : states_(std::move(states)),
      transitions_(std::move(transitions)),
      alphabet_(std::move(alphabet)) {
    enabled_.resize(states_.size());
    for (const auto& [key, dsts] : transitions_) enabled_[key.first].push_back(key.second);
    for (auto& events : enabled_) std::sort(events.begin(), events.end());
    for (std::size_t i = 0; i < states_.size(); ++i) index_[states_[i]] = i;
}

const std::vector<std::size_t>& Verifier::next(std::size_t state, const EventId& e) const {
    static const std::vector<std::size_t> none;
    auto it = transitions_.find({state, e});
    return it == transitions_.end() ? none : it->second;
}

const std::vector<EventId>& Verifier::enabled_events(std::size_t state) const {
    return enabled_[state];
}

std::optional<std::size_t> Verifier::index_of(const VerifierState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Verifier build_verifier(const ObserverNfa& observer) {
    VerifierState initial = VerifierState::canonical(observer.initial, observer.initial);

    std::vector<VerifierState> states{initial};
    std::map<VerifierState, std::size_t> index{{initial, 0}};
    std::map<std::pair<std::size_t, EventId>, std::vector<std::size_t>> transitions;

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        VerifierState state = states[cur];
        for (const EventId& e : observer.alphabet) {
            const std::set<LabeledState>& first = observer.next(state.pair[0], e);
            const std::set<LabeledState>& second = observer.next(state.pair[1], e);
            if (first.empty() || second.empty()) continue;
            std::set<VerifierState> succ;
            for (const LabeledState& a : first)
                for (const LabeledState& b : second) succ.insert(VerifierState::canonical(a, b));
            std::vector<std::size_t> targets;
            for (const VerifierState& s : succ) {
                auto [it, inserted] = index.try_emplace(s, states.size());
                if (inserted) {
                    states.push_back(s);
                    queue.push_back(it->second);
                }
                targets.push_back(it->second);
            }
            std::sort(targets.begin(), targets.end());
            transitions[{cur, e}] = std::move(targets);
        }
    }
    return Verifier(std::move(states), std::move(transitions), observer.alphabet);
}

namespace {

struct LassoCandidate {
    std::vector<EventId> stem;
    std::vector<EventId> cycle;
    std::vector<std::size_t> stem_nodes;   // nodes before each stem event
    std::vector<std::size_t> cycle_nodes;  // nodes before each cycle event
    std::size_t entry = 0;
};

}  // namespace

std::optional<SafeLasso> find_safe_lasso(const Verifier& verifier) {
    const std::size_t n = verifier.states().size();
    std::vector<bool> safe(n, false);
    for (std::size_t i = 0; i < n; ++i)
        safe[i] = verifier.states()[i].classification() != StateClass::Secret;
    if (!safe[verifier.initial()]) return std::nullopt;

    // Adjacency of the non-Secret subgraph.
    std::vector<std::vector<int>> graph(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!safe[i]) continue;
        for (const EventId& e : verifier.enabled_events(i)) {
            for (std::size_t j : verifier.next(i, e)) {
                if (safe[j]) graph[i].push_back(static_cast<int>(j));
            }
        }
    }

    std::vector<int> component_of(n, -1);
    std::vector<bool> cyclic_component(n, false);
    {
        auto components = detail::strongly_connected_components(graph);
        for (std::size_t c = 0; c < components.size(); ++c) {
            bool cyc = detail::component_has_cycle(components[c], graph);
            for (int v : components[c]) {
                component_of[v] = static_cast<int>(c);
                cyclic_component[v] = cyc;
            }
        }
    }

    // Shortest (then lexicographically least) stems over the safe subgraph.
    struct Stem {
        bool reached = false;
        std::vector<EventId> events;
        std::vector<std::size_t> nodes;
    };
    std::vector<Stem> stems(n);
    stems[verifier.initial()].reached = true;
    std::deque<std::size_t> queue{verifier.initial()};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (const EventId& e : verifier.enabled_events(cur)) {
            for (std::size_t nxt : verifier.next(cur, e)) {
                if (!safe[nxt] || stems[nxt].reached) continue;
                stems[nxt].reached = true;
                stems[nxt].events = stems[cur].events;
                stems[nxt].events.push_back(e);
                stems[nxt].nodes = stems[cur].nodes;
                stems[nxt].nodes.push_back(cur);
                queue.push_back(nxt);
            }
        }
    }

    // Shortest/lex cycle from `entry` within its component.
    auto cycle_from = [&](std::size_t entry)
        -> std::pair<std::vector<EventId>, std::vector<std::size_t>> {
        int comp = component_of[entry];
        struct Path {
            std::vector<EventId> events;
            std::vector<std::size_t> nodes;
        };
        std::map<std::size_t, Path> best;
        std::deque<std::size_t> bfs;
        auto expand = [&](std::size_t from, const Path& path)
            -> std::optional<std::pair<std::vector<EventId>, std::vector<std::size_t>>> {
            for (const EventId& e : verifier.enabled_events(from)) {
                for (std::size_t nxt : verifier.next(from, e)) {
                    if (!safe[nxt] || component_of[nxt] != comp) continue;
                    Path extended = path;
                    extended.events.push_back(e);
                    extended.nodes.push_back(from);
                    if (nxt == entry) return std::make_pair(extended.events, extended.nodes);
                    if (best.count(nxt)) continue;
                    best[nxt] = std::move(extended);
                    bfs.push_back(nxt);
                }
            }
            return std::nullopt;
        };
        if (auto found = expand(entry, Path{})) return *found;
        while (!bfs.empty()) {
            std::size_t cur = bfs.front();
            bfs.pop_front();
            if (auto found = expand(cur, best[cur])) return *found;
        }
        return {};
    };

    std::optional<LassoCandidate> chosen;
    for (std::size_t i = 0; i < n; ++i) {
        if (!safe[i] || !stems[i].reached || !cyclic_component[i]) continue;
        auto [cycle_events, cycle_nodes] = cycle_from(i);
        LassoCandidate cand{stems[i].events, cycle_events, stems[i].nodes, cycle_nodes, i};
        auto key = [&](const LassoCandidate& c) {
            return std::make_tuple(c.stem.size(), c.stem, c.cycle.size(), c.cycle,
                                   verifier.states()[c.entry].id());
        };
        if (!chosen || key(cand) < key(*chosen)) chosen = std::move(cand);
    }
    if (!chosen) return std::nullopt;

    SafeLasso lasso;
    lasso.stem = chosen->stem;
    lasso.cycle = chosen->cycle;
    for (std::size_t node : chosen->stem_nodes)
        lasso.states.push_back(verifier.states()[node].id());
    for (std::size_t node : chosen->cycle_nodes)
        lasso.states.push_back(verifier.states()[node].id());
    lasso.states.push_back(verifier.states()[chosen->entry].id());
    return lasso;
}

UnconstrainedVerdict check_unconstrained(const System& system) {
    Verifier verifier = build_verifier(build_observer(system));
    UnconstrainedVerdict verdict;
    verdict.lasso = find_safe_lasso(verifier);
    verdict.enforceable = verdict.lasso.has_value();
    return verdict;
}

CyclePartition classify_cycles(const Verifier& verifier) {
    const std::size_t n = verifier.states().size();
    std::vector<std::vector<int>> graph(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const EventId& e : verifier.enabled_events(i)) {
            for (std::size_t j : verifier.next(i, e)) graph[i].push_back(static_cast<int>(j));
        }
    }

    CyclePartition partition;
    std::vector<CycleSummary> summaries;
    for (const std::vector<int>& component : detail::strongly_connected_components(graph)) {
        if (!detail::component_has_cycle(component, graph)) continue;
        CycleSummary summary;
        summary.cls = verifier.states()[static_cast<std::size_t>(component.front())]
                          .classification();
        for (int v : component)
            summary.states.push_back(verifier.states()[static_cast<std::size_t>(v)].id());
        std::sort(summary.states.begin(), summary.states.end());
        summaries.push_back(std::move(summary));
    }
    std::sort(summaries.begin(), summaries.end(),
              [](const CycleSummary& a, const CycleSummary& b) { return a.states < b.states; });
    for (CycleSummary& s : summaries) {
        switch (s.cls) {
            case StateClass::Normal: partition.normal.push_back(std::move(s)); break;
            case StateClass::Secret: partition.secret.push_back(std::move(s)); break;
            case StateClass::Uncertain: partition.uncertain.push_back(std::move(s)); break;
        }
    }
    return partition;
}

}  // namespace conceal
