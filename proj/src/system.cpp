#include "conceal/system.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

namespace conceal {

char label_char(Label l) {
    return l == Label::Secret ? 'S' : 'N';
}

std::string to_string(const LabeledState& ls) {
    return ls.state + label_char(ls.label);
}

namespace {

bool legal_event_name(const EventId& e) {
    // "eps" is reserved: it renders the deletion action "t/eps".
    if (e.empty() || e == "eps") return false;
    for (unsigned char c : e) {
        if (c == '/' || std::isspace(c) || !std::isprint(c)) return false;
    }
    return true;
}

}  // namespace

System::System(std::set<StateId> states, StateId initial, EventPartition events,
               std::vector<Transition> transitions)
    : states_(std::move(states)),
      initial_(std::move(initial)),
      events_(std::move(events)),
      transitions_(std::move(transitions)) {
    if (states_.empty()) throw std::invalid_argument("system has no states");
    for (const StateId& s : states_) {
        if (s.empty()) throw std::invalid_argument("empty state name");
    }
    if (states_.count(initial_) == 0)
        throw std::invalid_argument("initial state '" + initial_ + "' is not a state");
    for (const EventId& e : events_.observable) {
        if (!legal_event_name(e)) throw std::invalid_argument("illegal event name '" + e + "'");
        if (events_.unobservable.count(e) != 0)
            throw std::invalid_argument("event '" + e + "' is both observable and unobservable");
    }
    for (const EventId& e : events_.unobservable) {
        if (!legal_event_name(e)) throw std::invalid_argument("illegal event name '" + e + "'");
    }
    for (const EventId& e : events_.secret) {
        if (!events_.contains(e))
            throw std::invalid_argument("secret event '" + e + "' is not in the event set");
    }
    for (const Transition& t : transitions_) {
        if (states_.count(t.src) == 0)
            throw std::invalid_argument("transition source '" + t.src + "' is not a state");
        if (states_.count(t.dst) == 0)
            throw std::invalid_argument("transition target '" + t.dst + "' is not a state");
        if (!events_.contains(t.event))
            throw std::invalid_argument("transition event '" + t.event + "' is not in the event set");
    }
    std::sort(transitions_.begin(), transitions_.end());
    transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());
    for (const Transition& t : transitions_) {
        std::vector<StateId>& dsts = adjacency_[t.src][t.event];
        if (dsts.empty() || dsts.back() != t.dst) dsts.push_back(t.dst);
    }
}

const std::vector<StateId>& System::successors(const StateId& src, const EventId& e) const {
    static const std::vector<StateId> none;
    auto it = adjacency_.find(src);
    if (it == adjacency_.end()) return none;
    auto jt = it->second.find(e);
    return jt == it->second.end() ? none : jt->second;
}

const std::map<EventId, std::vector<StateId>>& System::outgoing(const StateId& src) const {
    static const std::map<EventId, std::vector<StateId>> none;
    auto it = adjacency_.find(src);
    return it == adjacency_.end() ? none : it->second;
}

std::set<StateId> reachable_states(const System& system) {
    std::set<StateId> seen{system.initial()};
    std::deque<StateId> queue{system.initial()};
    while (!queue.empty()) {
        StateId cur = queue.front();
        queue.pop_front();
        for (const auto& [event, dsts] : system.outgoing(cur)) {
            for (const StateId& d : dsts) {
                if (seen.insert(d).second) queue.push_back(d);
            }
        }
    }
    return seen;
}

namespace {

// Finds a cycle in the unobservable subgraph restricted to `domain` (all
// states when domain is empty). Returns the cycle's states in walk order,
// rotated to start at the smallest id; empty when acyclic.
std::vector<StateId> find_unobservable_cycle(const System& system, const std::set<StateId>* domain) {
    enum class Color { White, Gray, Black };
    std::map<StateId, Color> color;
    std::vector<StateId> stack;

    std::vector<StateId> roots;
    if (domain) {
        roots.assign(domain->begin(), domain->end());
    } else {
        roots.assign(system.states().begin(), system.states().end());
    }

    std::vector<StateId> cycle;
    // Iterative DFS with an explicit path stack.
    struct Frame {
        StateId state;
        std::vector<StateId> nexts;
        std::size_t pos = 0;
    };
    for (const StateId& root : roots) {
        if (color[root] != Color::White) continue;
        std::vector<Frame> frames;
        auto unobs_nexts = [&](const StateId& s) {
            std::vector<StateId> out;
            for (const auto& [event, dsts] : system.outgoing(s)) {
                if (!system.events().is_unobservable(event)) continue;
                for (const StateId& d : dsts) {
                    if (!domain || domain->count(d)) out.push_back(d);
                }
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        };
        frames.push_back({root, unobs_nexts(root)});
        color[root] = Color::Gray;
        stack.push_back(root);
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.pos < f.nexts.size()) {
                StateId next = f.nexts[f.pos++];
                if (color[next] == Color::Gray) {
                    // Found a back edge: extract the walk from `next` to top.
                    auto it = std::find(stack.begin(), stack.end(), next);
                    cycle.assign(it, stack.end());
                    auto smallest = std::min_element(cycle.begin(), cycle.end());
                    std::rotate(cycle.begin(), smallest, cycle.end());
                    return cycle;
                }
                if (color[next] == Color::White) {
                    color[next] = Color::Gray;
                    stack.push_back(next);
                    frames.push_back({next, unobs_nexts(next)});
                }
            } else {
                color[f.state] = Color::Black;
                stack.pop_back();
                frames.pop_back();
            }
        }
    }
    return {};
}

std::string join_states(const std::vector<StateId>& states) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (i) out << ',';
        out << states[i];
    }
    out << ']';
    return out.str();
}

}  // namespace

ValidationReport validate(const System& system) {
    ValidationReport report;
    std::set<StateId> reachable = reachable_states(system);

    report.live = true;
    for (const StateId& s : reachable) {
        if (system.outgoing(s).empty()) {
            report.live = false;
            report.violations.push_back("deadlock: state '" + s + "' has no outgoing transition");
        }
    }

    std::vector<StateId> cycle = find_unobservable_cycle(system, nullptr);
    report.unobservable_cycle_free = cycle.empty();
    if (!cycle.empty())
        report.violations.push_back("unobservable cycle: " + join_states(cycle));

    report.secrets_unobservable = true;
    for (const EventId& e : system.events().secret) {
        if (!system.events().is_unobservable(e)) {
            report.secrets_unobservable = false;
            report.violations.push_back("secret event '" + e + "' is observable");
        }
    }

    std::vector<StateId> unreachable;
    for (const StateId& s : system.states()) {
        if (reachable.count(s) == 0) unreachable.push_back(s);
    }
    if (!unreachable.empty())
        report.notes.push_back("unreachable states ignored by liveness check: " +
                               join_states(unreachable));
    return report;
}

void require_valid(const System& system) {
    ValidationReport report = validate(system);
    if (report.passed()) return;
    std::string what = "system fails validation:";
    for (const std::string& v : report.violations) what += " " + v + ";";
    throw InvalidSystemError(what);
}

std::vector<EventId> project(const std::vector<EventId>& sequence, const EventPartition& events) {
    std::vector<EventId> out;
    for (const EventId& e : sequence) {
        if (!events.contains(e)) throw UnknownEventError("unknown event '" + e + "'");
        if (events.is_observable(e)) out.push_back(e);
    }
    return out;
}

std::set<LabeledState> labeled_unobservable_reach(const System& system, const LabeledState& start) {
    if (system.states().count(start.state) == 0)
        throw std::invalid_argument("unknown state '" + start.state + "'");

    // Guard: reject if the unobservable subgraph reachable from start is
    // cyclic (the closure itself would still terminate, but the modeling
    // assumption is broken and callers rely on it).
    std::set<StateId> domain;
    {
        std::deque<StateId> queue{start.state};
        domain.insert(start.state);
        while (!queue.empty()) {
            StateId cur = queue.front();
            queue.pop_front();
            for (const auto& [event, dsts] : system.outgoing(cur)) {
                if (!system.events().is_unobservable(event)) continue;
                for (const StateId& d : dsts) {
                    if (domain.insert(d).second) queue.push_back(d);
                }
            }
        }
        std::vector<StateId> cycle = find_unobservable_cycle(system, &domain);
        if (!cycle.empty())
            throw UnobservableCycleError("unobservable cycle: " + join_states(cycle));
    }

    std::set<LabeledState> reach{start};
    std::deque<LabeledState> queue{start};
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
                if (reach.insert(next).second) queue.push_back(next);
            }
        }
    }
    return reach;
}

std::set<EventId> enabled_observable(const System& system, const std::set<StateId>& states) {
    std::set<EventId> out;
    for (const StateId& s : states) {
        for (const auto& [event, dsts] : system.outgoing(s)) {
            if (system.events().is_observable(event) && !dsts.empty()) out.insert(event);
        }
    }
    return out;
}

std::vector<FlaggedString> enumerate_strings(const System& system, int max_len) {
    if (max_len < 0) throw std::invalid_argument("max_len must be non-negative");

    std::vector<EventId> alphabet;
    for (const EventId& e : system.events().observable) alphabet.push_back(e);
    for (const EventId& e : system.events().unobservable) alphabet.push_back(e);
    std::sort(alphabet.begin(), alphabet.end());

    struct Node {
        std::vector<EventId> events;
        bool contains_secret;
        std::set<StateId> frontier;
    };
    std::vector<FlaggedString> out;
    std::deque<Node> queue;
    queue.push_back({{}, false, {system.initial()}});
    while (!queue.empty()) {
        Node cur = std::move(queue.front());
        queue.pop_front();
        out.push_back({cur.events, cur.contains_secret});
        if (static_cast<int>(cur.events.size()) == max_len) continue;
        for (const EventId& e : alphabet) {
            std::set<StateId> next;
            for (const StateId& s : cur.frontier) {
                for (const StateId& d : system.successors(s, e)) next.insert(d);
            }
            if (next.empty()) continue;
            Node child{cur.events, cur.contains_secret || system.events().is_secret(e),
                       std::move(next)};
            child.events.push_back(e);
            queue.push_back(std::move(child));
        }
    }
    return out;
}

}  // namespace conceal
