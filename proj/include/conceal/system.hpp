#ifndef CONCEAL_SYSTEM_HPP
#define CONCEAL_SYSTEM_HPP

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "conceal/errors.hpp"

namespace conceal {

using EventId = std::string;
using StateId = std::string;

enum class Label : unsigned char { Normal, Secret };

char label_char(Label l);

// A plant state tagged with whether a secret event occurred on the way.
struct LabeledState {
    StateId state;
    Label label = Label::Normal;

    auto operator<=>(const LabeledState&) const = default;
};

// Renders e.g. "3S" / "5N".
std::string to_string(const LabeledState& ls);

// Partition of the event set into observable and unobservable events, with
// the secret events singled out. Plain aggregate: ill-formed partitions are
// representable so that validate() can report them.
struct EventPartition {
    std::set<EventId> observable;
    std::set<EventId> unobservable;
    std::set<EventId> secret;

    bool is_observable(const EventId& e) const { return observable.count(e) != 0; }
    bool is_unobservable(const EventId& e) const { return unobservable.count(e) != 0; }
    bool is_secret(const EventId& e) const { return secret.count(e) != 0; }
    bool contains(const EventId& e) const { return is_observable(e) || is_unobservable(e); }
};

struct Transition {
    StateId src;
    EventId event;
    StateId dst;

    auto operator<=>(const Transition&) const = default;
};

// Nondeterministic finite automaton with a single initial state and a
// partially observed event set. Structural well-formedness (named states,
// partitioned events, legal event names) is enforced at construction;
// the model assumptions (liveness, acyclic unobservable subgraph, secrets
// unobservable) are checked by validate().
class System {
  public:
    System(std::set<StateId> states, StateId initial, EventPartition events,
           std::vector<Transition> transitions);

    const std::set<StateId>& states() const { return states_; }
    const StateId& initial() const { return initial_; }
    const EventPartition& events() const { return events_; }
    const std::vector<Transition>& transitions() const { return transitions_; }

    // Sorted, deduplicated successor states; empty when undefined.
    const std::vector<StateId>& successors(const StateId& src, const EventId& e) const;
    // Outgoing transition map of one state (may be empty).
    const std::map<EventId, std::vector<StateId>>& outgoing(const StateId& src) const;

  private:
    std::set<StateId> states_;
    StateId initial_;
    EventPartition events_;
    std::vector<Transition> transitions_;
    std::map<StateId, std::map<EventId, std::vector<StateId>>> adjacency_;
};

struct ValidationReport {
    bool live = false;
    bool unobservable_cycle_free = false;
    bool secrets_unobservable = false;
    std::vector<std::string> violations;  // human-readable, with witnesses
    std::vector<std::string> notes;       // informational, never fail the report

    bool passed() const { return live && unobservable_cycle_free && secrets_unobservable; }
};

// Checks the three model assumptions. Liveness is checked on reachable
// states only; unreachable states are listed in notes.
ValidationReport validate(const System& system);

// Natural projection: erases unobservable events. Throws UnknownEventError
// on events outside the partition.
std::vector<EventId> project(const std::vector<EventId>& sequence, const EventPartition& events);

// All labeled states reachable from `start` via unobservable strings
// (including start itself); the label switches to Secret when a secret event
// is crossed and never switches back. Throws UnobservableCycleError if the
// unobservable subgraph reachable from start contains a cycle.
std::set<LabeledState> labeled_unobservable_reach(const System& system, const LabeledState& start);

// Observable events enabled directly at some state of the set.
std::set<EventId> enabled_observable(const System& system, const std::set<StateId>& states);

struct FlaggedString {
    std::vector<EventId> events;
    bool contains_secret = false;

    auto operator<=>(const FlaggedString&) const = default;
};

// Every string of L(G) up to max_len, in shortlex order, flagged with
// whether it contains a secret event. Exponential; intended for oracles and
// tests on small instances.
std::vector<FlaggedString> enumerate_strings(const System& system, int max_len);

// States reachable from the initial state (any events).
std::set<StateId> reachable_states(const System& system);

// Convenience guard used by the analysis entry points: throws
// InvalidSystemError carrying the violation list if validation fails.
void require_valid(const System& system);

}  // namespace conceal

#endif
