#ifndef CONCEAL_VERIFIER_HPP
#define CONCEAL_VERIFIER_HPP

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conceal/diagnoser.hpp"
#include "conceal/system.hpp"

namespace conceal {

// Nondeterministic single-run estimator: states are labeled plant states,
// transitions follow strings made of leading unobservable events and one
// observable event. Only the accessible part is kept.
struct ObserverNfa {
    std::set<LabeledState> states;
    LabeledState initial;
    std::map<std::pair<LabeledState, EventId>, std::set<LabeledState>> transitions;
    std::set<EventId> alphabet;

    const std::set<LabeledState>& next(const LabeledState& s, const EventId& e) const;
};

// Initial state is (x0, N); secrets fired before the first observable event
// surface through the leading-unobservable transition strings. Throws
// InvalidSystemError when validation fails.
ObserverNfa build_observer(const System& system);

// Unordered pair of observer states, stored sorted so the id is canonical.
struct VerifierState {
    std::array<LabeledState, 2> pair;

    static VerifierState canonical(LabeledState a, LabeledState b);
    StateClass classification() const;
    std::string id() const;  // e.g. "{3S,5N}"

    auto operator<=>(const VerifierState&) const = default;
};

// Twin structure: synchronous product of the observer with itself, unordered
// pairs deduplicated. States are indexed in BFS discovery order; index 0 is
// the initial state {(x0,N),(x0,N)}.
class Verifier {
  public:
    Verifier(std::vector<VerifierState> states,
             std::map<std::pair<std::size_t, EventId>, std::vector<std::size_t>> transitions,
             std::set<EventId> alphabet);

    const std::vector<VerifierState>& states() const { return states_; }
    std::size_t initial() const { return 0; }
    const std::set<EventId>& alphabet() const { return alphabet_; }
    const std::map<std::pair<std::size_t, EventId>, std::vector<std::size_t>>& transitions()
        const {
        return transitions_;
    }

    // Sorted successor indices; empty when the event is undefined.
    const std::vector<std::size_t>& next(std::size_t state, const EventId& e) const;
    // Sorted observable events defined at a state.
    const std::vector<EventId>& enabled_events(std::size_t state) const;
    std::optional<std::size_t> index_of(const VerifierState& s) const;

  private:
    std::vector<VerifierState> states_;
    std::map<std::pair<std::size_t, EventId>, std::vector<std::size_t>> transitions_;
    std::set<EventId> alphabet_;
    std::vector<std::vector<EventId>> enabled_;
    std::map<VerifierState, std::size_t> index_;
};

Verifier build_verifier(const ObserverNfa& observer);

// An infinitely extendable safe observation: following `stem` from the
// initial state and then repeating `cycle` forever never meets a
// Secret-classified verifier state. `states` is the traversed run,
// stem states first, then the cycle back to its starting state.
struct SafeLasso {
    std::vector<EventId> stem;
    std::vector<EventId> cycle;
    std::vector<std::string> states;
};

// Deterministic search: shortest stem, then lexicographic events, then
// shortest/lex cycle, then canonical state id.
std::optional<SafeLasso> find_safe_lasso(const Verifier& verifier);

struct UnconstrainedVerdict {
    bool enforceable = false;
    std::optional<SafeLasso> lasso;
};

// With unrestricted replacements, concealment is enforceable iff some safe
// lasso exists: the defender replays it regardless of actual observations.
UnconstrainedVerdict check_unconstrained(const System& system);

// Strongly connected component of the verifier that can sustain a cycle.
// Label pairs are invariant around cycles, so each summary carries one
// classification.
struct CycleSummary {
    StateClass cls = StateClass::Normal;
    std::vector<std::string> states;  // sorted canonical ids
};

struct CyclePartition {
    std::vector<CycleSummary> normal;
    std::vector<CycleSummary> secret;
    std::vector<CycleSummary> uncertain;
};

CyclePartition classify_cycles(const Verifier& verifier);

}  // namespace conceal

#endif
