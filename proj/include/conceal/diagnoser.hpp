#ifndef CONCEAL_DIAGNOSER_HPP
#define CONCEAL_DIAGNOSER_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conceal/system.hpp"

namespace conceal {

enum class StateClass { Normal, Secret, Uncertain };

std::string to_string(StateClass c);

// One deterministic estimator state: the set of labeled plant states
// compatible with the observation so far. Members are kept sorted so the
// rendered id is canonical.
struct DiagnoserState {
    std::vector<LabeledState> members;

    static DiagnoserState canonical(const std::set<LabeledState>& members);
    StateClass classification() const;
    std::string id() const;  // e.g. "{1N,2S}"

    auto operator<=>(const DiagnoserState&) const = default;
};

StateClass classify(const DiagnoserState& state);

// Deterministic automaton over observable events whose states are labeled
// state estimates. States are indexed in BFS discovery order (events
// explored in sorted order); index 0 is the initial state.
class Diagnoser {
  public:
    Diagnoser(std::vector<DiagnoserState> states,
              std::map<std::pair<std::size_t, EventId>, std::size_t> transitions,
              std::set<EventId> alphabet);

    const std::vector<DiagnoserState>& states() const { return states_; }
    std::size_t initial() const { return 0; }
    const std::set<EventId>& alphabet() const { return alphabet_; }
    const std::map<std::pair<std::size_t, EventId>, std::size_t>& transitions() const {
        return transitions_;
    }

    std::optional<std::size_t> next(std::size_t state, const EventId& e) const;
    // Sorted observable events defined at a state.
    std::vector<EventId> enabled_events(std::size_t state) const;
    // Runs the observation from the initial state; nullopt once undefined.
    std::optional<std::size_t> run(const std::vector<EventId>& observation) const;

  private:
    std::vector<DiagnoserState> states_;
    std::map<std::pair<std::size_t, EventId>, std::size_t> transitions_;
    std::set<EventId> alphabet_;
};

// Subset construction with label propagation; initial state is the labeled
// unobservable reach of the initial plant state. Throws InvalidSystemError
// when validation fails.
Diagnoser build_diagnoser(const System& system);

// A reachable cycle of Secret-classified estimator states: following `stem`
// from the initial state lands on the cycle, whose edges spell `cycle` and
// whose states (in traversal order, one per cycle edge) are `states`.
struct CycleWitness {
    std::vector<EventId> stem;
    std::vector<EventId> cycle;
    std::vector<std::string> states;
};

// One witness per strongly connected component of Secret states that can
// sustain an infinite walk. Ordered by (stem length, stem, entry id).
std::vector<CycleWitness> find_secret_cycles(const Diagnoser& diagnoser);

struct ConcealabilityVerdict {
    bool concealable = false;
    std::vector<CycleWitness> witnesses;  // empty iff concealable
};

// An event occurrence stays concealable iff the estimator admits no Secret
// cycle: otherwise some observation makes the secret certain forever.
ConcealabilityVerdict is_concealable(const System& system);

// Twin-plant diagnosability: diagnosable iff no reachable verifier cycle
// carries a mixed label pair, i.e. no Uncertain cycle exists.
bool is_diagnosable(const System& system);

}  // namespace conceal

#endif
