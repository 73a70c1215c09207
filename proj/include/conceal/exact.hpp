#ifndef CONCEAL_EXACT_HPP
#define CONCEAL_EXACT_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "conceal/defense.hpp"
#include "conceal/diagnoser.hpp"
#include "conceal/system.hpp"

namespace conceal {

// Deterministic estimator of the eavesdropper under defensive rewriting:
// states are the non-Secret estimator states, edges are defensive actions.
// Deletions keep the state, replacements follow the emitted event, and
// insertions follow the inserted event and then the observed one. Only the
// endpoint is filtered for secrecy: Secret estimates absorb, so a Secret
// intermediate can never lead back to a non-Secret endpoint.
class DefensiveDiagnoser {
  public:
    DefensiveDiagnoser(std::vector<DiagnoserState> states,
                       std::map<std::pair<std::size_t, DefensiveAction>, std::size_t> transitions);

    const std::vector<DiagnoserState>& states() const { return states_; }
    std::size_t initial() const { return 0; }
    const std::map<std::pair<std::size_t, DefensiveAction>, std::size_t>& transitions() const {
        return transitions_;
    }

    std::optional<std::size_t> next(std::size_t state, const DefensiveAction& a) const;

  private:
    std::vector<DiagnoserState> states_;
    std::map<std::pair<std::size_t, DefensiveAction>, std::size_t> transitions_;
};

// Throws SecretInitialError when the estimator starts Secret-classified:
// then the secret is certain before the defense ever acts.
DefensiveDiagnoser build_defensive_diagnoser(const Diagnoser& diagnoser, const DefenseSpec& spec);

// Pairs what actually happened (estimate of the real observation) with what
// the eavesdropper believes (estimate of the faked observation).
struct EDiagnoserState {
    DiagnoserState real;
    DiagnoserState fake;

    std::string id() const;  // e.g. "({1N,2S},{1N,2S})"

    auto operator<=>(const EDiagnoserState&) const = default;
};

// Accessible product of the estimator and the defensive estimator: at state
// (r, f), each observable event t defined at r may be answered by any action
// t/o the defensive estimator accepts at f. Deterministic per action.
class EDiagnoser {
  public:
    EDiagnoser(std::vector<EDiagnoserState> states, std::vector<std::size_t> real_index,
               std::map<std::pair<std::size_t, DefensiveAction>, std::size_t> transitions,
               std::map<std::size_t, std::vector<EventId>> infeasible_events);

    const std::vector<EDiagnoserState>& states() const { return states_; }
    bool empty() const { return states_.empty(); }
    std::size_t initial() const { return 0; }
    const std::map<std::pair<std::size_t, DefensiveAction>, std::size_t>& transitions() const {
        return transitions_;
    }

    std::optional<std::size_t> next(std::size_t state, const DefensiveAction& a) const;
    // Index of the state's real component in the underlying estimator.
    std::size_t real_index(std::size_t state) const { return real_index_[state]; }
    // Events defined at the real component that no offered action answers.
    const std::vector<EventId>& infeasible_events(std::size_t state) const;

  private:
    std::vector<EDiagnoserState> states_;
    std::vector<std::size_t> real_index_;
    std::map<std::pair<std::size_t, DefensiveAction>, std::size_t> transitions_;
    std::map<std::size_t, std::vector<EventId>> infeasible_;
};

EDiagnoser build_e_diagnoser(const Diagnoser& diagnoser, const DefensiveDiagnoser& ddiagnoser,
                             const DefenseSpec& spec);

// Greatest substructure in which every state answers every event its real
// component enables, re-restricted to the part accessible from the initial
// state. Empty when the initial state itself is pruned.
EDiagnoser reduce_e_diagnoser(const EDiagnoser& ediagnoser, const Diagnoser& diagnoser,
                              const DefenseSpec& spec);

// Exact decision: a defense within `spec` can keep the eavesdropper out of
// Secret-certain estimates forever iff the reduced product still contains
// its initial state.
bool is_c_enforceable_exact(const System& system, const DefenseSpec& spec);

}  // namespace conceal

#endif
