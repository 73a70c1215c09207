#ifndef CONCEAL_DEFENSE_HPP
#define CONCEAL_DEFENSE_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conceal/system.hpp"
#include "conceal/verifier.hpp"

namespace conceal {

// What the defender may do to each observable event before it reaches the
// eavesdropper. Identity pass-through must be listed explicitly in
// replacements; deletions lists the events that may be erased.
struct DefenseSpec {
    std::map<EventId, std::set<EventId>> replacements;  // t -> replacement events
    std::map<EventId, std::set<EventId>> insertions;    // t -> events inserted before t
    std::set<EventId> deletions;                        // t that may be erased

    // Every replacement, insertion and deletion allowed.
    static DefenseSpec unconstrained(const EventPartition& events);
    // Pass-through only.
    static DefenseSpec identity(const EventPartition& events);
};

// Throws UnknownEventError when the defense mentions events outside E_o.
void validate_defense_spec(const DefenseSpec& spec, const EventPartition& events);

// One manipulation of one observed event. Rendered "t/o" (replacement),
// "t/eps" (deletion) or "t/et" (insertion of e before t).
struct DefensiveAction {
    enum class Kind { Replace, Delete, Insert };

    EventId observed;
    Kind kind = Kind::Replace;
    EventId arg;  // replacement event / inserted event; empty for Delete

    std::string render() const;
    // What the eavesdropper receives.
    std::vector<EventId> projection() const;

    auto operator<=>(const DefensiveAction&) const = default;
};

// Actions available for observed event t, sorted by rendered string.
std::vector<DefensiveAction> actions_for(const DefenseSpec& spec, const EventId& t);

// Concatenated projections of an action sequence.
std::vector<EventId> defensive_projection(const std::vector<DefensiveAction>& actions);

// Tracks where the eavesdropper's twin estimate can be steered while the
// defender rewrites events: non-Secret verifier states, transitions labeled
// by defensive actions, accessible part only.
class DefensiveVerifier {
  public:
    DefensiveVerifier(std::vector<VerifierState> states,
                      std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>>
                          transitions);

    const std::vector<VerifierState>& states() const { return states_; }
    std::size_t initial() const { return 0; }
    const std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>>&
    transitions() const {
        return transitions_;
    }
    // Sorted successor indices; empty when the action is infeasible.
    const std::vector<std::size_t>& next(std::size_t state, const DefensiveAction& a) const;

  private:
    std::vector<VerifierState> states_;
    std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>> transitions_;
};

// Throws SecretInitialError if the verifier's initial state is already
// Secret-classified.
DefensiveVerifier build_defensive_verifier(const Verifier& verifier, const DefenseSpec& spec);

struct EVerifierState {
    VerifierState system_part;
    VerifierState defense_part;

    std::string id() const;  // e.g. "({4S,4S},{3S,5N})"

    auto operator<=>(const EVerifierState&) const = default;
};

// Joint tracking of the real observation (verifier component) against the
// faked observation (defensive verifier component). Accessible part from
// the paired initial states; BFS discovery order.
class EVerifier {
  public:
    EVerifier(std::vector<EVerifierState> states,
              std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>>
                  transitions,
              std::map<std::size_t, std::vector<EventId>> infeasible_events);

    const std::vector<EVerifierState>& states() const { return states_; }
    bool empty() const { return states_.empty(); }
    std::size_t initial() const { return 0; }
    const std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>>&
    transitions() const {
        return transitions_;
    }
    const std::vector<std::size_t>& next(std::size_t state, const DefensiveAction& a) const;
    // Events of E_o(system_part) with no feasible defensive action at this
    // state, sorted.
    const std::vector<EventId>& infeasible_events(std::size_t state) const;
    // True when some action for t leads somewhere from this state.
    bool responds_to(std::size_t state, const EventId& t) const;

  private:
    std::vector<EVerifierState> states_;
    std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>> transitions_;
    std::map<std::size_t, std::vector<EventId>> infeasible_;
    std::map<std::size_t, std::set<EventId>> responds_;
};

EVerifier build_e_verifier(const Verifier& verifier, const DefensiveVerifier& dverifier,
                           const DefenseSpec& spec);

struct NecessaryVerdict {
    bool maybe_enforceable = false;
    // First verifier state whose co-relative set answers no action for
    // `witness_event`; meaningful only when not maybe_enforceable.
    std::string witness_state;
    EventId witness_event;
};

// Necessary condition: every accessible verifier state needs, for each of
// its events, at least one co-relative E-verifier state with a feasible
// action. Verifier states are scanned in BFS discovery order, events in
// sorted order; the first failure is reported.
NecessaryVerdict check_necessary(const EVerifier& everifier, const Verifier& verifier);

// Iterated elimination of states that cannot answer some event of their
// verifier component, then the accessible part of what survives (empty when
// the initial state was eliminated).
EVerifier reduce_e_verifier(const EVerifier& everifier, const Verifier& verifier,
                            const DefenseSpec& spec);

struct SufficientVerdict {
    bool enforceable = false;
    // Accessible verifier states missing from the reduced E-verifier's
    // system components, sorted by id. Non-empty missing forces a negative
    // verdict; missing can be empty while the verdict is still negative when
    // the session replay below fails.
    std::vector<std::string> missing;
};

// Sufficient condition, in two stages. First, every accessible verifier
// state must survive as the system component of some reduced E-verifier
// state (gaps are reported in missing). Coverage compares states in
// isolation and can pair components that no single observation produces
// together, so a second stage certifies the positive verdict by replaying
// the constrained defense session over every reachable (state estimate,
// belief) configuration and checking that some feasible action always
// exists. A positive verdict therefore guarantees enforceability; a
// negative one is inconclusive.
SufficientVerdict check_sufficient(const EVerifier& reduced, const Verifier& verifier);

// A causal defense policy. Unconstrained mode replays a safe lasso by
// replacement; constrained mode walks a belief over reduced E-verifier
// states, always choosing the lexicographically least rendered action with a
// non-empty successor belief; identity mode passes events through.
class Strategy {
  public:
    enum class Mode { Unconstrained, Constrained, Identity };

    static Strategy unconstrained(SafeLasso lasso);
    // Caller guarantees the reduced E-verifier is non-empty; extract_strategy
    // is the checked path.
    static Strategy constrained(EVerifier reduced, DefenseSpec spec);
    static Strategy identity();

    Mode mode() const { return mode_; }
    const SafeLasso& lasso() const { return lasso_; }
    const EVerifier& reduced() const { return *reduced_; }
    const DefenseSpec& spec() const { return spec_; }

  private:
    Strategy() = default;

    Mode mode_ = Mode::Identity;
    SafeLasso lasso_;
    std::shared_ptr<const EVerifier> reduced_;
    DefenseSpec spec_;
};

// Checked constructors: the unconstrained form requires a lasso with a
// non-empty cycle; the constrained form requires the reduced E-verifier to
// pass check_sufficient with its initial state surviving. Both throw
// NotEnforceableError otherwise.
Strategy extract_strategy(const SafeLasso& lasso);
Strategy extract_strategy(const EVerifier& reduced, const Verifier& verifier,
                          const DefenseSpec& spec);

// Stepwise execution of a strategy against observed events.
class DefenseSession {
  public:
    explicit DefenseSession(Strategy strategy);

    // Feeds one observed event; returns the newly emitted events and
    // appends them to emitted(). Throws NoFeasibleActionError when a
    // constrained strategy has no action keeping the belief alive.
    std::vector<EventId> step(const EventId& observed);

    const std::vector<EventId>& emitted() const { return emitted_; }
    const Strategy& strategy() const { return strategy_; }
    // Current belief (constrained mode): indices into reduced().states().
    const std::set<std::size_t>& belief() const { return belief_; }

  private:
    Strategy strategy_;
    std::vector<EventId> emitted_;
    std::size_t position_ = 0;        // unconstrained replay cursor
    std::set<std::size_t> belief_;    // constrained mode
};

struct DefenseSimReport {
    std::vector<EventId> emitted;
    std::vector<std::string> eavesdropper_states;  // diagnoser ids, initial first
    bool certain_secret = false;  // some visited estimate classifies Secret
    bool consistent = false;      // every emitted prefix stays in P(L(G))
};

// Projects the trace, feeds it through the strategy, then replays the
// emission through the system's diagnoser as the eavesdropper would.
// The trace must be a string of L(G).
DefenseSimReport simulate_defense(const System& system, const Strategy& strategy,
                                  const std::vector<EventId>& trace);

}  // namespace conceal

#endif
