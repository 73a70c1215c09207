#ifndef CONCEAL_ORACLE_HPP
#define CONCEAL_ORACLE_HPP

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "conceal/defense.hpp"
#include "conceal/system.hpp"

namespace conceal {

// Brute-force reference analyses. Deliberately naive and kept free of the
// estimator/verifier constructions so disagreements point at real bugs.

// Labels of all strings grouped by projection: result[w] is the set of
// secret flags over strings of L(G) projecting to w, for every observation
// w with |w| <= horizon. Equivalent to grouping the full string enumeration;
// paths are deduplicated by (state, observation, flag) so the walk
// terminates. Throws HorizonError when horizon > 10.
std::map<std::vector<EventId>, std::set<Label>> brute_label_sets(const System& system,
                                                                 std::size_t horizon);

struct ConcealabilityAgreement {
    bool agree = false;
    bool revealing_found = false;
    // Shortlex-least observation whose label set is {Secret}, when found.
    std::vector<EventId> revealing;
    std::vector<std::string> mismatches;
};

// Compares the estimator classification against brute label sets on every
// observation up to the horizon, in both directions, and reports the
// shortest secret-revealing observation.
ConcealabilityAgreement brute_concealability(const System& system, std::size_t horizon);

enum class GameOutcome { Win, Lose, Unknown };

std::string to_string(GameOutcome outcome);

struct GameVerdict {
    GameOutcome outcome = GameOutcome::Unknown;
    // Adversary moves needed to force the loss; meaningful unless Win.
    std::size_t losing_rank = 0;
};

// Exact safety game: the plant picks the next real observable event, the
// defender answers with an action whose output keeps the eavesdropper
// estimate consistent. The defender has lost once that estimate is
// Secret-certain or no consistent action remains. Win/Lose come from the
// full backward-induction attractor; a Lose needing more than `horizon`
// adversary moves is reported Unknown, matching what a horizon-bounded
// search could conclude. Throws HorizonError when the system has more than
// 8 reachable states.
GameVerdict brute_defense_game(const System& system, const DefenseSpec& spec,
                               std::size_t horizon);

// Twin-run search on raw state pairs: diagnosable iff no reachable cycle
// pairs a secret-free run with a secret-bearing run over the same
// observation.
bool brute_diagnosable(const System& system);

}  // namespace conceal

#endif
