#include "conceal/defense.hpp"

#include <algorithm>
#include <deque>

#include "conceal/diagnoser.hpp"

namespace conceal {

DefenseSpec DefenseSpec::unconstrained(const EventPartition& events) {
    DefenseSpec spec;
    for (const EventId& t : events.observable) {
        spec.replacements[t] = events.observable;
        spec.insertions[t] = events.observable;
        spec.deletions.insert(t);
    }
    return spec;
}

DefenseSpec DefenseSpec::identity(const EventPartition& events) {
    DefenseSpec spec;
    for (const EventId& t : events.observable) spec.replacements[t] = {t};
    return spec;
}

void validate_defense_spec(const DefenseSpec& spec, const EventPartition& events) {
    auto check = [&events](const EventId& e, const char* role) {
        if (!events.is_observable(e))
            throw UnknownEventError(std::string(role) + " event '" + e + "' is not observable");
    };
    for (const auto& [t, replacements] : spec.replacements) {
        check(t, "replaced");
        for (const EventId& o : replacements) check(o, "replacement");
    }
    for (const auto& [t, insertions] : spec.insertions) {
        check(t, "instrumented");
        for (const EventId& e : insertions) check(e, "inserted");
    }
    for (const EventId& t : spec.deletions) check(t, "deleted");
}

std::string DefensiveAction::render() const {
    switch (kind) {
        case Kind::Replace: return observed + "/" + arg;
        case Kind::Delete: return observed + "/eps";
        case Kind::Insert: return observed + "/" + arg + observed;
    }
    return observed + "/?";
}

std::vector<EventId> DefensiveAction::projection() const {
    switch (kind) {
        case Kind::Replace: return {arg};
        case Kind::Delete: return {};
        case Kind::Insert: return {arg, observed};
    }
    return {};
}

std::vector<DefensiveAction> actions_for(const DefenseSpec& spec, const EventId& t) {
    std::vector<DefensiveAction> actions;
    if (auto it = spec.replacements.find(t); it != spec.replacements.end()) {
        for (const EventId& o : it->second)
            actions.push_back({t, DefensiveAction::Kind::Replace, o});
    }
    if (spec.deletions.count(t)) actions.push_back({t, DefensiveAction::Kind::Delete, {}});
    if (auto it = spec.insertions.find(t); it != spec.insertions.end()) {
        for (const EventId& e : it->second)
            actions.push_back({t, DefensiveAction::Kind::Insert, e});
    }
    std::sort(actions.begin(), actions.end(),
              [](const DefensiveAction& a, const DefensiveAction& b) {
                  return a.render() < b.render();
              });
    return actions;
}

std::vector<EventId> defensive_projection(const std::vector<DefensiveAction>& actions) {
    std::vector<EventId> out;
    for (const DefensiveAction& a : actions) {
        std::vector<EventId> part = a.projection();
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

DefensiveVerifier::DefensiveVerifier(
    std::vector<VerifierState> states,
    std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>> transitions)
    : states_(std::move(states)), transitions_(std::move(transitions)) {}

const std::vector<std::size_t>& DefensiveVerifier::next(std::size_t state,
                                                        const DefensiveAction& a) const {
    static const std::vector<std::size_t> none;
    auto it = transitions_.find({state, a});
    return it == transitions_.end() ? none : it->second;
}

namespace {

// All actions the defense spec offers, sorted by rendered string.
std::vector<DefensiveAction> all_actions(const DefenseSpec& spec) {
    std::set<EventId> observed;
    for (const auto& [t, v] : spec.replacements) observed.insert(t);
    for (const auto& [t, v] : spec.insertions) observed.insert(t);
    for (const EventId& t : spec.deletions) observed.insert(t);
    std::vector<DefensiveAction> actions;
    for (const EventId& t : observed) {
        std::vector<DefensiveAction> part = actions_for(spec, t);
        actions.insert(actions.end(), part.begin(), part.end());
    }
    std::sort(actions.begin(), actions.end(),
              [](const DefensiveAction& a, const DefensiveAction& b) {
                  return a.render() < b.render();
              });
    return actions;
}

// Verifier states the faked observation may move to under one action,
// restricted to non-Secret states. Deletion keeps the state; replacement
// follows the emitted event; insertion follows the inserted event and then
// the observed one (only the endpoint is filtered: Secret pairs absorb, so
// an all-Secret intermediate could never reach a non-Secret endpoint).
std::vector<std::size_t> fake_targets(const Verifier& verifier, const std::vector<bool>& safe,
                                      std::size_t state, const DefensiveAction& action) {
    std::set<std::size_t> out;
    switch (action.kind) {
        case DefensiveAction::Kind::Delete:
            out.insert(state);
            break;
        case DefensiveAction::Kind::Replace:
            for (std::size_t s : verifier.next(state, action.arg)) {
                if (safe[s]) out.insert(s);
            }
            break;
        case DefensiveAction::Kind::Insert:
            for (std::size_t mid : verifier.next(state, action.arg)) {
                for (std::size_t s : verifier.next(mid, action.observed)) {
                    if (safe[s]) out.insert(s);
                }
            }
            break;
    }
    return {out.begin(), out.end()};
}

}  // namespace

DefensiveVerifier build_defensive_verifier(const Verifier& verifier, const DefenseSpec& spec) {
    if (verifier.states()[verifier.initial()].classification() == StateClass::Secret)
        throw SecretInitialError("verifier initial state " +
                                 verifier.states()[verifier.initial()].id() +
                                 " is Secret-classified");

    std::vector<bool> safe(verifier.states().size());
    for (std::size_t i = 0; i < verifier.states().size(); ++i)
        safe[i] = verifier.states()[i].classification() != StateClass::Secret;

    std::vector<DefensiveAction> actions = all_actions(spec);

    // BFS over verifier indices; remap to dense defensive-verifier indices.
    std::vector<std::size_t> verifier_index{verifier.initial()};
    std::map<std::size_t, std::size_t> dense{{verifier.initial(), 0}};
    std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>> transitions;
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (const DefensiveAction& action : actions) {
            std::vector<std::size_t> targets =
                fake_targets(verifier, safe, verifier_index[cur], action);
            if (targets.empty()) continue;
            std::vector<std::size_t> mapped;
            for (std::size_t v : targets) {
                auto [it, inserted] = dense.try_emplace(v, verifier_index.size());
                if (inserted) {
                    verifier_index.push_back(v);
                    queue.push_back(it->second);
                }
                mapped.push_back(it->second);
            }
            std::sort(mapped.begin(), mapped.end());
            transitions[{cur, action}] = std::move(mapped);
        }
    }

    std::vector<VerifierState> states;
    states.reserve(verifier_index.size());
    for (std::size_t v : verifier_index) states.push_back(verifier.states()[v]);
    return DefensiveVerifier(std::move(states), std::move(transitions));
}

std::string EVerifierState::id() const {
    return "(" + system_part.id() + "," + defense_part.id() + ")";
}

EVerifier::EVerifier(
    std::vector<EVerifierState> states,
    std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>> transitions,
    std::map<std::size_t, std::vector<EventId>> infeasible_events)
    : states_(std::move(states)),
      transitions_(std::move(transitions)),
      infeasible_(std::move(infeasible_events)) {
    for (const auto& [key, dsts] : transitions_) {
        if (!dsts.empty()) responds_[key.first].insert(key.second.observed);
    }
}

const std::vector<std::size_t>& EVerifier::next(std::size_t state,
                                                const DefensiveAction& a) const {
    static const std::vector<std::size_t> none;
    auto it = transitions_.find({state, a});
    return it == transitions_.end() ? none : it->second;
}

const std::vector<EventId>& EVerifier::infeasible_events(std::size_t state) const {
    static const std::vector<EventId> none;
    auto it = infeasible_.find(state);
    return it == infeasible_.end() ? none : it->second;
}

bool EVerifier::responds_to(std::size_t state, const EventId& t) const {
    auto it = responds_.find(state);
    return it != responds_.end() && it->second.count(t) != 0;
}

EVerifier build_e_verifier(const Verifier& verifier, const DefensiveVerifier& dverifier,
                           const DefenseSpec& spec) {
    // Component indices per E-verifier state: (verifier idx, dverifier idx).
    std::vector<std::pair<std::size_t, std::size_t>> components{
        {verifier.initial(), dverifier.initial()}};
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> dense{
        {{verifier.initial(), dverifier.initial()}, 0}};
    std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>> transitions;
    std::map<std::size_t, std::vector<EventId>> infeasible;

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        auto [xv, xd] = components[cur];
        for (const EventId& t : verifier.enabled_events(xv)) {
            const std::vector<std::size_t>& real_targets = verifier.next(xv, t);
            bool any_feasible = false;
            for (const DefensiveAction& action : actions_for(spec, t)) {
                const std::vector<std::size_t>& fake = dverifier.next(xd, action);
                if (fake.empty()) continue;
                any_feasible = true;
                std::vector<std::size_t> mapped;
                for (std::size_t v : real_targets) {
                    for (std::size_t d : fake) {
                        auto [it, inserted] = dense.try_emplace({v, d}, components.size());
                        if (inserted) {
                            components.push_back({v, d});
                            queue.push_back(it->second);
                        }
                        mapped.push_back(it->second);
                    }
                }
                std::sort(mapped.begin(), mapped.end());
                mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
                transitions[{cur, action}] = std::move(mapped);
            }
            if (!any_feasible) infeasible[cur].push_back(t);
        }
    }

    std::vector<EVerifierState> states;
    states.reserve(components.size());
    for (auto [xv, xd] : components)
        states.push_back({verifier.states()[xv], dverifier.states()[xd]});
    return EVerifier(std::move(states), std::move(transitions), std::move(infeasible));
}

NecessaryVerdict check_necessary(const EVerifier& everifier, const Verifier& verifier) {
    // Co-relative sets, grouped by the verifier component.
    std::map<std::string, std::vector<std::size_t>> co_relative;
    for (std::size_t i = 0; i < everifier.states().size(); ++i)
        co_relative[everifier.states()[i].system_part.id()].push_back(i);

    for (std::size_t xv = 0; xv < verifier.states().size(); ++xv) {
        const std::string id = verifier.states()[xv].id();
        auto it = co_relative.find(id);
        for (const EventId& t : verifier.enabled_events(xv)) {
            bool legal = false;
            if (it != co_relative.end()) {
                for (std::size_t state : it->second) {
                    if (everifier.responds_to(state, t)) {
                        legal = true;
                        break;
                    }
                }
            }
            if (!legal) return {false, id, t};
        }
    }
    return {true, {}, {}};
}

EVerifier reduce_e_verifier(const EVerifier& everifier, const Verifier& verifier,
                            const DefenseSpec& spec) {
    const std::size_t n = everifier.states().size();

    // Enabled events of each state's verifier component.
    std::vector<std::vector<EventId>> enabled(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::optional<std::size_t> xv = verifier.index_of(everifier.states()[i].system_part);
        enabled[i] = verifier.enabled_events(*xv);
    }

    std::vector<bool> surviving(n, true);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!surviving[i]) continue;
            for (const EventId& t : enabled[i]) {
                bool answered = false;
                for (const DefensiveAction& action : actions_for(spec, t)) {
                    for (std::size_t succ : everifier.next(i, action)) {
                        if (surviving[succ]) {
                            answered = true;
                            break;
                        }
                    }
                    if (answered) break;
                }
                if (!answered) {
                    surviving[i] = false;
                    changed = true;
                    break;
                }
            }
        }
    }

    // Accessible surviving part, original state order preserved.
    std::vector<bool> kept(n, false);
    if (surviving[everifier.initial()]) {
        std::deque<std::size_t> queue{everifier.initial()};
        kept[everifier.initial()] = true;
        while (!queue.empty()) {
            std::size_t cur = queue.front();
            queue.pop_front();
            for (const auto& [key, dsts] : everifier.transitions()) {
                if (key.first != cur) continue;
                for (std::size_t d : dsts) {
                    if (surviving[d] && !kept[d]) {
                        kept[d] = true;
                        queue.push_back(d);
                    }
                }
            }
        }
    }

    std::vector<std::size_t> remap(n, 0);
    std::vector<EVerifierState> states;
    for (std::size_t i = 0; i < n; ++i) {
        if (kept[i]) {
            remap[i] = states.size();
            states.push_back(everifier.states()[i]);
        }
    }
    std::map<std::pair<std::size_t, DefensiveAction>, std::vector<std::size_t>> transitions;
    for (const auto& [key, dsts] : everifier.transitions()) {
        if (!kept[key.first]) continue;
        std::vector<std::size_t> mapped;
        for (std::size_t d : dsts) {
            if (kept[d]) mapped.push_back(remap[d]);
        }
        if (mapped.empty()) continue;
        std::sort(mapped.begin(), mapped.end());
        transitions[{remap[key.first], key.second}] = std::move(mapped);
    }
    return EVerifier(std::move(states), std::move(transitions), {});
}

namespace {

// Single-run successors of labeled state m on observable t, recovered from
// the twin structure: the diagonal state {m,m} steps to {u,u} exactly when
// a single run moves from m to u on t.
std::set<LabeledState> diagonal_successors(const Verifier& verifier, const LabeledState& m,
                                           const EventId& t) {
    std::set<LabeledState> out;
    std::optional<std::size_t> diag = verifier.index_of(VerifierState::canonical(m, m));
    if (!diag) return out;
    for (std::size_t succ : verifier.next(*diag, t)) {
        const VerifierState& pair = verifier.states()[succ];
        if (pair.pair[0] == pair.pair[1]) out.insert(pair.pair[0]);
    }
    return out;
}

}  // namespace

SufficientVerdict check_sufficient(const EVerifier& reduced, const Verifier& verifier) {
    std::set<std::string> covered;
    for (const EVerifierState& s : reduced.states()) covered.insert(s.system_part.id());

    SufficientVerdict verdict;
    std::set<std::string> missing;
    for (const VerifierState& s : verifier.states()) {
        if (covered.count(s.id()) == 0) missing.insert(s.id());
    }
    verdict.missing.assign(missing.begin(), missing.end());
    if (!verdict.missing.empty()) return verdict;

    // Coverage alone can pair system and defense components that never
    // co-occur on one observation, so it may accept hopeless instances.
    // Certify the verdict by replaying the defense session over every
    // reachable (state estimate, belief) configuration: the estimate drives
    // which events the system can produce next, the belief is the set of
    // joint states consistent with the chosen actions, and the session
    // answers with the first rendered action keeping the belief alive.
    std::map<EventId, std::vector<DefensiveAction>> menu;
    {
        std::set<DefensiveAction> actions;
        for (const auto& [key, dsts] : reduced.transitions()) actions.insert(key.second);
        for (const DefensiveAction& a : actions) menu[a.observed].push_back(a);
        for (auto& [t, offered] : menu) {
            std::sort(offered.begin(), offered.end(),
                      [](const DefensiveAction& x, const DefensiveAction& y) {
                          return x.render() < y.render();
                      });
        }
    }

    using Estimate = std::set<LabeledState>;
    using Belief = std::set<std::size_t>;
    const Estimate initial_estimate{verifier.states()[verifier.initial()].pair[0]};
    std::set<std::pair<Estimate, Belief>> visited;
    std::deque<std::pair<Estimate, Belief>> queue;
    visited.insert({initial_estimate, {reduced.initial()}});
    queue.push_back({initial_estimate, {reduced.initial()}});

    while (!queue.empty()) {
        auto [estimate, belief] = queue.front();
        queue.pop_front();
        for (const EventId& t : verifier.alphabet()) {
            Estimate next_estimate;
            for (const LabeledState& m : estimate) {
                std::set<LabeledState> step = diagonal_successors(verifier, m, t);
                next_estimate.insert(step.begin(), step.end());
            }
            if (next_estimate.empty()) continue;  // the system cannot produce t here

            Belief next_belief;
            for (const DefensiveAction& a : menu[t]) {
                Belief candidate;
                for (std::size_t b : belief) {
                    const std::vector<std::size_t>& succs = reduced.next(b, a);
                    candidate.insert(succs.begin(), succs.end());
                }
                if (!candidate.empty()) {
                    next_belief = std::move(candidate);
                    break;
                }
            }
            if (next_belief.empty()) {
                verdict.enforceable = false;
                return verdict;
            }
            std::pair<Estimate, Belief> next_config{std::move(next_estimate),
                                                    std::move(next_belief)};
            if (visited.insert(next_config).second) queue.push_back(std::move(next_config));
        }
    }

    verdict.enforceable = true;
    return verdict;
}

Strategy Strategy::unconstrained(SafeLasso lasso) {
    Strategy s;
    s.mode_ = Mode::Unconstrained;
    s.lasso_ = std::move(lasso);
    return s;
}

Strategy Strategy::constrained(EVerifier reduced, DefenseSpec spec) {
    Strategy s;
    s.mode_ = Mode::Constrained;
    s.reduced_ = std::make_shared<const EVerifier>(std::move(reduced));
    s.spec_ = std::move(spec);
    return s;
}

Strategy Strategy::identity() {
    return Strategy();
}

Strategy extract_strategy(const SafeLasso& lasso) {
    if (lasso.cycle.empty())
        throw NotEnforceableError("safe lasso has no cycle to repeat");
    return Strategy::unconstrained(lasso);
}

Strategy extract_strategy(const EVerifier& reduced, const Verifier& verifier,
                          const DefenseSpec& spec) {
    SufficientVerdict verdict = check_sufficient(reduced, verifier);
    if (!verdict.enforceable || reduced.empty()) {
        std::string what = "reduced structure does not witness enforceability";
        if (!verdict.missing.empty()) {
            what += "; missing:";
            for (const std::string& id : verdict.missing) what += " " + id;
        } else {
            what += "; the defense session can reach a dead end";
        }
        throw NotEnforceableError(what);
    }
    return Strategy::constrained(reduced, spec);
}

DefenseSession::DefenseSession(Strategy strategy) : strategy_(std::move(strategy)) {
    if (strategy_.mode() == Strategy::Mode::Constrained) {
        if (strategy_.reduced().empty())
            throw NotEnforceableError("constrained strategy over an empty reduced E-verifier");
        belief_.insert(strategy_.reduced().initial());
    }
}

std::vector<EventId> DefenseSession::step(const EventId& observed) {
    switch (strategy_.mode()) {
        case Strategy::Mode::Identity: {
            emitted_.push_back(observed);
            return {observed};
        }
        case Strategy::Mode::Unconstrained: {
            const SafeLasso& lasso = strategy_.lasso();
            auto safe_event = [&lasso](std::size_t i) -> const EventId& {
                if (i < lasso.stem.size()) return lasso.stem[i];
                return lasso.cycle[(i - lasso.stem.size()) % lasso.cycle.size()];
            };
            if (lasso.cycle.empty() && position_ >= lasso.stem.size())
                throw NoFeasibleActionError("lasso exhausted and has no cycle");
            // First event only: when the observation already matches the
            // safe continuation after the stem head, insert the stem head
            // before it instead of replacing, so the real event survives in
            // the emission and the cursor lands one step further.
            if (position_ == 0 && !lasso.stem.empty() && !lasso.cycle.empty() &&
                safe_event(1) == observed) {
                std::vector<EventId> delta{safe_event(0), observed};
                position_ = 2;
                emitted_.insert(emitted_.end(), delta.begin(), delta.end());
                return delta;
            }
            EventId emit = safe_event(position_);
            ++position_;
            emitted_.push_back(emit);
            return {emit};
        }
        case Strategy::Mode::Constrained: {
            const EVerifier& reduced = strategy_.reduced();
            for (const DefensiveAction& action : actions_for(strategy_.spec(), observed)) {
                std::set<std::size_t> next_belief;
                for (std::size_t b : belief_) {
                    for (std::size_t succ : reduced.next(b, action)) next_belief.insert(succ);
                }
                if (next_belief.empty()) continue;
                belief_ = std::move(next_belief);
                std::vector<EventId> delta = action.projection();
                emitted_.insert(emitted_.end(), delta.begin(), delta.end());
                return delta;
            }
            throw NoFeasibleActionError("no feasible defensive action for '" + observed + "'");
        }
    }
    return {};
}

DefenseSimReport simulate_defense(const System& system, const Strategy& strategy,
                                  const std::vector<EventId>& trace) {
    std::vector<EventId> observation = project(trace, system.events());

    // The trace must be executable in the plant.
    std::set<StateId> frontier{system.initial()};
    for (const EventId& e : trace) {
        std::set<StateId> next;
        for (const StateId& s : frontier) {
            for (const StateId& d : system.successors(s, e)) next.insert(d);
        }
        if (next.empty())
            throw std::invalid_argument("trace is not a string of the system language");
        frontier = std::move(next);
    }

    DefenseSession session(strategy);
    for (const EventId& t : observation) session.step(t);

    Diagnoser diagnoser = build_diagnoser(system);
    DefenseSimReport report;
    report.emitted = session.emitted();
    report.consistent = true;
    std::size_t cur = diagnoser.initial();
    report.eavesdropper_states.push_back(diagnoser.states()[cur].id());
    report.certain_secret =
        diagnoser.states()[cur].classification() == StateClass::Secret;
    for (const EventId& e : report.emitted) {
        std::optional<std::size_t> nxt = diagnoser.next(cur, e);
        if (!nxt) {
            report.consistent = false;
            break;
        }
        cur = *nxt;
        report.eavesdropper_states.push_back(diagnoser.states()[cur].id());
        if (diagnoser.states()[cur].classification() == StateClass::Secret)
            report.certain_secret = true;
    }
    return report;
}

}  // namespace conceal
