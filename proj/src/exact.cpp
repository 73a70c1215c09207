#include "conceal/exact.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace conceal {

DefensiveDiagnoser::DefensiveDiagnoser(
    std::vector<DiagnoserState> states,
    std::map<std::pair<std::size_t, DefensiveAction>, std::size_t> transitions)
    : states_(std::move(states)), transitions_(std::move(transitions)) {}

std::optional<std::size_t> DefensiveDiagnoser::next(std::size_t state,
                                                    const DefensiveAction& a) const {
    auto it = transitions_.find({state, a});
    if (it == transitions_.end()) return std::nullopt;
    return it->second;
}

namespace {

std::vector<DefensiveAction> all_spec_actions(const DefenseSpec& spec) {
    std::set<EventId> observed;
    for (const auto& [t, v] : spec.replacements) observed.insert(t);
    for (const auto& [t, v] : spec.insertions) observed.insert(t);
    for (const EventId& t : spec.deletions) observed.insert(t);
    std::vector<DefensiveAction> actions;
    for (const EventId& t : observed) {
        std::vector<DefensiveAction> part = actions_for(spec, t);
        actions.insert(actions.end(), part.begin(), part.end());
    }
    return actions;
}

std::optional<std::size_t> fake_target(const Diagnoser& diagnoser, const std::vector<bool>& safe,
                                       std::size_t state, const DefensiveAction& action) {
    switch (action.kind) {
        case DefensiveAction::Kind::Delete:
            return state;
        case DefensiveAction::Kind::Replace: {
            std::optional<std::size_t> dst = diagnoser.next(state, action.arg);
            if (dst && safe[*dst]) return dst;
            return std::nullopt;
        }
        case DefensiveAction::Kind::Insert: {
            std::optional<std::size_t> mid = diagnoser.next(state, action.arg);
            if (!mid) return std::nullopt;
            std::optional<std::size_t> dst = diagnoser.next(*mid, action.observed);
            if (dst && safe[*dst]) return dst;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace

DefensiveDiagnoser build_defensive_diagnoser(const Diagnoser& diagnoser,
                                             const DefenseSpec& spec) {
    if (diagnoser.states()[diagnoser.initial()].classification() == StateClass::Secret)
        throw SecretInitialError("estimator initial state " +
                                 diagnoser.states()[diagnoser.initial()].id() +
                                 " is Secret-classified");

    std::vector<bool> safe(diagnoser.states().size());
    for (std::size_t i = 0; i < diagnoser.states().size(); ++i)
        safe[i] = diagnoser.states()[i].classification() != StateClass::Secret;

    std::vector<DefensiveAction> actions = all_spec_actions(spec);

    std::vector<std::size_t> diagnoser_index{diagnoser.initial()};
    std::map<std::size_t, std::size_t> dense{{diagnoser.initial(), 0}};
    std::map<std::pair<std::size_t, DefensiveAction>, std::size_t> transitions;
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (const DefensiveAction& action : actions) {
            std::optional<std::size_t> target =
                fake_target(diagnoser, safe, diagnoser_index[cur], action);
            if (!target) continue;
            auto [it, inserted] = dense.try_emplace(*target, diagnoser_index.size());
            if (inserted) {
                diagnoser_index.push_back(*target);
                queue.push_back(it->second);
            }
            transitions[{cur, action}] = it->second;
        }
    }

    std::vector<DiagnoserState> states;
    states.reserve(diagnoser_index.size());
    for (std::size_t v : diagnoser_index) states.push_back(diagnoser.states()[v]);
    return DefensiveDiagnoser(std::move(states), std::move(transitions));
}

std::string EDiagnoserState::id() const {
    return "(" + real.id() + "," + fake.id() + ")";
}

EDiagnoser::EDiagnoser(std::vector<EDiagnoserState> states, std::vector<std::size_t> real_index,
                       std::map<std::pair<std::size_t, DefensiveAction>, std::size_t> transitions,
                       std::map<std::size_t, std::vector<EventId>> infeasible_events)
    : states_(std::move(states)),
      real_index_(std::move(real_index)),
      transitions_(std::move(transitions)),
      infeasible_(std::move(infeasible_events)) {}

std::optional<std::size_t> EDiagnoser::next(std::size_t state, const DefensiveAction& a) const {
    auto it = transitions_.find({state, a});
    if (it == transitions_.end()) return std::nullopt;
    return it->second;
}

const std::vector<EventId>& EDiagnoser::infeasible_events(std::size_t state) const {
    static const std::vector<EventId> none;
    auto it = infeasible_.find(state);
    return it == infeasible_.end() ? none : it->second;
}

EDiagnoser build_e_diagnoser(const Diagnoser& diagnoser, const DefensiveDiagnoser& ddiagnoser,
                             const DefenseSpec& spec) {
    std::vector<std::pair<std::size_t, std::size_t>> components{
        {diagnoser.initial(), ddiagnoser.initial()}};
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> dense{
        {{diagnoser.initial(), ddiagnoser.initial()}, 0}};
    std::map<std::pair<std::size_t, DefensiveAction>, std::size_t> transitions;
    std::map<std::size_t, std::vector<EventId>> infeasible;

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        auto [dr, df] = components[cur];
        for (const EventId& t : diagnoser.enabled_events(dr)) {
            std::size_t real_target = *diagnoser.next(dr, t);
            bool any_feasible = false;
            for (const DefensiveAction& action : actions_for(spec, t)) {
                std::optional<std::size_t> fake_target = ddiagnoser.next(df, action);
                if (!fake_target) continue;
                any_feasible = true;
                auto [it, inserted] =
                    dense.try_emplace({real_target, *fake_target}, components.size());
                if (inserted) {
                    components.push_back({real_target, *fake_target});
                    queue.push_back(it->second);
                }
                transitions[{cur, action}] = it->second;
            }
            if (!any_feasible) infeasible[cur].push_back(t);
        }
    }

    std::vector<EDiagnoserState> states;
    std::vector<std::size_t> real_index;
    states.reserve(components.size());
    real_index.reserve(components.size());
    for (auto [dr, df] : components) {
        states.push_back({diagnoser.states()[dr], ddiagnoser.states()[df]});
        real_index.push_back(dr);
    }
    return EDiagnoser(std::move(states), std::move(real_index), std::move(transitions),
                      std::move(infeasible));
}

EDiagnoser reduce_e_diagnoser(const EDiagnoser& ediagnoser, const Diagnoser& diagnoser,
                              const DefenseSpec& spec) {
    const std::size_t n = ediagnoser.states().size();

    std::vector<std::vector<EventId>> enabled(n);
    for (std::size_t i = 0; i < n; ++i)
        enabled[i] = diagnoser.enabled_events(ediagnoser.real_index(i));

    std::vector<bool> surviving(n, true);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!surviving[i]) continue;
            for (const EventId& t : enabled[i]) {
                bool answered = false;
                for (const DefensiveAction& action : actions_for(spec, t)) {
                    std::optional<std::size_t> succ = ediagnoser.next(i, action);
                    if (succ && surviving[*succ]) {
                        answered = true;
                        break;
                    }
                }
                if (!answered) {
                    surviving[i] = false;
                    changed = true;
                    break;
                }
            }
        }
    }

    std::vector<bool> kept(n, false);
    if (n > 0 && surviving[ediagnoser.initial()]) {
        std::deque<std::size_t> queue{ediagnoser.initial()};
        kept[ediagnoser.initial()] = true;
        while (!queue.empty()) {
            std::size_t cur = queue.front();
            queue.pop_front();
            for (const auto& [key, dst] : ediagnoser.transitions()) {
                if (key.first != cur) continue;
                if (surviving[dst] && !kept[dst]) {
                    kept[dst] = true;
                    queue.push_back(dst);
                }
            }
        }
    }

    std::vector<std::size_t> remap(n, 0);
    std::vector<EDiagnoserState> states;
    std::vector<std::size_t> real_index;
    for (std::size_t i = 0; i < n; ++i) {
        if (kept[i]) {
            remap[i] = states.size();
            states.push_back(ediagnoser.states()[i]);
            real_index.push_back(ediagnoser.real_index(i));
        }
    }
    std::map<std::pair<std::size_t, DefensiveAction>, std::size_t> transitions;
    for (const auto& [key, dst] : ediagnoser.transitions()) {
        if (kept[key.first] && kept[dst]) transitions[{remap[key.first], key.second}] = remap[dst];
    }
    return EDiagnoser(std::move(states), std::move(real_index), std::move(transitions), {});
}

bool is_c_enforceable_exact(const System& system, const DefenseSpec& spec) {
    Diagnoser diagnoser = build_diagnoser(system);
    if (diagnoser.states()[diagnoser.initial()].classification() == StateClass::Secret)
        return false;
    DefensiveDiagnoser ddiagnoser = build_defensive_diagnoser(diagnoser, spec);
    EDiagnoser product = build_e_diagnoser(diagnoser, ddiagnoser, spec);
    EDiagnoser reduced = reduce_e_diagnoser(product, diagnoser, spec);
    return !reduced.empty();
}

}  // namespace conceal
