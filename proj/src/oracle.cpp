#include "conceal/oracle.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <tuple>

#include "conceal/diagnoser.hpp"

namespace conceal {

std::map<std::vector<EventId>, std::set<Label>> brute_label_sets(const System& system,
                                                                 std::size_t horizon) {
    if (horizon > 10)
        throw HorizonError("label-set enumeration is limited to horizon 10, got " +
                           std::to_string(horizon));

    using Config = std::tuple<StateId, std::vector<EventId>, bool>;
    std::map<std::vector<EventId>, std::set<Label>> result;
    std::set<Config> seen{{system.initial(), {}, false}};
    std::deque<Config> queue(seen.begin(), seen.end());
    while (!queue.empty()) {
        auto [state, obs, flag] = queue.front();
        queue.pop_front();
        result[obs].insert(flag ? Label::Secret : Label::Normal);
        for (const auto& [e, dsts] : system.outgoing(state)) {
            bool observable = system.events().is_observable(e);
            if (observable && obs.size() >= horizon) continue;
            std::vector<EventId> next_obs = obs;
            if (observable) next_obs.push_back(e);
            bool next_flag = flag || system.events().is_secret(e);
            for (const StateId& dst : dsts) {
                Config next{dst, next_obs, next_flag};
                if (seen.insert(next).second) queue.push_back(next);
            }
        }
    }
    return result;
}

namespace {

std::string join_events(const std::vector<EventId>& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        out += w[i];
    }
    return out;
}

std::string label_set_name(const std::set<Label>& labels) {
    bool n = labels.count(Label::Normal) != 0;
    bool s = labels.count(Label::Secret) != 0;
    if (n && s) return "uncertain";
    if (s) return "secret";
    return "normal";
}

bool shortlex_less(const std::vector<EventId>& a, const std::vector<EventId>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

}  // namespace

ConcealabilityAgreement brute_concealability(const System& system, std::size_t horizon) {
    std::map<std::vector<EventId>, std::set<Label>> sets = brute_label_sets(system, horizon);
    Diagnoser diagnoser = build_diagnoser(system);

    ConcealabilityAgreement report;
    for (const auto& [w, labels] : sets) {
        const std::string brute = label_set_name(labels);
        std::optional<std::size_t> state = diagnoser.run(w);
        if (!state) {
            report.mismatches.push_back("observation '" + join_events(w) +
                                        "': estimator rejects, brute " + brute);
        } else {
            const std::string est = to_string(classify(diagnoser.states()[*state]));
            if (est != brute)
                report.mismatches.push_back("observation '" + join_events(w) + "': estimator " +
                                            est + ", brute " + brute);
        }
        if (brute == "secret" &&
            (!report.revealing_found || shortlex_less(w, report.revealing))) {
            report.revealing_found = true;
            report.revealing = w;
        }
    }

    // Opposite direction: every estimator observation must show up brute-side.
    std::set<std::pair<std::size_t, std::vector<EventId>>> seen{{diagnoser.initial(), {}}};
    std::deque<std::pair<std::size_t, std::vector<EventId>>> queue(seen.begin(), seen.end());
    while (!queue.empty()) {
        auto [state, obs] = queue.front();
        queue.pop_front();
        if (sets.count(obs) == 0)
            report.mismatches.push_back("observation '" + join_events(obs) +
                                        "': estimator defined, brute missing");
        if (obs.size() >= horizon) continue;
        for (const EventId& e : diagnoser.enabled_events(state)) {
            std::vector<EventId> next_obs = obs;
            next_obs.push_back(e);
            std::pair<std::size_t, std::vector<EventId>> next{*diagnoser.next(state, e),
                                                              std::move(next_obs)};
            if (seen.insert(next).second) queue.push_back(next);
        }
    }

    report.agree = report.mismatches.empty();
    return report;
}

std::string to_string(GameOutcome outcome) {
    switch (outcome) {
        case GameOutcome::Win: return "win";
        case GameOutcome::Lose: return "lose";
        case GameOutcome::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

// One game position: the closed set of plant states consistent with the real
// observation, and the closed labeled set consistent with the faked one.
struct GameConfig {
    std::vector<StateId> real;
    std::vector<LabeledState> fake;

    auto operator<=>(const GameConfig&) const = default;
};

std::vector<StateId> close_real(const System& system, std::set<StateId> frontier) {
    std::deque<StateId> queue(frontier.begin(), frontier.end());
    while (!queue.empty()) {
        StateId cur = queue.front();
        queue.pop_front();
        for (const auto& [e, dsts] : system.outgoing(cur)) {
            if (!system.events().is_unobservable(e)) continue;
            for (const StateId& dst : dsts) {
                if (frontier.insert(dst).second) queue.push_back(dst);
            }
        }
    }
    return {frontier.begin(), frontier.end()};
}

std::vector<LabeledState> close_fake(const System& system, std::set<LabeledState> frontier) {
    std::deque<LabeledState> queue(frontier.begin(), frontier.end());
    while (!queue.empty()) {
        LabeledState cur = queue.front();
        queue.pop_front();
        for (const auto& [e, dsts] : system.outgoing(cur.state)) {
            if (!system.events().is_unobservable(e)) continue;
            Label label = (cur.label == Label::Secret || system.events().is_secret(e))
                              ? Label::Secret
                              : Label::Normal;
            for (const StateId& dst : dsts) {
                LabeledState next{dst, label};
                if (frontier.insert(next).second) queue.push_back(next);
            }
        }
    }
    return {frontier.begin(), frontier.end()};
}

std::vector<StateId> step_real(const System& system, const std::vector<StateId>& real,
                               const EventId& t) {
    std::set<StateId> landed;
    for (const StateId& x : real) {
        for (const StateId& y : system.successors(x, t)) landed.insert(y);
    }
    return close_real(system, std::move(landed));
}

std::vector<LabeledState> step_fake(const System& system, const std::vector<LabeledState>& fake,
                                    const EventId& e) {
    std::set<LabeledState> landed;
    for (const LabeledState& ls : fake) {
        for (const StateId& y : system.successors(ls.state, e)) landed.insert({y, ls.label});
    }
    return close_fake(system, std::move(landed));
}

bool all_secret(const std::vector<LabeledState>& fake) {
    for (const LabeledState& ls : fake) {
        if (ls.label != Label::Secret) return false;
    }
    return true;
}

}  // namespace

GameVerdict brute_defense_game(const System& system, const DefenseSpec& spec,
                               std::size_t horizon) {
    if (reachable_states(system).size() > 8)
        throw HorizonError("game analysis is limited to 8 reachable states");

    GameConfig start{close_real(system, {system.initial()}),
                     close_fake(system, {LabeledState{system.initial(), Label::Normal}})};

    std::vector<GameConfig> configs{start};
    std::map<GameConfig, std::size_t> index{{start, 0}};
    // Per config, per enabled real event: the successor configs of the legal
    // defender answers (possibly none, which loses on the spot).
    std::vector<std::vector<std::vector<std::size_t>>> moves;
    std::vector<char> base_lose;

    std::deque<std::size_t> frontier{0};
    while (!frontier.empty()) {
        std::size_t cur = frontier.front();
        frontier.pop_front();
        if (moves.size() <= cur) moves.resize(cur + 1);
        if (base_lose.size() <= cur) base_lose.resize(cur + 1);
        GameConfig config = configs[cur];
        base_lose[cur] = all_secret(config.fake);
        if (base_lose[cur]) continue;  // already lost, absorbing

        for (const EventId& t : system.events().observable) {
            std::vector<StateId> next_real = step_real(system, config.real, t);
            if (next_real.empty()) continue;  // plant cannot play t
            std::vector<std::size_t> answers;
            for (const DefensiveAction& action : actions_for(spec, t)) {
                std::vector<LabeledState> next_fake = config.fake;
                for (const EventId& e : action.projection())
                    next_fake = step_fake(system, next_fake, e);
                if (next_fake.empty()) continue;  // inconsistent output
                GameConfig next{next_real, std::move(next_fake)};
                auto [it, inserted] = index.try_emplace(next, configs.size());
                if (inserted) {
                    configs.push_back(next);
                    frontier.push_back(it->second);
                }
                answers.push_back(it->second);
            }
            std::sort(answers.begin(), answers.end());
            answers.erase(std::unique(answers.begin(), answers.end()), answers.end());
            moves[cur].push_back(std::move(answers));
        }
    }

    // Backward induction, layer by layer: rank k means the plant forces a
    // loss within k of its moves.
    const std::size_t n = configs.size();
    const std::size_t unranked = static_cast<std::size_t>(-1);
    std::vector<std::size_t> rank(n, unranked);
    for (std::size_t i = 0; i < n; ++i) {
        if (base_lose[i]) rank[i] = 0;
    }
    for (std::size_t layer = 1;; ++layer) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (rank[i] != unranked) continue;
            for (const std::vector<std::size_t>& answers : moves[i]) {
                bool forced = true;
                for (std::size_t succ : answers) {
                    if (rank[succ] == unranked || rank[succ] >= layer) {
                        forced = false;
                        break;
                    }
                }
                if (forced) {
                    rank[i] = layer;
                    changed = true;
                    break;
                }
            }
        }
        if (!changed) break;
    }

    if (rank[0] == unranked) return {GameOutcome::Win, 0};
    if (rank[0] <= horizon) return {GameOutcome::Lose, rank[0]};
    return {GameOutcome::Unknown, rank[0]};
}

bool brute_diagnosable(const System& system) {
    // Twin configurations: two runs with the same observation so far, each
    // carrying its own secret flag.
    using Twin = std::tuple<StateId, bool, StateId, bool>;
    Twin start{system.initial(), false, system.initial(), false};
    std::vector<Twin> twins{start};
    std::map<Twin, std::size_t> index{{start, 0}};
    std::vector<std::vector<std::size_t>> graph;

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        if (graph.size() <= cur) graph.resize(cur + 1);
        auto [x1, f1, x2, f2] = twins[cur];

        std::vector<Twin> nexts;
        for (const auto& [e, dsts] : system.outgoing(x1)) {
            if (!system.events().is_unobservable(e)) continue;
            bool nf1 = f1 || system.events().is_secret(e);
            for (const StateId& y1 : dsts) nexts.push_back({y1, nf1, x2, f2});
        }
        for (const auto& [e, dsts] : system.outgoing(x2)) {
            if (!system.events().is_unobservable(e)) continue;
            bool nf2 = f2 || system.events().is_secret(e);
            for (const StateId& y2 : dsts) nexts.push_back({x1, f1, y2, nf2});
        }
        for (const auto& [e, dsts1] : system.outgoing(x1)) {
            if (!system.events().is_observable(e)) continue;
            for (const StateId& y1 : dsts1) {
                for (const StateId& y2 : system.successors(x2, e))
                    nexts.push_back({y1, f1, y2, f2});
            }
        }

        for (const Twin& next : nexts) {
            auto [it, inserted] = index.try_emplace(next, twins.size());
            if (inserted) {
                twins.push_back(next);
                queue.push_back(it->second);
            }
            graph[cur].push_back(it->second);
        }
    }

    // A cycle among mixed twins (flags disagree) witnesses an observation
    // kept alive forever by both a secret and a secret-free run.
    const std::size_t n = twins.size();
    std::vector<char> mixed(n);
    for (std::size_t i = 0; i < n; ++i)
        mixed[i] = std::get<1>(twins[i]) != std::get<3>(twins[i]);

    std::vector<char> color(n, 0);  // 0 white, 1 on stack, 2 done
    for (std::size_t root = 0; root < n; ++root) {
        if (!mixed[root] || color[root] != 0) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [node, edge] = stack.back();
            if (edge < graph[node].size()) {
                std::size_t succ = graph[node][edge++];
                if (!mixed[succ]) continue;
                if (color[succ] == 1) return false;  // cycle found
                if (color[succ] == 0) {
                    color[succ] = 1;
                    stack.push_back({succ, 0});
                }
            } else {
                color[node] = 2;
                stack.pop_back();
            }
        }
    }
    return true;
}

}  // namespace conceal
