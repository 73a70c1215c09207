#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "conceal/defense.hpp"
#include "conceal/diagnoser.hpp"
#include "conceal/dot_export.hpp"
#include "conceal/exact.hpp"
#include "conceal/json_io.hpp"
#include "conceal/oracle.hpp"
#include "conceal/system.hpp"
#include "conceal/verifier.hpp"

namespace {

using json = nlohmann::ordered_json;

// Exit codes: 0 analysis ran, 1 usage error, 2 invalid input, 3 refused by
// the size guard on the exponential constructions.
struct SizeLimitRefusal {
    std::string message;
};

std::size_t size_limit() {
    const char* env = std::getenv("CONCEAL_SIZE_LIMIT");
    if (env == nullptr) return 12;
    std::string text(env);
    std::size_t used = 0;
    std::size_t value = 0;
    try {
        value = std::stoull(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("CONCEAL_SIZE_LIMIT must be a number, got '" + text + "'");
    }
    if (used != text.size())
        throw std::invalid_argument("CONCEAL_SIZE_LIMIT must be a number, got '" + text + "'");
    return value;
}

void guard_exact_size(const conceal::System& system) {
    const std::size_t limit = size_limit();
    if (system.states().size() > limit)
        throw SizeLimitRefusal{"refusing the exponential construction: system has " +
                               std::to_string(system.states().size()) +
                               " states, limit is " + std::to_string(limit) +
                               " (set CONCEAL_SIZE_LIMIT to override)"};
}

std::vector<conceal::EventId> read_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::vector<conceal::EventId> trace;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        trace.push_back(line.substr(begin, end - begin + 1));
    }
    return trace;
}

void emit(const json& payload) { std::cout << payload.dump() << "\n"; }

void emit_text(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + output_path + "'");
    out << text;
}

json lasso_json(const conceal::SafeLasso& lasso) {
    return json{{"stem", lasso.stem}, {"cycle", lasso.cycle}};
}

int run_validate(const std::string& system_path) {
    conceal::System system = conceal::load_system_file(system_path);
    conceal::ValidationReport report = conceal::validate(system);
    json payload;
    payload["passed"] = report.passed();
    payload["live"] = report.live;
    payload["unobservable_cycle_free"] = report.unobservable_cycle_free;
    payload["secrets_unobservable"] = report.secrets_unobservable;
    payload["violations"] = report.violations;
    payload["notes"] = report.notes;
    emit(payload);
    return 0;
}

int run_diagnoser(const std::string& system_path) {
    conceal::System system = conceal::load_system_file(system_path);
    conceal::Diagnoser diagnoser = conceal::build_diagnoser(system);
    json payload;
    payload["initial"] = diagnoser.states()[diagnoser.initial()].id();
    payload["alphabet"] = diagnoser.alphabet();
    json states = json::array();
    for (const conceal::DiagnoserState& s : diagnoser.states())
        states.push_back(json{{"id", s.id()}, {"class", to_string(s.classification())}});
    payload["states"] = std::move(states);
    json transitions = json::array();
    for (const auto& [key, dst] : diagnoser.transitions()) {
        transitions.push_back(json{{"from", diagnoser.states()[key.first].id()},
                                   {"event", key.second},
                                   {"to", diagnoser.states()[dst].id()}});
    }
    payload["transitions"] = std::move(transitions);
    emit(payload);
    return 0;
}

json cycle_list(const std::vector<conceal::CycleSummary>& summaries) {
    json out = json::array();
    for (const conceal::CycleSummary& c : summaries) out.push_back(c.states);
    return out;
}

int run_verifier(const std::string& system_path) {
    conceal::System system = conceal::load_system_file(system_path);
    conceal::Verifier verifier = conceal::build_verifier(conceal::build_observer(system));
    json payload;
    payload["initial"] = verifier.states()[verifier.initial()].id();
    json states = json::array();
    for (const conceal::VerifierState& s : verifier.states())
        states.push_back(json{{"id", s.id()}, {"class", to_string(s.classification())}});
    payload["states"] = std::move(states);
    json transitions = json::array();
    for (const auto& [key, dsts] : verifier.transitions()) {
        for (std::size_t dst : dsts) {
            transitions.push_back(json{{"from", verifier.states()[key.first].id()},
                                       {"event", key.second},
                                       {"to", verifier.states()[dst].id()}});
        }
    }
    payload["transitions"] = std::move(transitions);
    conceal::CyclePartition cycles = conceal::classify_cycles(verifier);
    payload["cycles"] = json{{"normal", cycle_list(cycles.normal)},
                             {"secret", cycle_list(cycles.secret)},
                             {"uncertain", cycle_list(cycles.uncertain)}};
    emit(payload);
    return 0;
}

int run_check(const std::string& system_path) {
    conceal::System system = conceal::load_system_file(system_path);
    conceal::ConcealabilityVerdict verdict = conceal::is_concealable(system);
    json payload;
    payload["concealable"] = verdict.concealable;
    json witnesses = json::array();
    for (const conceal::CycleWitness& w : verdict.witnesses) {
        witnesses.push_back(
            json{{"stem", w.stem}, {"cycle", w.cycle}, {"states", w.states}});
    }
    payload["witnesses"] = std::move(witnesses);
    emit(payload);
    return 0;
}

int run_diagnosable(const std::string& system_path) {
    conceal::System system = conceal::load_system_file(system_path);
    emit(json{{"diagnosable", conceal::is_diagnosable(system)}});
    return 0;
}

int run_enforce(const std::string& mode, const std::string& system_path,
                const std::string& defense_path) {
    conceal::System system = conceal::load_system_file(system_path);
    if (mode == "unconstrained") {
        conceal::UnconstrainedVerdict verdict = conceal::check_unconstrained(system);
        json payload;
        payload["enforceable"] = verdict.enforceable;
        if (verdict.lasso) payload["safe_lasso"] = lasso_json(*verdict.lasso);
        emit(payload);
        return 0;
    }

    conceal::DefenseSpec spec = conceal::load_defense_file(defense_path, system.events());
    if (mode == "exact") {
        guard_exact_size(system);
        emit(json{{"enforceable", conceal::is_c_enforceable_exact(system, spec)}});
        return 0;
    }

    conceal::Verifier verifier = conceal::build_verifier(conceal::build_observer(system));
    conceal::DefensiveVerifier dverifier = conceal::build_defensive_verifier(verifier, spec);
    conceal::EVerifier everifier = conceal::build_e_verifier(verifier, dverifier, spec);
    if (mode == "necessary") {
        conceal::NecessaryVerdict verdict = conceal::check_necessary(everifier, verifier);
        json payload;
        if (verdict.maybe_enforceable) {
            payload["verdict"] = "maybe_enforceable";
        } else {
            payload["verdict"] = "not_enforceable";
            payload["witness"] =
                json{{"state", verdict.witness_state}, {"event", verdict.witness_event}};
        }
        emit(payload);
        return 0;
    }

    // mode == "sufficient"
    conceal::EVerifier reduced = conceal::reduce_e_verifier(everifier, verifier, spec);
    conceal::SufficientVerdict verdict = conceal::check_sufficient(reduced, verifier);
    json payload;
    if (!verdict.enforceable) {
        payload["verdict"] = "inconclusive";
        payload["missing"] = verdict.missing;
        emit(payload);
        return 0;
    }
    payload["verdict"] = "enforceable";
    json table = json::object();
    for (std::size_t i = 0; i < reduced.states().size(); ++i) {
        const conceal::EVerifierState& state = reduced.states()[i];
        std::size_t xv = *verifier.index_of(state.system_part);
        json row = json::object();
        for (const conceal::EventId& t : verifier.enabled_events(xv)) {
            for (const conceal::DefensiveAction& action : conceal::actions_for(spec, t)) {
                if (!reduced.next(i, action).empty()) {
                    row[t] = action.render();
                    break;
                }
            }
        }
        table[state.id()] = std::move(row);
    }
    payload["strategy"] = std::move(table);
    emit(payload);
    return 0;
}

int run_defend(const std::string& mode, const std::string& system_path,
               const std::string& defense_path, const std::string& trace_path) {
    conceal::System system = conceal::load_system_file(system_path);
    std::vector<conceal::EventId> trace = read_trace(trace_path);

    conceal::Strategy strategy = conceal::Strategy::identity();
    if (mode == "unconstrained") {
        conceal::UnconstrainedVerdict verdict = conceal::check_unconstrained(system);
        if (!verdict.lasso)
            throw conceal::NotEnforceableError("no safe lasso exists for this system");
        strategy = conceal::extract_strategy(*verdict.lasso);
    } else if (mode == "sufficient") {
        conceal::DefenseSpec spec = conceal::load_defense_file(defense_path, system.events());
        conceal::Verifier verifier = conceal::build_verifier(conceal::build_observer(system));
        conceal::DefensiveVerifier dverifier = conceal::build_defensive_verifier(verifier, spec);
        conceal::EVerifier everifier = conceal::build_e_verifier(verifier, dverifier, spec);
        conceal::EVerifier reduced = conceal::reduce_e_verifier(everifier, verifier, spec);
        strategy = conceal::extract_strategy(reduced, verifier, spec);
    }

    conceal::DefenseSimReport report = conceal::simulate_defense(system, strategy, trace);
    json payload;
    payload["emitted"] = report.emitted;
    payload["eavesdropper_states"] = report.eavesdropper_states;
    payload["certain_secret"] = report.certain_secret;
    payload["consistent"] = report.consistent;
    emit(payload);
    return 0;
}

int run_oracle(const std::string& system_path, const std::string& defense_path,
               std::size_t horizon) {
    conceal::System system = conceal::load_system_file(system_path);
    conceal::require_valid(system);
    std::map<std::vector<conceal::EventId>, std::set<conceal::Label>> sets =
        conceal::brute_label_sets(system, horizon);
    conceal::ConcealabilityAgreement agreement = conceal::brute_concealability(system, horizon);

    json payload;
    payload["agree"] = agreement.agree;
    payload["revealing_found"] = agreement.revealing_found;
    payload["revealing"] = agreement.revealing;
    json label_sets = json::object();
    for (const auto& [w, labels] : sets) {
        std::string key;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (i) key += ' ';
            key += w[i];
        }
        json value = json::array();
        if (labels.count(conceal::Label::Normal)) value.push_back("N");
        if (labels.count(conceal::Label::Secret)) value.push_back("S");
        label_sets[key] = std::move(value);
    }
    payload["label_sets"] = std::move(label_sets);
    if (!defense_path.empty()) {
        conceal::DefenseSpec spec = conceal::load_defense_file(defense_path, system.events());
        conceal::GameVerdict game = conceal::brute_defense_game(system, spec, horizon);
        json entry;
        entry["outcome"] = to_string(game.outcome);
        if (game.outcome != conceal::GameOutcome::Win) entry["losing_rank"] = game.losing_rank;
        payload["game"] = std::move(entry);
    }
    emit(payload);
    return 0;
}

int run_export(const std::string& what, const std::string& system_path,
               const std::string& defense_path, bool show_infeasible, bool show_pruned,
               const std::string& output_path) {
    conceal::System system = conceal::load_system_file(system_path);
    if (what == "diagnoser") {
        emit_text(conceal::to_dot(conceal::build_diagnoser(system)), output_path);
        return 0;
    }
    if (what == "verifier") {
        emit_text(conceal::to_dot(conceal::build_verifier(conceal::build_observer(system))),
                  output_path);
        return 0;
    }

    conceal::DefenseSpec spec = conceal::load_defense_file(defense_path, system.events());
    if (what == "ediagnoser") {
        guard_exact_size(system);
        conceal::Diagnoser diagnoser = conceal::build_diagnoser(system);
        conceal::DefensiveDiagnoser ddiagnoser =
            conceal::build_defensive_diagnoser(diagnoser, spec);
        conceal::EDiagnoser ediagnoser =
            conceal::build_e_diagnoser(diagnoser, ddiagnoser, spec);
        std::set<std::string> pruned;
        if (show_pruned) {
            conceal::EDiagnoser reduced =
                conceal::reduce_e_diagnoser(ediagnoser, diagnoser, spec);
            std::set<std::string> kept;
            for (const conceal::EDiagnoserState& s : reduced.states()) kept.insert(s.id());
            for (const conceal::EDiagnoserState& s : ediagnoser.states()) {
                if (kept.count(s.id()) == 0) pruned.insert(s.id());
            }
        }
        emit_text(conceal::to_dot(ediagnoser, "e_diagnoser", show_infeasible,
                                  show_pruned ? &pruned : nullptr),
                  output_path);
        return 0;
    }

    conceal::Verifier verifier = conceal::build_verifier(conceal::build_observer(system));
    conceal::DefensiveVerifier dverifier = conceal::build_defensive_verifier(verifier, spec);
    if (what == "dverifier") {
        emit_text(conceal::to_dot(dverifier), output_path);
        return 0;
    }
    conceal::EVerifier everifier = conceal::build_e_verifier(verifier, dverifier, spec);
    if (what == "everifier") {
        std::set<std::string> pruned;
        if (show_pruned) {
            conceal::EVerifier reduced = conceal::reduce_e_verifier(everifier, verifier, spec);
            std::set<std::string> kept;
            for (const conceal::EVerifierState& s : reduced.states()) kept.insert(s.id());
            for (const conceal::EVerifierState& s : everifier.states()) {
                if (kept.count(s.id()) == 0) pruned.insert(s.id());
            }
        }
        emit_text(conceal::to_dot(everifier, "e_verifier", show_infeasible,
                                  show_pruned ? &pruned : nullptr),
                  output_path);
        return 0;
    }

    // what == "reduced"
    conceal::EVerifier reduced = conceal::reduce_e_verifier(everifier, verifier, spec);
    emit_text(conceal::to_dot(reduced, "reduced_e_verifier"), output_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concealability analysis and defensive obfuscation for partially observed "
                 "discrete-event systems"};
    app.require_subcommand(1);

    std::string system_path;
    std::string defense_path;
    std::string trace_path;
    std::string output_path;
    std::string mode;
    std::string what;
    std::size_t horizon = 8;
    bool show_infeasible = false;
    bool show_pruned = false;

    CLI::App* validate = app.add_subcommand("validate", "Check the model assumptions");
    validate->add_option("system", system_path, "system JSON file")->required();

    CLI::App* diagnoser = app.add_subcommand("diagnoser", "Build the eavesdropper estimator");
    diagnoser->add_option("system", system_path, "system JSON file")->required();

    CLI::App* verifier = app.add_subcommand("verifier", "Build the twin-plant verifier");
    verifier->add_option("system", system_path, "system JSON file")->required();

    CLI::App* check = app.add_subcommand("check", "Decide concealability");
    check->add_option("system", system_path, "system JSON file")->required();

    CLI::App* diagnosable = app.add_subcommand("diagnosable", "Decide diagnosability");
    diagnosable->add_option("system", system_path, "system JSON file")->required();

    CLI::App* enforce = app.add_subcommand("enforce", "Decide enforceability of concealment");
    enforce->add_option("--mode", mode, "analysis mode")
        ->required()
        ->check(CLI::IsMember({"unconstrained", "necessary", "sufficient", "exact"}));
    enforce->add_option("system", system_path, "system JSON file")->required();
    enforce->add_option("defense", defense_path, "defense JSON file");

    CLI::App* defend = app.add_subcommand("defend", "Replay a trace through a defense");
    defend->add_option("--trace", trace_path, "newline-separated event trace file")->required();
    defend->add_option("--mode", mode, "strategy kind")
        ->default_val("unconstrained")
        ->check(CLI::IsMember({"unconstrained", "sufficient", "identity"}));
    defend->add_option("system", system_path, "system JSON file")->required();
    defend->add_option("defense", defense_path, "defense JSON file");

    CLI::App* oracle = app.add_subcommand("oracle", "Brute-force cross checks");
    oracle->add_option("--horizon", horizon, "observation length bound")->default_val(8);
    oracle->add_option("--defense", defense_path, "defense JSON file for the game analysis");
    oracle->add_option("system", system_path, "system JSON file")->required();

    CLI::App* export_cmd = app.add_subcommand("export", "Render a construction as DOT");
    export_cmd->add_option("--what", what, "construction to render")
        ->required()
        ->check(CLI::IsMember(
            {"diagnoser", "verifier", "dverifier", "everifier", "reduced", "ediagnoser"}));
    export_cmd->add_flag("--show-infeasible", show_infeasible,
                         "mark events without a feasible action");
    export_cmd->add_flag("--show-pruned", show_pruned,
                         "overlay the states removed by reduction");
    export_cmd->add_option("-o,--output", output_path, "write DOT here instead of stdout");
    export_cmd->add_option("system", system_path, "system JSON file")->required();
    export_cmd->add_option("defense", defense_path, "defense JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*validate) return run_validate(system_path);
        if (*diagnoser) return run_diagnoser(system_path);
        if (*verifier) return run_verifier(system_path);
        if (*check) return run_check(system_path);
        if (*diagnosable) return run_diagnosable(system_path);
        if (*enforce) {
            if (mode != "unconstrained" && defense_path.empty()) {
                std::cerr << "enforce --mode " << mode << " needs a defense JSON file\n";
                return 1;
            }
            return run_enforce(mode, system_path, defense_path);
        }
        if (*defend) {
            if (mode == "sufficient" && defense_path.empty()) {
                std::cerr << "defend --mode sufficient needs a defense JSON file\n";
                return 1;
            }
            return run_defend(mode, system_path, defense_path, trace_path);
        }
        if (*oracle) return run_oracle(system_path, defense_path, horizon);
        if (*export_cmd) {
            const bool product = what == "everifier" || what == "ediagnoser";
            if ((show_infeasible || show_pruned) && !product) {
                std::cerr << "--show-infeasible/--show-pruned only apply to everifier and "
                             "ediagnoser\n";
                return 1;
            }
            if (what != "diagnoser" && what != "verifier" && defense_path.empty()) {
                std::cerr << "export --what " << what << " needs a defense JSON file\n";
                return 1;
            }
            return run_export(what, system_path, defense_path, show_infeasible, show_pruned,
                              output_path);
        }
    } catch (const SizeLimitRefusal& refusal) {
        std::cerr << refusal.message << "\n";
        return 3;
    } catch (const conceal::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
