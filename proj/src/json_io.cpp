#include "conceal/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace conceal {

namespace {

using nlohmann::json;

json parse_text(const std::string& text, const char* what) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded())
        throw std::invalid_argument(std::string(what) + ": not valid JSON");
    if (!doc.is_object())
        throw std::invalid_argument(std::string(what) + ": top level must be an object");
    return doc;
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed,
                         const char* what) {
    for (const auto& [key, value] : doc.items()) {
        if (allowed.count(key) == 0)
            throw std::invalid_argument(std::string(what) + ": unknown key '" + key + "'");
    }
}

std::string get_string(const json& value, const std::string& where) {
    if (!value.is_string())
        throw std::invalid_argument(where + " must be a string");
    return value.get<std::string>();
}

std::set<std::string> get_string_set(const json& doc, const std::string& key,
                                     const char* what) {
    if (!doc.contains(key))
        throw std::invalid_argument(std::string(what) + ": missing key '" + key + "'");
    const json& value = doc.at(key);
    if (!value.is_array())
        throw std::invalid_argument(std::string(what) + ": '" + key + "' must be an array");
    std::set<std::string> out;
    for (const json& item : value)
        out.insert(get_string(item, std::string(what) + ": entry of '" + key + "'"));
    return out;
}

}  // namespace

System parse_system_json(const std::string& text) {
    const char* what = "system JSON";
    json doc = parse_text(text, what);
    reject_unknown_keys(
        doc, {"states", "initial", "observable", "unobservable", "secret", "transitions"}, what);

    std::set<StateId> states = get_string_set(doc, "states", what);
    if (!doc.contains("initial"))
        throw std::invalid_argument(std::string(what) + ": missing key 'initial'");
    StateId initial = get_string(doc.at("initial"), std::string(what) + ": 'initial'");

    EventPartition events;
    events.observable = get_string_set(doc, "observable", what);
    events.unobservable = get_string_set(doc, "unobservable", what);
    events.secret = get_string_set(doc, "secret", what);

    if (!doc.contains("transitions"))
        throw std::invalid_argument(std::string(what) + ": missing key 'transitions'");
    const json& raw = doc.at("transitions");
    if (!raw.is_array())
        throw std::invalid_argument(std::string(what) + ": 'transitions' must be an array");
    std::vector<Transition> transitions;
    for (const json& item : raw) {
        if (!item.is_array() || item.size() != 3)
            throw std::invalid_argument(std::string(what) +
                                        ": each transition must be [src, event, dst]");
        transitions.push_back({get_string(item[0], std::string(what) + ": transition source"),
                               get_string(item[1], std::string(what) + ": transition event"),
                               get_string(item[2], std::string(what) + ": transition target")});
    }
    return System(std::move(states), std::move(initial), std::move(events),
                  std::move(transitions));
}

std::string system_to_json(const System& system) {
    json doc;
    doc["states"] = system.states();
    doc["initial"] = system.initial();
    doc["observable"] = system.events().observable;
    doc["unobservable"] = system.events().unobservable;
    doc["secret"] = system.events().secret;
    json transitions = json::array();
    for (const Transition& t : system.transitions())
        transitions.push_back(json::array({t.src, t.event, t.dst}));
    doc["transitions"] = std::move(transitions);
    return doc.dump();
}

DefenseSpec parse_defense_json(const std::string& text, const EventPartition& events) {
    const char* what = "defense JSON";
    json doc = parse_text(text, what);
    reject_unknown_keys(doc, {"replacements", "insertions", "deletions"}, what);

    DefenseSpec spec;
    auto read_map = [&doc, what](const char* key,
                                 std::map<EventId, std::set<EventId>>& out) {
        if (!doc.contains(key)) return;
        const json& value = doc.at(key);
        if (!value.is_object())
            throw std::invalid_argument(std::string(what) + ": '" + key +
                                        "' must be an object");
        for (const auto& [t, options] : value.items()) {
            if (!options.is_array())
                throw std::invalid_argument(std::string(what) + ": '" + key + "' entry '" + t +
                                            "' must be an array");
            for (const json& o : options)
                out[t].insert(
                    get_string(o, std::string(what) + ": entry of '" + key + "/" + t + "'"));
        }
    };
    read_map("replacements", spec.replacements);
    read_map("insertions", spec.insertions);
    if (doc.contains("deletions")) {
        const json& value = doc.at("deletions");
        if (!value.is_array())
            throw std::invalid_argument(std::string(what) + ": 'deletions' must be an array");
        for (const json& t : value)
            spec.deletions.insert(get_string(t, std::string(what) + ": entry of 'deletions'"));
    }
    validate_defense_spec(spec, events);
    return spec;
}

std::string defense_to_json(const DefenseSpec& spec) {
    json doc;
    doc["replacements"] = json::object();
    for (const auto& [t, options] : spec.replacements) doc["replacements"][t] = options;
    doc["insertions"] = json::object();
    for (const auto& [t, options] : spec.insertions) doc["insertions"][t] = options;
    doc["deletions"] = spec.deletions;
    return doc.dump();
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

System load_system_file(const std::string& path) {
    return parse_system_json(read_file(path));
}

DefenseSpec load_defense_file(const std::string& path, const EventPartition& events) {
    return parse_defense_json(read_file(path), events);
}

}  // namespace conceal
