#include "conceal/dot_export.hpp"

#include <sstream>

namespace conceal {

namespace {

std::string quoted(const std::string& raw) {
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string class_attrs(StateClass cls) {
    switch (cls) {
        case StateClass::Secret: return " [shape=doublecircle, style=filled, fillcolor=lightgray]";
        case StateClass::Uncertain: return " [style=dashed]";
        case StateClass::Normal: return "";
    }
    return "";
}

void open_graph(std::ostringstream& out, const std::string& name) {
    out << "digraph " << name << " {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle];\n";
}

void initial_arrow(std::ostringstream& out, const std::string& id) {
    out << "  \"__init\" [shape=none, label=\"\"];\n";
    out << "  \"__init\" -> " << quoted(id) << ";\n";
}

}  // namespace

std::string to_dot(const Diagnoser& diagnoser) {
    std::ostringstream out;
    open_graph(out, "diagnoser");
    for (const DiagnoserState& s : diagnoser.states())
        out << "  " << quoted(s.id()) << class_attrs(s.classification()) << ";\n";
    initial_arrow(out, diagnoser.states()[diagnoser.initial()].id());
    for (const auto& [key, dst] : diagnoser.transitions()) {
        out << "  " << quoted(diagnoser.states()[key.first].id()) << " -> "
            << quoted(diagnoser.states()[dst].id()) << " [label=" << quoted(key.second)
            << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string to_dot(const Verifier& verifier) {
    std::ostringstream out;
    open_graph(out, "verifier");
    for (const VerifierState& s : verifier.states())
        out << "  " << quoted(s.id()) << class_attrs(s.classification()) << ";\n";
    initial_arrow(out, verifier.states()[verifier.initial()].id());
    for (const auto& [key, dsts] : verifier.transitions()) {
        for (std::size_t dst : dsts) {
            out << "  " << quoted(verifier.states()[key.first].id()) << " -> "
                << quoted(verifier.states()[dst].id()) << " [label=" << quoted(key.second)
                << "];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string to_dot(const DefensiveVerifier& dverifier) {
    std::ostringstream out;
    open_graph(out, "defensive_verifier");
    for (const VerifierState& s : dverifier.states())
        out << "  " << quoted(s.id()) << class_attrs(s.classification()) << ";\n";
    initial_arrow(out, dverifier.states()[dverifier.initial()].id());
    for (const auto& [key, dsts] : dverifier.transitions()) {
        for (std::size_t dst : dsts) {
            out << "  " << quoted(dverifier.states()[key.first].id()) << " -> "
                << quoted(dverifier.states()[dst].id())
                << " [label=" << quoted(key.second.render()) << "];\n";
        }
    }
    out << "}\n";
    return out.str();
}

namespace {

bool is_pruned(const std::set<std::string>* pruned, const std::string& id) {
    return pruned != nullptr && pruned->count(id) != 0;
}

}  // namespace

std::string to_dot(const EVerifier& everifier, const std::string& name, bool show_infeasible,
                   const std::set<std::string>* pruned) {
    std::ostringstream out;
    if (everifier.empty() && (pruned == nullptr || pruned->empty())) {
        out << "digraph " << name << " {\n  // empty structure\n}\n";
        return out.str();
    }
    open_graph(out, name);
    bool any_infeasible = false;
    for (std::size_t i = 0; i < everifier.states().size(); ++i) {
        const std::string id = everifier.states()[i].id();
        if (is_pruned(pruned, id)) {
            out << "  " << quoted(id) << " [style=dashed, color=red];\n";
        } else {
            out << "  " << quoted(id)
                << class_attrs(everifier.states()[i].system_part.classification()) << ";\n";
        }
        if (show_infeasible && !everifier.infeasible_events(i).empty()) any_infeasible = true;
    }
    if (!everifier.empty()) initial_arrow(out, everifier.states()[everifier.initial()].id());
    if (any_infeasible) out << "  \"__infeasible\" [shape=point];\n";
    for (const auto& [key, dsts] : everifier.transitions()) {
        const std::string src = everifier.states()[key.first].id();
        for (std::size_t dst : dsts) {
            const std::string dst_id = everifier.states()[dst].id();
            out << "  " << quoted(src) << " -> " << quoted(dst_id)
                << " [label=" << quoted(key.second.render());
            if (is_pruned(pruned, src) || is_pruned(pruned, dst_id))
                out << ", style=dashed, color=red";
            out << "];\n";
        }
    }
    if (show_infeasible) {
        for (std::size_t i = 0; i < everifier.states().size(); ++i) {
            for (const EventId& t : everifier.infeasible_events(i)) {
                out << "  " << quoted(everifier.states()[i].id())
                    << " -> \"__infeasible\" [label=" << quoted(t + "/")
                    << ", style=dotted];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

std::string to_dot(const EDiagnoser& ediagnoser, const std::string& name, bool show_infeasible,
                   const std::set<std::string>* pruned) {
    std::ostringstream out;
    if (ediagnoser.empty() && (pruned == nullptr || pruned->empty())) {
        out << "digraph " << name << " {\n  // empty structure\n}\n";
        return out.str();
    }
    open_graph(out, name);
    bool any_infeasible = false;
    for (std::size_t i = 0; i < ediagnoser.states().size(); ++i) {
        const std::string id = ediagnoser.states()[i].id();
        if (is_pruned(pruned, id)) {
            out << "  " << quoted(id) << " [style=dashed, color=red];\n";
        } else {
            out << "  " << quoted(id)
                << class_attrs(ediagnoser.states()[i].real.classification()) << ";\n";
        }
        if (show_infeasible && !ediagnoser.infeasible_events(i).empty()) any_infeasible = true;
    }
    if (!ediagnoser.empty()) initial_arrow(out, ediagnoser.states()[ediagnoser.initial()].id());
    if (any_infeasible) out << "  \"__infeasible\" [shape=point];\n";
    for (const auto& [key, dst] : ediagnoser.transitions()) {
        const std::string src = ediagnoser.states()[key.first].id();
        const std::string dst_id = ediagnoser.states()[dst].id();
        out << "  " << quoted(src) << " -> " << quoted(dst_id)
            << " [label=" << quoted(key.second.render());
        if (is_pruned(pruned, src) || is_pruned(pruned, dst_id))
            out << ", style=dashed, color=red";
        out << "];\n";
    }
    if (show_infeasible) {
        for (std::size_t i = 0; i < ediagnoser.states().size(); ++i) {
            for (const EventId& t : ediagnoser.infeasible_events(i)) {
                out << "  " << quoted(ediagnoser.states()[i].id())
                    << " -> \"__infeasible\" [label=" << quoted(t + "/")
                    << ", style=dotted];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace conceal
