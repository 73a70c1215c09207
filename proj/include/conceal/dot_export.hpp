#ifndef CONCEAL_DOT_EXPORT_HPP
#define CONCEAL_DOT_EXPORT_HPP

#include <set>
#include <string>

#include "conceal/defense.hpp"
#include "conceal/diagnoser.hpp"
#include "conceal/exact.hpp"
#include "conceal/verifier.hpp"

namespace conceal {

// Graphviz renderings with a fixed, deterministic layout of the text:
// nodes in state order, edges in transition-map order. Secret states are
// drawn double-circled and filled, Uncertain states dashed, Normal states
// plain; an unlabeled arrow marks the initial state. Empty structures render
// as a graph with zero nodes and a comment line.
std::string to_dot(const Diagnoser& diagnoser);
std::string to_dot(const Verifier& verifier);
std::string to_dot(const DefensiveVerifier& dverifier);

// For the product structures, `show_infeasible` draws dotted edges labeled
// "t/" to a point-shaped sink for events no offered action answers, and
// `pruned` (ids removed by reduction) renders those states dashed red along
// with their edges.
std::string to_dot(const EVerifier& everifier, const std::string& name,
                   bool show_infeasible = false,
                   const std::set<std::string>* pruned = nullptr);
std::string to_dot(const EDiagnoser& ediagnoser, const std::string& name,
                   bool show_infeasible = false,
                   const std::set<std::string>* pruned = nullptr);

}  // namespace conceal

#endif
