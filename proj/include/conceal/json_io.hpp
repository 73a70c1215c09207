#ifndef CONCEAL_JSON_IO_HPP
#define CONCEAL_JSON_IO_HPP

#include <string>

#include "conceal/defense.hpp"
#include "conceal/system.hpp"

namespace conceal {

// System interchange format:
//   {"states":["1",...],"initial":"1","observable":["a",...],
//    "unobservable":["s"],"secret":["s"],"transitions":[["1","s","2"],...]}
// All six keys are required; unknown keys are rejected. Malformed input
// throws std::invalid_argument.
System parse_system_json(const std::string& text);
std::string system_to_json(const System& system);

// Defense interchange format (all keys optional, unknown keys rejected):
//   {"replacements":{"a":["a","d"],...},"insertions":{"d":["c"]},
//    "deletions":["d"]}
// Events are checked against the partition; unknown observable events throw
// UnknownEventError.
DefenseSpec parse_defense_json(const std::string& text, const EventPartition& events);
std::string defense_to_json(const DefenseSpec& spec);

// File variants; unreadable files throw std::invalid_argument.
System load_system_file(const std::string& path);
DefenseSpec load_defense_file(const std::string& path, const EventPartition& events);

}  // namespace conceal

#endif
