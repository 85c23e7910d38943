#pragma once
#include <string>

#include "flatnf/system.hpp"

namespace flatnf {

// Reads a system description, dispatching on content: a leading '{' selects the JSON
// form, anything else the line format
//   system <name>
//   states: x1, x2
//   inputs: u1
//   equilibrium: x1=0, u1=1/2      (optional)
//   x1+ = <expr>
// with '#' comments and blank lines allowed anywhere. Every state needs exactly one
// update line. Errors carry the offending line number.
DiscreteSystem load_system(const std::string& path);
DiscreteSystem parse_system_text(const std::string& text, const std::string& fallback_name);

// Round-trippable text form in the line format.
std::string system_to_text(const DiscreteSystem& sys);

}  // namespace flatnf
