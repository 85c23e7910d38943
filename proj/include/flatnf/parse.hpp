#pragma once
#include <map>
#include <string>

#include "flatnf/expr.hpp"

namespace flatnf {

// Declared identifiers visible to the parser, keyed by display name.
using SymbolTable = std::map<std::string, Var>;

// Grammar:
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ['^' integer]
//   base   := identifier | integer | '(' expr ')'
// Rationals are covered by integer division (e.g. "3/4"). Undeclared identifiers raise
// UndeclaredIdentifier; malformed input raises SyntaxError with line/column.
Expr parse_expr(const std::string& text, const SymbolTable& symbols);

}  // namespace flatnf
