#ifndef SFG_PARSER_HPP
#define SFG_PARSER_HPP

#include <string>

#include "ast.hpp"

namespace sfg {

// Parses a textual .sfg program. Throws Error with file:line:col on syntax
// problems, duplicate definitions and references to unknown identifiers.
SourceProgram parse_program(const std::string &text, const std::string &filename = "<source>");

}  // namespace sfg

#endif
