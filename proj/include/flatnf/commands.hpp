#pragma once
#include <iosfwd>
#include <string>

#include "flatnf/system.hpp"

namespace flatnf {

struct CommandOptions {
  Options core;
  bool json = false;
  bool timing = false;
};

// Exit codes: 0 success (flat / all checks pass), 1 definite negative verdict or failed
// checks, 2 errors (unreadable input, refusals, internal failures). Reports go to `out`,
// error messages to `err`.
int cmd_check(const std::string& path, const CommandOptions& opt, std::ostream& out,
              std::ostream& err);
int cmd_normalform(const std::string& path, const CommandOptions& opt, std::ostream& out,
                   std::ostream& err);
int cmd_parameterize(const std::string& path, const CommandOptions& opt, std::ostream& out,
                     std::ostream& err);
int cmd_verify(const std::string& path, const CommandOptions& opt, std::ostream& out,
               std::ostream& err);

}  // namespace flatnf
