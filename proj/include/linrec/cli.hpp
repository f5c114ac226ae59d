#pragma once

#include "linrec/audit.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace linrec {

enum ExitCode : int { kExitOk = 0, kExitDiagnostics = 1, kExitInconclusive = 2, kExitInternal = 3 };

// "max_trees=100,fuel=5000"; keys: max_trees max_label_size max_stack_depth max_states fuel bit_ceiling.
// Throws linrec::Error on unknown keys or non-positive values.
void apply_caps(AuditCaps& caps, const std::string& spec);

// Runs one command line (without the program name). Data goes to out, diagnostics to err.
// Defaults for caps come from the LINREC_CAPS environment variable.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace linrec
