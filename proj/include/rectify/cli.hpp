#pragma once

#include <iosfwd>

namespace rectify {

/// Full command dispatch: `estimate`, `ate`, `stratified`, `allocate`,
/// `diagnose`, `simulate`. Reports go to `out` as JSON; messages and
/// warnings to `err`. Returns 0 on success, 1 on validation or data errors,
/// 2 on usage errors.
int run_command(int argc, const char* const* argv, std::ostream& out,
                std::ostream& err);

}  // namespace rectify
