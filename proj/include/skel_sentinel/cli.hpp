#pragma once

#include <iosfwd>

namespace sentinel {

/// Entry point of the skel-sentinel tool. Returns 0 on success, 1 when a
/// stage fails and 2 on usage errors; failures print one
/// `error: <kind>: <message>` line to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sentinel
