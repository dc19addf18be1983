#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pitch::cli {

/// Runs the `pitch` command line. `args` excludes the program name.
/// Failures print `error: code=<Code> message=<text>` to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pitch::cli
