#pragma once

#include <iosfwd>

namespace heine::cli {

// Exit codes: 0 success, 1 validation error (bad flags, configs, parameters),
// 2 internal inconsistency (a certificate that must hold failed).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heine::cli
