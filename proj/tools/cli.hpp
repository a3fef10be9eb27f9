#pragma once

#include <ostream>

namespace psh::cli {

// Exit codes: 0 all checks pass, 1 some check fails, 2 config or input error,
// 3 only inconclusive results.
enum Exit { ok = 0, failed = 1, input_error = 2, inconclusive = 3 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psh::cli
