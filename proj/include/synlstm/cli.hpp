#pragma once

#include <iosfwd>

namespace synlstm {

// Exit codes: 0 success, 1 usage error, 2 data or contract error,
// 3 numerical abort (non-finite loss, failed gradient check).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace synlstm
