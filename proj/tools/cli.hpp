#pragma once

namespace hbtree::cli {

// Entry point shared by the binary and the CLI tests. Returns 0 on success,
// 2 on usage or configuration errors.
int cli_main(int argc, const char* const* argv);

} // namespace hbtree::cli
