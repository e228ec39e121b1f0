#pragma once

namespace treesync {

/// Command-line front end. Exit codes: 0 success (and convergence where it
/// applies), 1 divergence or failed replay, 2 usage or input errors.
int cliMain(int argc, char** argv);

} // namespace treesync
