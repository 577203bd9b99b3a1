#pragma once

#include <ostream>

namespace mdkit {

/// Entry point of the mdkit executable; returns the process exit code.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mdkit
