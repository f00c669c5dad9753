#pragma once

namespace mdt::cli {

/// Exit status: 0 pass, 1 check failed, 2 usage error, 3 budget exceeded.
int run(int argc, char** argv);

} // namespace mdt::cli
