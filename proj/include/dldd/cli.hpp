#pragma once

namespace dldd {

/// Exit codes: 0 success, 1 a check failed, 2 usage or input error.
int cli_main(int argc, char** argv);

}  // namespace dldd
