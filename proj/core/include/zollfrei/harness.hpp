#pragma once

namespace zollfrei::harness {

// Full command-line front end; returns the process exit code:
// 0 all requested checks pass, 1 a check or stage failed, 2 usage or
// configuration errors.
int run_cli(int argc, char** argv);

}  // namespace zollfrei::harness
