#include <iostream>
#include <string>
#include <vector>

#include "semwm_cli/cli.hpp"

#ifdef SEMWM_HAVE_SELFTEST
#include "criteria.hpp"
#endif

int main(int argc, char** argv) {
#ifdef SEMWM_HAVE_SELFTEST
  semwm::cli::set_selftest_runner([](std::ostream& out) {
    return semwm::acceptance::report(semwm::acceptance::run_all(), out);
  });
#endif
  std::vector<std::string> args(argv, argv + argc);
  return semwm::cli::run(args, std::cout, std::cerr);
}
