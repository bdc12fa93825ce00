#include <iostream>

#include "criteria.hpp"

int main() {
  return semwm::acceptance::report(semwm::acceptance::run_all(), std::cout) ? 0 : 1;
}
