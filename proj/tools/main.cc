#include <iostream>

#include "driver.h"

int main(int argc, char** argv) {
  return namesift::cli::run_cli(argc, argv, std::cout, std::cerr);
}
