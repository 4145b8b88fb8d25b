#include <iostream>

#include "cluster/cli.hpp"

int main(int argc, char** argv) {
  cluster::RunConfig cfg;
  if (auto code = cluster::parse_command_line(argc, argv, cfg)) return *code;
  return cluster::run(cfg, std::cout, std::cerr);
}
