#include <cstdlib>
#include <iostream>
#include <string>

#include <gtest/gtest.h>

#include "support.hpp"

namespace {
std::uint64_t g_seed = 20240917;
}

std::uint64_t cluster::test::seed() { return g_seed; }

int main(int argc, char** argv) {
  testing::InitGoogleTest(&argc, argv);
  if (const char* env = std::getenv("CLUSTER_TEST_SEED"); env && *env) g_seed = std::stoull(env);
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--seed=", 0) == 0) g_seed = std::stoull(a.substr(7));
  }
  std::cout << "test seed: " << g_seed << " (replay with --seed=" << g_seed << ")\n";
  return RUN_ALL_TESTS();
}
