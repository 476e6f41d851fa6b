#include "ipcheck/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return ipcheck::run(argc, argv);
}
