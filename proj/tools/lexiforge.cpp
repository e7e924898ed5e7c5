#include "lexiforge/pipeline/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lexiforge::pipeline::run_cli(std::move(args));
}
