#include <iostream>
#include <string>
#include <vector>

#include "cutofflab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const cutofflab::RunConfig cfg = cutofflab::parse_args(args);
    return cutofflab::run(cfg);
  } catch (const cutofflab::HelpRequested& h) {
    std::cout << h.text;
    return 0;
  } catch (const cutofflab::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const cutofflab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
