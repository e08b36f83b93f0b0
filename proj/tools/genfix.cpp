/**
 * @file genfix.cpp
 * @brief Regenerates the deterministic benchmark fixtures in corpus/.
 */

#include "qdbg/benchgen.hpp"

#include <fstream>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "corpus";
  {
    std::ofstream out(dir + "/dj_17.qasm");
    out << qdbg::deutsch_jozsa_source(16);
  }
  {
    std::ofstream out(dir + "/random_12.qasm");
    out << qdbg::random_circuit_source(12, 400, 7);
  }
  std::cout << "wrote " << dir << "/dj_17.qasm and " << dir
            << "/random_12.qasm\n";
  return 0;
}
