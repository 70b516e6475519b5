// Stdin/stdout SAT service speaking the line protocol of the external
// solver backend:
//   add <lit>... 0      assert a clause
//   solve <lit>... 0    solve under assumptions; replies
//                       "sat <model lit>... 0", "unsat" or "undef"
// Literals use the DIMACS convention; variables are created on first use.
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kiwi/sat.hpp"

using namespace kiwi::sat;

int main() {
  SatSolver solver;
  std::ios::sync_with_stdio(false);

  auto lit_of = [&](long d) {
    int var = (int)(d > 0 ? d : -d) - 1;
    while (solver.num_vars() <= var) solver.new_var();
    return mk_lit(var, d < 0);
  };

  std::string line;
  while (std::getline(std::cin, line)) {
    std::istringstream iss(line);
    std::string cmd;
    iss >> cmd;
    std::vector<Lit> lits;
    long d;
    while (iss >> d && d != 0) lits.push_back(lit_of(d));
    if (cmd == "add") {
      solver.add_clause(lits);
    } else if (cmd == "solve") {
      switch (solver.solve(lits, {})) {
        case SatResult::Sat: {
          std::cout << "sat";
          for (int v = 0; v < solver.num_vars(); ++v)
            std::cout << ' ' << (solver.model_value(v) ? v + 1 : -(v + 1));
          std::cout << " 0\n";
          break;
        }
        case SatResult::Unsat: std::cout << "unsat\n"; break;
        case SatResult::Undef: std::cout << "undef\n"; break;
      }
      std::cout.flush();
    } else if (!cmd.empty()) {
      std::cerr << "unknown command: " << cmd << "\n";
      return 1;
    }
  }
  return 0;
}
