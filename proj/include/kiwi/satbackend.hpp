/*
 * Propositional backend interface: the built-in CDCL core or an external
 * process speaking a line-based incremental clause/assume protocol.
 *
 * Protocol (one command per line, literals in DIMACS convention):
 *   add <lit>... 0        assert a clause permanently
 *   solve <lit>... 0      solve under the given assumption literals
 * Responses to solve:
 *   sat <lit>... 0        model as a list of literals
 *   unsat
 *   undef                 resource limit reached
 */
#pragma once

#include <csignal>
#include <cstdio>
#include <memory>
#include <sstream>
#include <string>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "kiwi/sat.hpp"

namespace kiwi::sat {

class ISatBackend {
public:
  virtual ~ISatBackend() = default;
  virtual int new_var() = 0;
  virtual void add_clause(const std::vector<Lit>& lits) = 0;
  virtual SatResult solve(const std::vector<Lit>& assumptions, const ResourceLimits& limits) = 0;
  virtual bool model_value(int var) = 0;
  virtual uint64_t num_solves() const = 0;
};

class InternalBackend final : public ISatBackend {
public:
  int new_var() override { return solver_.new_var(); }
  void add_clause(const std::vector<Lit>& lits) override { solver_.add_clause(lits); }
  SatResult solve(const std::vector<Lit>& assumptions, const ResourceLimits& limits) override {
    return solver_.solve(assumptions, limits);
  }
  bool model_value(int var) override { return solver_.model_value(var); }
  uint64_t num_solves() const override { return solver_.stats().solves; }

  SatSolver& raw() { return solver_; }
  const SatSolver& raw() const { return solver_; }

private:
  SatSolver solver_;
};

/// Runs `cmd` as a child process and speaks the textual protocol above.
class ExternalBackend final : public ISatBackend {
public:
  explicit ExternalBackend(const std::string& cmd) {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw std::runtime_error("external solver: pipe failed");
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("external solver: fork failed");
    if (pid_ == 0) {
      dup2(to_child[0], 0);
      dup2(from_child[1], 1);
      close(to_child[0]); close(to_child[1]);
      close(from_child[0]); close(from_child[1]);
      execlp("/bin/sh", "sh", "-c", cmd.c_str(), (char*)nullptr);
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    out_ = fdopen(to_child[1], "w");
    in_ = fdopen(from_child[0], "r");
    if (!out_ || !in_) throw std::runtime_error("external solver: fdopen failed");
  }

  ~ExternalBackend() override {
    if (out_) fclose(out_);
    if (in_) fclose(in_);
    if (pid_ > 0) {
      kill(pid_, SIGTERM);
      waitpid(pid_, nullptr, 0);
    }
  }

  int new_var() override { return nvars_++; }

  void add_clause(const std::vector<Lit>& lits) override {
    fputs("add", out_);
    for (Lit l : lits) fprintf(out_, " %ld", lit_dimacs(l));
    fputs(" 0\n", out_);
  }

  SatResult solve(const std::vector<Lit>& assumptions, const ResourceLimits&) override {
    solves_++;
    fputs("solve", out_);
    for (Lit l : assumptions) fprintf(out_, " %ld", lit_dimacs(l));
    fputs(" 0\n", out_);
    fflush(out_);
    std::string line = read_line();
    std::istringstream iss(line);
    std::string verdict;
    iss >> verdict;
    if (verdict == "unsat") return SatResult::Unsat;
    if (verdict == "undef") return SatResult::Undef;
    if (verdict != "sat") throw std::runtime_error("external solver: bad response '" + line + "'");
    model_.assign(nvars_, false);
    long l;
    while (iss >> l && l != 0) {
      int v = (int)(l > 0 ? l : -l) - 1;
      if (v < nvars_) model_[v] = l > 0;
    }
    return SatResult::Sat;
  }

  bool model_value(int var) override {
    return var < (int)model_.size() && model_[var];
  }

  uint64_t num_solves() const override { return solves_; }

private:
  std::string read_line() {
    std::string s;
    int c;
    while ((c = fgetc(in_)) != EOF && c != '\n') s.push_back((char)c);
    if (c == EOF && s.empty()) throw std::runtime_error("external solver: closed the pipe");
    return s;
  }

  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  FILE* in_ = nullptr;
  int nvars_ = 0;
  uint64_t solves_ = 0;
  std::vector<bool> model_;
};

}  // namespace kiwi::sat
