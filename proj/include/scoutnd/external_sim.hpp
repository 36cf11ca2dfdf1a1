#pragma once

#include <memory>
#include <string>

#include "scoutnd/objective.hpp"

namespace scoutnd {

class SimError : public Error {
 public:
  using Error::Error;
};

// The child did not answer within the configured timeout.
class SimTimeoutError : public SimError {
 public:
  using SimError::SimError;
};

// The child answered with something outside the response grammar
// (including non-finite numbers).
class SimProtocolError : public SimError {
 public:
  using SimError::SimError;
};

// The child exited or its pipe broke.
class SimExitError : public SimError {
 public:
  using SimError::SimError;
};

// The child reported a well-formed "ERR <message>" response.
class SimRemoteError : public SimError {
 public:
  using SimError::SimError;
};

struct ExternalSimSpec {
  std::vector<std::string> level_commands;  // shell command per fidelity level
  int protocol_version = 1;                 // record grammar version
  int timeout_ms = 10000;
  int retries = 2;  // child restarts per request before giving up
};

// Line protocol adapter around persistent child processes, one child per
// fidelity level. Strictly request/response:
//   request:  EVAL <level> <d> <x_1> ... <x_d> <noise_dim> <b_1> ... <b_m>
//   response: OK <f> <I> <C_1> ... <C_I>   |   ERR <message>
// Floating-point fields use shortest round-trip decimals. Not reentrant;
// use one instance per worker.
class ExternalSimulator {
 public:
  explicit ExternalSimulator(ExternalSimSpec spec);
  ~ExternalSimulator();
  ExternalSimulator(const ExternalSimulator&) = delete;
  ExternalSimulator& operator=(const ExternalSimulator&) = delete;

  EvalResult evaluate(int level, const Vec& x, const Vec& b);

  int num_levels() const { return static_cast<int>(spec_.level_commands.size()); }

 private:
  struct Child;
  EvalResult attempt(Child& child, int level, const std::string& request);

  ExternalSimSpec spec_;
  std::vector<std::unique_ptr<Child>> children_;
};

// Spec-level convenience used by tests and one-shot callers.
EvalResult external_evaluate(ExternalSimulator& sim, int level, const Vec& x,
                             const Vec& b);

// Wraps an external simulator as a ProblemSpec. Each evaluation worker slot
// lazily gets its own ExternalSimulator (and thus its own child processes).
ProblemSpec make_external_problem(const ExternalSimSpec& spec, int dim,
                                  int constraint_count, int noise_dim,
                                  NoiseSampler noise_sampler, Vec costs,
                                  int max_workers = 16);

}  // namespace scoutnd
