#include "scoutnd/external_sim.hpp"

#include <cmath>
#include <csignal>
#include <cstring>
#include <mutex>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace scoutnd {

namespace {

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

struct ExternalSimulator::Child {
  pid_t pid = -1;
  int to_child = -1;    // write end of child's stdin
  int from_child = -1;  // read end of child's stdout
  std::string buffer;   // partial line carried between reads

  bool alive() const { return pid > 0; }

  void close_fds() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    to_child = from_child = -1;
  }

  void terminate() {
    if (pid > 0) {
      close_fds();
      ::kill(pid, SIGKILL);
      int status = 0;
      ::waitpid(pid, &status, 0);
      pid = -1;
    }
    buffer.clear();
  }

  void spawn(const std::string& command) {
    terminate();
    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
      throw SimExitError("simulator: pipe() failed: " + std::string(std::strerror(errno)));
    }
    pid_t child = ::fork();
    if (child < 0) {
      throw SimExitError("simulator: fork() failed: " + std::string(std::strerror(errno)));
    }
    if (child == 0) {
      ::dup2(in_pipe[0], STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      ::close(out_pipe[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    pid = child;
    to_child = in_pipe[1];
    from_child = out_pipe[0];
    buffer.clear();
  }

  void send_line(const std::string& line) {
    std::string payload = line + "\n";
    size_t off = 0;
    while (off < payload.size()) {
      ssize_t n = ::write(to_child, payload.data() + off, payload.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw SimExitError("simulator: write failed (" + std::string(std::strerror(errno)) +
                           "); child exited?");
      }
      off += static_cast<size_t>(n);
    }
  }

  std::string read_line(int timeout_ms) {
    for (;;) {
      auto nl = buffer.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      struct pollfd pfd{from_child, POLLIN, 0};
      int rv = ::poll(&pfd, 1, timeout_ms);
      if (rv == 0) throw SimTimeoutError("simulator: no response within " +
                                         std::to_string(timeout_ms) + " ms");
      if (rv < 0) {
        if (errno == EINTR) continue;
        throw SimExitError("simulator: poll failed: " + std::string(std::strerror(errno)));
      }
      char chunk[4096];
      ssize_t n = ::read(from_child, chunk, sizeof(chunk));
      if (n == 0) throw SimExitError("simulator: child closed its output");
      if (n < 0) {
        if (errno == EINTR) continue;
        throw SimExitError("simulator: read failed: " + std::string(std::strerror(errno)));
      }
      buffer.append(chunk, static_cast<size_t>(n));
    }
  }
};

ExternalSimulator::ExternalSimulator(ExternalSimSpec spec) : spec_(std::move(spec)) {
  if (spec_.level_commands.empty()) {
    throw ValueError("simulator: need at least one level command");
  }
  if (spec_.protocol_version != 1) {
    throw ValueError("simulator: unsupported protocol version " +
                     std::to_string(spec_.protocol_version));
  }
  if (spec_.timeout_ms <= 0) throw ValueError("simulator: timeout must be positive");
  if (spec_.retries < 0) throw ValueError("simulator: retries must be >= 0");
  ignore_sigpipe_once();
  children_.resize(spec_.level_commands.size());
}

ExternalSimulator::~ExternalSimulator() {
  for (auto& child : children_) {
    if (child) child->terminate();
  }
}

EvalResult ExternalSimulator::attempt(Child& child, int level,
                                      const std::string& request) {
  if (!child.alive()) child.spawn(spec_.level_commands[level - 1]);
  child.send_line(request);
  std::string line = child.read_line(spec_.timeout_ms);
  auto tokens = tokenize(line);
  if (tokens.empty()) throw SimProtocolError("simulator: empty response line");
  if (tokens[0] == "ERR") {
    std::string msg = line.size() > 4 ? line.substr(4) : "";
    throw SimRemoteError("simulator reported: " + msg);
  }
  if (tokens[0] != "OK") {
    throw SimProtocolError("simulator: response must start with OK or ERR, got '" +
                           tokens[0] + "'");
  }
  if (tokens.size() < 3) throw SimProtocolError("simulator: truncated OK response");
  bool ok = true;
  EvalResult result;
  result.f = parse_double(tokens[1], &ok);
  if (!ok || !std::isfinite(result.f)) {
    throw SimProtocolError("simulator: bad objective value '" + tokens[1] + "'");
  }
  double count_raw = parse_double(tokens[2], &ok);
  int n_constraints = static_cast<int>(count_raw);
  if (!ok || count_raw != n_constraints || n_constraints < 0) {
    throw SimProtocolError("simulator: bad constraint count '" + tokens[2] + "'");
  }
  if (static_cast<int>(tokens.size()) != 3 + n_constraints) {
    throw SimProtocolError("simulator: expected " + std::to_string(n_constraints) +
                           " constraint values, got " +
                           std::to_string(tokens.size() - 3));
  }
  result.c.resize(n_constraints);
  for (int i = 0; i < n_constraints; ++i) {
    result.c[i] = parse_double(tokens[3 + i], &ok);
    if (!ok || !std::isfinite(result.c[i])) {
      throw SimProtocolError("simulator: bad constraint value '" + tokens[3 + i] + "'");
    }
  }
  return result;
}

EvalResult ExternalSimulator::evaluate(int level, const Vec& x, const Vec& b) {
  if (level < 1 || level > num_levels()) {
    throw ValueError("simulator: level " + std::to_string(level) + " out of range");
  }
  if (!children_[level - 1]) children_[level - 1] = std::make_unique<Child>();
  Child& child = *children_[level - 1];

  std::ostringstream req;
  req << "EVAL " << level << ' ' << x.size();
  for (double xi : x) req << ' ' << format_double(xi);
  req << ' ' << b.size();
  for (double bi : b) req << ' ' << format_double(bi);
  const std::string request = req.str();

  int attempts_left = spec_.retries + 1;
  for (;;) {
    --attempts_left;
    try {
      return attempt(child, level, request);
    } catch (const SimRemoteError&) {
      throw;  // well-formed failure report: the child is alive, do not retry
    } catch (const SimError&) {
      child.terminate();
      if (attempts_left <= 0) throw;
    }
  }
}

EvalResult external_evaluate(ExternalSimulator& sim, int level, const Vec& x,
                             const Vec& b) {
  return sim.evaluate(level, x, b);
}

ProblemSpec make_external_problem(const ExternalSimSpec& spec, int dim,
                                  int constraint_count, int noise_dim,
                                  NoiseSampler noise_sampler, Vec costs,
                                  int max_workers) {
  if (max_workers < 1) throw ValueError("external problem: max_workers must be >= 1");

  struct SlotPool {
    std::mutex mutex;
    std::vector<std::unique_ptr<ExternalSimulator>> slots;
    ExternalSimSpec spec;

    ExternalSimulator& get(int slot) {
      std::lock_guard<std::mutex> lock(mutex);
      if (slot < 0 || slot >= static_cast<int>(slots.size())) {
        throw ValueError("external problem: worker slot out of range");
      }
      if (!slots[slot]) slots[slot] = std::make_unique<ExternalSimulator>(spec);
      return *slots[slot];
    }
  };
  auto pool = std::make_shared<SlotPool>();
  pool->spec = spec;
  pool->slots.resize(max_workers);

  ProblemSpec problem;
  problem.dim = dim;
  problem.constraint_count = constraint_count;
  problem.noise_dim = noise_dim;
  problem.noise_sampler = std::move(noise_sampler);
  problem.costs = std::move(costs);
  for (size_t level = 1; level <= spec.level_commands.size(); ++level) {
    problem.levels.push_back(
        [pool, level](const Vec& x, const Vec& b, int slot) {
          return pool->get(slot).evaluate(static_cast<int>(level), x, b);
        });
  }
  problem.ensure_counter();
  problem.validate();
  return problem;
}

}  // namespace scoutnd
