// Out-of-process heuristic evaluation over newline-delimited JSON.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "strategist/gops.h"
#include "strategist/heuristics.h"

#ifndef STRATEGIST_HOST_SCRIPT
#define STRATEGIST_HOST_SCRIPT ""
#endif

namespace strategist {

namespace fs = std::filesystem;

std::string default_host_script() {
  if (const char* env = std::getenv("STRATEGIST_HEURISTIC_HOST"); env && *env) return env;
  return STRATEGIST_HOST_SCRIPT;
}

namespace {

json request_state(const State& state) {
  if (state.game() == GameKind::kGops) {
    return json::parse(gops::heuristic_view(static_cast<const gops::GopsState&>(state)).dump());
  }
  return state.to_json();
}

// One interpreter process serving one request at a time.
class HostProcess {
 public:
  HostProcess(const std::vector<std::string>& argv, const fs::path& workdir) {
    // Build argv before forking; the child may only make async-signal-safe calls.
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) throw EvaluationError("pipe failed");
    pid_ = fork();
    if (pid_ < 0) throw EvaluationError("fork failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      const int devnull = open("/dev/null", O_WRONLY);
      if (devnull >= 0) dup2(devnull, STDERR_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      if (chdir(workdir.c_str()) != 0) _exit(126);
      rlimit mem{1ull << 30, 1ull << 30};
      setrlimit(RLIMIT_AS, &mem);
      execvp(args[0], args.data());
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
  }

  ~HostProcess() { kill_now(); }

  HostProcess(const HostProcess&) = delete;
  HostProcess& operator=(const HostProcess&) = delete;

  bool alive() const { return pid_ > 0; }

  // Sends one line and waits at most `timeout_ms` for one line back.
  std::string exchange(const std::string& line, int timeout_ms) {
    std::string msg = line + "\n";
    const char* p = msg.data();
    std::size_t left = msg.size();
    while (left > 0) {
      const ssize_t w = write(in_, p, left);
      if (w < 0) {
        if (errno == EINTR) continue;
        kill_now();
        throw EvaluationError("heuristic process closed its input", drain());
      }
      p += w;
      left -= static_cast<std::size_t>(w);
    }
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string reply = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return reply;
      }
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) {
        const std::string partial = buffer_;
        kill_now();
        throw EvaluationError("heuristic timed out after " + std::to_string(timeout_ms) + " ms", partial);
      }
      pollfd pfd{out_, POLLIN, 0};
      const int wait_ms =
          static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
      const int rc = poll(&pfd, 1, wait_ms);
      if (rc < 0 && errno == EINTR) continue;
      if (rc <= 0) continue;
      char chunk[4096];
      const ssize_t r = read(out_, chunk, sizeof chunk);
      if (r <= 0) {
        const std::string partial = buffer_;
        kill_now();
        throw EvaluationError("heuristic process exited", partial);
      }
      buffer_.append(chunk, static_cast<std::size_t>(r));
    }
  }

 private:
  std::string drain() {
    std::string s = buffer_;
    buffer_.clear();
    return s;
  }

  void kill_now() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      int status = 0;
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
    if (in_ >= 0) close(in_);
    if (out_ >= 0) close(out_);
    in_ = out_ = -1;
  }

  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::string buffer_;
};

class ExternalEvaluator final : public Evaluator {
 public:
  ExternalEvaluator(HeuristicSpec spec, ExternalOptions options)
      : spec_(std::move(spec)), options_(std::move(options)) {
    if (options_.host_script.empty()) options_.host_script = default_host_script();
    if (options_.host_script.empty() || !fs::exists(options_.host_script)) {
      throw StrategistError("heuristic host script not found: '" + options_.host_script + "'");
    }
    if (options_.interpreter.empty()) throw StrategistError("no interpreter configured");
    // A crashed child must surface as an error, not kill us on the next write.
    signal(SIGPIPE, SIG_IGN);
    char tmpl[] = "/tmp/strategist-heuristic-XXXXXX";
    if (!mkdtemp(tmpl)) throw StrategistError("could not create a sandbox directory");
    workdir_ = tmpl;
    std::ofstream(workdir_ / "strategy.py") << spec_.source_text;
  }

  ~ExternalEvaluator() override {
    idle_.clear();
    std::error_code ec;
    fs::remove_all(workdir_, ec);
  }

  ValueEstimate evaluate(const State& state) const override {
    auto proc = acquire();
    std::string reply;
    try {
      reply = proc->exchange(json{{"state", request_state(state)}}.dump(), options_.timeout_ms);
    } catch (...) {
      release(nullptr);
      throw;
    }
    release(std::move(proc));
    return parse_reply(reply);
  }

 private:
  std::unique_ptr<HostProcess> spawn() const {
    std::vector<std::string> argv = options_.interpreter;
    argv.push_back(fs::absolute(options_.host_script).string());
    argv.push_back((workdir_ / "strategy.py").string());
    auto proc = std::make_unique<HostProcess>(argv, workdir_);
    const json hello{{"hello", {{"game", to_string(spec_.game)}, {"protocol", 1}}}};
    // Interpreter start-up is not charged to the per-call budget.
    const std::string reply = proc->exchange(hello.dump(), std::max(options_.timeout_ms, 10000));
    json j = json::parse(reply, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("ok", false) != true) {
      throw EvaluationError("heuristic handshake failed", reply);
    }
    return proc;
  }

  std::unique_ptr<HostProcess> acquire() const {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !idle_.empty() || live_ < options_.max_processes; });
    if (!idle_.empty()) {
      auto p = std::move(idle_.back());
      idle_.pop_back();
      return p;
    }
    ++live_;
    lock.unlock();
    try {
      return spawn();
    } catch (...) {
      lock.lock();
      --live_;
      cv_.notify_one();
      throw;
    }
  }

  void release(std::unique_ptr<HostProcess> proc) const {
    std::lock_guard lock(mu_);
    if (proc && proc->alive()) {
      idle_.push_back(std::move(proc));
    } else {
      --live_;
    }
    cv_.notify_one();
  }

  ValueEstimate parse_reply(const std::string& reply) const {
    ordered_json j = ordered_json::parse(reply, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw EvaluationError("malformed heuristic reply", reply);
    if (j.contains("error")) {
      throw EvaluationError("heuristic raised: " + j["error"].dump(), reply);
    }
    if (!j.contains("values") || !j["values"].is_array()) {
      throw EvaluationError("heuristic reply has no values", reply);
    }
    ValueEstimate v;
    v.raw = j["values"];
    for (const auto& x : v.raw) {
      if (!x.is_number()) throw EvaluationError("non-numeric heuristic value", reply);
      v.per_player.push_back(x.get<double>());
    }
    if (j.contains("intermediates")) {
      if (!j["intermediates"].is_object()) throw EvaluationError("intermediates must be an object", reply);
      v.intermediates = j["intermediates"];
    }
    return v;
  }

  HeuristicSpec spec_;
  ExternalOptions options_;
  fs::path workdir_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable std::vector<std::unique_ptr<HostProcess>> idle_;
  mutable int live_ = 0;
};

}  // namespace

HeuristicHandle load_heuristic(const HeuristicSpec& spec, const ExternalOptions& options) {
  if (spec.kind == HeuristicKind::kBuiltin) {
    const auto& registry = BuiltinRegistry::instance();
    const auto& info = registry.info(spec.source_text);
    if (info.game && *info.game != spec.game) {
      throw StrategistError("builtin '" + info.name + "' is for " + to_string(*info.game) + ", spec says " +
                            to_string(spec.game));
    }
    return HeuristicHandle(spec, registry.create(spec.source_text));
  }
  return HeuristicHandle(spec, std::make_shared<ExternalEvaluator>(spec, options));
}

}  // namespace strategist
