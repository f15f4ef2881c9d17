// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <fcntl.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "solomon/sandbox/sandbox.hpp"

extern char** environ;

namespace solomon::sandbox {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kFileSizeCap = uint64_t{1} << 30;

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Drops the workdir prefix so logs read the same wherever the run happened.
std::string relativize(std::string text, const fs::path& workdir) {
    std::error_code ec;
    std::vector<std::string> prefixes = {workdir.string() + "/"};
    const auto canon = fs::canonical(workdir, ec);
    if (!ec && canon != workdir) prefixes.push_back(canon.string() + "/");
    for (const auto& prefix : prefixes) {
        std::size_t pos = 0;
        while ((pos = text.find(prefix, pos)) != std::string::npos) text.erase(pos, prefix.size());
    }
    return text;
}

std::optional<std::string> resolve(const std::string& command) {
    if (command.empty()) return std::nullopt;
    if (command.find('/') != std::string::npos)
        return access(command.c_str(), X_OK) == 0 ? std::optional(command) : std::nullopt;
    const char* path = std::getenv("PATH");
    std::stringstream dirs(path ? path : "/usr/bin:/bin");
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
        const std::string candidate = (dir.empty() ? std::string(".") : dir) + "/" + command;
        struct stat st {};
        if (stat(candidate.c_str(), &st) == 0 && S_ISREG(st.st_mode) && access(candidate.c_str(), X_OK) == 0)
            return candidate;
    }
    return std::nullopt;
}

ExecutionOutcome spawn_failed(const std::string& why, std::chrono::steady_clock::time_point start) {
    ExecutionOutcome out;
    out.status = ExecStatus::spawn_failure;
    out.stderr_text = "spawn failure: " + why + "\n";
    out.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace

const char* to_string(ExecStatus status) {
    switch (status) {
        case ExecStatus::ok: return "ok";
        case ExecStatus::nonzero_exit: return "nonzero_exit";
        case ExecStatus::timeout: return "timeout";
        case ExecStatus::no_artifact: return "no_artifact";
        case ExecStatus::spawn_failure: return "spawn_failure";
    }
    return "spawn_failure";
}

ExecStatus exec_status_from_string(const std::string& name) {
    for (auto s : {ExecStatus::ok, ExecStatus::nonzero_exit, ExecStatus::timeout, ExecStatus::no_artifact,
                   ExecStatus::spawn_failure})
        if (name == to_string(s)) return s;
    throw std::invalid_argument("unknown execution status '" + name + "'");
}

std::string tail_bytes(const std::string& text, std::size_t cap, bool* truncated) {
    if (truncated) *truncated = false;
    if (text.size() <= cap) return text;
    if (truncated) *truncated = true;
    const std::string probe = "[... truncated " + std::to_string(text.size()) + " bytes ...]\n";
    if (probe.size() >= cap) return text.substr(text.size() - cap);
    std::size_t start = text.size() - (cap - probe.size());
    // Start on a line boundary when the window holds one.
    if (text[start - 1] != '\n') {
        const auto nl = text.find('\n', start);
        if (nl != std::string::npos && nl + 1 < text.size()) start = nl + 1;
    }
    return "[... truncated " + std::to_string(start) + " bytes ...]\n" + text.substr(start);
}

ExecutionOutcome execute(const std::string& source, const ExecutionLimits& limits, const fs::path& workdir) {
    const auto start = std::chrono::steady_clock::now();
    if (limits.interpreter.empty()) return spawn_failed("no interpreter configured", start);
    std::error_code ec;
    if (!fs::is_directory(workdir, ec)) return spawn_failed("workdir " + workdir.string() + " does not exist", start);
    if (!fs::is_empty(workdir, ec)) return spawn_failed("workdir " + workdir.string() + " is not empty", start);
    const auto program = resolve(limits.interpreter.front());
    if (!program) return spawn_failed("interpreter '" + limits.interpreter.front() + "' not found", start);

    const std::string source_name = "source." + limits.source_extension;
    {
        std::ofstream out(workdir / source_name, std::ios::binary);
        out << source;
    }

    // Everything the child touches is prepared before fork.
    std::vector<std::string> args(limits.interpreter.begin(), limits.interpreter.end());
    args.push_back(source_name);
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    std::vector<std::string> env_store;
    for (char** e = environ; *e; ++e) {
        const std::string entry(*e);
        if (entry.rfind("PYTHONHASHSEED=", 0) == 0 || entry.rfind("PYTHONDONTWRITEBYTECODE=", 0) == 0) continue;
        env_store.push_back(entry);
    }
    env_store.push_back("PYTHONHASHSEED=0");
    env_store.push_back("PYTHONDONTWRITEBYTECODE=1");
    std::vector<char*> envp;
    for (auto& e : env_store) envp.push_back(e.data());
    envp.push_back(nullptr);
    const std::string dir = workdir.string();
    const std::string out_path = (workdir / "stdout.txt").string();
    const std::string err_path = (workdir / "stderr.txt").string();

    const int out_fd = open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    const int err_fd = open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    int status_pipe[2];
    if (out_fd < 0 || err_fd < 0 || pipe2(status_pipe, O_CLOEXEC) != 0) {
        if (out_fd >= 0) close(out_fd);
        if (err_fd >= 0) close(err_fd);
        return spawn_failed(std::string("cannot prepare child io: ") + std::strerror(errno), start);
    }

    const pid_t pid = fork();
    if (pid < 0) {
        close(out_fd);
        close(err_fd);
        close(status_pipe[0]);
        close(status_pipe[1]);
        return spawn_failed(std::string("fork: ") + std::strerror(errno), start);
    }
    if (pid == 0) {
        setpgid(0, 0);
        if (limits.memory_bytes > 0) {
            const rlimit as{limits.memory_bytes, limits.memory_bytes};
            setrlimit(RLIMIT_AS, &as);
        }
        const rlimit fsize{kFileSizeCap, kFileSizeCap};
        setrlimit(RLIMIT_FSIZE, &fsize);
        const int devnull = open("/dev/null", O_RDONLY);
        if (devnull >= 0) dup2(devnull, 0);
        dup2(out_fd, 1);
        dup2(err_fd, 2);
        int err = 0;
        if (chdir(dir.c_str()) != 0) {
            err = errno;
        } else {
            execve(program->c_str(), argv.data(), envp.data());
            err = errno;
        }
        [[maybe_unused]] auto n = write(status_pipe[1], &err, sizeof err);
        _exit(127);
    }
    setpgid(pid, pid);
    close(out_fd);
    close(err_fd);
    close(status_pipe[1]);

    int wait_status = 0;
    bool timed_out = false;
    const auto deadline = start + std::chrono::duration<double>(limits.timeout_seconds);
    for (;;) {
        const pid_t r = waitpid(pid, &wait_status, WNOHANG);
        if (r == pid) break;
        if (r < 0 && errno != EINTR) break;
        if (std::chrono::steady_clock::now() >= deadline) {
            timed_out = true;
            kill(-pid, SIGKILL);
            waitpid(pid, &wait_status, 0);
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    // Reap anything the program left running in its group.
    kill(-pid, SIGKILL);

    int child_errno = 0;
    const bool exec_failed = read(status_pipe[0], &child_errno, sizeof child_errno) == sizeof child_errno;
    close(status_pipe[0]);

    ExecutionOutcome out;
    out.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (exec_failed) {
        auto failed = spawn_failed(std::string("exec ") + *program + ": " + std::strerror(child_errno), start);
        failed.duration_seconds = out.duration_seconds;
        return failed;
    }
    out.stdout_text = tail_bytes(relativize(read_text(workdir / "stdout.txt"), workdir), limits.log_cap_bytes,
                                 &out.stdout_truncated);
    out.stderr_text = tail_bytes(relativize(read_text(workdir / "stderr.txt"), workdir), limits.log_cap_bytes,
                                 &out.stderr_truncated);

    if (timed_out) {
        out.status = ExecStatus::timeout;
        out.warnings.push_back("terminated after " + std::to_string(limits.timeout_seconds) + " s");
    } else if (WIFEXITED(wait_status)) {
        out.exit_code = WEXITSTATUS(wait_status);
        out.status = *out.exit_code == 0 ? ExecStatus::ok : ExecStatus::nonzero_exit;
    } else if (WIFSIGNALED(wait_status)) {
        out.exit_code = 128 + WTERMSIG(wait_status);
        out.status = ExecStatus::nonzero_exit;
        out.warnings.push_back(std::string("killed by signal ") + strsignal(WTERMSIG(wait_status)));
    } else {
        out.status = ExecStatus::nonzero_exit;
    }

    std::vector<fs::path> found;
    for (auto it = fs::recursive_directory_iterator(workdir, fs::directory_options::skip_permission_denied, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (!it->is_regular_file(ec)) continue;
        const std::string ext = lower(it->path().extension().string());
        if (std::find(limits.artifact_extensions.begin(), limits.artifact_extensions.end(), ext) !=
            limits.artifact_extensions.end())
            found.push_back(it->path());
    }
    std::sort(found.begin(), found.end());
    for (const auto& p : found) out.artifacts.push_back({fs::relative(p, workdir).generic_string(), read_bytes(p)});
    if (!out.artifacts.empty()) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < out.artifacts.size(); ++i)
            if (out.artifacts[i].payload.size() > out.artifacts[pick].payload.size()) pick = i;
        out.primary = pick;
        if (out.artifacts.size() > 1)
            out.warnings.push_back("AmbiguousArtifact: " + std::to_string(out.artifacts.size()) +
                                   " layout files, selected the largest (" + out.artifacts[pick].name + ")");
    }
    if (out.status == ExecStatus::ok && out.artifacts.empty()) out.status = ExecStatus::no_artifact;
    return out;
}

WorkerPool::WorkerPool(int max_workers) : max_workers_(std::max(1, max_workers)), slots_(std::max(1, max_workers)) {}

ExecutionOutcome WorkerPool::execute(const std::string& source, const ExecutionLimits& limits,
                                     const fs::path& workdir) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{slots_};
    return sandbox::execute(source, limits, workdir);
}

}  // namespace solomon::sandbox
