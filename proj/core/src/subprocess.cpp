#include "memrepair/subprocess.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/personality.h>
#include <sys/wait.h>
#include <unistd.h>

#include "memrepair/error.hpp"

namespace memrepair::subprocess {

namespace {

[[noreturn]] void child_exec(const RunSpec& spec, int out_fd, int err_fd) {
    setpgid(0, 0);

    if (spec.disable_aslr) {
        // Best effort: containers commonly forbid personality(2); heap
        // addresses under the sanitizer allocator stay stable regardless.
        personality(ADDR_NO_RANDOMIZE);
    }

    int in_fd = open(spec.stdin_file.empty() ? "/dev/null" : spec.stdin_file.c_str(), O_RDONLY);
    if (in_fd < 0) _exit(127);
    dup2(in_fd, STDIN_FILENO);
    dup2(out_fd, STDOUT_FILENO);
    dup2(err_fd, STDERR_FILENO);
    close(in_fd);
    close(out_fd);
    close(err_fd);

    if (!spec.cwd.empty() && chdir(spec.cwd.c_str()) != 0) _exit(127);
    for (const auto& [k, v] : spec.env) setenv(k.c_str(), v.c_str(), 1);

    if (!spec.shell_command.empty()) {
        execl("/bin/sh", "sh", "-c", spec.shell_command.c_str(), static_cast<char*>(nullptr));
    } else {
        std::vector<char*> argv;
        argv.reserve(spec.argv.size() + 1);
        for (const auto& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
    }
    _exit(127);
}

} // namespace

RunResult run_process(const RunSpec& spec) {
    if (spec.shell_command.empty() && spec.argv.empty())
        throw UsageError("run_process: nothing to execute");

    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw Error("pipe() failed: " + std::string(strerror(errno)), ExitCode::Internal);

    pid_t pid = fork();
    if (pid < 0) throw Error("fork() failed: " + std::string(strerror(errno)), ExitCode::Internal);
    if (pid == 0) {
        close(out_pipe[0]);
        close(err_pipe[0]);
        child_exec(spec, out_pipe[1], err_pipe[1]);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);

    RunResult result;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(spec.timeout_seconds);

    struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    std::string* sinks[2] = {&result.stdout_text, &result.stderr_text};
    int open_streams = 2;
    char buf[8192];

    while (open_streams > 0) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            kill(-pid, SIGKILL);
            break;
        }
        int wait_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
        int rc = poll(fds, 2, std::min(wait_ms, 1000));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || (fds[i].revents & (POLLIN | POLLHUP)) == 0) continue;
            ssize_t n = read(fds[i].fd, buf, sizeof buf);
            if (n > 0) {
                sinks[i]->append(buf, static_cast<size_t>(n));
            } else {
                close(fds[i].fd);
                fds[i].fd = -1;
                --open_streams;
            }
        }
    }
    if (fds[0].fd >= 0) close(fds[0].fd);
    if (fds[1].fd >= 0) close(fds[1].fd);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (result.timed_out) {
        kill(-pid, SIGKILL); // sweep any stragglers in the group
    } else if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.term_signal = WTERMSIG(status);
        result.exit_code = 128 + result.term_signal;
    }
    return result;
}

} // namespace memrepair::subprocess
