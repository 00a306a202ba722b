#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <thread>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "detail/external_tile.hpp"
#include "sarsub/grdf.hpp"

namespace sarsub {
namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
        s.replace(pos, from.size(), to);
}

// Runs `command` through /bin/sh in its own process group; returns the exit status.
int run_shell(const std::string& command, std::chrono::seconds timeout) {
    const pid_t pid = fork();
    if (pid < 0) fail(ErrorKind::external_failure, "fork failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        setpgid(0, 0);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    auto sleep = std::chrono::milliseconds(1);
    for (;;) {
        int status = 0;
        const pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            if (WIFEXITED(status)) return WEXITSTATUS(status);
            if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
            return -1;
        }
        if (r < 0 && errno != EINTR)
            fail(ErrorKind::external_failure, "waitpid failed: " + std::string(std::strerror(errno)));
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            fail(ErrorKind::timeout, "external command timed out after " + std::to_string(timeout.count()) +
                                         " s: " + command);
        }
        std::this_thread::sleep_for(sleep);
        sleep = std::min(sleep * 2, std::chrono::milliseconds(50));
    }
}

}  // namespace

std::string expand_command(const std::string& tmpl, std::span<const std::filesystem::path> inputs,
                           const std::filesystem::path& output) {
    std::string joined;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (i) joined += ' ';
        joined += shell_quote(inputs[i].string());
    }
    std::string cmd = tmpl;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        replace_all(cmd, "{input" + std::to_string(i) + "}", shell_quote(inputs[i].string()));
    replace_all(cmd, "{inputs}", joined);
    replace_all(cmd, "{output}", shell_quote(output.string()));
    return cmd;
}

IntensityRaster run_external(const ExternalCommand& cmd, std::span<const std::filesystem::path> inputs,
                             const std::filesystem::path& output, int height, int width) {
    if (cmd.command_template.find("{output}") == std::string::npos ||
        (cmd.command_template.find("{inputs}") == std::string::npos &&
         cmd.command_template.find("{input0}") == std::string::npos))
        fail(ErrorKind::validation, "external command template must reference {inputs} (or {input0}) and {output}");
    std::error_code ec;
    std::filesystem::remove(output, ec);
    const std::string command = expand_command(cmd.command_template, inputs, output);
    const int code = run_shell(command, cmd.timeout);
    if (code != 0)
        fail(ErrorKind::external_failure, "external command exited with code " + std::to_string(code) + ": " + command);

    if (!std::filesystem::exists(output))
        fail(ErrorKind::protocol_violation, "external command produced no output at '" + output.string() + "'");
    IntensityRaster out;
    try {
        out = read_intensity_grdf(output);
    } catch (const Error& e) {
        fail(ErrorKind::protocol_violation, "invalid output raster '" + output.string() + "': " + e.what());
    }
    if (out.height() != height || out.width() != width)
        fail(ErrorKind::protocol_violation, "output raster '" + output.string() + "' is " +
                                                std::to_string(out.height()) + "x" + std::to_string(out.width()) +
                                                ", expected " + std::to_string(height) + "x" + std::to_string(width));
    constexpr double kRangeTolerance = 1e-3;
    for (double& v : out.plane.data) {
        if (!std::isfinite(v))
            fail(ErrorKind::protocol_violation, "output raster '" + output.string() + "' has non-finite values");
        if (v < -kRangeTolerance || v > 1.0 + kRangeTolerance)
            fail(ErrorKind::protocol_violation, "output raster '" + output.string() + "' leaves [0, 1]");
        v = std::clamp(v, 0.0, 1.0);
    }
    out.state = RadiometricState::normalized_unit;
    return out;
}

namespace detail {

std::filesystem::path make_work_dir(const ExternalCommand& cmd) {
    static std::atomic<unsigned> counter{0};
    std::filesystem::path dir = cmd.workdir;
    if (dir.empty())
        dir = std::filesystem::temp_directory_path() /
              ("sarsub-ext-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create work directory '" + dir.string() + "': " + ec.message());
    return dir;
}

Plane run_external_tile(const ExternalCommand& cmd, std::span<const Plane> tiles,
                        const std::optional<ClipBounds>& bounds, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create tile directory '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> paths;
    for (std::size_t k = 0; k < tiles.size(); ++k) {
        IntensityRaster r;
        r.plane = tiles[k];
        r.state = RadiometricState::normalized_unit;
        r.clip_bounds = bounds;
        paths.push_back(dir / ("input_" + std::to_string(k) + ".grdf"));
        write_grdf(r, paths.back());
    }
    const auto output = dir / "output.grdf";
    auto out = run_external(cmd, paths, output, tiles[0].height, tiles[0].width);
    std::filesystem::remove_all(dir, ec);
    return std::move(out.plane);
}

}  // namespace detail
}  // namespace sarsub
