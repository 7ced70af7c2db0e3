// Acceptance battery: one line per criterion, exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <sys/wait.h>

#include "suite.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run_cli(const std::string& args) {
    Run r;
    const std::string cmd = std::string(CONECANON_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

int failures = 0;

void line(const std::string& id, bool pass, const std::string& title, const std::string& detail) {
    failures += !pass;
    std::printf("criterion %s %s %s: %s\n", id.c_str(), pass ? "PASS" : "FAIL", title.c_str(), detail.c_str());
    std::fflush(stdout);
}

} // namespace

int main() {
    using conecanon::suite::Check;
    // wall-clock limits in seconds
    const std::map<std::string, double> limits = {{"1", 10}, {"2", 1}, {"3", 60}, {"8", 300}, {"12", 10}};

    conecanon::suite::Options opt;
    conecanon::suite::run(opt, [&](const Check& c) {
        bool pass = c.pass;
        std::string detail = c.detail;
        if (auto it = limits.find(c.id); it != limits.end()) {
            char t[96];
            std::snprintf(t, sizeof t, "; %.2fs of %.0fs", c.seconds, it->second);
            detail += t;
            pass = pass && c.seconds < it->second;
        }
        line(c.id, pass, c.title, detail);
    });

    const auto t0 = std::chrono::steady_clock::now();
    const Run a = run_cli("suite --quick"), b = run_cli("suite --quick");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char d[160];
    std::snprintf(d, sizeof d, "exit %d and %d, %s stdout, %.1fs for two runs of 600s", a.code, b.code,
                  a.out == b.out ? "identical" : "differing", secs);
    line("13", a.code == 0 && b.code == 0 && a.out == b.out && secs < 600, "quick suite is green and reproducible", d);

    std::printf("%d criteria failed\n", failures);
    return failures ? 1 : 0;
}
