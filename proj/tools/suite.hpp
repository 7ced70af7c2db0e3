#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace conecanon::suite {

struct Check {
    std::string id;      // "1".."12", with a suffix for companion checks
    std::string title;
    bool pass = false;
    std::string detail;  // fixed-precision numbers only, so reports are byte-stable
    double seconds = 0;  // never serialized into reports
};

struct Options {
    bool quick = false;  // smaller sample counts, same checks and thresholds
    std::uint64_t seed = 1;
};

using Progress = std::function<void(const Check&)>;

std::vector<Check> run(const Options& opt, const Progress& progress = {});

// One line per check; identical for identical options.
std::string text_report(const Options& opt, const std::vector<Check>& checks);
std::string json_report(const Options& opt, const std::vector<Check>& checks);

} // namespace conecanon::suite
