#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "betaforge/gallery.hpp"

namespace betaforge {

/// One batch job. Serialises to the schema accepted by --config.
struct JobConfig {
    /// gallery_list, gallery_show, verify, solve or deform.
    std::string command;
    /// Named inputs: check, metric, pair, profile, profile_file, prop, theorem,
    /// condition, then_check, entry.
    std::map<std::string, std::string> ids;
    Params params;   // --param key=value list
    Params options;  // numeric flags (dim, mubar, mu, a, n, E, F, ...)
    std::uint64_t seed = 1;
    int count = 100;
    std::optional<double> tol;
    std::string output;
    bool json = false;
    bool timing = false;
    int threads = 0;

    [[nodiscard]] nlohmann::json to_json() const;
    /// ConfigError on unknown keys or wrong types.
    static JobConfig from_json(const nlohmann::json& j);
    bool operator==(const JobConfig&) const = default;
};

/// "k=v" items, each possibly a comma list; ConfigError on malformed input.
Params parse_param_list(const std::vector<std::string>& items);

/// Exit codes: 0 pass, 1 check failure or numerical failure, 2 config error.
int run_job(const JobConfig& job, std::ostream& out, std::ostream& err);
/// Parse arguments (without the program name) and run the job.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace betaforge
