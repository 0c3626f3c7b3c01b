#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

// Subcommands simulate | fit | moments | defaultcorr | surface | deltas.
namespace corrsurf::cli {

enum ExitCode { ok = 0, numeric_error = 1, config_error = 2 };

// A configuration value that parsed but is unusable; `key` is the option name.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& msg)
        : std::runtime_error("--" + key + ": " + msg), key_(std::move(key))
    {
    }
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// "a:b:step" (inclusive) or "x,y,z".
std::vector<double> parse_grid(const std::string& key, const std::string& text);

// CSV goes to `out` unless --out names a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace corrsurf::cli
