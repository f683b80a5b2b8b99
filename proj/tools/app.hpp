#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "modopo/model.hpp"

namespace modopo::app {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED2024u;

/// Command-line overrides. Unset optionals fall back to the per-command
/// defaults (the figure captions for fig1-fig4).
struct RunConfig {
    std::optional<std::filesystem::path> config_path;
    std::optional<double> fbar;
    std::optional<double> f1;
    std::optional<double> delta;
    std::optional<double> lambda;
    std::filesystem::path out_dir{"."};
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::size_t> traj;
    std::optional<double> dt;
    bool full = false;
    unsigned workers = 1;
    std::size_t n_max = 0;
};

struct RunReport {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
    std::vector<std::string> summary;
};

/// Resolved model for one command: defaults, then the config file, then flags.
struct ResolvedModel {
    DimensionlessConfig config;
    std::optional<double> lambda_over_gamma;
    ModelParams params;
};

[[nodiscard]] ResolvedModel resolve_model(const RunConfig& cfg, DimensionlessConfig defaults,
                                          std::optional<double> default_lambda = std::nullopt);

/// Throws std::filesystem::filesystem_error if the output directory is
/// missing and InvalidParameter if a numeric override is out of range.
void check_run_config(const RunConfig& cfg);

RunReport run_semiclassical(const RunConfig& cfg);
RunReport run_variance(const RunConfig& cfg);
RunReport run_sweep(const RunConfig& cfg);
RunReport run_positivep(const RunConfig& cfg);
RunReport run_qsd(const RunConfig& cfg);
RunReport run_compare(const RunConfig& cfg);
RunReport run_fig1(const RunConfig& cfg);
RunReport run_fig2(const RunConfig& cfg);
RunReport run_fig3(const RunConfig& cfg);
RunReport run_fig4(const RunConfig& cfg);

/// Full command-line entry point; returns the process exit code.
int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modopo::app
