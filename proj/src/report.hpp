#pragma once

// Artifact writers shared by the CLI commands: deterministic CSV, SVG plots,
// run manifests with content digests. Internal to the CLI layer.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "omdp/cli.hpp"
#include "omdp/mdp.hpp"
#include "omdp/regret.hpp"

namespace omdp::cli {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double x);

void write_regret_csv(const std::string& path, const RegretCurve& curve);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

/// Single-series line plot (used for the average-regret curve).
void write_line_svg(const std::string& path, const std::string& title,
                    const std::vector<double>& x, const std::vector<double>& y);

/// Two-series line plot (algorithm vs offline cumulative reward).
void write_two_line_svg(const std::string& path, const std::string& title,
                        const std::vector<double>& x, const std::vector<double>& y1,
                        const std::string& label1, const std::vector<double>& y2,
                        const std::string& label2);

/// Per-state arrow glyphs for a two-action (east/north) grid policy; one
/// polygon per state, pointing toward the more probable action and scaled by
/// its probability.
void write_policy_svg(const std::string& path, const StochasticPolicy& policy,
                      int width, int height);

std::string sha256_file(const std::string& path);

/// Manifest of everything inside `dir` (except the manifest itself), with
/// sizes and digests, plus the echoed config and run status.
nlohmann::json build_manifest(const std::string& dir, const nlohmann::json& config,
                              const std::string& started, const std::string& finished,
                              const std::string& status);

std::string timestamp_utc();

}  // namespace omdp::cli
