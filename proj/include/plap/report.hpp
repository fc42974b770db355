#pragma once

// Text artifacts of a run: the solution CSV and the sectioned report.

#include <filesystem>
#include <span>
#include <string>

#include "plap/pipeline.hpp"

namespace plap {

/// Header "t,u,du,residual", one row per node, 17 significant digits.
/// Throws std::invalid_argument when the certificate carries no solution.
std::string solution_csv(const Certificate& cert);

/// Sections HYPOTHESES, BOUNDS, SOLUTION, CERTIFICATE.
std::string render_report(const Certificate& cert);

/// Header "hbar,status,residual,reason", one row per sweep value.
std::string sweep_csv(std::span<const SweepRow> rows);

/// Throws IoError when the file cannot be written completely.
void write_text(const std::filesystem::path& path, const std::string& text);

/// report.txt always, solution.csv only with a solution. Creates dir.
void export_certificate(const Certificate& cert, const std::filesystem::path& dir);

}  // namespace plap
