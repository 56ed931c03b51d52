#pragma once

#include <string>

#include "table.hpp"

namespace echolab::cli {

/// Renders a static SVG for a table: kind is "rho", "fidelity" or
/// "convergence" (log-log with fitted slope).
void emit_plot(const Table& t, const std::string& kind, const std::string& svg_path);

}  // namespace echolab::cli
