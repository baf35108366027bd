#pragma once

#include <string>
#include <vector>

namespace lanesim {

// Per-lane x-vs-t diagrams from a trajectory CSV; trajectories are drawn as
// polylines split into speed-colored runs. Returns the written file paths
// (one SVG per lane present; at least one empty diagram for an empty log).
std::vector<std::string> plot_time_space(const std::string& trajectory_csv,
                                         const std::string& out_dir);

// Scatter of (density, flow) per input CSV, one color and legend entry per
// file. Empty aggregation windows (zero flow and speed) are not drawn.
std::string plot_flow_density(const std::vector<std::string>& loop_csvs,
                              const std::vector<std::string>& labels,
                              const std::string& out_path);

// alpha* points over (lane count, T_up) plus their least-squares plane,
// drawn in an isometric projection.
std::string plot_alpha_surface(const std::string& alpha_star_csv,
                               const std::string& out_path);

}  // namespace lanesim
