#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "diploid/diffusion.hpp"
#include "diploid/exact_process.hpp"
#include "diploid/fleming_viot.hpp"
#include "diploid/ode_limit.hpp"
#include "diploid/potential.hpp"

namespace diploid {

/// Columns t,z1,z2,z3,n,x,y; x is NA on extinct states.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// Columns K,t,estimate,stderr,replicates.
void write_moment_table_csv(std::ostream& out, const std::vector<MomentEstimate>& table);
/// Columns t,n,x,y of the numerical genotype flow.
void write_ode_csv(std::ostream& out, const OdeSolution& solution);
/// Columns t,n,x,y of the closed forms on the given times.
void write_ode_closed_csv(std::ostream& out, const std::vector<double>& times, double n0,
                          double x0, double y0, const OdeParams& p);
/// Columns t, the two state components of the path's coordinates, absorbed.
void write_sde_csv(std::ostream& out, const SdePath& path);
/// key = value lines named after the DriftCheckReport fields.
void write_drift_report(std::ostream& out, const DriftCheckReport& report);
/// Columns time,bin_left,bin_right,mass; one row per bin and snapshot.
void write_snapshots_csv(std::ostream& out, const std::vector<QsdSnapshot>& snapshots);
/// Columns time,m0,m1,m_interior,resample_count.
void write_summary_csv(std::ostream& out, const std::vector<QsdSnapshot>& snapshots);
/// Bar chart of the snapshot histogram as a standalone SVG document.
void write_histogram_svg(std::ostream& out, const QsdSnapshot& snapshot, const std::string& title);

}  // namespace diploid
