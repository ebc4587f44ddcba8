#include "diploid/output.hpp"

#include <algorithm>
#include <cstdio>

#include "diploid/config.hpp"

namespace diploid {

namespace {

std::string num(double v) { return format_number(v); }

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,z1,z2,z3,n,x,y\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const GenotypeCounts counts = trajectory.counts_at(i);
    const GenotypeState z = counts.rescaled();
    const NxyState nxy = to_nxy(z);
    out << num(trajectory.times[i]) << ',' << num(z.z1) << ',' << num(z.z2) << ',' << num(z.z3)
        << ',' << num(nxy.n) << ',' << (nxy.x ? num(*nxy.x) : std::string("NA")) << ','
        << num(hardy_weinberg_deviation(counts)) << '\n';
  }
}

void write_moment_table_csv(std::ostream& out, const std::vector<MomentEstimate>& table) {
  out << "K,t,estimate,stderr,replicates\n";
  for (const auto& e : table) {
    out << e.K << ',' << num(e.time_point) << ',' << num(e.value) << ',' << num(e.standard_error)
        << ',' << e.replicates << '\n';
  }
}

void write_ode_csv(std::ostream& out, const OdeSolution& solution) {
  out << "t,n,x,y\n";
  for (std::size_t i = 0; i < solution.times.size(); ++i) {
    const NxyState s = to_nxy(solution.states[i]);
    out << num(solution.times[i]) << ',' << num(s.n) << ',' << (s.x ? num(*s.x) : std::string("NA"))
        << ',' << num(s.y) << '\n';
  }
}

void write_ode_closed_csv(std::ostream& out, const std::vector<double>& times, double n0,
                          double x0, double y0, const OdeParams& p) {
  out << "t,n,x,y\n";
  for (double t : times) {
    out << num(t) << ',' << num(n_closed(t, n0, p)) << ',' << num(x_closed(t, x0)) << ','
        << num(y_closed(t, y0, n0, p)) << '\n';
  }
}

void write_sde_csv(std::ostream& out, const SdePath& path) {
  switch (path.kind) {
    case SdeKind::kAlleleCounts: out << "t,n_A,n_a,absorbed\n"; break;
    case SdeKind::kKolmogorov: out << "t,s1,s2,absorbed\n"; break;
    case SdeKind::kSizeFrequency:
    case SdeKind::kHaploid: out << "t,n,x,absorbed\n"; break;
  }
  const bool absorbed = path.absorption.kind != AbsorptionKind::kNone;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const bool flag = absorbed && path.times[i] >= path.absorption.time;
    out << num(path.times[i]) << ',' << num(path.states[i][0]) << ',' << num(path.states[i][1])
        << ',' << (flag ? to_string(path.absorption.kind) : "0") << '\n';
  }
}

void write_drift_report(std::ostream& out, const DriftCheckReport& report) {
  out << "max_gradient_residual = "
      << (report.max_gradient_residual ? num(*report.max_gradient_residual)
                                       : std::string("NA (alpha not symmetric)"))
      << '\n';
  out << "max_cross_partial_residual = " << num(report.max_cross_partial_residual) << '\n';
  out << "sample_size = " << report.sample_size << '\n';
  out << "sample_description = " << report.sample_description << '\n';
}

void write_snapshots_csv(std::ostream& out, const std::vector<QsdSnapshot>& snapshots) {
  out << "time,bin_left,bin_right,mass\n";
  for (const auto& snap : snapshots) {
    for (int b = 0; b < kHistogramBins; ++b) {
      out << num(snap.time) << ',' << num(bin_left(b)) << ',' << num(bin_right(b)) << ','
          << num(snap.masses[b]) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<QsdSnapshot>& snapshots) {
  out << "time,m0,m1,m_interior,resample_count\n";
  for (const auto& snap : snapshots) {
    out << num(snap.time) << ',' << num(snap.m0) << ',' << num(snap.m1) << ','
        << num(snap.m_interior) << ',' << snap.resample_count << '\n';
  }
}

void write_histogram_svg(std::ostream& out, const QsdSnapshot& snapshot, const std::string& title) {
  constexpr double kWidth = 640.0, kHeight = 400.0;
  constexpr double kLeft = 60.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double peak = std::max(1e-12, *std::max_element(snapshot.masses.begin(), snapshot.masses.end()));
  char buf[768];

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(title) << "</text>\n";
  for (int b = 0; b < kHistogramBins; ++b) {
    const double x0 = kLeft + bin_left(b) * plot_w;
    const double w = (bin_right(b) - bin_left(b)) * plot_w;
    const double h = snapshot.masses[b] / peak * plot_h;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"steelblue\" "
                  "stroke=\"white\" stroke-width=\"0.3\"/>\n",
                  x0, kTop + plot_h - h, w, h);
    out << buf;
  }
  // Axes, ticks and labels.
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h, kLeft, kTop, kLeft,
                kTop + plot_h);
  out << buf;
  for (int i = 0; i <= 10; ++i) {
    const double x = kLeft + i / 10.0 * plot_w;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.1f</text>\n",
                  x, kTop + plot_h, x, kTop + plot_h + 5, x, kTop + plot_h + 18, i / 10.0);
    out << buf;
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = kTop + plot_h - i / 4.0 * plot_h;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3f</text>\n",
                  kLeft - 5, y, kLeft, y, kLeft - 8, y + 4, peak * i / 4.0);
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">allele A frequency x "
                "(t = %.6g, m0 = %.4f, m1 = %.4f, interior = %.4f)</text>\n"
                "<text x=\"16\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 16 %.1f)\">"
                "fraction of particles</text>\n",
                kLeft + plot_w / 2, kHeight - 12, snapshot.time, snapshot.m0, snapshot.m1,
                snapshot.m_interior, kTop + plot_h / 2, kTop + plot_h / 2);
  out << buf;
  out << "</svg>\n";
}

}  // namespace diploid
