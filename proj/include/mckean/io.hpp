/*
   Copyright 2026 The mckean-lab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mckean/grid.hpp"
#include "mckean/particles.hpp"
#include "mckean/pde.hpp"
#include "mckean/stationary.hpp"

namespace mckean {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace io {

/// Shortest round-trippable decimal representation; keeps outputs
/// byte-identical across runs on one platform.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Rectangular CSV with one header row.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw IoError("cannot open '" + path + "' for writing");
        columns_ = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) throw IoError("csv row width mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << fmt(values[i]);
        }
        out_ << '\n';
    }

    void row_with_label(const std::string& label, const std::vector<double>& values) {
        if (values.size() + 1 != columns_) throw IoError("csv row width mismatch");
        out_ << label;
        for (double v : values) out_ << ',' << fmt(v);
        out_ << '\n';
    }

    /// Trailing `# key=value` summary line (not part of the rectangle).
    void comment(const std::string& text) { out_ << "# " << text << '\n'; }

  private:
    std::ofstream out_;
    std::size_t columns_;
};

inline void write_density_csv(const std::string& path, const GridDensity& u) {
    CsvWriter csv(path, {"x", "u"});
    for (int i = 0; i < u.n(); ++i) csv.row({u.grid().x(i), u[i]});
}

inline void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
    std::vector<std::string> header{"t", "free_energy", "dissipation"};
    const int K = rec.moment_history.empty() ? 0 : rec.moment_history.front().order();
    for (int l = 1; l <= K; ++l) header.push_back("m" + std::to_string(l));
    CsvWriter csv(path, header);
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        std::vector<double> row{rec.times[k], rec.free_energy[k], rec.dissipation[k]};
        for (int l = 1; l <= K; ++l) row.push_back(rec.moment_history[k][l]);
        csv.row(row);
    }
}

inline void write_particle_csv(const std::string& path, const ParticleRecord& rec) {
    CsvWriter csv(path, {"t", "m1", "m2", "m3", "m4", "upsilonN"});
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        const auto& m = rec.moment_history[k];
        csv.row({rec.times[k], m[0], m[1], m[2], m[3], rec.upsilon[k]});
    }
}

inline void write_cloud_csv(const std::string& path, const std::vector<double>& xs) {
    CsvWriter csv(path, {"x"});
    for (double x : xs) csv.row({x});
}

inline void write_stationary_csv(const std::string& path, const EnumerationReport& rep) {
    CsvWriter csv(path, {"symmetry", "m1", "m2", "free_energy", "residual", "eta_norm"});
    for (const StationaryMeasure& m : rep.measures)
        csv.row_with_label(to_string(m.symmetry),
                           {m.moments[1], m.moments[2], m.free_energy.total, m.residual, m.eta_norm});
    // the count is a seed-battery count, not a completeness claim
    csv.comment(std::string("m3_status=") + to_string(rep.m3_status) +
                " ordering_ok=" + (rep.ordering_ok ? "true" : "false") +
                " seed_battery_count=" + std::to_string(rep.measures.size()));
}

}  // namespace io
}  // namespace mckean
