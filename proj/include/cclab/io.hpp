#pragma once

#include <string>
#include <vector>

#include "cclab/grid.hpp"
#include "cclab/measure.hpp"
#include "cclab/transport.hpp"

namespace cclab {

// Shortest decimal rendering that round-trips a double ("%.17g" trimmed).
// All text emitters below use it, so identical data yields identical bytes.
std::string format_double(double v);

// Binary field snapshot. Layout (all little-endian):
//   magic "CCLB", u32 version = 1, u32 dim,
//   per axis: u32 extent, f64 lo, f64 hi,
//   then extent-product f64 values, row-major (last axis fastest).
void write_field_binary(const std::string& path, const GridChart& chart,
                        const std::vector<double>& values);
void write_field_binary(const std::string& path, const DensityField& f);
void write_field_binary(const std::string& path, const ScalarField& f);

// Reads a snapshot written by write_field_binary. The group model is not part
// of the format, so the caller supplies it; the chart is rebuilt from the
// header (Periodic for torus models, Reflecting otherwise).
DensityField read_field_binary(const std::string& path, const GroupModel& model);

// CSV with one row per cell: coordinates, then the value.
void write_field_csv(const std::string& path, const GridChart& chart,
                     const std::vector<double>& values);

// CSV triplets i, j, mass of a coupling.
void write_plan_csv(const std::string& path, const TransportPlan& plan);

// CSV with one row per atom: coordinates, then the weight.
void write_measure_csv(const std::string& path, const PointCloudMeasure& mu);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace cclab
