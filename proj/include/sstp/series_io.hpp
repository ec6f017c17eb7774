// series_io.hpp: CSV serialization of population curves
//
// Schema: header `t,sigma_z_mean,sigma_z_stderr`, one row per grid time,
// values printed with 17 significant digits.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sstp/estimator.hpp"

namespace sstp {

void write_population_csv(std::ostream& out, const PopulationSeries& series);
void write_population_csv(const std::filesystem::path& path, const PopulationSeries& series);

// `t` followed by one variance-ratio column per scheme after the first.
void write_ratio_csv(const std::filesystem::path& path, const SchemeComparison& comparison);

std::string format_double(double v);

}  // namespace sstp
