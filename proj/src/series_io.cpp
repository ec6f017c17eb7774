// series_io.cpp

#include "sstp/series_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace sstp {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_population_csv(std::ostream& out, const PopulationSeries& series) {
    out << "t,sigma_z_mean,sigma_z_stderr\n";
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        out << format_double(series.times[k]) << ',' << format_double(series.mean[k]) << ','
            << format_double(series.std_error[k]) << '\n';
    }
}

void write_population_csv(const std::filesystem::path& path, const PopulationSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_population_csv(out, series);
}

void write_ratio_csv(const std::filesystem::path& path, const SchemeComparison& comparison) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << 't';
    for (std::size_t s = 1; s < comparison.schemes.size(); ++s) {
        out << ",var_ratio_" << s << '_' << comparison.schemes[s].name();
    }
    out << '\n';
    const auto& times = comparison.series.front().times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << format_double(times[k]);
        for (std::size_t s = 1; s < comparison.schemes.size(); ++s) {
            out << ',' << format_double(comparison.variance_ratio[s][k]);
        }
        out << '\n';
    }
}

}  // namespace sstp
