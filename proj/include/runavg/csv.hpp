#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "runavg/errors.hpp"
#include "runavg/grid.hpp"

namespace runavg {

/// I/O failure on a signal file (unwritable path, truncated file, ...).
struct io_error : error {
    using error::error;
};

/// Write a signal as `t,value` rows. %.17g round-trips doubles exactly, so a
/// re-ingested file reproduces the in-memory samples bit for bit.
inline void write_signal_csv(const std::filesystem::path& path, const UniformSignal& signal) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw io_error("cannot open " + path.string() + " for writing");
    std::fputs("t,value\n", f);
    bool ok = true;
    for (std::size_t k = 0; k < signal.size(); ++k)
        ok = ok && std::fprintf(f, "%.17g,%.17g\n", signal.grid().time(k), signal[k]) > 0;
    ok = ok && std::fclose(f) == 0;
    if (!ok) throw io_error("short write to " + path.string());
}

/// Read a `t,value` file back into a signal. The time column must be a
/// uniform grid: every t_k is checked against t0 + k * dt_hat (dt_hat from the
/// end points) with relative tolerance 1e-9.
inline UniformSignal read_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw data_error(path.string() + ": empty file");
    if (line.rfind("t,value", 0) != 0)
        throw data_error(path.string() + ": expected header 't,value', got '" + line + "'");

    std::vector<double> ts, vs;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw data_error(path.string() + ": row " + std::to_string(row) + " is not 't,value'");
        char* end = nullptr;
        errno = 0;
        const double t = std::strtod(line.c_str(), &end);
        if (end != line.c_str() + comma || errno == ERANGE)
            throw data_error(path.string() + ": bad time in row " + std::to_string(row));
        const double v = std::strtod(line.c_str() + comma + 1, &end);
        if (end == line.c_str() + comma + 1 || errno == ERANGE)
            throw data_error(path.string() + ": bad value in row " + std::to_string(row));
        if (!std::isfinite(t) || !std::isfinite(v))
            throw data_error(path.string() + ": non-finite entry in row " + std::to_string(row));
        ts.push_back(t);
        vs.push_back(v);
    }
    if (ts.size() < 2) throw data_error(path.string() + ": need at least 2 rows");

    const double t0 = ts.front();
    const double dt = (ts.back() - t0) / static_cast<double>(ts.size() - 1);
    if (!(dt > 0.0)) throw data_error(path.string() + ": time column is not increasing");
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double expect = t0 + static_cast<double>(k) * dt;
        if (std::abs(ts[k] - expect) > 1e-9 * (std::abs(ts[k]) + dt))
            throw data_error(path.string() + ": non-uniform grid at row " + std::to_string(k + 2) + " (t = " +
                             std::to_string(ts[k]) + ", expected " + std::to_string(expect) + ")");
    }
    try {
        return UniformSignal(UniformGrid(t0, dt, ts.size()), std::move(vs));
    } catch (const config_error& e) {
        throw data_error(path.string() + ": " + e.what());
    }
}

} // namespace runavg
