#include "mvstab/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace mvstab {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{})
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
    std::string out = "t";
    for (int j = 0; j < rec.d; ++j) out += ",m1_" + std::to_string(j);
    out += ",msq";
    if (!rec.m_p.empty()) out += ",mp";
    if (!rec.hold_err_p.empty()) out += ",hold_err";
    out += '\n';
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        out += format_double(rec.times[i]);
        auto m = rec.mean_at(i);
        for (int j = 0; j < rec.d; ++j) {
            out += ',';
            out += format_double(m[j]);
        }
        out += ',';
        out += format_double(rec.msq[i]);
        if (!rec.m_p.empty()) {
            out += ',';
            out += format_double(rec.m_p[i]);
        }
        if (!rec.hold_err_p.empty()) {
            out += ',';
            out += format_double(rec.hold_err_p[i]);
        }
        out += '\n';
    }
    if (rec.status != RunStatus::ok) {
        out += "# aborted: ";
        out += (rec.status == RunStatus::explosion) ? "explosion" : "non-finite state";
        out += " at t=" + format_double(rec.abort_time) +
               ", particle " + std::to_string(rec.abort_particle) + '\n';
    }
    return out;
}

std::string snapshot_csv(const EmpiricalMeasure& m) {
    std::string out;
    for (int i = 0; i < m.N; ++i) {
        auto r = m.row(i);
        for (int j = 0; j < m.d; ++j) {
            if (j) out += ',';
            out += format_double(r[j]);
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace mvstab
