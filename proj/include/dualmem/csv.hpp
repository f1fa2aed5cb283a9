#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dualmem/analysis.hpp"
#include "dualmem/errors.hpp"
#include "dualmem/gridsim.hpp"
#include "dualmem/memory.hpp"

namespace dualmem {

inline constexpr std::array<std::string_view, 10> kSizeSampleColumns = {
    "t",       "intersection_id", "m_s",      "m_L",      "m_q",
    "msize_dual", "msize_q",      "zeta_num", "zeta_den", "zeta_decimal"};

inline constexpr std::array<std::string_view, 11> kSweepColumns = {
    "scenario",  "action_count", "kappa_num", "kappa_den", "t_stage",  "n_or_M",
    "zeta1_num", "zeta1_den",    "zeta2_num", "zeta2_den", "shaded"};

namespace detail {

/// Shortest decimal form that round-trips; keeps CSV output deterministic.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), end);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell.push_back(ch);
        }
    }
    cells.push_back(cell);
    return cells;
}

template <typename Columns>
void check_header(const std::vector<std::string>& cells, const Columns& expected) {
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= cells.size() || cells[i] != expected[i]) {
            throw SchemaError("csv header mismatch at column '" + std::string(expected[i]) + "'");
        }
    }
    if (cells.size() != expected.size()) {
        throw SchemaError("csv header has unexpected extra column '" + cells[expected.size()] +
                          "'");
    }
}

inline std::int64_t parse_int_cell(const std::string& cell, std::string_view column) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw SchemaError("expected integer in column '" + std::string(column) + "', got '" +
                          cell + "'");
    return value;
}

inline double parse_double_cell(const std::string& cell, std::string_view column) {
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw SchemaError("expected number in column '" + std::string(column) + "', got '" +
                          cell + "'");
    return value;
}

}  // namespace detail

inline void write_size_sample_header(std::ostream& out) {
    for (std::size_t i = 0; i < kSizeSampleColumns.size(); ++i) {
        if (i) out << ',';
        out << kSizeSampleColumns[i];
    }
    out << '\n';
}

inline void write_size_sample_row(std::ostream& out, std::string_view intersection_id,
                                  const SizeSample& s) {
    out << s.t << ',' << intersection_id << ',' << s.m_s << ',' << s.m_l << ',' << s.m_q << ','
        << s.msize_dual << ',' << s.msize_q << ',';
    if (s.zeta) {
        out << s.zeta->numerator() << ',' << s.zeta->denominator() << ','
            << detail::format_double(to_double(*s.zeta));
    } else {
        out << "0,0,nan";
    }
    out << '\n';
}

inline void write_size_samples(std::ostream& out, std::string_view intersection_id,
                               std::span<const SizeSample> series) {
    write_size_sample_header(out);
    for (const SizeSample& s : series) write_size_sample_row(out, intersection_id, s);
}

inline void write_mean_samples(std::ostream& out, std::span<const MeanSample> series) {
    write_size_sample_header(out);
    for (const MeanSample& s : series) {
        out << s.t << ",mean," << detail::format_double(s.m_s) << ','
            << detail::format_double(s.m_l) << ',' << detail::format_double(s.m_q) << ','
            << detail::format_double(s.msize_dual) << ',' << detail::format_double(s.msize_q)
            << ',';
        if (s.zeta) {
            out << s.zeta->numerator() << ',' << s.zeta->denominator() << ','
                << detail::format_double(to_double(*s.zeta));
        } else {
            out << "0,0,nan";
        }
        out << '\n';
    }
}

/// Strict reader for integer-valued SizeSample series (per-intersection and
/// trace files). Exact inverse of write_size_samples.
inline std::vector<SizeSample> read_size_samples(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty csv: missing header");
    detail::check_header(detail::split_csv_line(line), kSizeSampleColumns);

    std::vector<SizeSample> series;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != kSizeSampleColumns.size())
            throw SchemaError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(kSizeSampleColumns.size()));
        SizeSample s;
        s.t = detail::parse_int_cell(cells[0], "t");
        s.m_s = detail::parse_int_cell(cells[2], "m_s");
        s.m_l = detail::parse_int_cell(cells[3], "m_L");
        s.m_q = detail::parse_int_cell(cells[4], "m_q");
        s.msize_dual = detail::parse_int_cell(cells[5], "msize_dual");
        s.msize_q = detail::parse_int_cell(cells[6], "msize_q");
        const std::int64_t num = detail::parse_int_cell(cells[7], "zeta_num");
        const std::int64_t den = detail::parse_int_cell(cells[8], "zeta_den");
        if (den != 0) s.zeta = Rational(num, den);
        series.push_back(s);
    }
    if (series.empty()) throw SchemaError("csv has no data rows");
    return series;
}

/// Tolerant reader used for charting: numeric columns come back as doubles,
/// so averaged series parse too.
struct SeriesTable {
    std::vector<double> t;
    std::vector<std::string> intersection_id;
    std::vector<double> m_s, m_l, m_q, msize_dual, msize_q;
};

inline SeriesTable read_series_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty csv: missing header");
    detail::check_header(detail::split_csv_line(line), kSizeSampleColumns);

    SeriesTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != kSizeSampleColumns.size())
            throw SchemaError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(kSizeSampleColumns.size()));
        table.t.push_back(detail::parse_double_cell(cells[0], "t"));
        table.intersection_id.push_back(cells[1]);
        table.m_s.push_back(detail::parse_double_cell(cells[2], "m_s"));
        table.m_l.push_back(detail::parse_double_cell(cells[3], "m_L"));
        table.m_q.push_back(detail::parse_double_cell(cells[4], "m_q"));
        table.msize_dual.push_back(detail::parse_double_cell(cells[5], "msize_dual"));
        table.msize_q.push_back(detail::parse_double_cell(cells[6], "msize_q"));
    }
    if (table.t.empty()) throw SchemaError("csv has no data rows");
    return table;
}

inline void write_sweep_rows(std::ostream& out, std::span<const SweepRow> rows) {
    for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
        if (i) out << ',';
        out << kSweepColumns[i];
    }
    out << '\n';
    for (const SweepRow& r : rows) {
        out << to_string(r.scenario) << ',' << r.action_count << ',' << r.kappa.numerator() << ','
            << r.kappa.denominator() << ',' << r.t_stage << ',' << r.n_or_m << ','
            << r.zeta1.numerator() << ',' << r.zeta1.denominator() << ',' << r.zeta2.numerator()
            << ',' << r.zeta2.denominator() << ',' << (r.shaded ? 1 : 0) << '\n';
    }
}

}  // namespace dualmem
