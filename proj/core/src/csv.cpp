// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "wtflow/error.hpp"

namespace wtflow {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field) {
    double v = 0.0;
    const char* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw FormatError("csv: not a number: '" + field + "'");
    return v;
}

long long parse_integer(const std::string& field) {
    long long v = 0;
    const char* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw FormatError("csv: not an integer: '" + field + "'");
    return v;
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError("csv: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void write_line(std::ofstream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

} // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    write_line(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw InvalidArgument("csv: row width does not match header");
        write_line(out, row);
    }
    if (!out) throw FormatError("write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(table.header.size()) + " fields");
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw FormatError(path.string() + ": missing header row");
    return table;
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
    CsvTable t{{"image_id", "label"}, {}};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw InvalidArgument("labels must be 0 or 1");
        t.rows.push_back({std::to_string(i), std::to_string(labels[i])});
    }
    write_csv(path, t);
}

std::vector<int> read_labels(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t id_col = t.column("image_id");
    const std::size_t label_col = t.column("label");
    std::vector<int> labels;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (parse_integer(t.rows[i][id_col]) != static_cast<long long>(i)) {
            throw FormatError(path.string() + ": image ids must run 0..N-1 in order");
        }
        const long long l = parse_integer(t.rows[i][label_col]);
        if (l != 0 && l != 1) throw FormatError(path.string() + ": labels must be 0 or 1");
        labels.push_back(static_cast<int>(l));
    }
    return labels;
}

void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& epoch_loss) {
    CsvTable t{{"epoch", "mean_loss"}, {}};
    for (std::size_t e = 0; e < epoch_loss.size(); ++e) t.rows.push_back({std::to_string(e), format_double(epoch_loss[e])});
    write_csv(path, t);
}

void write_scores_csv(const std::filesystem::path& path, const std::vector<int>& labels,
                      const std::vector<double>& scores) {
    if (labels.size() != scores.size()) throw InvalidArgument("scores and labels differ in length");
    CsvTable t{{"image_id", "label", "image_score"}, {}};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        t.rows.push_back({std::to_string(i), std::to_string(labels[i]), format_double(scores[i])});
    }
    write_csv(path, t);
}

void write_trajectory_csv(const std::filesystem::path& path, const BatchTrajectory& traj, std::size_t max_dims) {
    const std::size_t d = traj.states.front().cols();
    const std::size_t k = std::min(d, max_dims);
    CsvTable t{{"sample_id", "step", "t", "norm"}, {}};
    for (std::size_t j = 0; j < k; ++j) t.header.push_back("x_" + std::to_string(j));
    for (std::size_t b = 0; b < traj.batch_size(); ++b) {
        for (std::size_t s = 0; s < traj.states.size(); ++s) {
            std::vector<std::string> row{std::to_string(b), std::to_string(traj.steps[s]),
                                         format_double(traj.times[s]), format_double(traj.norms[s][b])};
            const auto x = traj.states[s].row(b);
            for (std::size_t j = 0; j < k; ++j) row.push_back(format_double(x[j]));
            t.rows.push_back(std::move(row));
        }
    }
    write_csv(path, t);
}

} // namespace wtflow
