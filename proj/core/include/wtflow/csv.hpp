// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "wtflow/flow.hpp"

namespace wtflow {

/// Shortest decimal form that parses back to the same double ("." decimal point).
std::string format_double(double v);
/// Strict parse of a whole field; throws FormatError.
double parse_double(const std::string& field);
long long parse_integer(const std::string& field);

/// Comma-separated table with a header row. Fields never contain commas or quotes.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws FormatError if absent.
    std::size_t column(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// Throws FormatError on a missing header or ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

/// image_id,label with labels 0 (normal) or 1 (anomalous).
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);
/// Labels ordered by row; image ids must be 0..N-1 in order.
std::vector<int> read_labels(const std::filesystem::path& path);

/// epoch,mean_loss
void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& epoch_loss);

/// image_id,label,image_score
void write_scores_csv(const std::filesystem::path& path, const std::vector<int>& labels,
                      const std::vector<double>& scores);

/// sample_id,step,t,norm,x_0..x_{k-1} with k = min(d, max_dims).
void write_trajectory_csv(const std::filesystem::path& path, const BatchTrajectory& traj, std::size_t max_dims);

} // namespace wtflow
