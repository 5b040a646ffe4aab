#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "predeval/predictors.hpp"
#include "predeval/stats.hpp"

// CSV ingestion. Dialect is fixed for reproducibility: comma separated,
// '.' decimal point, UTF-8, mandatory header row, no quoting. Empty cells
// and "?" are missing values.

namespace predeval {

struct DatasetLoadResult {
  Dataset dataset;
  std::size_t rows_dropped = 0;  // rows removed for missing values
};

// Loads a dataset: `target_column` holds the positive outcome, an optional
// `id_column` supplies case ids (row numbers otherwise), every remaining
// column is a numeric feature. Rows with missing values in used columns
// are dropped and counted.
DatasetLoadResult load_dataset(const std::string& path, const std::string& target_column,
                               const std::string& id_column = {});

// Loads externally produced predictions: columns case_id, actual, then one
// column per prediction system. Row order defines the pairing.
std::vector<PredictionRun> load_predictions(const std::string& path);

// Inverse of load_predictions for runs over a common case set (12
// significant digits).
std::string render_predictions_csv(std::span<const PredictionRun> runs);

}  // namespace predeval
