#pragma once

#include <string>

#include "bwf/regression.hpp"

namespace bwf {

/// Loads a dataset from two CSV files.
///
/// Covariates: header row, then n rows of p numeric columns.
/// Responses: long format with header `sample_id,row,col,value`, 0-based
/// indices. Every (sample, row <= col) cell must appear exactly once; lower-
/// triangle cells are optional and must agree with their mirror within 1e-10
/// when present. sample_ids must be exactly 0..n-1 in covariate row order.
Dataset load_dataset(const std::string& covariates_path, const std::string& responses_path,
                     const NumericConfig& cfg = {});

/// Writes the covariates and the upper triangle of each response with 17
/// significant digits (lossless round trip).
void save_dataset(const Dataset& data, const std::string& covariates_path,
                  const std::string& responses_path);

}  // namespace bwf
