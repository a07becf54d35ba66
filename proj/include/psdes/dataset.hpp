#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "psdes/matrix.hpp"
#include "psdes/rng.hpp"

namespace psdes {

// Labeled numeric dataset. Labels are class indices into class_names,
// assigned in order of first appearance of the original label strings.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::string name;

    std::size_t n_samples() const { return labels.size(); }
    std::size_t n_features() const { return features.cols(); }
    int n_classes() const { return static_cast<int>(class_names.size()); }

    std::vector<std::size_t> class_histogram() const;
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    bool header_detected = false;
    std::vector<std::size_t> class_histogram;
    std::vector<std::string> class_names;

    std::string to_text() const;
};

// Reads a CSV whose last column is the class label. A header row is assumed
// present iff the last cell of the first row is non-numeric and at least one
// other cell of that row is non-numeric too. Rows with missing or unparsable
// feature cells (or an empty label) are dropped and counted in the report.
Dataset load_csv(const std::string& path, LoadReport* report = nullptr);
Dataset load_csv(std::istream& in, const std::string& name, LoadReport* report = nullptr);

struct SplitTriple {
    Dataset train;
    Dataset dsel;
    Dataset test;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> dsel;
    std::vector<std::size_t> test;
};

// Stratified three-way split. Per class the rows are shuffled and assigned
// counts by the largest-remainder rule, so each part's per-class count is
// within one sample of exact proportionality. Requires >= 4 samples per
// class so every part can receive at least one.
SplitIndices stratified_split_indices(const std::vector<int>& labels, int n_classes,
                                      const std::array<double, 3>& fractions, RandomStream& rng);
SplitTriple stratified_split(const Dataset& ds, const std::array<double, 3>& fractions,
                             RandomStream& rng);

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows);

// Per-feature z-score parameters. Population standard deviation (divisor n);
// constant features keep std 0 and map to 0 when applied.
struct ZScoreScaler {
    std::vector<double> means;
    std::vector<double> stds;
};

ZScoreScaler fit_scaler(const Dataset& train);
Dataset apply_scaler(const ZScoreScaler& scaler, const Dataset& ds);
std::vector<double> scale_row(const ZScoreScaler& scaler, std::span<const double> x);

}  // namespace psdes
