#include "psdes/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace psdes {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trimmed(cell);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

bool is_numeric(const std::string& cell) {
    double ignored;
    return parse_double(cell, ignored);
}

}  // namespace

std::vector<std::size_t> Dataset::class_histogram() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (int y : labels) counts[static_cast<std::size_t>(y)]++;
    return counts;
}

std::string LoadReport::to_text() const {
    std::ostringstream out;
    out << "rows read: " << rows_read << "\n";
    out << "rows dropped: " << rows_dropped << "\n";
    out << "header detected: " << (header_detected ? "yes" : "no") << "\n";
    out << "class histogram:\n";
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        out << "  " << class_names[i] << ": " << class_histogram[i] << "\n";
    }
    return out.str();
}

Dataset load_csv(const std::string& path, LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    return load_csv(in, std::filesystem::path(path).stem().string(), report);
}

Dataset load_csv(std::istream& in, const std::string& name, LoadReport* report) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!trimmed(line).empty()) lines.push_back(line);
    }
    if (lines.empty()) throw std::runtime_error("empty file: " + name);

    // Header iff the label cell of the first row is non-numeric and so is
    // at least one feature cell. A numeric-features/string-labels file then
    // still parses row one as data.
    const auto first = split_line(lines.front());
    bool header = false;
    if (first.size() >= 2 && !is_numeric(first.back())) {
        for (std::size_t i = 0; i + 1 < first.size(); ++i) {
            if (!is_numeric(first[i])) {
                header = true;
                break;
            }
        }
    }

    const std::size_t n_cols = first.size();
    if (n_cols < 2) throw std::runtime_error("zero feature columns in " + name);
    const std::size_t n_features = n_cols - 1;

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> class_index;
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;

    for (std::size_t li = header ? 1 : 0; li < lines.size(); ++li) {
        const auto cells = split_line(lines[li]);
        ++rows_read;
        if (cells.size() != n_cols) {
            ++rows_dropped;
            continue;
        }
        std::vector<double> feat(n_features);
        bool ok = true;
        for (std::size_t j = 0; j < n_features; ++j) {
            if (!parse_double(cells[j], feat[j])) {
                ok = false;
                break;
            }
        }
        const std::string label = trimmed(cells.back());
        if (!ok || label.empty()) {
            ++rows_dropped;
            continue;
        }
        auto [it, inserted] = class_index.try_emplace(label, static_cast<int>(class_names.size()));
        if (inserted) class_names.push_back(label);
        labels.push_back(it->second);
        rows.push_back(std::move(feat));
    }

    if (labels.empty()) throw std::runtime_error("empty file: " + name + " (no usable rows)");
    if (class_names.size() < 2) {
        throw std::runtime_error("fewer than 2 classes after cleaning in " + name);
    }

    Dataset ds;
    ds.name = name;
    ds.class_names = class_names;
    ds.labels = std::move(labels);
    ds.features = Matrix(rows.size(), n_features);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].begin(), rows[i].end(), ds.features.row(i).begin());
    }

    if (report) {
        report->rows_read = rows_read;
        report->rows_dropped = rows_dropped;
        report->header_detected = header;
        report->class_names = ds.class_names;
        report->class_histogram = ds.class_histogram();
    }
    return ds;
}

SplitIndices stratified_split_indices(const std::vector<int>& labels, int n_classes,
                                      const std::array<double, 3>& fractions, RandomStream& rng) {
    const double total = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");

    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }

    SplitIndices out;
    for (int c = 0; c < n_classes; ++c) {
        auto& members = by_class[static_cast<std::size_t>(c)];
        if (members.size() < 4) {
            throw std::invalid_argument("class " + std::to_string(c) + " has fewer than 4 samples (" +
                                        std::to_string(members.size()) + ")");
        }
        rng.shuffle(members);

        // Largest-remainder apportionment of this class across the parts.
        const std::size_t n = members.size();
        std::array<std::size_t, 3> counts{};
        std::array<double, 3> remainder{};
        std::size_t assigned = 0;
        for (int p = 0; p < 3; ++p) {
            const double exact = fractions[static_cast<std::size_t>(p)] * static_cast<double>(n);
            counts[static_cast<std::size_t>(p)] = static_cast<std::size_t>(std::floor(exact));
            remainder[static_cast<std::size_t>(p)] = exact - std::floor(exact);
            assigned += counts[static_cast<std::size_t>(p)];
        }
        std::array<int, 3> order{0, 1, 2};
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return remainder[static_cast<std::size_t>(a)] > remainder[static_cast<std::size_t>(b)]; });
        for (std::size_t leftover = n - assigned, i = 0; i < leftover; ++i) {
            counts[static_cast<std::size_t>(order[i % 3])]++;
        }

        std::size_t pos = 0;
        for (std::size_t i = 0; i < counts[0]; ++i) out.train.push_back(members[pos++]);
        for (std::size_t i = 0; i < counts[1]; ++i) out.dsel.push_back(members[pos++]);
        for (std::size_t i = 0; i < counts[2]; ++i) out.test.push_back(members[pos++]);
    }

    std::sort(out.train.begin(), out.train.end());
    std::sort(out.dsel.begin(), out.dsel.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.name = ds.name;
    out.class_names = ds.class_names;
    out.features = Matrix(rows.size(), ds.n_features());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = ds.features.row(rows[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels.push_back(ds.labels[rows[i]]);
    }
    return out;
}

SplitTriple stratified_split(const Dataset& ds, const std::array<double, 3>& fractions,
                             RandomStream& rng) {
    const auto idx = stratified_split_indices(ds.labels, ds.n_classes(), fractions, rng);
    return {subset(ds, idx.train), subset(ds, idx.dsel), subset(ds, idx.test)};
}

ZScoreScaler fit_scaler(const Dataset& train) {
    if (train.n_samples() == 0) throw std::invalid_argument("cannot fit scaler on empty dataset");
    const std::size_t d = train.n_features();
    const std::size_t n = train.n_samples();
    ZScoreScaler scaler;
    scaler.means.assign(d, 0.0);
    scaler.stds.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = train.features.row(i);
        for (std::size_t j = 0; j < d; ++j) scaler.means[j] += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) scaler.means[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = train.features.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = row[j] - scaler.means[j];
            scaler.stds[j] += diff * diff;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        scaler.stds[j] = std::sqrt(scaler.stds[j] / static_cast<double>(n));
    }
    return scaler;
}

std::vector<double> scale_row(const ZScoreScaler& scaler, std::span<const double> x) {
    if (x.size() != scaler.means.size()) {
        throw std::invalid_argument("scaler dimension mismatch: " + std::to_string(scaler.means.size()) +
                                    " vs " + std::to_string(x.size()));
    }
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        out[j] = scaler.stds[j] > 0.0 ? (x[j] - scaler.means[j]) / scaler.stds[j] : 0.0;
    }
    return out;
}

Dataset apply_scaler(const ZScoreScaler& scaler, const Dataset& ds) {
    if (ds.n_features() != scaler.means.size()) {
        throw std::invalid_argument("scaler dimension mismatch: " + std::to_string(scaler.means.size()) +
                                    " vs " + std::to_string(ds.n_features()));
    }
    Dataset out = ds;
    for (std::size_t i = 0; i < ds.n_samples(); ++i) {
        const auto scaled = scale_row(scaler, ds.features.row(i));
        std::copy(scaled.begin(), scaled.end(), out.features.row(i).begin());
    }
    return out;
}

}  // namespace psdes
