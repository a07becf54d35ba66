#include "psdes/pool.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace psdes {

namespace {

constexpr std::uint64_t kBootstrapStream = 0xb001;
constexpr std::uint64_t kClassifierStream = 0xc1f5;

bool covers_all_classes(const std::vector<int>& labels, const std::vector<std::size_t>& draw,
                        int n_classes) {
    std::vector<bool> seen(static_cast<std::size_t>(n_classes), false);
    int found = 0;
    for (std::size_t idx : draw) {
        const auto c = static_cast<std::size_t>(labels[idx]);
        if (!seen[c]) {
            seen[c] = true;
            if (++found == n_classes) return true;
        }
    }
    return false;
}

// Bootstrap that preserves per-class counts: n_c draws with replacement
// from each class's own rows.
std::vector<std::size_t> stratified_bootstrap(const std::vector<int>& labels, int n_classes,
                                              RandomStream& rng) {
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    std::vector<std::size_t> draw;
    draw.reserve(labels.size());
    for (const auto& members : by_class) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            draw.push_back(members[rng.uniform_below(members.size())]);
        }
    }
    return draw;
}

Matrix gather_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = X.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

void write_values(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ' ';
        out << values[i];
    }
    out << '\n';
}

std::vector<double> read_values(std::istream& in, std::size_t count, const char* what) {
    std::vector<double> values(count);
    for (auto& v : values) {
        if (!(in >> v)) throw std::runtime_error(std::string("pool file: truncated ") + what);
    }
    return values;
}

}  // namespace

std::vector<std::size_t> bootstrap_indices(std::size_t n, RandomStream& rng) {
    if (n == 0) throw std::invalid_argument("bootstrap over empty sample set");
    std::vector<std::size_t> draw(n);
    for (auto& idx : draw) idx = rng.uniform_below(n);
    return draw;
}

Pool build_pool(const Dataset& train, int n_bootstraps, const std::vector<ClassifierSpec>& specs,
                std::uint64_t seed) {
    if (n_bootstraps < 1) throw std::invalid_argument("need at least one bootstrap");
    if (specs.empty()) throw std::invalid_argument("need at least one classifier spec");

    Pool pool;
    pool.n_classes = train.n_classes();
    pool.classifiers.reserve(static_cast<std::size_t>(n_bootstraps) * specs.size());

    for (int bi = 0; bi < n_bootstraps; ++bi) {
        RandomStream boot_rng(derive_seed(seed, kBootstrapStream, static_cast<std::uint64_t>(bi)));
        std::vector<std::size_t> draw;
        bool ok = false;
        for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
            draw = bootstrap_indices(train.n_samples(), boot_rng);
            ok = covers_all_classes(train.labels, draw, pool.n_classes);
        }
        if (!ok) draw = stratified_bootstrap(train.labels, pool.n_classes, boot_rng);

        const Matrix Xb = gather_rows(train.features, draw);
        std::vector<int> yb(draw.size());
        for (std::size_t i = 0; i < draw.size(); ++i) yb[i] = train.labels[draw[i]];

        for (std::size_t si = 0; si < specs.size(); ++si) {
            RandomStream clf_rng(derive_seed(seed, kClassifierStream, static_cast<std::uint64_t>(bi),
                                             static_cast<std::uint64_t>(si)));
            try {
                pool.classifiers.push_back(fit(specs[si], Xb, yb, pool.n_classes, clf_rng));
            } catch (const std::exception& e) {
                throw std::runtime_error("training failed for bootstrap " + std::to_string(bi) +
                                         ", spec " + std::to_string(si) + " (" +
                                         to_string(specs[si].kind) + "): " + e.what());
            }
            pool.provenance.push_back({bi, static_cast<int>(si)});
        }
    }
    return pool;
}

void cache_dsel_outputs(Pool& pool, const Dataset& dsel) {
    const std::size_t M = pool.size();
    const std::size_t N = dsel.n_samples();
    const std::size_t L = static_cast<std::size_t>(pool.n_classes);
    if (M == 0) throw std::invalid_argument("cannot cache outputs of an empty pool");
    if (!pool.classifiers.empty() && dsel.n_features() != pool.classifiers.front().n_features) {
        throw std::invalid_argument("DSEL feature dimension does not match the pool");
    }

    pool.dsel_votes.assign(M, std::vector<int>(N, 0));
    pool.dsel_correct.assign(M, std::vector<std::uint8_t>(N, 0));
    pool.dsel_profiles = Matrix(N, M * L);

    for (std::size_t i = 0; i < M; ++i) {
        const auto& clf = pool.classifiers[i];
        for (std::size_t j = 0; j < N; ++j) {
            const auto x = dsel.features.row(j);
            const auto proba = clf.predict_proba(x);
            int best = 0;
            for (std::size_t c = 1; c < L; ++c) {
                if (proba[c] > proba[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
            }
            pool.dsel_votes[i][j] = best;
            pool.dsel_correct[i][j] = best == dsel.labels[j] ? 1 : 0;
            auto profile_row = pool.dsel_profiles.row(j);
            std::copy(proba.begin(), proba.end(), profile_row.begin() + static_cast<std::ptrdiff_t>(i * L));
        }
    }
}

void save_pool(const Pool& pool, std::ostream& out) {
    const std::size_t d = pool.classifiers.empty() ? 0 : pool.classifiers.front().n_features;
    out << "psdes-pool v1\n";
    out << "classifiers " << pool.size() << " classes " << pool.n_classes << " features " << d
        << "\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& clf = pool.classifiers[i];
        out << "member " << i << ' ' << to_string(clf.kind) << " bootstrap "
            << pool.provenance[i].bootstrap_index << " spec " << pool.provenance[i].spec_index
            << '\n';
        if (const auto* linear = std::get_if<LinearModel>(&clf.model)) {
            for (std::size_t c = 0; c < linear->weights.rows(); ++c) {
                out << "w ";
                write_values(out, linear->weights.row(c));
            }
            out << "b ";
            write_values(out, linear->bias);
        } else {
            const auto& nb = std::get<GaussianNbModel>(clf.model);
            for (std::size_t c = 0; c < nb.means.rows(); ++c) {
                out << "mean ";
                write_values(out, nb.means.row(c));
                out << "var ";
                write_values(out, nb.variances.row(c));
            }
            out << "prior ";
            write_values(out, nb.priors);
        }
    }
}

Pool load_pool(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "psdes-pool v1") {
        throw std::runtime_error("pool file: unsupported header");
    }
    std::string word;
    std::size_t M = 0, d = 0;
    int L = 0;
    in >> word >> M >> word >> L >> word >> d;
    if (!in) throw std::runtime_error("pool file: malformed size line");

    Pool pool;
    pool.n_classes = L;
    pool.classifiers.reserve(M);
    pool.provenance.reserve(M);
    const auto Lz = static_cast<std::size_t>(L);

    for (std::size_t i = 0; i < M; ++i) {
        std::size_t index = 0;
        std::string kind_name;
        int bootstrap = 0, spec = 0;
        in >> word >> index >> kind_name >> word >> bootstrap >> word >> spec;
        if (!in) throw std::runtime_error("pool file: truncated member record");

        TrainedClassifier clf;
        clf.kind = classifier_kind_from_string(kind_name);
        clf.n_classes = L;
        clf.n_features = d;
        if (clf.kind == ClassifierKind::gaussian_nb) {
            GaussianNbModel nb{Matrix(Lz, d), Matrix(Lz, d), {}};
            for (std::size_t c = 0; c < Lz; ++c) {
                in >> word;
                const auto means = read_values(in, d, "means");
                std::copy(means.begin(), means.end(), nb.means.row(c).begin());
                in >> word;
                const auto vars = read_values(in, d, "variances");
                std::copy(vars.begin(), vars.end(), nb.variances.row(c).begin());
            }
            in >> word;
            nb.priors = read_values(in, Lz, "priors");
            clf.model = std::move(nb);
        } else {
            LinearModel linear{Matrix(Lz, d), {}};
            for (std::size_t c = 0; c < Lz; ++c) {
                in >> word;
                const auto weights = read_values(in, d, "weights");
                std::copy(weights.begin(), weights.end(), linear.weights.row(c).begin());
            }
            in >> word;
            linear.bias = read_values(in, Lz, "bias");
            clf.model = std::move(linear);
        }
        pool.classifiers.push_back(std::move(clf));
        pool.provenance.push_back({bootstrap, spec});
    }
    return pool;
}

void save_pool(const Pool& pool, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write pool file: " + path);
    save_pool(pool, out);
}

Pool load_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pool file: " + path);
    return load_pool(in);
}

}  // namespace psdes
