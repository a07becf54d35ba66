#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <filesystem>
#include <stdexcept>

#include "psdes/dataset.hpp"
#include "psdes/experiment.hpp"
#include "psdes/metrics.hpp"
#include "psdes/pool.hpp"
#include "psdes/post_selection.hpp"

namespace py = pybind11;

namespace {

psdes::Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-D float array");
    psdes::Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + arr.size(), m.data());
    return m;
}

py::array_t<double> from_matrix(const psdes::Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.rows() * m.cols(), arr.mutable_data());
    return arr;
}

psdes::Dataset make_dataset(const py::array_t<double, py::array::c_style | py::array::forcecast>& X,
                            const std::vector<int>& y, const std::string& name) {
    psdes::Dataset ds;
    ds.features = to_matrix(X);
    ds.name = name;
    ds.labels = y;
    int max_label = -1;
    for (int label : y) max_label = std::max(max_label, label);
    for (int c = 0; c <= max_label; ++c) ds.class_names.push_back(std::to_string(c));
    if (ds.features.rows() != ds.labels.size()) {
        throw std::invalid_argument("feature/label row count mismatch");
    }
    return ds;
}

psdes::PotentialMetric make_metric(const std::string& kind, const std::string& f_convention) {
    psdes::PotentialMetric metric;
    metric.kind = psdes::potential_kind_from_string(kind);
    if (f_convention == "majority_label") {
        metric.f_convention = psdes::FPositiveConvention::majority_label;
    } else if (f_convention == "fixed_label_one") {
        metric.f_convention = psdes::FPositiveConvention::fixed_label_one;
    } else {
        throw std::invalid_argument("unknown f_convention: " + f_convention);
    }
    return metric;
}

}  // namespace

PYBIND11_MODULE(_psdes, m) {
    m.doc() = "Post-selection dynamic ensemble selection";

    py::class_<psdes::Dataset>(m, "Dataset")
        .def(py::init(&make_dataset), py::arg("features"), py::arg("labels"),
             py::arg("name") = "dataset")
        .def_property_readonly("features",
                               [](const psdes::Dataset& ds) { return from_matrix(ds.features); })
        .def_readonly("labels", &psdes::Dataset::labels)
        .def_readonly("class_names", &psdes::Dataset::class_names)
        .def_readonly("name", &psdes::Dataset::name)
        .def_property_readonly("n_samples", &psdes::Dataset::n_samples)
        .def_property_readonly("n_features", &psdes::Dataset::n_features)
        .def_property_readonly("n_classes", &psdes::Dataset::n_classes);

    m.def(
        "load_csv",
        [](const std::string& path) { return psdes::load_csv(path); },
        py::arg("path"));

    m.def(
        "stratified_split",
        [](const psdes::Dataset& ds, double train, double dsel, double test, std::uint64_t seed) {
            psdes::RandomStream rng(seed);
            auto split = psdes::stratified_split(ds, {train, dsel, test}, rng);
            return py::make_tuple(std::move(split.train), std::move(split.dsel),
                                  std::move(split.test));
        },
        py::arg("dataset"), py::arg("train") = 0.5, py::arg("dsel") = 0.25, py::arg("test") = 0.25,
        py::arg("seed") = 0);

    m.def("majority_vote", [](const std::vector<int>& votes) { return psdes::majority_vote(votes); });

    m.def(
        "potential",
        [](const std::vector<int>& votes, const std::string& metric, const std::string& f_convention,
           std::uint64_t seed) {
            const auto pm = make_metric(metric, f_convention);
            if (pm.kind == psdes::PotentialKind::random) {
                psdes::RandomStream rng(seed);
                return psdes::potential(votes, pm, &rng);
            }
            return psdes::potential(votes, pm);
        },
        py::arg("votes"), py::arg("metric") = "accuracy", py::arg("f_convention") = "majority_label",
        py::arg("seed") = 0);

    m.def("accuracy", [](const std::vector<int>& t, const std::vector<int>& p) {
        return psdes::accuracy(t, p);
    });
    m.def("f_macro", [](const std::vector<int>& t, const std::vector<int>& p, int n_classes) {
        return psdes::f_macro(t, p, n_classes);
    });
    m.def("mcc", [](const std::vector<int>& t, const std::vector<int>& p) { return psdes::mcc(t, p); });

    m.def(
        "wilcoxon_signed_rank",
        [](const std::vector<double>& x, const std::vector<double>& y,
           const std::string& alternative, const std::string& zero_policy) {
            const auto alt = alternative == "greater" ? psdes::Alternative::greater
                            : alternative == "two_sided"
                                ? psdes::Alternative::two_sided
                                : throw std::invalid_argument("unknown alternative: " + alternative);
            const auto zp = zero_policy == "drop" ? psdes::ZeroPolicy::drop
                            : zero_policy == "pratt"
                                ? psdes::ZeroPolicy::pratt
                                : throw std::invalid_argument("unknown zero policy: " + zero_policy);
            const auto result = psdes::wilcoxon_signed_rank(x, y, alt, zp);
            return py::make_tuple(result.statistic, result.p_value, result.n_effective);
        },
        py::arg("x"), py::arg("y"), py::arg("alternative") = "greater",
        py::arg("zero_policy") = "drop");

    py::class_<psdes::PsDesSystem>(m, "PsDesSystem")
        .def(
            "classify",
            [](const psdes::PsDesSystem& system,
               const py::array_t<double, py::array::c_style | py::array::forcecast>& X) {
                const auto queries = to_matrix(X);
                std::vector<int> labels(queries.rows());
                for (std::size_t i = 0; i < queries.rows(); ++i) {
                    labels[i] = psdes::classify(queries.row(i), system, i);
                }
                return labels;
            },
            py::arg("X"))
        .def_property_readonly("pool_size",
                               [](const psdes::PsDesSystem& system) { return system.pool.size(); });

    m.def(
        "fit_system",
        [](const psdes::Dataset& train, const psdes::Dataset& dsel, int bootstraps,
           const std::vector<std::string>& base_classifiers, const std::vector<std::string>& des_set,
           const std::string& metric, const std::string& f_convention, std::size_t k,
           std::size_t kp_knop, std::size_t kp_meta, double h_c, std::uint64_t seed) {
            std::vector<psdes::ClassifierSpec> specs;
            for (const auto& name : base_classifiers) {
                psdes::ClassifierSpec spec;
                spec.kind = psdes::classifier_kind_from_string(name);
                specs.push_back(spec);
            }
            std::vector<psdes::DesTechnique> techniques;
            for (const auto& name : des_set) {
                techniques.push_back(psdes::des_technique_from_string(name));
            }
            auto pool = psdes::build_pool(train, bootstraps, specs, seed);
            return psdes::prepare_system(std::move(pool), dsel, std::move(techniques),
                                         make_metric(metric, f_convention), k, kp_knop, kp_meta,
                                         h_c, psdes::derive_seed(seed, 0x9066));
        },
        py::arg("train"), py::arg("dsel"), py::arg("bootstraps") = 10,
        py::arg("base_classifiers") =
            std::vector<std::string>{"perceptron", "logistic_regression", "gaussian_nb"},
        py::arg("des_set") = std::vector<std::string>{"knora_u", "knop", "des_p", "meta_des"},
        py::arg("metric") = "accuracy", py::arg("f_convention") = "majority_label", py::arg("k") = 7,
        py::arg("kp_knop") = 7, py::arg("kp_meta") = 5, py::arg("h_c") = 1.0, py::arg("seed") = 0);

    m.def(
        "run_experiment",
        [](const std::string& config_path, const std::string& out_dir, bool verbose) {
            auto config = psdes::parse_config_file(config_path);
            if (!out_dir.empty()) config.output_dir = out_dir;
            const auto store = psdes::run_experiment(config, verbose);
            std::filesystem::create_directories(config.output_dir);
            const auto raw = std::filesystem::path(config.output_dir) / "raw_scores.csv";
            store.save_csv(raw.string());
            psdes::ReportOptions options;
            options.alternative = config.wilcoxon_alternative;
            options.zero_policy = config.wilcoxon_zero_policy;
            psdes::write_reports(psdes::aggregate(store, options), store, config.output_dir);
            return raw.string();
        },
        py::arg("config_path"), py::arg("out_dir") = "", py::arg("verbose") = false,
        py::call_guard<py::gil_scoped_release>());
}
