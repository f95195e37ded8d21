#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "smoothcert/attack.hpp"
#include "smoothcert/dataset.hpp"
#include "smoothcert/errors.hpp"
#include "smoothcert/mnist.hpp"
#include "smoothcert/rng.hpp"
#include "smoothcert/smoothing.hpp"

namespace smoothcert::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_file(const fs::path& path, const std::string& hint) {
    if (!fs::exists(path)) {
        throw DataError("missing file: " + path.string() + " (" + hint + ")");
    }
}

std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", p);
    return buf;
}

NoiseSpec noise_spec_for(const RunConfig& cfg, const BinarySplit& split) {
    // binarized data: feature domain and class count are both 2, and the
    // uniform-domain requirement for joint certification holds by shape
    return NoiseSpec(cfg.beta, split.train.feature_domain());
}

ProgressFn make_progress_logger(std::uint32_t total, Clock::time_point start) {
    const std::uint32_t stride = std::max<std::uint32_t>(1, total / 50);
    return [total, stride, start](std::uint32_t done, std::uint32_t) {
        if (done % stride == 0 || done == total) {
            std::fprintf(stderr, "trained %u/%u classifiers (%.1f classifiers/s)\n", done, total,
                         done / std::max(1e-9, seconds_since(start)));
        }
    };
}

struct PerExampleRow {
    std::uint64_t example_index;
    std::uint32_t true_label;
    std::uint32_t predicted_label;
    bool abstain;
    std::uint32_t votes_top;
    double p_lower;
    std::optional<std::uint32_t> radius;
};

void write_per_example_csv(const fs::path& path, const std::vector<PerExampleRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << "example_index,true_label,predicted_label,abstain,votes_top,p_lower,radius\n";
    for (const PerExampleRow& row : rows) {
        out << row.example_index << ',' << row.true_label << ',' << row.predicted_label << ','
            << (row.abstain ? 1 : 0) << ',' << row.votes_top << ','
            << format_probability(row.p_lower) << ',';
        if (row.radius) out << *row.radius;
        out << '\n';
    }
}

std::vector<PerExampleRow> read_per_example_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read certification report: " + path.string());
    std::vector<PerExampleRow> rows;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        PerExampleRow row{};
        std::getline(ss, field, ',');
        row.example_index = std::stoull(field);
        std::getline(ss, field, ',');
        row.true_label = static_cast<std::uint32_t>(std::stoul(field));
        std::getline(ss, field, ',');
        row.predicted_label = static_cast<std::uint32_t>(std::stoul(field));
        std::getline(ss, field, ',');
        row.abstain = field == "1";
        std::getline(ss, field, ',');
        row.votes_top = static_cast<std::uint32_t>(std::stoul(field));
        std::getline(ss, field, ',');
        row.p_lower = std::stod(field);
        std::getline(ss, field, ',');
        if (!field.empty()) row.radius = static_cast<std::uint32_t>(std::stoul(field));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

void cmd_prepare(const RunConfig& cfg) {
    cfg.validate();
    require_file(cfg.images, "IDX image file");
    require_file(cfg.labels, "IDX label file");

    const RawDataset raw = load_idx(cfg.images, cfg.labels);
    const BinarySplit split = make_binary_subset(
        raw, {static_cast<std::uint8_t>(cfg.digit_a), static_cast<std::uint8_t>(cfg.digit_b)},
        cfg.train_size, cfg.test_size, cfg.seed);

    fs::create_directories(cfg.out_dir());
    save_dataset(cfg.dataset_path(), split);
    std::printf("prepared dataset: %zu train / %zu test examples (digits %u vs %u, %zu features, "
                "domain %u)\n",
                split.train.size(), split.test.size(), cfg.digit_a, cfg.digit_b,
                split.train.features.cols, split.train.feature_domain());
    std::printf("wrote %s\n", cfg.dataset_path().c_str());
}

void cmd_train(const RunConfig& cfg) {
    cfg.validate();
    require_file(cfg.dataset_path(), "run `prepare` first");
    const BinarySplit split = load_dataset(cfg.dataset_path());
    const NoiseSpec spec = noise_spec_for(cfg, split);
    const TrainConfig train_cfg{cfg.hidden, cfg.epochs, cfg.lr};

    EnsembleHeader header;
    header.version = 1;
    header.n_classifiers = cfg.num_classifiers;
    header.beta = spec.beta;
    header.domain_size = spec.domain_size;
    header.num_classes = split.train.num_classes;
    header.input_dim = static_cast<std::uint32_t>(split.train.features.cols);
    header.hidden_units = train_cfg.hidden_units;
    header.epochs = train_cfg.epochs;
    header.learning_rate = train_cfg.learning_rate;
    header.master_seed = cfg.seed;
    header.training_fingerprint = training_fingerprint(split.train, train_cfg, spec);

    fs::create_directories(cfg.out_dir());
    EnsembleWriter writer(cfg.ensemble_path(), header);

    SymbolMatrix no_test;
    no_test.rows = 0;
    no_test.cols = split.train.features.cols;
    no_test.domain_size = split.train.feature_domain();

    const auto start = Clock::now();
    SmoothingRunConfig run_cfg{spec, train_cfg, cfg.num_classifiers, cfg.seed, cfg.workers};
    run_smoothing(split.train, no_test, run_cfg, &writer,
                  make_progress_logger(cfg.num_classifiers, start));
    writer.commit();

    const double elapsed = seconds_since(start);
    std::printf("trained %u classifiers in %.1f s (%.1f classifiers/s)\n", cfg.num_classifiers,
                elapsed, cfg.num_classifiers / std::max(1e-9, elapsed));
    std::printf("wrote %s\n", cfg.ensemble_path().c_str());
}

void cmd_certify(const RunConfig& cfg) {
    cfg.validate();
    require_file(cfg.dataset_path(), "run `prepare` first");
    require_file(cfg.ensemble_path(), "run `train` first");

    const BinarySplit split = load_dataset(cfg.dataset_path());
    EnsembleReader reader(cfg.ensemble_path());
    const EnsembleHeader& header = reader.header();

    const NoiseSpec spec(header.beta, header.domain_size);
    const TrainConfig train_cfg{header.hidden_units, header.epochs, header.learning_rate};
    const std::uint64_t expected = training_fingerprint(split.train, train_cfg, spec);
    if (expected != header.training_fingerprint) {
        throw ConfigError("refusing to certify: ensemble fingerprint " +
                          std::to_string(header.training_fingerprint) +
                          " does not match the prepared dataset (" + std::to_string(expected) +
                          ")");
    }

    const auto start = Clock::now();
    const std::vector<VoteCounts> votes =
        votes_from_ensemble_file(reader, split.test.features, cfg.workers);
    const double per_example_alpha = bonferroni_alpha(cfg.alpha, split.test.size());

    std::vector<CertificationResult> results;
    std::vector<PerExampleRow> rows;
    results.reserve(votes.size());
    for (std::size_t i = 0; i < votes.size(); ++i) {
        const CertificationResult res =
            certify_from_votes(votes[i], split.test.labels[i], per_example_alpha, spec, i);
        rows.push_back(PerExampleRow{res.example_index, res.true_label, res.predicted_label,
                                     res.abstain, res.votes.counts[res.predicted_label],
                                     res.p_lower, res.radius});
        results.push_back(res);
    }

    std::uint32_t max_radius = 0;
    for (const CertificationResult& res : results) {
        if (res.radius) max_radius = std::max(max_radius, *res.radius);
    }

    write_per_example_csv(cfg.per_example_path(), rows);

    std::ofstream curve(cfg.curve_path(), std::ios::trunc);
    if (!curve) throw DataError("cannot write " + cfg.curve_path().string());
    curve << "radius,n_certified_correct,certified_accuracy\n";
    std::printf("certified accuracy at simultaneous confidence %.6g over %zu examples:\n",
                1.0 - cfg.alpha, results.size());
    for (std::uint32_t r = 0; r <= max_radius; ++r) {
        const double acc = certified_accuracy(results, r);
        const auto hits = static_cast<std::uint64_t>(
            std::llround(acc * static_cast<double>(results.size())));
        char acc_str[32];
        std::snprintf(acc_str, sizeof(acc_str), "%.6f", acc);
        curve << r << ',' << hits << ',' << acc_str << '\n';
        std::printf("  radius >= %u: %s (%llu/%zu)\n", r, acc_str,
                    static_cast<unsigned long long>(hits), results.size());
    }
    std::printf("certification took %.1f s\n", seconds_since(start));
    std::printf("wrote %s and %s\n", cfg.per_example_path().c_str(), cfg.curve_path().c_str());
}

void cmd_attack_eval(const RunConfig& cfg) {
    cfg.validate();
    require_file(cfg.dataset_path(), "run `prepare` first");
    require_file(cfg.ensemble_path(), "run `train` first");
    require_file(cfg.per_example_path(), "run `certify` first");

    const BinarySplit split = load_dataset(cfg.dataset_path());
    EnsembleReader reader(cfg.ensemble_path());
    const EnsembleHeader& header = reader.header();
    const NoiseSpec spec(header.beta, header.domain_size);
    const TrainConfig train_cfg{header.hidden_units, header.epochs, header.learning_rate};
    const std::vector<PerExampleRow> clean = read_per_example_csv(cfg.per_example_path());
    if (clean.size() != split.test.size()) {
        throw DataError("certification report has " + std::to_string(clean.size()) +
                        " rows but the dataset has " + std::to_string(split.test.size()) +
                        " test examples");
    }

    const TriggerSpec trig = cfg.trigger();
    const std::uint64_t attack_seed =
        cfg.attack_seed != 0 ? cfg.attack_seed
                             : derive_seed(cfg.seed, SeedStream::attack_retrain);

    // Poison the training data, stamp the trigger on every test input, and
    // account the actual perturbation sizes.
    const PoisonResult poisoned = poison_training_set(split.train, trig, attack_seed);
    SymbolMatrix triggered = split.test.features;
    std::vector<std::uint64_t> budgets(split.test.size());
    const std::uint64_t train_budget = poisoned.features_changed + poisoned.labels_changed;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
        const TriggerResult t = apply_trigger(split.test.features.row_vector(i), trig);
        std::copy(t.triggered.symbols.begin(), t.triggered.symbols.end(),
                  triggered.row(i).begin());
        budgets[i] = train_budget + t.symbols_changed;
    }

    std::printf("attack: |delta1|=%llu feature symbols, |delta2|=%llu labels, trigger touches up "
                "to %zu test pixels\n",
                static_cast<unsigned long long>(poisoned.features_changed),
                static_cast<unsigned long long>(poisoned.labels_changed),
                trig.pixel_positions.size());

    // Full pipeline rerun on the attacked data with fresh seeds.
    const auto start = Clock::now();
    SmoothingRunConfig run_cfg{spec, train_cfg, header.n_classifiers, attack_seed, cfg.workers};
    const std::vector<VoteCounts> attacked_votes =
        run_smoothing(poisoned.poisoned, triggered, run_cfg,
                      nullptr, make_progress_logger(header.n_classifiers, start));

    std::size_t checked = 0;
    std::size_t violations = 0;
    std::ofstream out(cfg.attack_report_path(), std::ios::trunc);
    if (!out) throw DataError("cannot write " + cfg.attack_report_path().string());
    out << "example_index,certified_radius,attack_budget,clean_prediction,attacked_prediction,"
           "within_budget,violation\n";
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const std::uint32_t attacked_label = top_label(attacked_votes[i]);
        const bool certified = clean[i].radius.has_value();
        const bool within = certified && budgets[i] <= *clean[i].radius;
        const bool violation = within && attacked_label != clean[i].predicted_label;
        if (within) ++checked;
        if (violation) ++violations;
        out << i << ',';
        if (certified) out << *clean[i].radius;
        out << ',' << budgets[i] << ',' << clean[i].predicted_label << ',' << attacked_label
            << ',' << (within ? 1 : 0) << ',' << (violation ? 1 : 0) << '\n';
    }

    if (checked == 0) {
        std::fprintf(stderr, "warning: every attack budget exceeds the certified radius; "
                             "no certificate was exercised\n");
    }
    std::printf("certificate check: %zu violations among %zu examples attacked within their "
                "radius (expected 0)\n",
                violations, checked);

    // Contrast: the same backdoor against one classifier trained without any
    // smoothing noise.
    const Classifier undefended =
        train_classifier(poisoned.poisoned, train_cfg,
                         derive_seed(attack_seed, SeedStream::classifier_init, 0));
    const Eigen::MatrixXd triggered_inputs = fractional_features(triggered);
    const std::vector<std::uint32_t> undefended_labels =
        predict_rows(undefended, triggered_inputs);
    std::size_t target_hits = 0;
    for (std::uint32_t label : undefended_labels) {
        if (label == trig.target_label) ++target_hits;
    }
    std::printf("unsmoothed single classifier predicts the target label on %.1f%% of triggered "
                "test inputs\n",
                100.0 * static_cast<double>(target_hits) /
                    static_cast<double>(undefended_labels.size()));
    std::printf("wrote %s\n", cfg.attack_report_path().c_str());
}

} // namespace smoothcert::cli
