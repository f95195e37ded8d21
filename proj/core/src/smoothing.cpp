#include "smoothcert/smoothing.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "smoothcert/errors.hpp"
#include "smoothcert/rng.hpp"

namespace smoothcert {

namespace {

void check_uniform_domains(const TrainingSet& train, const NoiseSpec& spec) {
    if (train.feature_domain() != spec.domain_size || train.num_classes != spec.domain_size) {
        throw ConfigError(
            "smoothing: certification needs one (beta, domain) for features and labels; got "
            "feature domain " +
            std::to_string(train.feature_domain()) + ", label domain " +
            std::to_string(train.num_classes) + ", noise domain " +
            std::to_string(spec.domain_size));
    }
}

std::uint32_t resolve_workers(std::uint32_t workers) {
    if (workers != 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs fn(j) for every j in [0, total) across `workers` threads. The first
// exception wins; remaining workers drain quickly via the stop flag.
void parallel_for_index(std::uint32_t total, std::uint32_t workers,
                        const std::function<void(std::uint32_t worker, std::uint32_t j)>& fn) {
    workers = std::min(std::max<std::uint32_t>(workers, 1), std::max<std::uint32_t>(total, 1));
    if (workers <= 1) {
        for (std::uint32_t j = 0; j < total; ++j) fn(0, j);
        return;
    }
    std::atomic<std::uint32_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            while (!stop.load(std::memory_order_relaxed)) {
                const std::uint32_t j = next.fetch_add(1, std::memory_order_relaxed);
                if (j >= total) break;
                try {
                    fn(w, j);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    stop.store(true, std::memory_order_relaxed);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Noised fractional inputs for one (classifier, test set) pair, written into
// a preallocated matrix. Must stay in lockstep with smoothed_votes, which
// routes through apply_noise on one example at a time.
void fill_noised_test_inputs(const SymbolMatrix& test, const NoiseSpec& spec,
                             std::uint64_t master_seed, std::uint32_t classifier_index,
                             Eigen::MatrixXd& out) {
    const double inv_d = 1.0 / spec.domain_size;
    const std::uint32_t d = spec.domain_size;
    for (std::size_t i = 0; i < test.rows; ++i) {
        SplitMix64 rng(test_noise_seed(master_seed, classifier_index, i));
        const Symbol* xs = test.data.data() + i * test.cols;
        for (std::size_t p = 0; p < test.cols; ++p) {
            const Symbol noised = (xs[p] + sample_symbol(rng, spec)) % d;
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = noised * inv_d;
        }
    }
}

std::vector<VoteCounts> tally_to_votes(const std::vector<std::uint32_t>& tally,
                                       std::size_t n_examples, std::uint32_t num_classes) {
    std::vector<VoteCounts> votes(n_examples);
    for (std::size_t i = 0; i < n_examples; ++i) {
        std::vector<std::uint32_t> counts(tally.begin() + i * num_classes,
                                          tally.begin() + (i + 1) * num_classes);
        votes[i] = VoteCounts::validated(std::move(counts));
    }
    return votes;
}

} // namespace

std::uint64_t feature_noise_seed(std::uint64_t master_seed, std::uint32_t classifier_index) {
    return derive_seed(master_seed, SeedStream::train_features, classifier_index);
}

std::uint64_t label_noise_seed(std::uint64_t master_seed, std::uint32_t classifier_index) {
    return derive_seed(master_seed, SeedStream::train_labels, classifier_index);
}

std::uint64_t classifier_init_seed(std::uint64_t master_seed, std::uint32_t classifier_index) {
    return derive_seed(master_seed, SeedStream::classifier_init, classifier_index);
}

std::uint64_t test_noise_seed(std::uint64_t master_seed, std::uint32_t classifier_index,
                              std::uint64_t example_index) {
    return derive_seed(master_seed, SeedStream::test_noise, classifier_index, example_index);
}

TrainingSet noised_training_set(const TrainingSet& train, const NoiseSpec& spec,
                                std::uint64_t master_seed, std::uint32_t classifier_index) {
    check_uniform_domains(train, spec);
    TrainingSet noised = train;

    SplitMix64 feature_rng(feature_noise_seed(master_seed, classifier_index));
    const std::uint32_t d = spec.domain_size;
    for (Symbol& s : noised.features.data) {
        s = (s + sample_symbol(feature_rng, spec)) % d;
    }
    SplitMix64 label_rng(label_noise_seed(master_seed, classifier_index));
    for (Symbol& y : noised.labels) {
        y = (y + sample_symbol(label_rng, spec)) % d;
    }
    return noised;
}

Classifier train_ensemble_member(const TrainingSet& train, const NoiseSpec& spec,
                                 const TrainConfig& cfg, std::uint64_t master_seed,
                                 std::uint32_t classifier_index) {
    const TrainingSet noised = noised_training_set(train, spec, master_seed, classifier_index);
    try {
        return train_classifier(noised, cfg, classifier_init_seed(master_seed, classifier_index));
    } catch (const TrainingError& e) {
        throw TrainingError("classifier " + std::to_string(classifier_index) + ": " + e.what());
    }
}

Ensemble build_ensemble(const TrainingSet& train, const NoiseSpec& spec,
                        std::uint32_t n_classifiers, const TrainConfig& cfg,
                        std::uint64_t master_seed, std::uint32_t workers) {
    if (n_classifiers == 0) {
        throw ConfigError("build_ensemble: need at least one classifier");
    }
    check_uniform_domains(train, spec);

    Ensemble ens{{}, spec, spec, master_seed,
                 training_fingerprint(train, cfg, spec)};
    ens.classifiers.resize(n_classifiers);
    parallel_for_index(n_classifiers, resolve_workers(workers),
                       [&](std::uint32_t, std::uint32_t j) {
                           ens.classifiers[j] =
                               train_ensemble_member(train, spec, cfg, master_seed, j);
                       });
    return ens;
}

VoteCounts smoothed_votes(const Ensemble& ens, const EncodedVector& x,
                          std::uint64_t example_index) {
    if (ens.size() == 0) {
        throw ConfigError("smoothed_votes: empty ensemble");
    }
    const std::uint32_t num_classes = ens.classifiers.front().num_classes();
    std::vector<std::uint32_t> counts(num_classes, 0);
    for (std::uint32_t j = 0; j < ens.size(); ++j) {
        const EncodedVector noised =
            apply_noise(x, ens.noise_features, test_noise_seed(ens.master_seed, j, example_index));
        ++counts[predict(ens.classifiers[j], noised)];
    }
    return VoteCounts::validated(std::move(counts));
}

CertificationResult certify_from_votes(const VoteCounts& votes, std::uint32_t true_label,
                                       double per_example_alpha, const NoiseSpec& spec,
                                       std::uint64_t example_index) {
    CertificationResult result;
    result.example_index = example_index;
    result.true_label = true_label;
    result.votes = votes;
    result.predicted_label = top_label(votes);
    result.p_lower = clopper_pearson_lower(votes.counts[result.predicted_label], votes.n_samples,
                                           per_example_alpha);
    if (result.p_lower > 0.5) {
        result.abstain = false;
        result.radius = certified_radius(result.p_lower, spec);
    } else {
        result.abstain = true;
        result.radius = std::nullopt;
    }
    return result;
}

CertificationResult certify_example(const Ensemble& ens, const EncodedVector& x,
                                    std::uint32_t true_label, double per_example_alpha,
                                    std::uint64_t example_index) {
    const VoteCounts votes = smoothed_votes(ens, x, example_index);
    return certify_from_votes(votes, true_label, per_example_alpha, ens.noise_features,
                              example_index);
}

double certified_accuracy(const std::vector<CertificationResult>& results, std::uint32_t r) {
    if (results.empty()) {
        throw DomainError("certified_accuracy: no results");
    }
    std::size_t hits = 0;
    for (const CertificationResult& res : results) {
        if (!res.abstain && res.predicted_label == res.true_label && res.radius &&
            *res.radius >= r) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

std::vector<VoteCounts> run_smoothing(const TrainingSet& train, const SymbolMatrix& test_features,
                                      const SmoothingRunConfig& cfg, EnsembleWriter* writer,
                                      const ProgressFn& progress) {
    if (cfg.n_classifiers == 0) {
        throw ConfigError("run_smoothing: need at least one classifier");
    }
    check_uniform_domains(train, cfg.noise);
    if (test_features.cols != train.features.cols ||
        test_features.domain_size != train.feature_domain()) {
        throw DimensionError("run_smoothing: test features do not match the training shape");
    }

    const std::uint32_t workers = resolve_workers(cfg.workers);
    const std::size_t n_test = test_features.rows;
    const std::uint32_t num_classes = train.num_classes;

    std::vector<std::vector<std::uint32_t>> local_tallies(
        workers, std::vector<std::uint32_t>(n_test * num_classes, 0));
    std::vector<Eigen::MatrixXd> noised_inputs(
        workers, Eigen::MatrixXd(static_cast<Eigen::Index>(n_test),
                                 static_cast<Eigen::Index>(test_features.cols)));
    std::atomic<std::uint32_t> done{0};

    parallel_for_index(cfg.n_classifiers, workers, [&](std::uint32_t w, std::uint32_t j) {
        const Classifier clf =
            train_ensemble_member(train, cfg.noise, cfg.train, cfg.master_seed, j);
        if (writer != nullptr) {
            writer->write_classifier(j, clf);
        }
        if (n_test > 0) {
            fill_noised_test_inputs(test_features, cfg.noise, cfg.master_seed, j,
                                    noised_inputs[w]);
            const std::vector<std::uint32_t> labels = predict_rows(clf, noised_inputs[w]);
            auto& tally = local_tallies[w];
            for (std::size_t i = 0; i < n_test; ++i) {
                ++tally[i * num_classes + labels[i]];
            }
        }
        const std::uint32_t finished = done.fetch_add(1, std::memory_order_relaxed) + 1;
        if (progress) progress(finished, cfg.n_classifiers);
    });

    // Integer merge across workers: identical totals for any schedule.
    std::vector<std::uint32_t> tally(n_test * num_classes, 0);
    for (const auto& local : local_tallies) {
        for (std::size_t i = 0; i < tally.size(); ++i) tally[i] += local[i];
    }
    return tally_to_votes(tally, n_test, num_classes);
}

std::vector<VoteCounts> votes_from_ensemble_file(const EnsembleReader& reader,
                                                 const SymbolMatrix& test_features,
                                                 std::uint32_t workers) {
    const EnsembleHeader& header = reader.header();
    if (test_features.cols != header.input_dim ||
        test_features.domain_size != header.domain_size) {
        throw DimensionError("votes_from_ensemble_file: test features do not match the ensemble");
    }
    const NoiseSpec spec(header.beta, header.domain_size);
    const std::size_t n_test = test_features.rows;
    const std::uint32_t num_classes = header.num_classes;
    const std::uint32_t n_workers = resolve_workers(workers);

    std::vector<std::vector<std::uint32_t>> local_tallies(
        n_workers, std::vector<std::uint32_t>(n_test * num_classes, 0));
    std::vector<Eigen::MatrixXd> noised_inputs(
        n_workers, Eigen::MatrixXd(static_cast<Eigen::Index>(n_test),
                                   static_cast<Eigen::Index>(test_features.cols)));

    parallel_for_index(header.n_classifiers, n_workers, [&](std::uint32_t w, std::uint32_t j) {
        const Classifier clf = reader.read_classifier(j);
        fill_noised_test_inputs(test_features, spec, header.master_seed, j, noised_inputs[w]);
        const std::vector<std::uint32_t> labels = predict_rows(clf, noised_inputs[w]);
        auto& tally = local_tallies[w];
        for (std::size_t i = 0; i < n_test; ++i) {
            ++tally[i * num_classes + labels[i]];
        }
    });

    std::vector<std::uint32_t> tally(n_test * num_classes, 0);
    for (const auto& local : local_tallies) {
        for (std::size_t i = 0; i < tally.size(); ++i) tally[i] += local[i];
    }
    return tally_to_votes(tally, n_test, num_classes);
}

} // namespace smoothcert
