#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <vector>

#include "smoothcert/errors.hpp"
#include "smoothcert/rng.hpp"
#include "smoothcert/smoothing.hpp"

using namespace smoothcert;
namespace fs = std::filesystem;

namespace {

TrainingSet random_binary_set(std::size_t n, std::size_t dim, std::uint64_t seed) {
    TrainingSet set;
    set.features.rows = n;
    set.features.cols = dim;
    set.features.domain_size = 2;
    set.features.data.resize(n * dim);
    set.labels.resize(n);
    set.num_classes = 2;
    SplitMix64 rng(seed);
    for (auto& s : set.features.data) s = static_cast<Symbol>(rng.next_below(2));
    for (std::size_t i = 0; i < n; ++i) {
        set.labels[i] = set.features.data[i * dim]; // learnable rule: label = first pixel
    }
    return set;
}

SymbolMatrix random_test_matrix(std::size_t n, std::size_t dim, std::uint64_t seed) {
    SymbolMatrix m;
    m.rows = n;
    m.cols = dim;
    m.domain_size = 2;
    m.data.resize(n * dim);
    SplitMix64 rng(seed);
    for (auto& s : m.data) s = static_cast<Symbol>(rng.next_below(2));
    return m;
}

Classifier constant_classifier(std::uint32_t winning_label, std::size_t dim,
                               std::uint32_t classes) {
    Classifier clf;
    clf.feature_domain = 2;
    clf.w1 = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(dim));
    clf.b1 = Eigen::VectorXd::Zero(1);
    clf.w2 = Eigen::MatrixXd::Zero(classes, 1);
    clf.b2 = Eigen::VectorXd::Zero(classes);
    clf.b2(winning_label) = 1.0;
    return clf;
}

bool same_weights(const Ensemble& a, const Ensemble& b) {
    if (a.size() != b.size()) return false;
    for (std::uint32_t j = 0; j < a.size(); ++j) {
        if (a.classifiers[j].w1 != b.classifiers[j].w1) return false;
        if (a.classifiers[j].b1 != b.classifiers[j].b1) return false;
        if (a.classifiers[j].w2 != b.classifiers[j].w2) return false;
        if (a.classifiers[j].b2 != b.classifiers[j].b2) return false;
    }
    return true;
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "smoothcert_smoothing_test";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("noised training set at beta near 1 differs in about binomial(T*D+T, 1-beta) spots") {
    const TrainingSet train = random_binary_set(100, 784, 8);
    const NoiseSpec spec(0.999, 2);
    const TrainingSet noised = noised_training_set(train, spec, 999, 0);

    std::size_t diffs = 0;
    for (std::size_t i = 0; i < train.features.data.size(); ++i) {
        if (train.features.data[i] != noised.features.data[i]) ++diffs;
    }
    for (std::size_t i = 0; i < train.labels.size(); ++i) {
        if (train.labels[i] != noised.labels[i]) ++diffs;
    }
    // mean 78.5, sigma ~8.86; allow 3 sigma
    CHECK(diffs >= 52);
    CHECK(diffs <= 105);
}

TEST_CASE("domain mismatch between features and labels is a configuration error") {
    TrainingSet train = random_binary_set(6, 5, 3);
    train.num_classes = 3; // features d=2, labels c=3
    train.labels = {0, 1, 2, 0, 1, 2};
    const NoiseSpec spec(0.9, 2);
    CHECK_THROWS_AS(noised_training_set(train, spec, 1, 0), ConfigError);
    CHECK_THROWS_AS(build_ensemble(train, spec, 2, {4, 5, 0.2}, 1), ConfigError);
}

TEST_CASE("build_ensemble is identical across worker counts") {
    const TrainingSet train = random_binary_set(16, 12, 21);
    const NoiseSpec spec(0.9, 2);
    const TrainConfig cfg{8, 20, 0.3};
    const Ensemble serial = build_ensemble(train, spec, 12, cfg, 777, 1);
    const Ensemble parallel_8 = build_ensemble(train, spec, 12, cfg, 777, 8);
    CHECK(same_weights(serial, parallel_8));
    CHECK(serial.fingerprint == parallel_8.fingerprint);

    const Ensemble other_seed = build_ensemble(train, spec, 12, cfg, 778, 8);
    CHECK(!same_weights(serial, other_seed));
}

TEST_CASE("smoothed_votes: totals, determinism, constant ensembles") {
    const TrainingSet train = random_binary_set(10, 8, 4);
    const NoiseSpec spec(0.8, 2);
    const Ensemble ens = build_ensemble(train, spec, 7, {4, 10, 0.3}, 42);
    const EncodedVector x = train.features.row_vector(0);

    const VoteCounts votes = smoothed_votes(ens, x, 3);
    CHECK(votes.n_samples == 7);
    CHECK(votes.counts.size() == 2);

    const VoteCounts again = smoothed_votes(ens, x, 3);
    CHECK(votes.counts == again.counts);

    Ensemble constant{{}, spec, spec, 5, 0};
    for (int j = 0; j < 9; ++j) constant.classifiers.push_back(constant_classifier(1, 8, 2));
    const VoteCounts ones = smoothed_votes(constant, x, 0);
    CHECK(ones.counts == std::vector<std::uint32_t>{0, 9});
}

TEST_CASE("certify_from_votes: perfect votes, split votes, N drives the radius") {
    const NoiseSpec spec(0.9, 2);

    SUBCASE("N=10000 perfect votes certify radius 2") {
        const CertificationResult res = certify_from_votes(
            VoteCounts::validated({0, 10000}), 1, 1e-6, spec, 17);
        CHECK(res.predicted_label == 1);
        CHECK(!res.abstain);
        CHECK(std::abs(res.p_lower - 0.998619) < 1e-6);
        REQUIRE(res.radius.has_value());
        CHECK(*res.radius == 2);
        CHECK(res.example_index == 17);
    }
    SUBCASE("split votes abstain") {
        const CertificationResult res = certify_from_votes(
            VoteCounts::validated({5000, 5000}), 0, 1e-6, spec, 0);
        CHECK(res.abstain);
        CHECK(!res.radius.has_value());
        CHECK(res.p_lower < 0.5);
    }
    SUBCASE("N=100 perfect votes only reach radius 0") {
        const CertificationResult res = certify_from_votes(
            VoteCounts::validated({0, 100}), 1, 1e-6, spec, 0);
        CHECK(!res.abstain);
        CHECK(std::abs(res.p_lower - std::pow(1e-6, 0.01)) < 1e-9);
        REQUIRE(res.radius.has_value());
        CHECK(*res.radius == 0);
    }
}

TEST_CASE("certify_example end to end on a constant ensemble") {
    const NoiseSpec spec(0.9, 2);
    Ensemble constant{{}, spec, spec, 5, 0};
    for (int j = 0; j < 10000; ++j) constant.classifiers.push_back(constant_classifier(1, 6, 2));
    const EncodedVector x = EncodedVector::validated({0, 1, 0, 1, 1, 0}, 2);
    const CertificationResult res = certify_example(constant, x, 1, 1e-6, 0);
    CHECK(res.votes.counts == std::vector<std::uint32_t>{0, 10000});
    REQUIRE(res.radius.has_value());
    CHECK(*res.radius == 2); // the cap at the operating point
}

TEST_CASE("ensemble reuse: certified twice is identical, certify is cheaper than train") {
    const TrainingSet train = random_binary_set(40, 30, 6);
    const NoiseSpec spec(0.9, 2);

    const auto t0 = std::chrono::steady_clock::now();
    const Ensemble ens = build_ensemble(train, spec, 40, {16, 80, 0.4}, 99);
    const auto t1 = std::chrono::steady_clock::now();

    const EncodedVector x = train.features.row_vector(1);
    const CertificationResult a = certify_example(ens, x, train.labels[1], 1e-4, 5);
    const CertificationResult b = certify_example(ens, x, train.labels[1], 1e-4, 5);
    const auto t2 = std::chrono::steady_clock::now();

    CHECK(a.votes.counts == b.votes.counts);
    CHECK(a.p_lower == b.p_lower);
    CHECK(a.radius == b.radius);
    // two certifications without retraining take far less time than training
    CHECK((t2 - t1) < (t1 - t0));
}

TEST_CASE("certified_accuracy: counting rules and monotonicity") {
    auto result = [](std::uint32_t truth, std::uint32_t predicted, bool abstain,
                     std::optional<std::uint32_t> radius) {
        CertificationResult r;
        r.true_label = truth;
        r.predicted_label = predicted;
        r.abstain = abstain;
        r.votes = VoteCounts::validated({1, 1});
        r.radius = radius;
        return r;
    };

    const std::vector<CertificationResult> all_correct(3, result(1, 1, false, 2));
    CHECK(certified_accuracy(all_correct, 2) == doctest::Approx(1.0));

    const std::vector<CertificationResult> all_abstain(4, result(1, 0, true, std::nullopt));
    CHECK(certified_accuracy(all_abstain, 0) == doctest::Approx(0.0));

    const std::vector<CertificationResult> mixed = {
        result(1, 1, false, 2), // correct at r=2
        result(0, 0, false, 1), // correct but only r=1
        result(0, 1, false, 2), // wrong prediction
    };
    CHECK(certified_accuracy(mixed, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(certified_accuracy(mixed, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(certified_accuracy(mixed, 0) == doctest::Approx(2.0 / 3.0));

    double prev = 1.0;
    for (std::uint32_t r = 0; r <= 4; ++r) {
        const double acc = certified_accuracy(mixed, r);
        CHECK(acc <= prev);
        prev = acc;
    }

    CHECK_THROWS_AS(certified_accuracy({}, 0), DomainError);
}

TEST_CASE("run_smoothing matches the in-memory ensemble vote for vote") {
    const TrainingSet train = random_binary_set(20, 16, 12);
    const SymbolMatrix test = random_test_matrix(9, 16, 13);
    const NoiseSpec spec(0.85, 2);
    const TrainConfig cfg{6, 15, 0.3};
    const std::uint64_t master = 314159;

    const Ensemble ens = build_ensemble(train, spec, 11, cfg, master);
    SmoothingRunConfig run_cfg{spec, cfg, 11, master, 2};
    const std::vector<VoteCounts> streamed = run_smoothing(train, test, run_cfg);

    REQUIRE(streamed.size() == 9);
    for (std::size_t i = 0; i < test.rows; ++i) {
        const VoteCounts direct = smoothed_votes(ens, test.row_vector(i), i);
        CHECK(streamed[i].counts == direct.counts);
    }
}

TEST_CASE("run_smoothing votes are identical across worker counts") {
    const TrainingSet train = random_binary_set(14, 10, 31);
    const SymbolMatrix test = random_test_matrix(6, 10, 32);
    const NoiseSpec spec(0.9, 2);
    const TrainConfig cfg{4, 12, 0.5};

    std::vector<std::vector<VoteCounts>> results;
    for (std::uint32_t workers : {1u, 4u, 8u}) {
        SmoothingRunConfig cfg_run{spec, cfg, 10, 2718, workers};
        results.push_back(run_smoothing(train, test, cfg_run));
    }
    for (std::size_t i = 0; i < test.rows; ++i) {
        CHECK(results[0][i].counts == results[1][i].counts);
        CHECK(results[0][i].counts == results[2][i].counts);
    }
}

TEST_CASE("ensemble file round-trips and validates") {
    const TrainingSet train = random_binary_set(12, 11, 41);
    const NoiseSpec spec(0.9, 2);
    const TrainConfig cfg{5, 10, 0.25};
    const std::uint64_t master = 555;
    const std::uint64_t fingerprint = training_fingerprint(train, cfg, spec);

    const fs::path path = temp_dir() / "small.smcens";
    EnsembleHeader header{1,
                          6,
                          spec.beta,
                          spec.domain_size,
                          train.num_classes,
                          static_cast<std::uint32_t>(train.features.cols),
                          cfg.hidden_units,
                          cfg.epochs,
                          cfg.learning_rate,
                          master,
                          fingerprint};

    const Ensemble ens = build_ensemble(train, spec, 6, cfg, master);
    {
        EnsembleWriter writer(path, header);
        for (std::uint32_t j = 0; j < 6; ++j) writer.write_classifier(j, ens.classifiers[j]);
        writer.commit();
    }

    EnsembleReader reader(path);
    CHECK(reader.header().n_classifiers == 6);
    CHECK(reader.header().beta == spec.beta);
    CHECK(reader.header().training_fingerprint == fingerprint);
    for (std::uint32_t j = 0; j < 6; ++j) {
        const Classifier loaded = reader.read_classifier(j);
        CHECK(loaded.w1 == ens.classifiers[j].w1);
        CHECK(loaded.b1 == ens.classifiers[j].b1);
        CHECK(loaded.w2 == ens.classifiers[j].w2);
        CHECK(loaded.b2 == ens.classifiers[j].b2);
    }

    SUBCASE("votes from file equal votes from memory") {
        const SymbolMatrix test = random_test_matrix(5, 11, 42);
        const std::vector<VoteCounts> from_file = votes_from_ensemble_file(reader, test, 2);
        for (std::size_t i = 0; i < test.rows; ++i) {
            const VoteCounts direct = smoothed_votes(ens, test.row_vector(i), i);
            CHECK(from_file[i].counts == direct.counts);
        }
    }

    SUBCASE("uncommitted writers leave no file behind") {
        const fs::path orphan = temp_dir() / "orphan.smcens";
        {
            EnsembleWriter writer(orphan, header);
            writer.write_classifier(0, ens.classifiers[0]);
            // no commit
        }
        CHECK(!fs::exists(orphan));
        fs::path tmp = orphan;
        tmp += ".tmp";
        CHECK(!fs::exists(tmp));
    }

    SUBCASE("truncated files are rejected") {
        const fs::path broken = temp_dir() / "broken.smcens";
        fs::copy_file(path, broken, fs::copy_options::overwrite_existing);
        fs::resize_file(broken, fs::file_size(broken) - 16);
        CHECK_THROWS_AS(EnsembleReader{broken}, FormatError);
    }
}

TEST_CASE("training fingerprint reacts to data and hyperparameters") {
    const TrainingSet train = random_binary_set(8, 6, 70);
    const NoiseSpec spec(0.9, 2);
    const TrainConfig cfg{4, 10, 0.5};
    const std::uint64_t base = training_fingerprint(train, cfg, spec);

    TrainingSet changed = train;
    changed.features.data[0] ^= 1;
    CHECK(training_fingerprint(changed, cfg, spec) != base);

    TrainConfig other_cfg = cfg;
    other_cfg.epochs = 11;
    CHECK(training_fingerprint(train, other_cfg, spec) != base);

    CHECK(training_fingerprint(train, cfg, NoiseSpec(0.8, 2)) != base);
    CHECK(training_fingerprint(train, cfg, spec) == base);
}
