#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "smoothcert/classifier.hpp"
#include "smoothcert/dataset.hpp"
#include "smoothcert/ensemble_io.hpp"
#include "smoothcert/estimation.hpp"
#include "smoothcert/noise.hpp"
#include "smoothcert/radius.hpp"

namespace smoothcert {

// N classifiers, each trained on an independently noised copy of the same
// training set. Feature noise and label noise share (beta, domain size);
// certification over a combined perturbation budget is undefined otherwise
// and construction rejects mismatched domains outright.
struct Ensemble {
    std::vector<Classifier> classifiers;
    NoiseSpec noise_features;
    NoiseSpec noise_labels;
    std::uint64_t master_seed = 0;
    std::uint64_t fingerprint = 0;

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(classifiers.size()); }
};

// Seed plumbing shared by the in-memory ensemble, the streaming runner and
// the certify command, so all three see identical noise.
std::uint64_t feature_noise_seed(std::uint64_t master_seed, std::uint32_t classifier_index);
std::uint64_t label_noise_seed(std::uint64_t master_seed, std::uint32_t classifier_index);
std::uint64_t classifier_init_seed(std::uint64_t master_seed, std::uint32_t classifier_index);
std::uint64_t test_noise_seed(std::uint64_t master_seed, std::uint32_t classifier_index,
                              std::uint64_t example_index);

// The noised copy (features + labels) classifier `classifier_index` trains on.
TrainingSet noised_training_set(const TrainingSet& train, const NoiseSpec& spec,
                                std::uint64_t master_seed, std::uint32_t classifier_index);

Classifier train_ensemble_member(const TrainingSet& train, const NoiseSpec& spec,
                                 const TrainConfig& cfg, std::uint64_t master_seed,
                                 std::uint32_t classifier_index);

// Trains all members (parallel over classifier index when workers > 1; the
// result is identical for any worker count).
Ensemble build_ensemble(const TrainingSet& train, const NoiseSpec& spec,
                        std::uint32_t n_classifiers, const TrainConfig& cfg,
                        std::uint64_t master_seed, std::uint32_t workers = 1);

// Tallies each member's prediction on an independently noised copy of x.
// Test noise is keyed by (classifier, example), so re-certifying the same
// example reproduces the same counts while distinct examples get fresh noise.
VoteCounts smoothed_votes(const Ensemble& ens, const EncodedVector& x,
                          std::uint64_t example_index);

struct CertificationResult {
    std::uint64_t example_index = 0;
    std::uint32_t true_label = 0;
    std::uint32_t predicted_label = 0; // argmax of votes, reported even on abstain
    bool abstain = false;              // no majority established at this confidence
    VoteCounts votes;
    double p_lower = 0.0;
    std::optional<std::uint32_t> radius; // engaged iff p_lower > 1/2
};

// The pure certification step: Clopper-Pearson lower bound on the top vote,
// then the certified radius. Abstains when the bound does not clear 1/2.
CertificationResult certify_from_votes(const VoteCounts& votes, std::uint32_t true_label,
                                       double per_example_alpha, const NoiseSpec& spec,
                                       std::uint64_t example_index);

CertificationResult certify_example(const Ensemble& ens, const EncodedVector& x,
                                    std::uint32_t true_label, double per_example_alpha,
                                    std::uint64_t example_index);

// Fraction of results that are correctly predicted AND certified at radius
// >= r. Abstentions and uncertified results count as failures at every r.
double certified_accuracy(const std::vector<CertificationResult>& results, std::uint32_t r);

// Streaming train-and-vote over a whole test set. Classifiers are trained,
// optionally persisted, used to vote on every test example, and discarded,
// so memory stays flat no matter how large the ensemble is.
struct SmoothingRunConfig {
    NoiseSpec noise;
    TrainConfig train;
    std::uint32_t n_classifiers = 1;
    std::uint64_t master_seed = 0;
    std::uint32_t workers = 1; // 0 = hardware concurrency
};

using ProgressFn = std::function<void(std::uint32_t done, std::uint32_t total)>;

std::vector<VoteCounts> run_smoothing(const TrainingSet& train, const SymbolMatrix& test_features,
                                      const SmoothingRunConfig& cfg,
                                      EnsembleWriter* writer = nullptr,
                                      const ProgressFn& progress = {});

// Vote tally from an already-persisted ensemble (the certify command's path).
// Produces exactly the counts run_smoothing produced when it wrote the file.
std::vector<VoteCounts> votes_from_ensemble_file(const EnsembleReader& reader,
                                                 const SymbolMatrix& test_features,
                                                 std::uint32_t workers = 1);

} // namespace smoothcert
