#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "smoothcert/dataset.hpp"
#include "smoothcert/noise.hpp"

namespace smoothcert {

// Hyperparameters of the base learner. Full-batch gradient descent keeps the
// whole procedure a pure function of (data, config, seed): no shuffle order.
struct TrainConfig {
    std::uint32_t hidden_units = 64;
    std::uint32_t epochs = 200;
    double learning_rate = 0.5;
};

// One hidden layer with ReLU, then a softmax readout.
struct Classifier {
    Eigen::MatrixXd w1; // hidden x input
    Eigen::VectorXd b1; // hidden
    Eigen::MatrixXd w2; // classes x hidden
    Eigen::VectorXd b2; // classes
    std::uint32_t feature_domain = 2;
    TrainConfig config;
    std::uint64_t seed = 0;

    std::size_t input_dim() const noexcept { return static_cast<std::size_t>(w1.cols()); }
    std::uint32_t num_classes() const noexcept { return static_cast<std::uint32_t>(w2.rows()); }
};

struct Gradients {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;
    Eigen::VectorXd b2;
    double loss = 0.0;
};

// Integer symbols presented to the network as symbol / domain_size.
Eigen::MatrixXd fractional_features(const SymbolMatrix& features);

// Mean cross-entropy at the classifier's current weights, with gradients.
// Shared by the training loop and the finite-difference checks.
Gradients loss_and_gradients(const Classifier& clf, const Eigen::MatrixXd& inputs,
                             const std::vector<Symbol>& labels);

// Trains by full-batch gradient descent from a seeded uniform init in
// [-1/sqrt(fan_in), +1/sqrt(fan_in)]. Deterministic given (train, cfg, seed).
// Throws TrainingError naming the epoch if the loss leaves the finite range.
Classifier train_classifier(const TrainingSet& train, const TrainConfig& cfg, std::uint64_t seed);

// Argmax of the output logits; ties break toward the smallest label.
std::uint32_t predict(const Classifier& clf, const EncodedVector& x);

// Batched prediction over pre-scaled fractional rows (one example per row).
std::vector<std::uint32_t> predict_rows(const Classifier& clf, const Eigen::MatrixXd& inputs);

// Fraction of examples the classifier labels correctly, without any noise.
double accuracy(const Classifier& clf, const TrainingSet& data);

} // namespace smoothcert
