#include "smoothcert/classifier.hpp"

#include <cmath>
#include <string>

#include "smoothcert/errors.hpp"
#include "smoothcert/rng.hpp"

namespace smoothcert {

namespace {

void fill_uniform(SplitMix64& rng, double bound, Eigen::Ref<Eigen::MatrixXd> m) {
    // Row-major fill order so the init is part of the format contract.
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = (2.0 * rng.next_double() - 1.0) * bound;
        }
    }
}

// Row-wise stable softmax of Z, written into P; returns mean cross-entropy.
double softmax_cross_entropy(const Eigen::MatrixXd& z, const std::vector<Symbol>& labels,
                             Eigen::MatrixXd& p) {
    const Eigen::Index n = z.rows();
    p = (z.colwise() - z.rowwise().maxCoeff()).array().exp();
    const Eigen::VectorXd row_sums = p.rowwise().sum();
    p.array().colwise() /= row_sums.array();
    double loss = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        loss -= std::log(p(t, static_cast<Eigen::Index>(labels[t])));
    }
    return loss / static_cast<double>(n);
}

double compute(const Eigen::MatrixXd& w1, const Eigen::VectorXd& b1, const Eigen::MatrixXd& w2,
               const Eigen::VectorXd& b2, const Eigen::MatrixXd& x,
               const std::vector<Symbol>& labels, Gradients& g) {
    const auto n = x.rows();
    const double inv_n = 1.0 / static_cast<double>(n);

    Eigen::MatrixXd z1 = (x * w1.transpose()).rowwise() + b1.transpose();
    Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
    Eigen::MatrixXd z2 = (a1 * w2.transpose()).rowwise() + b2.transpose();

    Eigen::MatrixXd p;
    const double loss = softmax_cross_entropy(z2, labels, p);

    Eigen::MatrixXd g2 = p;
    for (Eigen::Index t = 0; t < n; ++t) {
        g2(t, static_cast<Eigen::Index>(labels[t])) -= 1.0;
    }
    g2 *= inv_n;

    g.w2.noalias() = g2.transpose() * a1;
    g.b2 = g2.colwise().sum();
    Eigen::MatrixXd g1 = (g2 * w2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
    g.w1.noalias() = g1.transpose() * x;
    g.b1 = g1.colwise().sum();
    g.loss = loss;
    return loss;
}

} // namespace

Eigen::MatrixXd fractional_features(const SymbolMatrix& features) {
    Eigen::MatrixXd out(features.rows, features.cols);
    const double scale = 1.0 / features.domain_size;
    for (std::size_t r = 0; r < features.rows; ++r) {
        const Symbol* src = features.data.data() + r * features.cols;
        for (std::size_t c = 0; c < features.cols; ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = src[c] * scale;
        }
    }
    return out;
}

Gradients loss_and_gradients(const Classifier& clf, const Eigen::MatrixXd& inputs,
                             const std::vector<Symbol>& labels) {
    if (static_cast<std::size_t>(inputs.rows()) != labels.size()) {
        throw DimensionError("loss_and_gradients: rows do not match label count");
    }
    Gradients g;
    compute(clf.w1, clf.b1, clf.w2, clf.b2, inputs, labels, g);
    return g;
}

Classifier train_classifier(const TrainingSet& train, const TrainConfig& cfg, std::uint64_t seed) {
    if (train.size() == 0) {
        throw DataError("train_classifier: training set is empty");
    }
    if (cfg.hidden_units == 0) {
        throw ConfigError("train_classifier: hidden_units must be positive");
    }

    const auto input_dim = static_cast<Eigen::Index>(train.features.cols);
    const auto hidden = static_cast<Eigen::Index>(cfg.hidden_units);
    const auto classes = static_cast<Eigen::Index>(train.num_classes);

    Classifier clf;
    clf.feature_domain = train.feature_domain();
    clf.config = cfg;
    clf.seed = seed;
    clf.w1.resize(hidden, input_dim);
    clf.b1.resize(hidden);
    clf.w2.resize(classes, hidden);
    clf.b2.resize(classes);

    SplitMix64 rng(seed);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    fill_uniform(rng, bound1, clf.w1);
    fill_uniform(rng, bound1, clf.b1);
    fill_uniform(rng, bound2, clf.w2);
    fill_uniform(rng, bound2, clf.b2);

    const Eigen::MatrixXd x = fractional_features(train.features);
    Gradients g;
    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double loss = compute(clf.w1, clf.b1, clf.w2, clf.b2, x, train.labels, g);
        if (!std::isfinite(loss)) {
            throw TrainingError("training diverged: non-finite loss at epoch " +
                                std::to_string(epoch));
        }
        clf.w1 -= cfg.learning_rate * g.w1;
        clf.b1 -= cfg.learning_rate * g.b1;
        clf.w2 -= cfg.learning_rate * g.w2;
        clf.b2 -= cfg.learning_rate * g.b2;
    }
    if (!clf.w1.allFinite() || !clf.b1.allFinite() || !clf.w2.allFinite() || !clf.b2.allFinite()) {
        throw TrainingError("training diverged: non-finite weights after epoch " +
                            std::to_string(cfg.epochs - 1));
    }
    return clf;
}

std::uint32_t predict(const Classifier& clf, const EncodedVector& x) {
    if (x.size() != clf.input_dim()) {
        throw DimensionError("predict: input has " + std::to_string(x.size()) +
                             " dimensions, classifier expects " + std::to_string(clf.input_dim()));
    }
    if (x.domain_size != clf.feature_domain) {
        throw DomainError("predict: input domain_size does not match the classifier");
    }
    Eigen::VectorXd xf(static_cast<Eigen::Index>(x.size()));
    const double scale = 1.0 / x.domain_size;
    for (std::size_t j = 0; j < x.size(); ++j) {
        xf(static_cast<Eigen::Index>(j)) = x.symbols[j] * scale;
    }
    const Eigen::VectorXd h = ((clf.w1 * xf + clf.b1).cwiseMax(0.0));
    const Eigen::VectorXd logits = clf.w2 * h + clf.b2;
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < logits.size(); ++i) {
        if (logits(i) > logits(best)) best = i;
    }
    return static_cast<std::uint32_t>(best);
}

std::vector<std::uint32_t> predict_rows(const Classifier& clf, const Eigen::MatrixXd& inputs) {
    if (inputs.cols() != clf.w1.cols()) {
        throw DimensionError("predict_rows: input width does not match the classifier");
    }
    Eigen::MatrixXd z1 = ((inputs * clf.w1.transpose()).rowwise() + clf.b1.transpose()).cwiseMax(0.0);
    Eigen::MatrixXd logits = (z1 * clf.w2.transpose()).rowwise() + clf.b2.transpose();
    std::vector<std::uint32_t> labels(static_cast<std::size_t>(inputs.rows()));
    for (Eigen::Index t = 0; t < logits.rows(); ++t) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < logits.cols(); ++i) {
            if (logits(t, i) > logits(t, best)) best = i;
        }
        labels[static_cast<std::size_t>(t)] = static_cast<std::uint32_t>(best);
    }
    return labels;
}

double accuracy(const Classifier& clf, const TrainingSet& data) {
    if (data.size() == 0) {
        throw DataError("accuracy: empty dataset");
    }
    const Eigen::MatrixXd x = fractional_features(data.features);
    const std::vector<std::uint32_t> predicted = predict_rows(clf, x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (predicted[i] == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

} // namespace smoothcert
