#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"
#include "run_config.hpp"
#include "smoothcert/errors.hpp"

namespace {

using smoothcert::cli::RunConfig;

// Flags land in optionals so a flag can override a config-file key without
// clobbering keys the user did not mention.
struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> images, labels, out;
    std::optional<std::uint32_t> train_size, test_size, num_classifiers, hidden, epochs, workers;
    std::optional<std::uint32_t> trigger_target, poison_count;
    std::optional<double> beta, alpha, lr;
    std::optional<std::uint64_t> seed, attack_seed;
    std::optional<std::string> digits, trigger_positions, trigger_values;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "flat key=value config file; flags override its keys");
    cmd->add_option("--images", o.images, "IDX image file");
    cmd->add_option("--labels", o.labels, "IDX label file");
    cmd->add_option("--digits", o.digits, "the two digits to keep, e.g. 1,7");
    cmd->add_option("--train-size", o.train_size, "training examples to draw");
    cmd->add_option("--test-size", o.test_size, "test examples to draw");
    cmd->add_option("--beta", o.beta, "probability a noised symbol keeps its value");
    cmd->add_option("--num-classifiers", o.num_classifiers, "ensemble size N");
    cmd->add_option("--alpha", o.alpha, "global significance level (confidence 1-alpha)");
    cmd->add_option("--hidden", o.hidden, "hidden units of the base network");
    cmd->add_option("--epochs", o.epochs, "full-batch training epochs");
    cmd->add_option("--lr", o.lr, "learning rate");
    cmd->add_option("--seed", o.seed, "master seed; all randomness derives from it");
    cmd->add_option("--workers", o.workers, "worker threads (0 = hardware, never affects output)");
    cmd->add_option("--out", o.out, "output directory for datasets, ensembles and reports");
    cmd->add_option("--trigger-positions", o.trigger_positions,
                    "comma-separated trigger pixel indices");
    cmd->add_option("--trigger-values", o.trigger_values, "comma-separated trigger pixel symbols");
    cmd->add_option("--trigger-target", o.trigger_target, "attack target label");
    cmd->add_option("--poison-count", o.poison_count, "training examples to poison");
    cmd->add_option("--attack-seed", o.attack_seed,
                    "seed for the attacked rerun (0 = derive from --seed)");
}

RunConfig resolve(const Overrides& o) {
    RunConfig cfg;
    if (o.config) cfg = smoothcert::cli::load_config(*o.config);
    if (o.images) cfg.images = *o.images;
    if (o.labels) cfg.labels = *o.labels;
    if (o.digits) {
        const auto digits = smoothcert::cli::parse_u32_list(*o.digits, "--digits");
        if (digits.size() != 2) {
            throw smoothcert::ConfigError("--digits needs exactly two values, e.g. --digits 1,7");
        }
        cfg.digit_a = digits[0];
        cfg.digit_b = digits[1];
    }
    if (o.train_size) cfg.train_size = *o.train_size;
    if (o.test_size) cfg.test_size = *o.test_size;
    if (o.beta) cfg.beta = *o.beta;
    if (o.num_classifiers) cfg.num_classifiers = *o.num_classifiers;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.hidden) cfg.hidden = *o.hidden;
    if (o.epochs) cfg.epochs = *o.epochs;
    if (o.lr) cfg.lr = *o.lr;
    if (o.seed) cfg.seed = *o.seed;
    if (o.workers) cfg.workers = *o.workers;
    if (o.out) cfg.out = *o.out;
    if (o.trigger_positions) {
        cfg.trigger_positions = smoothcert::cli::parse_u32_list(*o.trigger_positions,
                                                                "--trigger-positions");
    }
    if (o.trigger_values) {
        cfg.trigger_values = smoothcert::cli::parse_u32_list(*o.trigger_values,
                                                             "--trigger-values");
    }
    if (o.trigger_target) cfg.trigger_target = *o.trigger_target;
    if (o.poison_count) cfg.poison_count = *o.poison_count;
    if (o.attack_seed) cfg.attack_seed = *o.attack_seed;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"smoothcert: certified defense against backdoor attacks via randomized "
                 "smoothing of the whole train-and-predict pipeline"};
    app.require_subcommand(1);

    Overrides o;
    CLI::App* prepare = app.add_subcommand(
        "prepare", "binarize a two-digit subset and write the dataset container");
    CLI::App* train =
        app.add_subcommand("train", "train the smoothing ensemble and persist it");
    CLI::App* certify = app.add_subcommand(
        "certify", "vote, bound the top-label probability, emit radii and accuracy curves");
    CLI::App* attack_eval = app.add_subcommand(
        "attack-eval", "inject a backdoor, retrain from fresh seeds, check certificates hold");
    for (CLI::App* cmd : {prepare, train, certify, attack_eval}) {
        add_common_options(cmd, o);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const RunConfig cfg = resolve(o);
        if (prepare->parsed()) smoothcert::cli::cmd_prepare(cfg);
        if (train->parsed()) smoothcert::cli::cmd_train(cfg);
        if (certify->parsed()) smoothcert::cli::cmd_certify(cfg);
        if (attack_eval->parsed()) smoothcert::cli::cmd_attack_eval(cfg);
        return 0;
    } catch (const smoothcert::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const smoothcert::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const smoothcert::DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const smoothcert::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
