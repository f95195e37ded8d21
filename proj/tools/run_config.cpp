#include "run_config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "smoothcert/errors.hpp"

namespace smoothcert::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string format_u32_list(const std::vector<std::uint32_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::vector<std::uint32_t> parse_u32_list(const std::string& value, const std::string& key) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
        } catch (const std::exception&) {
            throw ConfigError("bad value '" + item + "' in list " + key);
        }
    }
    return out;
}

TriggerSpec RunConfig::trigger() const {
    TriggerSpec trig;
    trig.pixel_positions = trigger_positions;
    trig.pixel_values.assign(trigger_values.begin(), trigger_values.end());
    trig.target_label = trigger_target;
    trig.poison_count = poison_count;
    return trig;
}

void RunConfig::validate() const {
    if (train_size == 0 || test_size == 0) {
        throw ConfigError("config: train_size and test_size must be positive");
    }
    if (!(beta > 0.0) || !(beta < 1.0)) {
        throw ConfigError("config: beta must lie strictly between 0 and 1");
    }
    if (num_classifiers == 0) {
        throw ConfigError("config: num_classifiers must be positive");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ConfigError("config: alpha must lie strictly between 0 and 1");
    }
    if (hidden == 0 || epochs == 0) {
        throw ConfigError("config: hidden and epochs must be positive");
    }
    if (!(lr > 0.0)) {
        throw ConfigError("config: lr must be positive");
    }
    if (digit_a == digit_b) {
        throw ConfigError("config: the two digits must differ");
    }
    if (digit_a > 255 || digit_b > 255) {
        throw ConfigError("config: digits must be raw label bytes (0..255)");
    }
    if (trigger_positions.size() != trigger_values.size()) {
        throw ConfigError("config: trigger_positions and trigger_values differ in length");
    }
    if (out.empty()) {
        throw ConfigError("config: out directory must be set");
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        try {
            if (key == "images") cfg.images = value;
            else if (key == "labels") cfg.labels = value;
            else if (key == "digit_a") cfg.digit_a = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "digit_b") cfg.digit_b = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "train_size") cfg.train_size = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "test_size") cfg.test_size = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "beta") cfg.beta = std::stod(value);
            else if (key == "num_classifiers") cfg.num_classifiers = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "alpha") cfg.alpha = std::stod(value);
            else if (key == "hidden") cfg.hidden = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "epochs") cfg.epochs = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "lr") cfg.lr = std::stod(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "workers") cfg.workers = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "out") cfg.out = value;
            else if (key == "trigger_positions") cfg.trigger_positions = parse_u32_list(value, key);
            else if (key == "trigger_values") cfg.trigger_values = parse_u32_list(value, key);
            else if (key == "trigger_target") cfg.trigger_target = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "poison_count") cfg.poison_count = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "attack_seed") cfg.attack_seed = std::stoull(value);
            else throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                   ": unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad value '" +
                              value + "' for key '" + key + "'");
        }
    }
    return cfg;
}

void save_config(const std::filesystem::path& path, const RunConfig& cfg) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write config file: " + path.string());
    }
    out << "# smoothcert run configuration\n";
    out << "images = " << cfg.images << "\n";
    out << "labels = " << cfg.labels << "\n";
    out << "digit_a = " << cfg.digit_a << "\n";
    out << "digit_b = " << cfg.digit_b << "\n";
    out << "train_size = " << cfg.train_size << "\n";
    out << "test_size = " << cfg.test_size << "\n";
    out << "beta = " << format_double(cfg.beta) << "\n";
    out << "num_classifiers = " << cfg.num_classifiers << "\n";
    out << "alpha = " << format_double(cfg.alpha) << "\n";
    out << "hidden = " << cfg.hidden << "\n";
    out << "epochs = " << cfg.epochs << "\n";
    out << "lr = " << format_double(cfg.lr) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "workers = " << cfg.workers << "\n";
    out << "out = " << cfg.out << "\n";
    out << "trigger_positions = " << format_u32_list(cfg.trigger_positions) << "\n";
    out << "trigger_values = " << format_u32_list(cfg.trigger_values) << "\n";
    out << "trigger_target = " << cfg.trigger_target << "\n";
    out << "poison_count = " << cfg.poison_count << "\n";
    out << "attack_seed = " << cfg.attack_seed << "\n";
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.images == b.images && a.labels == b.labels && a.digit_a == b.digit_a &&
           a.digit_b == b.digit_b && a.train_size == b.train_size && a.test_size == b.test_size &&
           a.beta == b.beta && a.num_classifiers == b.num_classifiers && a.alpha == b.alpha &&
           a.hidden == b.hidden && a.epochs == b.epochs && a.lr == b.lr && a.seed == b.seed &&
           a.workers == b.workers && a.out == b.out &&
           a.trigger_positions == b.trigger_positions && a.trigger_values == b.trigger_values &&
           a.trigger_target == b.trigger_target && a.poison_count == b.poison_count &&
           a.attack_seed == b.attack_seed;
}

} // namespace smoothcert::cli
