#pragma once

#include "run_config.hpp"

namespace smoothcert::cli {

void cmd_prepare(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_certify(const RunConfig& cfg);
void cmd_attack_eval(const RunConfig& cfg);

} // namespace smoothcert::cli
