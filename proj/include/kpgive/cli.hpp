#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kpgive/json_io.hpp"
#include "kpgive/wave.hpp"

namespace kpgive {

// One validated run configuration. Commands read the fields they need:
// charges for tau, sign for psi, side for derive, target for check and
// stabilize, sample + seed for sample.
struct RunConfig {
    int n = 1;
    Cutoffs cut;
    LoopGrp<Scalar> group;  // identity when the config gives no factors
    std::optional<LoopAlg<Scalar>> algebra;
    std::vector<int> charges;
    int sign = +1;
    std::string side;
    std::string target;
    std::uint64_t seed = 0;
    Json sample = Json::object();
};

// Parses and validates a config object. Throws InconsistentInput on
// malformed fields, NotTwisted on twist violations, and enforces the
// desk-scale guard n <= 6 unless allow_large_n is set.
RunConfig config_from_json(const Json& j, bool allow_large_n);

// Canonical config echo embedded in every report.
Json config_echo(const RunConfig& c);

// Applies "E,W,Z,T,D" (comma-separated integers) over the configured
// cutoffs. A value of -1 for E restores the derived default.
void override_cutoffs(RunConfig& c, const std::string& spec);

// Runs one driver command and writes the report JSON to out. Returns the
// process exit code: 0 when every asserted residual is exactly zero within
// trust, 1 when a verification target is falsified, 2 on invalid input.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out);

} // namespace kpgive
