#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace casimir::cli {

enum ExitCode : int { ok = 0, no_convergence = 2, usage = 64, data = 65 };

/// "x" or "start:stop:count" or "start:stop:countlog".
struct RangeSpec {
    std::vector<double> values;
    bool is_range = false;
};

RangeSpec parse_range(const std::string& text);

/// args excludes the program name. CSV goes to `out` unless --out is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace casimir::cli
