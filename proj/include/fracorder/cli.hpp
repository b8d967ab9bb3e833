#ifndef FRACORDER_CLI_HPP
#define FRACORDER_CLI_HPP

#include <string>
#include <vector>

#include "fracorder/core.hpp"

namespace fracorder {

/// 0 ok, 2 usage, 3 numeric failure, 4 model/domain error, 5 inverse-problem precondition.
int exit_code_for(ErrorKind kind);

/// Parses z as "re", "re,im", "a+bi", "a-bi" or "bi".
Complex parse_complex(const std::string& text);

/// Entry point of the fracorder executable.
int run_cli(int argc, char** argv);

}  // namespace fracorder

#endif  // FRACORDER_CLI_HPP
