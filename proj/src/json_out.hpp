#ifndef FRACORDER_SRC_JSON_OUT_HPP
#define FRACORDER_SRC_JSON_OUT_HPP

#include <string>

#include "json.hpp"

namespace fracorder::detail {

using Json = nlohmann::ordered_json;

/// Pretty-printed JSON with every floating-point number in "%.16e" form and a trailing newline.
std::string dump_json(const Json& value);

Json complex_json(double re, double im);

}  // namespace fracorder::detail

#endif  // FRACORDER_SRC_JSON_OUT_HPP
