#include "json_out.hpp"

#include <cmath>

#include "io_util.hpp"

namespace fracorder::detail {

namespace {

void emit(const Json& v, int depth, std::string& out) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close_pad(2 * depth, ' ');
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                emit(it.value(), depth + 1, out);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            bool scalars = true;
            for (const Json& e : v) scalars = scalars && !e.is_structured();
            if (scalars) {
                out += "[";
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (i) out += ", ";
                    emit(v[i], depth + 1, out);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                emit(v[i], depth + 1, out);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double d = v.get<double>();
            out += std::isfinite(d) ? format_double(d) : "null";
            return;
        }
        default:
            out += v.dump();
    }
}

}  // namespace

std::string dump_json(const Json& value) {
    std::string out;
    emit(value, 0, out);
    out += "\n";
    return out;
}

Json complex_json(double re, double im) { return Json::array({re, im}); }

}  // namespace fracorder::detail
