#pragma once

// JSON forms of configurations and artifacts. Artifact files are canonical:
// sorted keys, fixed indentation, shortest round-trip doubles and no -0, so
// identical inputs give byte-identical files.

#include "vilenkin/vilenkin.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace vilenkin::cli {

using Json = nlohmann::json;

inline double canonical_double(double v) { return v == 0.0 ? 0.0 : v; }

inline Json complex_to_json(Complex c) { return Json::array({canonical_double(c.real()), canonical_double(c.imag())}); }

inline Json complex_array_to_json(std::span<const Complex> values)
{
    Json out = Json::array();
    for (const auto& v : values)
        out.push_back(complex_to_json(v));
    return out;
}

inline Json int_matrix_to_json(const IntMatrix& a)
{
    Json out = Json::array();
    for (const auto& row : a.to_rows())
        out.push_back(row);
    return out;
}

inline Json digits_to_json(const DigitSet& set)
{
    Json out = Json::array();
    for (const auto& d : set.digits)
        out.push_back(d);
    return out;
}

inline std::string side_name(Side side) { return side == Side::primal ? "primal" : "dual"; }

inline Json test_function_to_json(const TestFunction& f)
{
    return Json{{"kind", "test_function"},
                {"side", side_name(f.side())},
                {"n", f.smoothness()},
                {"K", f.support()},
                {"values", complex_array_to_json(f.values())}};
}

inline Json walsh_polynomial_to_json(const WalshPolynomial& p)
{
    return Json{{"kind", "walsh_polynomial"}, {"order", p.order()}, {"values", complex_array_to_json(p.values())}};
}

inline Json mask_family_to_json(const MaskFamily& family)
{
    Json masks = Json::array();
    for (const auto& mask : family.masks)
        masks.push_back(complex_array_to_json(mask.values()));
    return Json{{"kind", "mask_family"}, {"order", family.order()}, {"masks", masks}};
}

inline Json group_to_json(const GroupContext& ctx)
{
    return Json{{"matrix", int_matrix_to_json(ctx.pair().M)},
                {"digits", digits_to_json(ctx.digits(Side::primal))},
                {"dual_digits", digits_to_json(ctx.digits(Side::dual))}};
}

/// Thrown for malformed input; `where` names the file and field.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& where, const std::string& what) : std::runtime_error(where + ": " + what) {}
};

namespace detail {

inline const Json& field(const Json& obj, const std::string& key, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key))
        throw InputError(where, "missing field '" + key + "'");
    return obj.at(key);
}

inline std::int64_t as_int(const Json& v, const std::string& where)
{
    if (!v.is_number_integer())
        throw InputError(where, "expected an integer");
    return v.get<std::int64_t>();
}

inline Complex as_complex(const Json& v, const std::string& where)
{
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw InputError(where, "expected a number or a [re, im] pair");
}

inline std::vector<Complex> as_complex_array(const Json& v, const std::string& where)
{
    if (!v.is_array())
        throw InputError(where, "expected an array of [re, im] pairs");
    std::vector<Complex> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_complex(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline IntVector as_int_vector(const Json& v, const std::string& where)
{
    if (!v.is_array())
        throw InputError(where, "expected an integer vector");
    IntVector out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_int(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline IntMatrix as_int_matrix(const Json& v, const std::string& where)
{
    if (!v.is_array() || v.empty())
        throw InputError(where, "expected a non-empty array of rows");
    std::vector<IntVector> rows;
    for (std::size_t i = 0; i < v.size(); ++i) {
        rows.push_back(as_int_vector(v[i], where + "[" + std::to_string(i) + "]"));
        if (rows.back().size() != rows.front().size())
            throw InputError(where, "rows have different lengths");
    }
    return IntMatrix::from_rows(rows);
}

inline std::vector<IntVector> as_digit_list(const Json& v, const std::string& where)
{
    if (!v.is_array())
        throw InputError(where, "expected a list of integer vectors");
    std::vector<IntVector> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_int_vector(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline Side as_side(const Json& v, const std::string& where)
{
    if (v == "primal")
        return Side::primal;
    if (v == "dual")
        return Side::dual;
    throw InputError(where, "side must be \"primal\" or \"dual\"");
}

// 1-based line and column of a byte offset, for parse diagnostics.
inline std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t offset)
{
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

} // namespace detail

inline Json parse_json_text(const std::string& text, const std::string& name)
{
    try {
        return Json::parse(text, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        const auto [line, column] = detail::line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw InputError(name + ":" + std::to_string(line) + ":" + std::to_string(column), "JSON syntax error");
    }
}

inline Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError(path.string(), "cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_json_text(buffer.str(), path.string());
}

inline std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::ArtifactError, "cannot write " + path.string());
    out << text;
    if (!out)
        throw Error(ErrorCode::ArtifactError, "write failed for " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, canonical_dump(j)); }

inline ContextPtr group_from_json(const Json& j, const std::string& where)
{
    const IntMatrix M = detail::as_int_matrix(detail::field(j, "matrix", where), where + ".matrix");
    std::optional<std::vector<IntVector>> primal, dual;
    if (j.contains("digits"))
        primal = detail::as_digit_list(j.at("digits"), where + ".digits");
    if (j.contains("dual_digits"))
        dual = detail::as_digit_list(j.at("dual_digits"), where + ".dual_digits");
    return make_context(M, primal, dual);
}

inline TestFunction test_function_from_json(const ContextPtr& ctx, const Json& j, const std::string& where)
{
    if (detail::field(j, "kind", where) != "test_function")
        throw InputError(where, "kind is not test_function");
    const Side side = detail::as_side(detail::field(j, "side", where), where + ".side");
    const auto n = detail::as_int(detail::field(j, "n", where), where + ".n");
    const auto K = detail::as_int(detail::field(j, "K", where), where + ".K");
    auto values = detail::as_complex_array(detail::field(j, "values", where), where + ".values");
    return TestFunction(ctx, side, static_cast<int>(n), static_cast<int>(K), std::move(values));
}

inline WalshPolynomial walsh_polynomial_from_json(const ContextPtr& ctx, const Json& j, const std::string& where)
{
    if (detail::field(j, "kind", where) != "walsh_polynomial")
        throw InputError(where, "kind is not walsh_polynomial");
    const auto order = detail::as_int(detail::field(j, "order", where), where + ".order");
    if (order < 1)
        throw InputError(where + ".order", "must be >= 1");
    auto values = detail::as_complex_array(detail::field(j, "values", where), where + ".values");
    return WalshPolynomial::from_values(ctx, static_cast<unsigned>(order), std::move(values));
}

inline MaskFamily mask_family_from_json(const ContextPtr& ctx, const Json& j, const std::string& where)
{
    if (detail::field(j, "kind", where) != "mask_family")
        throw InputError(where, "kind is not mask_family");
    const auto order = detail::as_int(detail::field(j, "order", where), where + ".order");
    if (order < 1)
        throw InputError(where + ".order", "must be >= 1");
    const Json& masks = detail::field(j, "masks", where);
    if (!masks.is_array() || masks.empty())
        throw InputError(where + ".masks", "expected a non-empty list of value tables");
    std::vector<WalshPolynomial> out;
    for (std::size_t nu = 0; nu < masks.size(); ++nu) {
        const std::string at = where + ".masks[" + std::to_string(nu) + "]";
        out.push_back(WalshPolynomial::from_values(ctx, static_cast<unsigned>(order),
                                                   detail::as_complex_array(masks[nu], at)));
    }
    return MaskFamily::from_masks(std::move(out));
}

} // namespace vilenkin::cli
