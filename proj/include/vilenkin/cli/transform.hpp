#pragma once

// One-shot transforms on stored value tables.

#include "vilenkin/cli/driver.hpp"

namespace vilenkin::cli {

/// Group from either a construction config (top-level "matrix") or a
/// manifest ("group" object).
inline ContextPtr load_group(const fs::path& path)
{
    const Json j = read_json_file(path);
    if (j.contains("group"))
        return group_from_json(j.at("group"), path.string() + ".group");
    return group_from_json(j, path.string());
}

inline const std::vector<std::string>& transform_ops()
{
    static const std::vector<std::string> ops = {"fourier", "inverse-fourier", "walsh", "inverse-walsh", "analyze",
                                                 "synthesize"};
    return ops;
}

inline Json run_transform_json(const ContextPtr& ctx, const std::string& op, const Json& input,
                               const std::optional<Json>& family_json, const std::string& where)
{
    if (op == "fourier" || op == "inverse-fourier") {
        const TestFunction f = test_function_from_json(ctx, input, where);
        return test_function_to_json(fourier(f, op == "fourier" ? Direction::forward : Direction::inverse));
    }
    if (op == "walsh" || op == "inverse-walsh") {
        const auto values = detail::as_complex_array(detail::field(input, "values", where), where + ".values");
        const auto out = walsh_transform(*ctx, values, op == "walsh" ? Direction::forward : Direction::inverse);
        return Json{{"values", complex_array_to_json(out)}};
    }
    if (op == "analyze" || op == "synthesize") {
        if (!family_json)
            throw InputError("--family", "filter-bank operations need a mask family file");
        const MaskFamily family = mask_family_from_json(ctx, *family_json, "family");
        const FilterBank bank(family);
        if (op == "analyze") {
            const auto values = detail::as_complex_array(detail::field(input, "values", where), where + ".values");
            const FilterBankBands bands = bank.analyze(values);
            Json details = Json::array();
            for (const auto& band : bands.details)
                details.push_back(complex_array_to_json(band));
            return Json{{"lowpass", complex_array_to_json(bands.lowpass)}, {"details", details}};
        }
        FilterBankBands bands;
        bands.lowpass = detail::as_complex_array(detail::field(input, "lowpass", where), where + ".lowpass");
        const Json& details = detail::field(input, "details", where);
        if (!details.is_array())
            throw InputError(where + ".details", "expected a list of bands");
        for (std::size_t i = 0; i < details.size(); ++i)
            bands.details.push_back(
                detail::as_complex_array(details[i], where + ".details[" + std::to_string(i) + "]"));
        return Json{{"values", complex_array_to_json(bank.synthesize(bands))}};
    }
    throw InputError("--op", "unknown operation '" + op + "'");
}

} // namespace vilenkin::cli
