// vilenkin: construct, verify and reproduce orthogonal wavelet systems on
// Vilenkin groups from the command line.

#include "vilenkin/cli/examples.hpp"
#include "vilenkin/cli/transform.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace cli = vilenkin::cli;

namespace {

int finish(const cli::RunResult& result)
{
    std::cout << result.report.to_text();
    if (!result.message.empty())
        std::cerr << "error: " << result.message << "\n";
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Orthogonal wavelets on generalized Vilenkin groups"};
    app.require_subcommand(1);

    cli::RunOptions options;
    std::string checks;
    app.add_option("--tolerance-scale", options.tolerance_scale, "Multiply every tolerance by this factor")
        ->check(CLI::PositiveNumber);
    app.add_option("--checks", checks, "Comma-separated subset of checks to run");

    std::string config_path, out_dir = "artifacts";
    auto* construct = app.add_subcommand("construct", "Build a wavelet system from a config and export its tables");
    construct->add_option("--config", config_path, "Construction config (JSON)")->required();
    construct->add_option("--out", out_dir, "Artifact directory");

    std::string artifact_dir;
    auto* verify = app.add_subcommand("verify", "Re-run every check from exported tables alone");
    verify->add_option("dir,--artifacts", artifact_dir, "Artifact directory containing manifest.json")->required();

    int example_id = 1;
    auto* example = app.add_subcommand("example", "Reproduce a built-in reference example");
    example->add_option("id", example_id, "Example number (1 or 2)")->required()->check(CLI::IsMember({1, 2}));
    example->add_option("--out", out_dir, "Artifact directory");

    std::string input_path, op, family_path, group_path, transform_out;
    auto* transform = app.add_subcommand("transform", "Apply a transform to a stored value table");
    transform->add_option("--config", group_path, "Config or manifest defining the group")->required();
    transform->add_option("--input", input_path, "Input table (JSON)")->required();
    transform->add_option("--op", op, "Operation")->required()->check(CLI::IsMember(cli::transform_ops()));
    transform->add_option("--family", family_path, "Mask family for analyze/synthesize");
    transform->add_option("--out", transform_out, "Output file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kInputError;
    }

    try {
        options.checks = cli::split_check_list(checks);
        cli::validate_check_names(options.checks, "--checks");

        if (*construct)
            return finish(cli::run_construct(config_path, out_dir, options));
        if (*verify)
            return finish(cli::run_verify(artifact_dir, options));
        if (*example)
            return finish(cli::run_example(example_id, out_dir, options));
        if (*transform) {
            const auto ctx = cli::load_group(group_path);
            std::optional<cli::Json> family;
            if (!family_path.empty())
                family = cli::read_json_file(family_path);
            const auto result = cli::run_transform_json(ctx, op, cli::read_json_file(input_path), family, input_path);
            if (transform_out.empty())
                std::cout << cli::canonical_dump(result);
            else
                cli::write_json_file(transform_out, result);
            return cli::kPass;
        }
    } catch (const cli::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return cli::kInputError;
    } catch (const vilenkin::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kInputError;
    }
    return cli::kInputError;
}
