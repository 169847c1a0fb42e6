#include "driver.hpp"

#include "momentforge/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>

namespace momentforge::cli {

int run_command_line(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized moment maps for torus actions on products of tori and spheres", "momentforge"};
    std::string scenario_path, out_dir, sign;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> max_den;
    app.add_option("--scenario", scenario_path, "Scenario file")->required();
    app.add_option("--seed", seed, "Sampling seed (overrides MOMENTFORGE_SEED and the scenario)");
    app.add_option("--out", out_dir, "Directory for report.txt and CSV tables");
    app.add_option("--sign", sign, "Sign convention for fundamental fields")->check(CLI::IsMember({"plus", "minus"}));
    app.add_option("--max-denominator", max_den, "Denominator bound for integralization")->check(CLI::PositiveNumber);
    app.require_subcommand(1, 1);
    app.fallthrough();
    for (Stage s : kAllStages) app.add_subcommand(std::string(to_string(s)), "Run " + std::string(to_string(s)) + " and its prerequisites");
    app.add_subcommand("all", "Run every check requested by the scenario");

    std::vector<std::string> storage{"momentforge"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    RunOptions opts;
    const std::string command = app.get_subcommands().front()->get_name();
    if (command != "all") opts.stages = {*parse_stage(command)};
    if (!sign.empty()) opts.sign = geom::parse_sign_convention(sign);
    if (max_den) opts.max_denominator = Integer(std::to_string(*max_den));

    Report report;
    try {
        const Scenario scenario = load_scenario(scenario_path);
        opts.seed = resolve_seed(seed, std::getenv("MOMENTFORGE_SEED"), scenario);
        report = run_scenario(scenario, opts);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    out << report.text();
    if (!out_dir.empty()) {
        try {
            emit_report(report, out_dir);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return report.passed() ? 0 : 1;
}

}  // namespace momentforge::cli
