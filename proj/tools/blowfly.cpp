#include "blowfly/errors.hpp"
#include "blowfly/workbench.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Delay reaction-diffusion blowfly workbench"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int grid = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "sectioned key=value run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--grid", grid, "number of grid nodes (overrides model.n_points)")->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "section.key=value override, repeatable");

    app.add_subcommand("steady", "positive steady state u_r");
    app.add_subcommand("hopf", "Hopf branch and delay thresholds");
    app.add_subcommand("normalform", "normal-form coefficients and bifurcation direction");
    app.add_subcommand("simulate", "integrate the delay PDE");
    app.add_subcommand("average-dde", "integrate the spatially averaged scalar DDE");
    app.add_subcommand("sweep", "Hopf data over a list of r values");
    std::string figure;
    auto* reproduce = app.add_subcommand("reproduce", "rerun a figure parameter set");
    reproduce->add_option("figure", figure, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        const blowfly::Task task = blowfly::parse_task(name);

        std::filesystem::path base_dir;
        blowfly::ConfigEntries entries;
        if (!config_path.empty()) {
            entries = blowfly::load_config_file(config_path);
            base_dir = std::filesystem::path(config_path).parent_path();
        }
        for (const auto& s : overrides) blowfly::apply_override(entries, s);
        if (grid > 0) entries["model.n_points"] = std::to_string(grid);
        if (!out_dir.empty()) entries["output.dir"] = out_dir;

        blowfly::RunConfig cfg = blowfly::make_run_config(task, entries, base_dir);
        cfg.figure = figure;

        const blowfly::TaskOutcome outcome = blowfly::run_task(cfg);
        std::ostream& os = outcome.exit_code == 0 ? std::cout : std::cerr;
        for (const auto& line : outcome.report) os << line << "\n";
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return blowfly::exit_code_for(e);
    }
}
