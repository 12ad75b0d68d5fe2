// Command-line front end: simulate, fit, report.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "l2boost/cli/commands.hpp"

namespace {

using l2boost::cli::RunSpec;

void add_common(CLI::App& cmd, RunSpec& spec, std::string& format) {
    cmd.add_option("--config", spec.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd.add_option("--set", spec.overrides, "Override a config value, e.g. --set iv.mu=90 (repeatable)");
    cmd.add_option("--output", spec.output_dir, "Artifact directory")->capture_default_str();
    cmd.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}))->capture_default_str();
}

void add_boosting(CLI::App& cmd, RunSpec& spec) {
    cmd.add_option("--variant", spec.variants, "Boosting variant (repeatable)")
        ->check(CLI::IsMember({"ba", "post-ba", "oba"}));
    cmd.add_option("--stop", spec.stop, "Stopping rule")->check(CLI::IsMember({"fixed", "aicc", "tol"}));
    cmd.add_option("--m-max", spec.m_max, "Iteration cap")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Componentwise L2Boosting estimators and Monte Carlo harness"};
    app.require_subcommand(1);

    RunSpec spec;
    std::string format = "text";

    auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo experiment and write summary artifacts");
    add_common(*simulate, spec, format);
    add_boosting(*simulate, spec);
    simulate->add_option("--experiment", spec.experiment, "Design")->check(CLI::IsMember({"iv", "te"}));
    simulate->add_option("--replications", spec.replications, "Number of replications")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", spec.seed, "Master seed");
    simulate->add_option("--workers", spec.workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* fit = app.add_subcommand("fit", "Fit the IV or double-selection estimator on a CSV file");
    add_common(*fit, spec, format);
    add_boosting(*fit, spec);
    fit->add_option("--data", spec.data_path, "Input CSV with header row")->required();
    fit->add_option("--outcome", spec.outcome, "Outcome column")->required();
    fit->add_option("--treatment", spec.treatment, "Treatment / endogenous column")->required();
    fit->add_option("--instruments", spec.instruments, "Instrument columns: a,b,c or prefix*");
    fit->add_option("--controls", spec.controls, "Control columns: a,b,c or prefix*");

    auto* report = app.add_subcommand("report", "Render the table of a previous simulate run");
    add_common(*report, spec, format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return l2boost::cli::kExitUsage;
    }
    spec.format = *l2boost::cli::parse_format(format);

    if (*simulate) return l2boost::cli::cmd_simulate(spec, std::cout, std::cerr);
    if (*fit) return l2boost::cli::cmd_fit(spec, std::cout, std::cerr);
    return l2boost::cli::cmd_report(spec, std::cout, std::cerr);
}
