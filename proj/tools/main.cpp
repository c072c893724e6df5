// spps: command-line front end. Exit status 0 success, 1 tolerance failure, 2 config error,
// 3 numeric failure.

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using Runner = std::vector<double> (*)(const cli::Section&, const cli::Overrides&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> r{{"sl", cli::run_sl},       {"hill", cli::run_hill}, {"well", cli::run_well},
                                                 {"layer", cli::run_layer}, {"zs", cli::run_zs}};
    return r;
}

// `command` picks the runner for `run`; for a named subcommand it must agree if present.
int run_config(const std::string& command, const std::string& config, cli::Overrides o) {
    auto sec = config.empty() ? cli::Section(YAML::Load("{}"), "") : cli::load_config(config);
    std::string cmd = command;
    if (sec.has("command")) {
        const auto named = sec.get<std::string>("command", "");
        if (!cmd.empty() && named != cmd) sec.fail(sec.raw("command"), "config is for '" + named + "', not '" + cmd + "'");
        cmd = named;
    } else {
        sec.raw("command");
    }
    if (cmd.empty()) sec.fail(sec.node(), "missing required key 'command'");
    if (cmd == "reproduce") {
        const auto id = sec.require<std::string>("table");
        if (sec.has("out") && o.out == ".") o.out = sec.get<std::string>("out", ".");
        sec.raw("out");
        if (sec.has("m")) o.m = o.m.value_or(sec.get<int>("m", 0));
        if (sec.has("N")) o.N = o.N.value_or(sec.get<int>("N", 0));
        sec.finish();
        std::filesystem::create_directories(o.out);
        return cli::reproduce(id, o);
    }
    auto it = runners().find(cmd);
    if (it == runners().end()) sec.fail(sec.raw("command"), "unknown command '" + cmd + "'");

    std::vector<double> expect;
    if (sec.has("expect")) expect = sec.numbers("expect");
    sec.raw("expect");
    const double tol = sec.get<double>("tol", 1e-6);
    if (!(tol > 0)) sec.fail(sec.raw("tol"), "tol must be positive");
    if (sec.has("out") && o.out == ".") o.out = sec.get<std::string>("out", ".");
    sec.raw("out");
    std::filesystem::create_directories(o.out);

    auto values = it->second(sec, o);
    return cli::check_expectations(values, expect, tol);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral parameter power series solver"};
    app.require_subcommand(1);
    std::string config, out = ".", table;
    std::optional<int> m, N;

    auto common = [&](CLI::App* sub, bool with_config) {
        if (with_config) sub->add_option("--config", config, "YAML run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory for CSV files");
        sub->add_option("--m", m, "grid intervals (overrides the config)");
        sub->add_option("--N", N, "series order (overrides the config)");
    };
    for (auto& [name, fn] : runners()) common(app.add_subcommand(name, "solve a " + name + " problem"), true);
    auto* run = app.add_subcommand("run", "run the command named in a config file");
    common(run, false);
    run->add_option("--config", config, "YAML run configuration")->required()->check(CLI::ExistingFile);
    auto* rep = app.add_subcommand("reproduce", "recompute a stored reference table");
    common(rep, false);
    rep->add_option("table", table, "table id")->required()->check(CLI::IsMember(cli::table_ids()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        cli::Overrides o{m, N, out};
        auto* sub = app.get_subcommands().front();
        if (sub == rep) {
            std::filesystem::create_directories(o.out);
            return cli::reproduce(table, o);
        }
        return run_config(sub == run ? "" : sub->get_name(), config, o);
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const YAML::Exception& e) {
        std::cerr << "config error: " << config << ":" << e.mark.line + 1 << ": " << e.msg << '\n';
        return 2;
    } catch (const spps::Error& e) {
        std::cerr << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
