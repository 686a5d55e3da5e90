// Batch experiment driver: runs one experiment per invocation and writes
// report.json plus trace/orbit/chain artifacts into the output directory.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "semishadow/experiments.hpp"

namespace {

semishadow::Json load_config(const std::string& path) {
    if (path.empty()) return semishadow::Json::object();
    std::ifstream in(path);
    if (!in) throw semishadow::ConfigError("cannot open config file " + path);
    semishadow::Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw semishadow::ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical shadowing laboratory for linear operator semigroups"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool no_timestamp = false;
    app.add_option("--config", config_path, "JSON experiment configuration");
    app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
    app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp from report.json");

    std::string demo_kind;
    for (const char* name :
         {"spectrum", "split", "shadow", "oracle", "chainrec", "conjecture-probe"})
        app.add_subcommand(name, "");
    auto* demo = app.add_subcommand("demo", "canned end-to-end reproduction");
    demo->add_option("kind", demo_kind, "heat | transport | rotation | ghshift")->required();

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    try {
        semishadow::Json config = load_config(config_path);
        if (seed_set) config["seed"] = seed;
        std::string command = app.get_subcommands().front()->get_name();
        if (command == "demo") {
            if (demo_kind != "heat" && demo_kind != "transport" && demo_kind != "rotation" &&
                demo_kind != "ghshift")
                throw semishadow::ConfigError("unknown demo '" + demo_kind + "'");
            command = "demo-" + demo_kind;
        }
        const auto result = semishadow::run_experiment(command, config, out_dir, no_timestamp);
        if (result.report.contains("error"))
            std::cerr << "error: " << result.report["error"]["message"].get<std::string>()
                      << "\n";
        std::cout << "report: " << out_dir << "/report.json\n";
        return result.exit_code;
    } catch (const semishadow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
